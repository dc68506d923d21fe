// Copyright 2020 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epimeas/io.h"

#include <fstream>
#include <sstream>
#include <utility>

#include "epimeas/errors.h"

namespace epimeas {

namespace {

using nlohmann::json;

const json& Field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw ValidationError(std::string("missing field '") + name + "'");
  }
  return doc.at(name);
}

template <typename T>
T Get(const json& doc, const char* name) {
  try {
    return Field(doc, name).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + name + "': " + e.what());
  }
}

template <typename T>
std::vector<T> GetVector(const json& doc, const char* name, int n) {
  std::vector<T> values = Get<std::vector<T>>(doc, name);
  if (values.size() != static_cast<size_t>(n)) {
    throw ValidationError(std::string("field '") + name + "' needs " +
                          std::to_string(n) + " entries");
  }
  return values;
}

void ReadCostList(const json& doc, const char* name, StateKind kind,
                  MeasurementCosts& costs) {
  for (const auto& entry : Get<std::vector<std::vector<double>>>(doc, name)) {
    if (entry.size() != 3) {
      throw ValidationError(std::string("'") + name + "' entries are [k, i, cost]");
    }
    costs.Set(static_cast<int>(entry[0]), static_cast<int>(entry[1]) - 1, kind,
              entry[2]);
  }
}

MeasurementCosts ParseCosts(const json& doc, int n) {
  MeasurementCosts costs(Get<int>(doc, "t1"), Get<int>(doc, "t2"), n);
  ReadCostList(doc, "cost_x", StateKind::kInfected, costs);
  ReadCostList(doc, "cost_r", StateKind::kRecovered, costs);
  return costs;
}

BetaPrior ParsePrior(const json& doc, const char* name) {
  const json& p = Field(doc, name);
  return {Get<double>(p, "a"), Get<double>(p, "b"), Get<double>(p, "lo"),
          Get<double>(p, "hi")};
}

json PriorToJson(const BetaPrior& prior) {
  return {{"a", prior.shape_a}, {"b", prior.shape_b}, {"lo", prior.lo}, {"hi", prior.hi}};
}

}  // namespace

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

NetworkInstance ParseNetworkInstance(const json& doc) {
  const int n = Get<int>(doc, "n");
  std::vector<Edge> edges;
  for (const auto& entry : Get<std::vector<std::vector<double>>>(doc, "edges")) {
    if (entry.size() != 3) throw ValidationError("edges are [from, to, weight]");
    edges.push_back({static_cast<int>(entry[0]) - 1, static_cast<int>(entry[1]) - 1,
                     entry[2]});
  }
  EpidemicNetwork network(n, std::move(edges), Get<double>(doc, "h"));
  InitialCondition initial{GetVector<double>(doc, "s0", n),
                           GetVector<double>(doc, "x0", n),
                           GetVector<double>(doc, "r0", n)};
  return {std::move(network), std::move(initial)};
}

PimsInstance ParsePimsInstance(const json& network_doc, const json& costs_doc) {
  NetworkInstance base = ParseNetworkInstance(network_doc);
  const int n = base.network.num_nodes();
  return PimsInstance(std::move(base.network), std::move(base.initial),
                      ParseCosts(costs_doc, n));
}

PemsInstance ParsePemsInstance(const json& doc) {
  NetworkInstance base = ParseNetworkInstance(doc);
  const int n = base.network.num_nodes();
  PemsInstance instance{std::move(base.network),
                        std::move(base.initial),
                        ParseCosts(doc, n),
                        Get<double>(doc, "budget"),
                        GetVector<int>(doc, "zeta", n),
                        GetVector<int>(doc, "eta", n),
                        GetVector<double>(doc, "Nx", n),
                        GetVector<double>(doc, "Nr", n),
                        GetVector<double>(doc, "N", n),
                        ParsePrior(doc, "beta_prior"),
                        ParsePrior(doc, "delta_prior")};
  ValidatePemsInstance(instance);
  return instance;
}

json NetworkToJson(const EpidemicNetwork& network, const InitialCondition& initial) {
  json edges = json::array();
  for (const Edge& e : network.edges()) {
    edges.push_back({e.from + 1, e.to + 1, e.weight});
  }
  return {{"n", network.num_nodes()}, {"h", network.step()},       {"edges", edges},
          {"s0", initial.susceptible}, {"x0", initial.infected}, {"r0", initial.recovered}};
}

json CostsToJson(const MeasurementCosts& costs) {
  json cost_x = json::array();
  json cost_r = json::array();
  for (int k = costs.first_time(); k <= costs.last_time(); ++k) {
    for (int i = 0; i < costs.num_nodes(); ++i) {
      if (auto c = costs.Get(k, i, StateKind::kInfected)) cost_x.push_back({k, i + 1, *c});
      if (auto b = costs.Get(k, i, StateKind::kRecovered)) cost_r.push_back({k, i + 1, *b});
    }
  }
  return {{"t1", costs.first_time()}, {"t2", costs.last_time()},
          {"cost_x", cost_x}, {"cost_r", cost_r}};
}

json PemsInstanceToJson(const PemsInstance& instance) {
  json doc = NetworkToJson(instance.network, instance.initial);
  doc.update(CostsToJson(instance.costs));
  doc["budget"] = instance.budget;
  doc["zeta"] = instance.infected_copies;
  doc["eta"] = instance.recovered_copies;
  doc["Nx"] = instance.infected_batch;
  doc["Nr"] = instance.recovered_batch;
  doc["N"] = instance.test_capacity;
  doc["beta_prior"] = PriorToJson(instance.beta_prior);
  doc["delta_prior"] = PriorToJson(instance.delta_prior);
  return doc;
}

}  // namespace epimeas
