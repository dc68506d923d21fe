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

// JSON instance files. Node ids are 1-based on disk.
//
// Network part:  {"n", "h", "edges": [[from, to, weight], ...], "s0", "x0", "r0"}
// PIMS costs:    {"t1", "t2", "cost_x": [[k, i, c], ...], "cost_r": [[k, i, b], ...]}
// PEMS instance: network part plus "t1", "t2", "budget", "cost_x", "cost_r",
//                "zeta", "eta", "Nx", "Nr", "N",
//                "beta_prior": {"a", "b", "lo", "hi"}, "delta_prior": {...}

#ifndef EPIMEAS_IO_H_
#define EPIMEAS_IO_H_

#include <string>

#include "json.hpp"

#include "epimeas/network.h"
#include "epimeas/pems.h"
#include "epimeas/pims.h"

namespace epimeas {

struct NetworkInstance {
  EpidemicNetwork network;
  InitialCondition initial;
};

// All parsers throw ValidationError on missing or mistyped fields.
nlohmann::json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

NetworkInstance ParseNetworkInstance(const nlohmann::json& doc);
PimsInstance ParsePimsInstance(const nlohmann::json& network_doc,
                               const nlohmann::json& costs_doc);
PemsInstance ParsePemsInstance(const nlohmann::json& doc);

nlohmann::json NetworkToJson(const EpidemicNetwork& network,
                             const InitialCondition& initial);
nlohmann::json PemsInstanceToJson(const PemsInstance& instance);
nlohmann::json CostsToJson(const MeasurementCosts& costs);

}  // namespace epimeas

#endif  // EPIMEAS_IO_H_
