// Copyright 2026 The plearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLEARN_EXPERIMENT_H_
#define PLEARN_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plearn/game.h"

namespace plearn {

// Everything one CLI invocation needs. Loaded from a JSON config document
// (same format family as game files), then overridden by flags.
struct ExperimentConfig {
  std::string command;

  // Game source: exactly one of these.
  std::string game_path;
  std::string builtin;  // "name" or "name:key=value,..."
  std::optional<nlohmann::json> inline_game;

  double epsilon = 0.05;
  double lambda = 0.0;
  std::vector<double> lambdas;
  double delta = 1e-3;
  std::int64_t runs_per_state = 10'000;
  std::int64_t t_max = 1'000'000;
  // simulate: horizon (default 10^6). sweep: horizon for every lambda
  // (default max(10^6, 100 |S| / lambda)).
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> burn_in;
  std::uint64_t seed = 0;
  std::string out = "out";
  int workers = 0;

  // simulate
  std::int64_t runs = 1;
  std::int64_t stride = 0;  // 0: about 1000 samples per trajectory
  bool stop_on_absorption = true;

  // estimate-chain / sweep
  double censoring_budget = 1e-3;

  // stationary
  std::string chain_path;
};

// Reads a config document. Unknown keys are rejected by name.
void ApplyConfigDocument(const nlohmann::json& doc, ExperimentConfig& config);

Game ResolveGame(const ExperimentConfig& config);

// FNV-1a over the canonical JSON of the fields the command actually uses
// (game content rather than its path). Output location and worker count are
// excluded: they do not change results.
std::uint64_t ConfigHash(const ExperimentConfig& config);
nlohmann::json SemanticConfig(const ExperimentConfig& config);

// Entry point of the plearn tool. Exit codes: 0 success, 2 invalid
// configuration or input, 1 runtime failure.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plearn

#endif  // PLEARN_EXPERIMENT_H_
