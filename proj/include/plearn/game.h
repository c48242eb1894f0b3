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

#ifndef PLEARN_GAME_H_
#define PLEARN_GAME_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace plearn {

// One action index per player, 0-based.
using ActionProfile = std::vector<int>;

// Vertex state: every player's strategy is the unit vector of its action in
// `profile`. `index` is the mixed-radix position of `profile` (player 0 most
// significant, last player has stride 1).
struct PureStrategyState {
  ActionProfile profile;
  int index = 0;

  bool operator==(const PureStrategyState&) const = default;
};

// Finite strategic-form game with strictly positive payoffs. Immutable once
// constructed, so a single instance can be shared across threads.
class Game {
 public:
  // Validates dimensions and positivity; throws Error otherwise.
  // payoffs[i] is player i's flat payoff tensor in canonical profile order.
  Game(std::vector<int> num_actions, std::vector<std::vector<double>> payoffs,
       std::string name = "");

  int num_players() const { return static_cast<int>(num_actions_.size()); }
  int num_actions(int player) const { return num_actions_[player]; }
  const std::vector<int>& action_counts() const { return num_actions_; }
  int num_profiles() const { return num_profiles_; }
  const std::string& name() const { return name_; }
  const std::vector<std::vector<double>>& payoff_tensors() const {
    return payoffs_;
  }

  double Payoff(int player, const ActionProfile& profile) const {
    return payoffs_[player][ProfileIndex(profile)];
  }
  double PayoffAt(int player, int profile_index) const {
    return payoffs_[player][profile_index];
  }
  double MaxPayoff() const { return max_payoff_; }
  double MinPayoff() const { return min_payoff_; }

  int ProfileIndex(const ActionProfile& profile) const;
  ActionProfile ProfileFromIndex(int index) const;
  bool IsValidProfile(const ActionProfile& profile) const;

 private:
  std::vector<int> num_actions_;
  std::vector<int> strides_;
  std::vector<std::vector<double>> payoffs_;
  std::string name_;
  int num_profiles_ = 0;
  double max_payoff_ = 0.0;
  double min_payoff_ = 0.0;
};

// Game document: {"players": n, "actions": [m_1, ...],
//                 "payoffs": [[...], ...], "name": "..."}.
Game LoadGame(const nlohmann::json& doc);
Game LoadGameFile(const std::string& path);
nlohmann::json GameToJson(const Game& game);

std::vector<PureStrategyState> EnumeratePureStates(const Game& game);
PureStrategyState PureStateFromIndex(const Game& game, int index);

// No player has a strictly improving unilateral deviation.
bool IsPureNash(const Game& game, const ActionProfile& profile);
std::vector<ActionProfile> PureNashProfiles(const Game& game);

// "0_1_0" style label used in reports.
std::string ProfileLabel(const ActionProfile& profile);

using BuiltinParams = std::map<std::string, double>;

// Fixtures: coordination, anticoordination, shifted_rps, constant,
// random_positive. See README for parameters and defaults.
Game BuiltinGame(const std::string& name, const BuiltinParams& params = {});

// Parses "name" or "name:key=value,key=value".
Game BuiltinGameFromSpec(const std::string& spec);

}  // namespace plearn

#endif  // PLEARN_GAME_H_
