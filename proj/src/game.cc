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

#include "plearn/game.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "plearn/error.h"
#include "plearn/rng.h"

namespace plearn {
namespace {

constexpr int kMaxProfiles = 1 << 24;

std::string Describe(const ActionProfile& profile) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) os << ",";
    os << profile[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

Game::Game(std::vector<int> num_actions,
           std::vector<std::vector<double>> payoffs, std::string name)
    : num_actions_(std::move(num_actions)),
      payoffs_(std::move(payoffs)),
      name_(std::move(name)) {
  const int n = num_players();
  if (n < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "players: need at least 2 players, got " + std::to_string(n));
  }
  if (static_cast<int>(payoffs_.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "payoffs: expected " + std::to_string(n) +
                    " payoff tensors, got " + std::to_string(payoffs_.size()));
  }
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (num_actions_[i] < 2) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "actions[" + std::to_string(i) +
                      "]: each player needs at least 2 actions, got " +
                      std::to_string(num_actions_[i]));
    }
    total *= num_actions_[i];
    if (total > kMaxProfiles) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "actions: too many action profiles");
    }
  }
  num_profiles_ = static_cast<int>(total);

  strides_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * num_actions_[i + 1];

  max_payoff_ = 0.0;
  min_payoff_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(payoffs_[i].size()) != num_profiles_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "payoffs[" + std::to_string(i) + "]: expected " +
                      std::to_string(num_profiles_) + " entries, got " +
                      std::to_string(payoffs_[i].size()));
    }
    for (int k = 0; k < num_profiles_; ++k) {
      const double u = payoffs_[i][k];
      if (!(u > 0.0) || !std::isfinite(u)) {
        std::ostringstream os;
        os << "payoffs[" << i << "][" << k << "]: payoff must be finite and > 0"
           << " (profile " << Describe(ProfileFromIndex(k)) << ", got " << u
           << ")";
        throw Error(ErrorCode::kNonPositivePayoff, os.str());
      }
      max_payoff_ = std::max(max_payoff_, u);
      min_payoff_ = std::min(min_payoff_, u);
    }
  }
}

int Game::ProfileIndex(const ActionProfile& profile) const {
  int index = 0;
  for (int i = 0; i < num_players(); ++i) index += profile[i] * strides_[i];
  return index;
}

ActionProfile Game::ProfileFromIndex(int index) const {
  ActionProfile profile(num_players());
  for (int i = num_players() - 1; i >= 0; --i) {
    profile[i] = index % num_actions_[i];
    index /= num_actions_[i];
  }
  return profile;
}

bool Game::IsValidProfile(const ActionProfile& profile) const {
  if (static_cast<int>(profile.size()) != num_players()) return false;
  for (int i = 0; i < num_players(); ++i) {
    if (profile[i] < 0 || profile[i] >= num_actions_[i]) return false;
  }
  return true;
}

Game LoadGame(const nlohmann::json& doc) {
  using nlohmann::json;
  auto malformed = [](const std::string& what) {
    return Error(ErrorCode::kMalformedDocument, what);
  };
  if (!doc.is_object()) throw malformed("document: expected a JSON object");
  for (const char* field : {"players", "actions", "payoffs"}) {
    if (!doc.contains(field)) {
      throw malformed(std::string(field) + ": missing required field");
    }
  }
  const json& players = doc["players"];
  if (!players.is_number_integer()) {
    throw malformed("players: expected an integer");
  }
  const json& actions = doc["actions"];
  if (!actions.is_array()) throw malformed("actions: expected a list of integers");
  std::vector<int> counts;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!actions[i].is_number_integer()) {
      throw malformed("actions[" + std::to_string(i) + "]: expected an integer");
    }
    counts.push_back(actions[i].get<int>());
  }
  if (players.get<long long>() != static_cast<long long>(counts.size())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "actions: players is " + std::to_string(players.get<long long>()) +
                    " but actions lists " + std::to_string(counts.size()) +
                    " players");
  }
  const json& payoffs = doc["payoffs"];
  if (!payoffs.is_array()) throw malformed("payoffs: expected a list of lists");
  std::vector<std::vector<double>> tensors;
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    if (!payoffs[i].is_array()) {
      throw malformed("payoffs[" + std::to_string(i) + "]: expected a list");
    }
    std::vector<double> tensor;
    for (std::size_t k = 0; k < payoffs[i].size(); ++k) {
      if (!payoffs[i][k].is_number()) {
        throw malformed("payoffs[" + std::to_string(i) + "][" +
                        std::to_string(k) + "]: expected a number");
      }
      tensor.push_back(payoffs[i][k].get<double>());
    }
    tensors.push_back(std::move(tensor));
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw malformed("name: expected a string");
    name = doc["name"].get<std::string>();
  }
  return Game(std::move(counts), std::move(tensors), std::move(name));
}

Game LoadGameFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open game file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, path + ": " + e.what());
  }
  return LoadGame(doc);
}

nlohmann::json GameToJson(const Game& game) {
  nlohmann::json doc;
  doc["players"] = game.num_players();
  doc["actions"] = game.action_counts();
  doc["payoffs"] = game.payoff_tensors();
  if (!game.name().empty()) doc["name"] = game.name();
  return doc;
}

std::vector<PureStrategyState> EnumeratePureStates(const Game& game) {
  std::vector<PureStrategyState> states;
  states.reserve(game.num_profiles());
  for (int k = 0; k < game.num_profiles(); ++k) {
    states.push_back({game.ProfileFromIndex(k), k});
  }
  return states;
}

PureStrategyState PureStateFromIndex(const Game& game, int index) {
  return {game.ProfileFromIndex(index), index};
}

bool IsPureNash(const Game& game, const ActionProfile& profile) {
  ActionProfile deviation = profile;
  for (int i = 0; i < game.num_players(); ++i) {
    const double current = game.Payoff(i, profile);
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (a == profile[i]) continue;
      deviation[i] = a;
      if (game.Payoff(i, deviation) > current) return false;
    }
    deviation[i] = profile[i];
  }
  return true;
}

std::vector<ActionProfile> PureNashProfiles(const Game& game) {
  std::vector<ActionProfile> result;
  for (int k = 0; k < game.num_profiles(); ++k) {
    ActionProfile profile = game.ProfileFromIndex(k);
    if (IsPureNash(game, profile)) result.push_back(std::move(profile));
  }
  return result;
}

std::string ProfileLabel(const ActionProfile& profile) {
  std::string label;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) label += '_';
    label += std::to_string(profile[i]);
  }
  return label;
}

namespace {

class ParamReader {
 public:
  ParamReader(std::string game, const BuiltinParams& params)
      : game_(std::move(game)), params_(params) {}

  double Real(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  int Count(const std::string& key, int fallback, int minimum) {
    const double v = Real(key, fallback);
    if (v != std::floor(v) || v < minimum || v > 1e6) {
      throw Error(ErrorCode::kInvalidParams,
                  game_ + "." + key + ": expected an integer >= " +
                      std::to_string(minimum));
    }
    return static_cast<int>(v);
  }

  double Positive(const std::string& key, double fallback) {
    const double v = Real(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidParams,
                  game_ + "." + key + ": must be finite and > 0");
    }
    return v;
  }

  // Rejects keys the fixture does not understand.
  void Finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) {
        throw Error(ErrorCode::kInvalidParams,
                    game_ + "." + key + ": unknown parameter");
      }
    }
  }

 private:
  std::string game_;
  const BuiltinParams& params_;
  std::set<std::string> used_;
};

template <typename PayoffFn>
Game Tabulate(const std::string& name, std::vector<int> counts, PayoffFn fn) {
  const int n = static_cast<int>(counts.size());
  std::int64_t total = 1;
  for (int m : counts) total *= m;
  if (total > kMaxProfiles) {
    throw Error(ErrorCode::kInvalidParams, name + ": too many action profiles");
  }
  std::vector<std::vector<double>> payoffs(n, std::vector<double>(total));
  ActionProfile profile(n, 0);
  for (std::int64_t k = 0; k < total; ++k) {
    std::int64_t rest = k;
    for (int i = n - 1; i >= 0; --i) {
      profile[i] = static_cast<int>(rest % counts[i]);
      rest /= counts[i];
    }
    for (int i = 0; i < n; ++i) payoffs[i][k] = fn(i, profile);
  }
  return Game(std::move(counts), std::move(payoffs), name);
}

}  // namespace

Game BuiltinGame(const std::string& name, const BuiltinParams& params) {
  ParamReader p(name, params);
  if (name == "coordination") {
    const int n = p.Count("n", 2, 2);
    const int m = p.Count("m", 2, 2);
    const double match = p.Positive("match", 1.0);
    const double mismatch = p.Positive("mismatch", 0.5);
    p.Finish();
    return Tabulate(name, std::vector<int>(n, m),
                    [&](int, const ActionProfile& a) {
                      const bool all_equal =
                          std::all_of(a.begin(), a.end(),
                                      [&](int x) { return x == a[0]; });
                      return all_equal ? match : mismatch;
                    });
  }
  if (name == "anticoordination") {
    const int n = p.Count("n", 2, 2);
    const int m = p.Count("m", 2, 2);
    const double apart = p.Positive("apart", 1.0);
    const double clash = p.Positive("clash", 0.5);
    p.Finish();
    return Tabulate(name, std::vector<int>(n, m),
                    [&](int i, const ActionProfile& a) {
                      for (int j = 0; j < static_cast<int>(a.size()); ++j) {
                        if (j != i && a[j] == a[i]) return clash;
                      }
                      return apart;
                    });
  }
  if (name == "shifted_rps") {
    const double win = p.Positive("win", 3.0);
    const double draw = p.Positive("draw", 2.0);
    const double lose = p.Positive("lose", 1.0);
    p.Finish();
    // 0 = rock, 1 = paper, 2 = scissors; action (k+1) mod 3 beats k.
    return Tabulate(name, {3, 3}, [&](int i, const ActionProfile& a) {
      const int mine = a[i];
      const int theirs = a[1 - i];
      if (mine == theirs) return draw;
      return (mine - theirs + 3) % 3 == 1 ? win : lose;
    });
  }
  if (name == "constant") {
    const int n = p.Count("n", 2, 2);
    const int m = p.Count("m", 2, 2);
    const double value = p.Positive("value", 1.0);
    p.Finish();
    return Tabulate(name, std::vector<int>(n, m),
                    [&](int, const ActionProfile&) { return value; });
  }
  if (name == "random_positive") {
    const int n = p.Count("n", 2, 2);
    const int m = p.Count("m", 2, 2);
    const double p_min = p.Real("p_min", 0.1);
    const double p_max = p.Real("p_max", 1.0);
    const double seed = p.Real("seed", 0.0);
    p.Finish();
    if (!(p_min > 0.0)) {
      throw Error(ErrorCode::kInvalidParams,
                  "random_positive.p_min: must be > 0");
    }
    if (!(p_max >= p_min) || !std::isfinite(p_max)) {
      throw Error(ErrorCode::kInvalidParams,
                  "random_positive.p_max: must be finite and >= p_min");
    }
    if (seed < 0 || seed != std::floor(seed) || seed > 9.0e15) {
      throw Error(ErrorCode::kInvalidParams,
                  "random_positive.seed: expected a non-negative integer");
    }
    Rng rng(DeriveSeed(static_cast<std::uint64_t>(seed), {0x67616d65}));
    std::vector<int> counts(n, m);
    std::int64_t total = 1;
    for (int c : counts) total *= c;
    if (total > kMaxProfiles) {
      throw Error(ErrorCode::kInvalidParams, name + ": too many action profiles");
    }
    std::vector<std::vector<double>> payoffs(n, std::vector<double>(total));
    for (auto& tensor : payoffs) {
      for (double& u : tensor) u = p_min + (p_max - p_min) * rng.Uniform();
    }
    return Game(std::move(counts), std::move(payoffs), name);
  }
  throw Error(ErrorCode::kUnknownGame, "builtin: no game named '" + name + "'");
}

Game BuiltinGameFromSpec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  BuiltinParams params;
  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kInvalidParams,
                    "builtin: expected key=value, got '" + item + "'");
      }
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0') {
        throw Error(ErrorCode::kInvalidParams,
                    "builtin." + key + ": not a number: '" + value + "'");
      }
      params[key] = v;
    }
  }
  return BuiltinGame(name, params);
}

}  // namespace plearn
