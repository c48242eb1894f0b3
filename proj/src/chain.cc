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

#include "plearn/chain.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "plearn/error.h"
#include "plearn/parallel.h"

namespace plearn {
namespace {

constexpr std::int64_t kRunsPerTask = 256;

struct RowTally {
  std::vector<std::int64_t> counts;
  std::int64_t censored = 0;
};

Matrix Restrict(const Matrix& probs, const std::vector<int>& members) {
  const int k = static_cast<int>(members.size());
  Matrix sub(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) sub[a][b] = probs[members[a]][members[b]];
  }
  return sub;
}

std::vector<double> LeftMultiply(const std::vector<double>& pi, const Matrix& probs) {
  const int n = static_cast<int>(probs.size());
  std::vector<double> out(n, 0.0);
  for (int s = 0; s < n; ++s) {
    if (pi[s] == 0.0) continue;
    for (int t = 0; t < n; ++t) out[t] += pi[s] * probs[s][t];
  }
  return out;
}

void Normalize(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
}

}  // namespace

std::int64_t LiftedChain::RowTotal(int s) const {
  if (!has_counts()) return 0;
  return std::accumulate(counts[s].begin(), counts[s].end(), std::int64_t{0});
}

void CheckStochastic(const Matrix& probs, double tolerance) {
  const std::size_t n = probs.size();
  if (n == 0) throw Error(ErrorCode::kNotStochastic, "empty transition matrix");
  for (std::size_t s = 0; s < n; ++s) {
    if (probs[s].size() != n) {
      throw Error(ErrorCode::kNotStochastic,
                  "row " + std::to_string(s) + " has " +
                      std::to_string(probs[s].size()) + " entries, expected " +
                      std::to_string(n));
    }
    double sum = 0.0;
    for (double p : probs[s]) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::kNotStochastic,
                    "row " + std::to_string(s) + " has a negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw Error(ErrorCode::kNotStochastic,
                  "row " + std::to_string(s) + " sums to " + std::to_string(sum));
    }
  }
}

LiftedChain ChainFromMatrix(const Matrix& probs) {
  CheckStochastic(probs);
  LiftedChain chain;
  const int n = static_cast<int>(probs.size());
  chain.action_counts = {n};
  for (int s = 0; s < n; ++s) chain.states.push_back({{s}, s});
  chain.probs = probs;
  chain.censored.assign(n, 0);
  return chain;
}

JointState TrembleOnce(const PureStrategyState& s, const Game& game,
                       double epsilon, Rng& rng) {
  JointState z = PureState(s, game);
  const int trembler = rng.UniformInt(game.num_players());
  ActionProfile realized = s.profile;
  realized[trembler] = rng.UniformInt(game.num_actions(trembler));
  ApplyProfile(z, realized, game, epsilon);
  return z;
}

LiftedChain EstimateLiftedChain(const Game& game, const ChainOptions& options) {
  DynamicsConfig cfg{options.epsilon, 0.0, options.seed, options.t_max};
  ValidateConfig(cfg, game);
  if (!(options.delta > 0.0 && options.delta < 0.5)) {
    throw Error(ErrorCode::kInvalidDelta,
                "delta: must lie in (0, 0.5), got " + std::to_string(options.delta));
  }
  if (options.runs_per_state < 1) {
    throw Error(ErrorCode::kInvalidParams, "runs_per_state: must be >= 1");
  }
  if (options.t_max < 0) {
    throw Error(ErrorCode::kInvalidParams, "t_max: must be >= 0");
  }
  if (!(options.censoring_budget >= 0.0 && options.censoring_budget <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "censoring_budget: must lie in [0, 1]");
  }

  const int num_states = game.num_profiles();
  const std::vector<PureStrategyState> states = EnumeratePureStates(game);
  const std::int64_t chunks =
      (options.runs_per_state + kRunsPerTask - 1) / kRunsPerTask;
  std::vector<RowTally> tallies(num_states * chunks);

  ParallelFor(num_states * chunks, options.workers, [&](std::int64_t task) {
    const int s = static_cast<int>(task / chunks);
    const std::int64_t first = (task % chunks) * kRunsPerTask;
    const std::int64_t last = std::min(first + kRunsPerTask, options.runs_per_state);
    RowTally& tally = tallies[task];
    tally.counts.assign(num_states, 0);
    for (std::int64_t run = first; run < last; ++run) {
      Rng rng(DeriveSeed(options.seed, {static_cast<std::uint64_t>(s),
                                        static_cast<std::uint64_t>(run)}));
      JointState z = TrembleOnce(states[s], game, options.epsilon, rng);
      int hit = ClassifyState(z, game, options.delta);
      for (std::int64_t t = 0; hit < 0 && t < options.t_max; ++t) {
        StepInPlace(z, game, cfg, rng);
        hit = ClassifyState(z, game, options.delta);
      }
      if (hit < 0) {
        ++tally.censored;
      } else {
        ++tally.counts[hit];
      }
    }
  });

  LiftedChain chain;
  chain.action_counts = game.action_counts();
  chain.states = states;
  chain.counts.assign(num_states, std::vector<std::int64_t>(num_states, 0));
  chain.probs.assign(num_states, std::vector<double>(num_states, 0.0));
  chain.censored.assign(num_states, 0);
  chain.epsilon = options.epsilon;
  chain.delta = options.delta;
  chain.runs_per_state = options.runs_per_state;
  chain.t_max = options.t_max;
  chain.seed = options.seed;

  for (int s = 0; s < num_states; ++s) {
    for (std::int64_t c = 0; c < chunks; ++c) {
      const RowTally& tally = tallies[s * chunks + c];
      for (int t = 0; t < num_states; ++t) chain.counts[s][t] += tally.counts[t];
      chain.censored[s] += tally.censored;
    }
    const double censored_fraction =
        static_cast<double>(chain.censored[s]) / options.runs_per_state;
    const std::int64_t total = chain.RowTotal(s);
    if (total == 0 || censored_fraction > options.censoring_budget) {
      throw Error(ErrorCode::kExcessiveCensoring,
                  "state " + ProfileLabel(states[s].profile) + ": " +
                      std::to_string(chain.censored[s]) + " of " +
                      std::to_string(options.runs_per_state) +
                      " runs unabsorbed after " + std::to_string(options.t_max) +
                      " steps");
    }
    for (int t = 0; t < num_states; ++t) {
      chain.probs[s][t] = static_cast<double>(chain.counts[s][t]) / total;
    }
  }
  return chain;
}

double MaxStandardError(const LiftedChain& chain) {
  double worst = 0.0;
  for (int s = 0; s < chain.size(); ++s) {
    const double n = static_cast<double>(chain.RowTotal(s));
    if (n <= 0) continue;
    for (double p : chain.probs[s]) worst = std::max(worst, std::sqrt(p * (1 - p) / n));
  }
  return worst;
}

ChainClasses CommunicatingClasses(const Matrix& weights) {
  const int n = static_cast<int>(weights.size());
  // Tarjan's algorithm.
  std::vector<int> index(n, -1), low(n, 0), component(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> classes;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w = 0; w < n; ++w) {
      if (!(weights[v][w] > 0.0)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> members;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        members.push_back(w);
      } while (w != v);
      std::sort(members.begin(), members.end());
      classes.push_back(std::move(members));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  std::sort(classes.begin(), classes.end());

  ChainClasses result;
  for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
    for (int v : classes[c]) component[v] = c;
  }
  result.closed.assign(classes.size(), true);
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (weights[v][w] > 0.0 && component[v] != component[w]) {
        result.closed[component[v]] = false;
      }
    }
  }
  result.irreducible = classes.size() == 1;
  result.classes = std::move(classes);
  return result;
}

ChainClasses CheckIrreducible(const LiftedChain& chain) {
  if (!chain.has_counts()) return CommunicatingClasses(chain.probs);
  Matrix weights(chain.size(), std::vector<double>(chain.size(), 0.0));
  for (int s = 0; s < chain.size(); ++s) {
    for (int t = 0; t < chain.size(); ++t) {
      weights[s][t] = chain.counts[s][t] >= 1 ? 1.0 : 0.0;
    }
  }
  return CommunicatingClasses(weights);
}

PowerIterationResult PowerIteration(const Matrix& probs, std::vector<double> start,
                                    double tolerance, std::int64_t max_iterations) {
  PowerIterationResult result;
  std::vector<double> pi = std::move(start);
  Normalize(pi);
  for (std::int64_t k = 1; k <= max_iterations; ++k) {
    std::vector<double> next = LeftMultiply(pi, probs);
    double change = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) {
      next[s] = 0.5 * (next[s] + pi[s]);
      change += std::abs(next[s] - pi[s]);
    }
    pi = std::move(next);
    result.iterations = k;
    if (change <= tolerance) {
      result.converged = true;
      break;
    }
  }
  Normalize(pi);
  result.pi = std::move(pi);
  return result;
}

std::vector<double> DirectStationary(const Matrix& probs) {
  const int n = static_cast<int>(probs.size());
  Eigen::MatrixXd a(n, n);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) a(t, s) = probs[s][t] - (s == t ? 1.0 : 0.0);
  }
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kNoConvergence,
                "direct solve: invariant vector is not unique");
  }
  const Eigen::VectorXd x = lu.solve(b);
  std::vector<double> pi(n);
  for (int s = 0; s < n; ++s) pi[s] = std::max(0.0, x(s));
  Normalize(pi);
  return pi;
}

double L1Distance(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] - q[k]);
  return d;
}

StationaryDistribution SolveStationary(const Matrix& probs) {
  CheckStochastic(probs);
  const int n = static_cast<int>(probs.size());
  const ChainClasses classes = CommunicatingClasses(probs);

  StationaryDistribution result;
  int closed_count = 0;
  for (bool c : classes.closed) closed_count += c ? 1 : 0;
  result.unique = closed_count == 1;

  // Recurrent class reached from state 0: breadth-first search, then the
  // closed class with the smallest member among those reachable.
  std::vector<bool> reached(n, false);
  std::vector<int> queue{0};
  reached[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (int t = 0; t < n; ++t) {
      if (probs[queue[head]][t] > 0.0 && !reached[t]) {
        reached[t] = true;
        queue.push_back(t);
      }
    }
  }
  const std::vector<int>* target = nullptr;
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    if (classes.closed[c] && reached[classes.classes[c].front()]) {
      target = &classes.classes[c];
      break;
    }
  }
  const std::vector<int>& members = *target;
  const Matrix sub = Restrict(probs, members);
  const int k = static_cast<int>(members.size());

  PowerIterationResult power =
      PowerIteration(sub, std::vector<double>(k, 1.0 / k));
  result.iterations = power.iterations;
  std::vector<double> sub_pi = power.pi;
  if (k <= kDirectSolveLimit) {
    std::vector<double> direct = DirectStationary(sub);
    if (power.converged) {
      result.direct_gap_l1 = L1Distance(power.pi, direct);
    } else {
      sub_pi = std::move(direct);
      result.used_direct_solve = true;
    }
  } else if (!power.converged) {
    throw Error(ErrorCode::kNoConvergence,
                "power iteration did not converge in " +
                    std::to_string(power.iterations) + " iterations");
  }

  result.pi.assign(n, 0.0);
  for (int a = 0; a < k; ++a) result.pi[members[a]] = sub_pi[a];
  result.residual_l1 = L1Distance(LeftMultiply(result.pi, probs), result.pi);
  if (result.residual_l1 > 1e-10) {
    throw Error(ErrorCode::kNoConvergence,
                "stationary residual " + std::to_string(result.residual_l1) +
                    " exceeds 1e-10");
  }
  return result;
}

StationaryDistribution SolveStationary(const LiftedChain& chain) {
  return SolveStationary(chain.probs);
}

}  // namespace plearn
