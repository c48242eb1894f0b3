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

#ifndef PLEARN_CHAIN_H_
#define PLEARN_CHAIN_H_

#include <cstdint>
#include <vector>

#include "plearn/dynamics.h"
#include "plearn/game.h"
#include "plearn/rng.h"

namespace plearn {

using Matrix = std::vector<std::vector<double>>;

// Finite chain over pure strategy states: one single-player tremble from s,
// then the unperturbed process until it settles near some s'.
struct LiftedChain {
  std::vector<int> action_counts;
  std::vector<PureStrategyState> states;
  // counts[s][s']: runs from s absorbed at s'. Empty for chains built
  // directly from a probability matrix.
  std::vector<std::vector<std::int64_t>> counts;
  Matrix probs;
  std::vector<std::int64_t> censored;

  // Estimation parameters; zero for hand-built chains.
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t runs_per_state = 0;
  std::int64_t t_max = 0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(probs.size()); }
  bool has_counts() const { return !counts.empty(); }
  std::int64_t RowTotal(int s) const;

  bool operator==(const LiftedChain&) const = default;
};

// Chain over states 0..k-1 (single-coordinate profiles) with the given
// transition matrix. Throws NotStochastic.
LiftedChain ChainFromMatrix(const Matrix& probs);

// Picks the trembling player uniformly, redraws its action uniformly, and
// applies one strategy update at the realized profile.
JointState TrembleOnce(const PureStrategyState& s, const Game& game,
                       double epsilon, Rng& rng);

struct ChainOptions {
  double epsilon = 0.05;
  double delta = 1e-3;
  std::int64_t runs_per_state = 10'000;
  std::int64_t t_max = 1'000'000;
  std::uint64_t seed = 0;
  // Maximum tolerated fraction of unabsorbed runs per row.
  double censoring_budget = 1e-3;
  int workers = 0;
};

// Monte Carlo estimate of the lifted chain. The stream for run r from state s
// is seeded by (seed, s, r), so the result is independent of `workers`.
// Throws ExcessiveCensoring when a row exceeds the censoring budget.
LiftedChain EstimateLiftedChain(const Game& game, const ChainOptions& options);

// Largest entrywise binomial standard error sqrt(p (1 - p) / n) over rows.
double MaxStandardError(const LiftedChain& chain);

struct ChainClasses {
  bool irreducible = false;
  // Strongly connected components, each sorted, ordered by smallest member.
  std::vector<std::vector<int>> classes;
  // closed[c]: no edge leaves classes[c] (recurrent class).
  std::vector<bool> closed;
};

// SCC decomposition of the graph with an edge s -> s' whenever
// counts[s][s'] >= 1 (or probs[s][s'] > 0 for chains without counts).
ChainClasses CheckIrreducible(const LiftedChain& chain);
ChainClasses CommunicatingClasses(const Matrix& adjacency_weights);

struct PowerIterationResult {
  std::vector<double> pi;
  std::int64_t iterations = 0;
  bool converged = false;
};

// Iterates pi <- pi (I + P) / 2 from `start` until successive iterates differ
// by at most `tolerance` in l1. The lazy step has the same invariant vectors
// as P and does not oscillate on periodic chains.
PowerIterationResult PowerIteration(const Matrix& probs,
                                    std::vector<double> start,
                                    double tolerance = 1e-13,
                                    std::int64_t max_iterations = 1'000'000);

// Solves pi (P - I) = 0, sum(pi) = 1 by LU. Requires a unique invariant
// vector; throws NoConvergence if the system is singular.
std::vector<double> DirectStationary(const Matrix& probs);

struct StationaryDistribution {
  std::vector<double> pi;
  // False when the chain has more than one recurrent class; pi is then the
  // invariant vector of the recurrent class reached first from state 0.
  bool unique = true;
  std::int64_t iterations = 0;
  bool used_direct_solve = false;
  double residual_l1 = 0.0;  // ||pi P - pi||_1
  // l1 gap between power iteration and the direct solve, or -1 when the
  // direct solve did not run.
  double direct_gap_l1 = -1.0;
};

inline constexpr int kDirectSolveLimit = 64;

// Power iteration with a direct LU cross-check (and fallback) for classes of
// at most kDirectSolveLimit states. Throws NotStochastic, NoConvergence.
StationaryDistribution SolveStationary(const LiftedChain& chain);
StationaryDistribution SolveStationary(const Matrix& probs);

// Throws NotStochastic unless probs is square with nonnegative rows summing
// to 1 within `tolerance`.
void CheckStochastic(const Matrix& probs, double tolerance = 1e-9);

double L1Distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace plearn

#endif  // PLEARN_CHAIN_H_
