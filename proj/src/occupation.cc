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

#include "plearn/occupation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "plearn/error.h"
#include "plearn/parallel.h"

namespace plearn {
namespace {

// Mean and batch-means standard error of per-batch fractions.
std::pair<double, double> BatchStats(const std::vector<std::int64_t>& hits,
                                     const std::vector<std::int64_t>& sizes) {
  const int b = static_cast<int>(hits.size());
  std::vector<double> fractions;
  for (int k = 0; k < b; ++k) {
    if (sizes[k] > 0) fractions.push_back(static_cast<double>(hits[k]) / sizes[k]);
  }
  const int used = static_cast<int>(fractions.size());
  if (used < 2) return {0.0, 0.0};
  double mean = 0.0;
  for (double f : fractions) mean += f;
  mean /= used;
  double ss = 0.0;
  for (double f : fractions) ss += (f - mean) * (f - mean);
  return {mean, std::sqrt(ss / (static_cast<double>(used) * (used - 1)))};
}

}  // namespace

OccupationReport OccupationMeasure(const Game& game, const DynamicsConfig& cfg,
                                   double delta, std::int64_t burn_in,
                                   const std::optional<JointState>& start) {
  ValidateConfig(cfg, game);
  if (!(delta > 0.0 && delta < 0.5)) {
    throw Error(ErrorCode::kInvalidDelta,
                "delta: must lie in (0, 0.5), got " + std::to_string(delta));
  }
  if (burn_in < 0 || burn_in >= cfg.max_steps) {
    throw Error(ErrorCode::kInvalidParams,
                "burn_in: must lie in [0, steps), got " + std::to_string(burn_in));
  }
  JointState z = start ? *start : UniformState(game);
  if (!IsConsistent(z, game)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial state does not match the game dimensions");
  }

  const int num_states = game.num_profiles();
  const std::int64_t counted = cfg.max_steps - burn_in;
  // Column num_states holds the mixed bucket.
  std::vector<std::vector<std::int64_t>> batch_hits(
      num_states + 1, std::vector<std::int64_t>(kBatchCount, 0));
  std::vector<std::int64_t> batch_sizes(kBatchCount, 0);

  Rng rng(cfg.seed);
  for (std::int64_t t = 1; t <= cfg.max_steps; ++t) {
    StepInPlace(z, game, cfg, rng);
    if (t <= burn_in) continue;
    const std::int64_t rel = t - burn_in - 1;
    const int batch = static_cast<int>(rel * kBatchCount / counted);
    const int bucket = ClassifyState(z, game, delta);
    ++batch_hits[bucket < 0 ? num_states : bucket][batch];
    ++batch_sizes[batch];
  }

  OccupationReport report;
  report.action_counts = game.action_counts();
  report.lambda = cfg.lambda;
  report.delta = delta;
  report.steps = cfg.max_steps;
  report.burn_in = burn_in;
  report.mass.resize(num_states);
  report.mass_se.resize(num_states);
  auto total = [&](int bucket) {
    std::int64_t sum = 0;
    for (std::int64_t h : batch_hits[bucket]) sum += h;
    return static_cast<double>(sum) / counted;
  };
  for (int s = 0; s < num_states; ++s) {
    report.mass[s] = total(s);
    report.mass_se[s] = BatchStats(batch_hits[s], batch_sizes).second;
  }
  report.mixed_mass = total(num_states);
  report.mixed_mass_se = BatchStats(batch_hits[num_states], batch_sizes).second;
  return report;
}

std::vector<double> NormalizedPureMass(const OccupationReport& report) {
  double pure = 0.0;
  for (double m : report.mass) pure += m;
  std::vector<double> out(report.mass.size(), 0.0);
  if (pure <= 0.0) return out;
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = report.mass[s] / pure;
  return out;
}

double TvDistance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "tv_distance: lengths " + std::to_string(p.size()) + " and " +
                    std::to_string(q.size()));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
  return 0.5 * sum;
}

std::int64_t DefaultSweepSteps(double lambda, int num_states) {
  // Quotients such as 900 / 3e-4 land a few ulps above an integer; round
  // those to the integer instead of stepping past it.
  const double exact = 100.0 * num_states / lambda;
  const double nearest = std::round(exact);
  const double scaled =
      std::abs(exact - nearest) <= 1e-9 * exact ? nearest : std::ceil(exact);
  return std::max<std::int64_t>(1'000'000, static_cast<std::int64_t>(scaled));
}

std::uint64_t SweepSeed(std::uint64_t master_seed, double lambda) {
  return DeriveSeed(master_seed, {0x6f63637570ULL, std::bit_cast<std::uint64_t>(lambda)});
}

SweepReport LambdaSweep(const Game& game, const SweepOptions& options) {
  const int count = static_cast<int>(options.lambdas.size());
  if (count == 0) throw Error(ErrorCode::kInvalidParams, "lambdas: empty list");
  for (int k = 0; k < count; ++k) {
    const double lambda = options.lambdas[k];
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw Error(ErrorCode::kInvalidLambda,
                  "lambdas[" + std::to_string(k) + "]: must lie in (0, 1)");
    }
    if (k > 0 && lambda > options.lambdas[k - 1]) {
      throw Error(ErrorCode::kInvalidParams,
                  "lambdas: must be non-increasing");
    }
  }
  if (!options.steps.empty() && static_cast<int>(options.steps.size()) != count) {
    throw Error(ErrorCode::kLengthMismatch,
                "steps: need one horizon per lambda");
  }
  // Validates epsilon before any work starts.
  ValidateConfig({options.epsilon, options.lambdas[0], 0, 0}, game);

  SweepReport report;
  report.rows.resize(count);
  const int num_states = game.num_profiles();
  ParallelFor(count, options.workers, [&](std::int64_t k) {
    const double lambda = options.lambdas[k];
    DynamicsConfig cfg;
    cfg.epsilon = options.epsilon;
    cfg.lambda = lambda;
    cfg.seed = SweepSeed(options.master_seed, lambda);
    cfg.max_steps = options.steps.empty() ? DefaultSweepSteps(lambda, num_states)
                                          : options.steps[k];
    const std::int64_t burn_in =
        options.burn_in >= 0 ? options.burn_in : cfg.max_steps / 100;
    report.rows[k].occupation = OccupationMeasure(game, cfg, options.delta, burn_in);
  });

  ChainOptions chain_options;
  chain_options.epsilon = options.epsilon;
  chain_options.delta = options.chain_delta > 0.0 ? options.chain_delta : options.delta;
  chain_options.runs_per_state = options.runs_per_state;
  chain_options.t_max = options.t_max;
  chain_options.seed = DeriveSeed(options.master_seed, {0x636861696eULL});
  chain_options.workers = options.workers;
  report.chain = EstimateLiftedChain(game, chain_options);
  report.stationary = SolveStationary(report.chain);

  for (int k = 0; k < count; ++k) {
    SweepRow& row = report.rows[k];
    row.tv_to_pi = TvDistance(NormalizedPureMass(row.occupation), report.stationary.pi);
    if (k > 0) {
      const OccupationReport& prev = report.rows[k - 1].occupation;
      const double se = std::hypot(row.occupation.mixed_mass_se, prev.mixed_mass_se);
      row.monotone_ok = row.occupation.mixed_mass <= prev.mixed_mass + 2.0 * se;
    }
  }
  return report;
}

}  // namespace plearn
