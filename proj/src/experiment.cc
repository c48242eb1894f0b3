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

#include "plearn/experiment.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "plearn/chain.h"
#include "plearn/dynamics.h"
#include "plearn/error.h"
#include "plearn/occupation.h"
#include "plearn/parallel.h"
#include "plearn/report.h"

namespace plearn {
namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

Error BadField(const std::string& field, const std::string& what) {
  return Error(ErrorCode::kMalformedDocument, field + ": " + what);
}

double ReadReal(const json& doc, const std::string& key) {
  if (!doc[key].is_number()) throw BadField(key, "expected a number");
  return doc[key].get<double>();
}

std::int64_t ReadInt(const json& doc, const std::string& key) {
  if (!doc[key].is_number_integer()) throw BadField(key, "expected an integer");
  return doc[key].get<std::int64_t>();
}

std::string ReadString(const json& doc, const std::string& key) {
  if (!doc[key].is_string()) throw BadField(key, "expected a string");
  return doc[key].get<std::string>();
}

void CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw Error(ErrorCode::kInvalidDelta,
                "delta: must lie in (0, 0.5), got " + std::to_string(delta));
  }
}

void CheckPositive(std::int64_t value, const std::string& field) {
  if (value < 1) throw Error(ErrorCode::kInvalidParams, field + ": must be >= 1");
}

ReportMeta MetaFor(const ExperimentConfig& config) {
  ReportMeta meta;
  meta.config_hash = ConfigHash(config);
  meta.seed = config.seed;
  meta.extra.push_back({"command", config.command});
  return meta;
}

std::string OutPath(const ExperimentConfig& config, const std::string& file) {
  return (std::filesystem::path(config.out) / file).string();
}

void PrepareOutput(const ExperimentConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "out: cannot create directory " + config.out + ": " + ec.message());
  }
}

std::string PureStatesCsv(const Game& game, const ReportMeta& meta) {
  std::ostringstream os;
  os << "# tool: plearn " << kToolVersion << "\n";
  os << "# config_hash: " << FormatHash(meta.config_hash) << "\n";
  os << "# seed: " << meta.seed << "\n";
  os << "state,profile";
  for (int i = 0; i < game.num_players(); ++i) os << ",u_" << i;
  os << ",is_nash\n";
  for (const PureStrategyState& s : EnumeratePureStates(game)) {
    os << s.index << "," << ProfileLabel(s.profile);
    for (int i = 0; i < game.num_players(); ++i) {
      os << "," << FormatDouble(game.PayoffAt(i, s.index));
    }
    os << "," << (IsPureNash(game, s.profile) ? 1 : 0) << "\n";
  }
  return os.str();
}

int RunValidate(const ExperimentConfig& config, std::ostream& out) {
  const Game game = ResolveGame(config);
  PrepareOutput(config);
  const ReportMeta meta = MetaFor(config);
  WriteFile(OutPath(config, "game.json"), GameToJson(game).dump(2) + "\n");
  WriteFile(OutPath(config, "pure_states.csv"), PureStatesCsv(game, meta));
  out << "valid game '" << game.name() << "': " << game.num_players()
      << " players, " << game.num_profiles() << " pure strategy states, "
      << PureNashProfiles(game).size() << " pure Nash equilibria, max payoff "
      << FormatDouble(game.MaxPayoff()) << " (epsilon must be < "
      << FormatDouble(1.0 / game.MaxPayoff()) << ")\n";
  return 0;
}

int RunSimulate(const ExperimentConfig& config, std::ostream& out) {
  const Game game = ResolveGame(config);
  DynamicsConfig cfg;
  cfg.epsilon = config.epsilon;
  cfg.lambda = config.lambda;
  cfg.max_steps = config.steps.value_or(1'000'000);
  ValidateConfig(cfg, game);
  CheckDelta(config.delta);
  CheckPositive(config.runs, "runs");
  if (config.stride < 0) throw Error(ErrorCode::kInvalidParams, "stride: must be >= 0");
  const std::int64_t burn_in = config.burn_in.value_or(cfg.max_steps / 100);
  const bool want_occupation = config.lambda > 0.0 && cfg.max_steps > 0;
  if (want_occupation && (burn_in < 0 || burn_in >= cfg.max_steps)) {
    throw Error(ErrorCode::kInvalidParams, "burn_in: must lie in [0, steps)");
  }
  PrepareOutput(config);

  TrajectoryOptions options;
  options.delta = config.delta;
  options.stop_on_absorption = config.stop_on_absorption;
  const std::int64_t stride =
      config.stride > 0 ? config.stride : std::max<std::int64_t>(1, cfg.max_steps / 1000);

  std::vector<TrajectoryRecord> records(config.runs);
  std::vector<std::uint64_t> seeds(config.runs);
  ParallelFor(config.runs, config.workers, [&](std::int64_t run) {
    DynamicsConfig run_cfg = cfg;
    run_cfg.seed = DeriveSeed(config.seed, {0x73696dULL, static_cast<std::uint64_t>(run)});
    seeds[run] = run_cfg.seed;
    TrajectoryOptions run_options = options;
    run_options.stride = run == 0 ? stride : 0;
    records[run] = RunTrajectory(UniformState(game), game, run_cfg, run_options);
  });

  const ReportMeta meta = MetaFor(config);
  WriteFile(OutPath(config, "trajectory.csv"), TrajectoryCsv(records[0], meta));

  std::int64_t absorbed = 0;
  std::ostringstream rows;
  rows << "run,seed,absorbed,state,profile,hitting_time,steps,trembles,renormalizations\n";
  for (std::int64_t run = 0; run < config.runs; ++run) {
    const TrajectoryRecord& r = records[run];
    rows << run << "," << seeds[run] << "," << (r.absorption ? 1 : 0) << ",";
    if (r.absorption) {
      ++absorbed;
      rows << r.absorption->state.index << "," << ProfileLabel(r.absorption->state.profile)
           << "," << r.absorption->hitting_time;
    } else {
      rows << ",,";
    }
    rows << "," << r.steps << "," << r.trembles << "," << r.renormalizations << "\n";
  }
  ReportMeta absorption_meta = meta;
  absorption_meta.extra.push_back({"runs", std::to_string(config.runs)});
  absorption_meta.extra.push_back({"absorbed", std::to_string(absorbed)});
  std::ostringstream absorption;
  absorption << "# tool: plearn " << kToolVersion << "\n"
             << "# config_hash: " << FormatHash(meta.config_hash) << "\n"
             << "# seed: " << meta.seed << "\n";
  for (const auto& [key, value] : absorption_meta.extra) {
    absorption << "# " << key << ": " << value << "\n";
  }
  absorption << rows.str();
  WriteFile(OutPath(config, "absorption.csv"), absorption.str());

  out << "simulated " << config.runs << " trajectories; absorbed " << absorbed << "/"
      << config.runs << "\n";
  if (want_occupation) {
    DynamicsConfig occ_cfg = cfg;
    occ_cfg.seed = seeds[0];
    const OccupationReport occ = OccupationMeasure(game, occ_cfg, config.delta, burn_in);
    WriteFile(OutPath(config, "occupation.csv"), OccupationCsv(occ, meta));
    out << "mixed mass (run 0): " << FormatDouble(occ.mixed_mass) << "\n";
  }
  return 0;
}

void WriteStationaryOutputs(const ExperimentConfig& config, const LiftedChain& chain,
                            const StationaryDistribution& stationary,
                            std::ostream& out) {
  const ReportMeta meta = MetaFor(config);
  const ChainClasses classes = CheckIrreducible(chain);
  WriteFile(OutPath(config, "stationary.csv"),
            StationaryCsv(stationary, chain.states, meta));
  WriteFile(OutPath(config, "classes.csv"), ClassesCsv(classes, meta));
  out << (classes.irreducible ? "irreducible" : "reducible") << " chain with "
      << classes.classes.size() << " communicating class(es); pi"
      << (stationary.unique ? "" : " (not unique)") << ":";
  for (std::size_t s = 0; s < stationary.pi.size(); ++s) {
    out << " " << ProfileLabel(chain.states[s].profile) << "=" << stationary.pi[s];
  }
  out << "\n";
}

int RunEstimateChain(const ExperimentConfig& config, std::ostream& out) {
  const Game game = ResolveGame(config);
  ChainOptions options;
  options.epsilon = config.epsilon;
  options.delta = config.delta;
  options.runs_per_state = config.runs_per_state;
  options.t_max = config.t_max;
  options.seed = config.seed;
  options.censoring_budget = config.censoring_budget;
  options.workers = config.workers;
  ValidateConfig({config.epsilon, 0.0, config.seed, config.t_max}, game);
  CheckDelta(config.delta);
  CheckPositive(config.runs_per_state, "runs_per_state");
  PrepareOutput(config);
  const LiftedChain chain = EstimateLiftedChain(game, options);
  WriteFile(OutPath(config, "chain.csv"), ChainCsv(chain, MetaFor(config)));
  WriteStationaryOutputs(config, chain, SolveStationary(chain), out);
  return 0;
}

int RunStationary(const ExperimentConfig& config, std::ostream& out) {
  if (config.chain_path.empty()) {
    throw Error(ErrorCode::kInvalidParams, "chain: a lifted chain CSV is required");
  }
  const LiftedChain chain = ParseChainCsv(ReadFile(config.chain_path));
  PrepareOutput(config);
  WriteStationaryOutputs(config, chain, SolveStationary(chain), out);
  return 0;
}

int RunSweep(const ExperimentConfig& config, std::ostream& out) {
  const Game game = ResolveGame(config);
  SweepOptions options;
  options.epsilon = config.epsilon;
  options.delta = config.delta;
  options.lambdas = config.lambdas;
  if (options.lambdas.empty()) options.lambdas = {0.1, 0.05, 0.02};
  if (config.steps) options.steps.assign(options.lambdas.size(), *config.steps);
  options.burn_in = config.burn_in.value_or(-1);
  options.master_seed = config.seed;
  options.runs_per_state = config.runs_per_state;
  options.t_max = config.t_max;
  options.workers = config.workers;
  ValidateConfig({config.epsilon, 0.0, config.seed, 0}, game);
  CheckDelta(config.delta);
  CheckPositive(config.runs_per_state, "runs_per_state");
  for (std::size_t k = 0; k < options.lambdas.size(); ++k) {
    const double lambda = options.lambdas[k];
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw Error(ErrorCode::kInvalidLambda,
                  "lambdas[" + std::to_string(k) + "]: must lie in (0, 1)");
    }
    if (k > 0 && lambda > options.lambdas[k - 1]) {
      throw Error(ErrorCode::kInvalidParams, "lambdas: must be non-increasing");
    }
    const std::int64_t horizon = config.steps.value_or(
        DefaultSweepSteps(lambda, game.num_profiles()));
    CheckPositive(horizon, "steps");
    if (options.burn_in >= horizon) {
      throw Error(ErrorCode::kInvalidParams, "burn_in: must be below steps");
    }
  }
  PrepareOutput(config);
  const SweepReport report = LambdaSweep(game, options);
  const ReportMeta meta = MetaFor(config);
  WriteFile(OutPath(config, "sweep.csv"), SweepCsv(report, meta));
  WriteFile(OutPath(config, "chain.csv"), ChainCsv(report.chain, meta));
  WriteFile(OutPath(config, "stationary.csv"),
            StationaryCsv(report.stationary, report.chain.states, meta));
  for (const SweepRow& row : report.rows) {
    out << "lambda=" << row.occupation.lambda
        << " mixed_mass=" << row.occupation.mixed_mass
        << " tv_to_pi=" << row.tv_to_pi
        << (row.monotone_ok ? "" : " (mixed mass increased)") << "\n";
  }
  return 0;
}

}  // namespace

void ApplyConfigDocument(const json& doc, ExperimentConfig& config) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kMalformedDocument, "config: expected a JSON object");
  }
  static const std::set<std::string> known = {
      "game", "builtin", "epsilon", "lambda", "lambdas", "delta",
      "runs_per_state", "t_max", "steps", "burn_in", "seed", "out",
      "workers", "runs", "stride", "stop_on_absorption", "censoring_budget",
      "chain"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw BadField(key, "unknown config field");
  }
  if (doc.contains("game")) {
    if (doc["game"].is_string()) {
      config.game_path = doc["game"].get<std::string>();
    } else if (doc["game"].is_object()) {
      config.inline_game = doc["game"];
    } else {
      throw BadField("game", "expected a file path or a game object");
    }
  }
  if (doc.contains("builtin")) config.builtin = ReadString(doc, "builtin");
  if (doc.contains("epsilon")) config.epsilon = ReadReal(doc, "epsilon");
  if (doc.contains("lambda")) config.lambda = ReadReal(doc, "lambda");
  if (doc.contains("lambdas")) {
    if (!doc["lambdas"].is_array()) throw BadField("lambdas", "expected a list");
    config.lambdas.clear();
    for (std::size_t k = 0; k < doc["lambdas"].size(); ++k) {
      if (!doc["lambdas"][k].is_number()) {
        throw BadField("lambdas[" + std::to_string(k) + "]", "expected a number");
      }
      config.lambdas.push_back(doc["lambdas"][k].get<double>());
    }
  }
  if (doc.contains("delta")) config.delta = ReadReal(doc, "delta");
  if (doc.contains("runs_per_state")) config.runs_per_state = ReadInt(doc, "runs_per_state");
  if (doc.contains("t_max")) config.t_max = ReadInt(doc, "t_max");
  if (doc.contains("steps")) config.steps = ReadInt(doc, "steps");
  if (doc.contains("burn_in")) config.burn_in = ReadInt(doc, "burn_in");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw BadField("seed", "expected a non-negative integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("out")) config.out = ReadString(doc, "out");
  if (doc.contains("workers")) config.workers = static_cast<int>(ReadInt(doc, "workers"));
  if (doc.contains("runs")) config.runs = ReadInt(doc, "runs");
  if (doc.contains("stride")) config.stride = ReadInt(doc, "stride");
  if (doc.contains("stop_on_absorption")) {
    if (!doc["stop_on_absorption"].is_boolean()) {
      throw BadField("stop_on_absorption", "expected true or false");
    }
    config.stop_on_absorption = doc["stop_on_absorption"].get<bool>();
  }
  if (doc.contains("censoring_budget")) {
    config.censoring_budget = ReadReal(doc, "censoring_budget");
  }
  if (doc.contains("chain")) config.chain_path = ReadString(doc, "chain");
}

Game ResolveGame(const ExperimentConfig& config) {
  const int sources = (config.game_path.empty() ? 0 : 1) +
                      (config.builtin.empty() ? 0 : 1) + (config.inline_game ? 1 : 0);
  if (sources != 1) {
    throw Error(ErrorCode::kInvalidParams,
                "game: give exactly one of --game, --builtin or an inline game");
  }
  if (!config.game_path.empty()) return LoadGameFile(config.game_path);
  if (config.inline_game) return LoadGame(*config.inline_game);
  return BuiltinGameFromSpec(config.builtin);
}

json SemanticConfig(const ExperimentConfig& config) {
  json doc;
  doc["command"] = config.command;
  const std::string& c = config.command;
  if (c != "stationary") doc["game"] = GameToJson(ResolveGame(config));
  if (c == "simulate" || c == "estimate-chain" || c == "sweep") {
    doc["epsilon"] = config.epsilon;
    doc["delta"] = config.delta;
    doc["seed"] = config.seed;
  }
  if (c == "simulate") {
    doc["lambda"] = config.lambda;
    doc["steps"] = config.steps.value_or(1'000'000);
    doc["burn_in"] = config.burn_in.value_or(doc["steps"].get<std::int64_t>() / 100);
    doc["runs"] = config.runs;
    doc["stride"] = config.stride;
    doc["stop_on_absorption"] = config.stop_on_absorption;
  }
  if (c == "estimate-chain" || c == "sweep") {
    doc["runs_per_state"] = config.runs_per_state;
    doc["t_max"] = config.t_max;
    doc["censoring_budget"] = config.censoring_budget;
  }
  if (c == "sweep") {
    doc["lambdas"] = config.lambdas.empty() ? std::vector<double>{0.1, 0.05, 0.02}
                                            : config.lambdas;
    doc["steps"] = config.steps ? json(*config.steps) : json("default");
    doc["burn_in"] = config.burn_in ? json(*config.burn_in) : json("default");
  }
  if (c == "stationary") {
    doc["chain"] = config.chain_path.empty() ? std::string() : ReadFile(config.chain_path);
  }
  return doc;
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  const std::string canonical = SemanticConfig(config).dump();
  std::uint64_t h = kFnvOffset;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= kFnvPrime;
  }
  return h;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"plearn: perturbed learning automata simulator and stochastic-stability analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("plearn ") + kToolVersion);

  std::string config_path, game_path, builtin, out_dir, chain_path;
  double epsilon = 0, lambda = 0, delta = 0, censoring_budget = 0;
  std::vector<double> lambdas;
  std::int64_t runs_per_state = 0, t_max = 0, steps = 0, burn_in = 0, runs = 0, stride = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  bool stop_on_absorption = true;

  struct Flags {
    CLI::Option *config, *game, *builtin, *epsilon, *lambda, *lambdas, *delta,
        *runs_per_state, *t_max, *steps, *burn_in, *seed, *out, *workers, *runs,
        *stride, *stop, *censoring, *chain;
  };
  std::map<std::string, Flags> flags;

  auto add_common = [&](CLI::App* sub) {
    Flags f{};
    f.config = sub->add_option("--config", config_path, "JSON experiment config");
    f.game = sub->add_option("--game", game_path, "game file (JSON)");
    f.builtin = sub->add_option("--builtin", builtin,
                                "builtin game, e.g. coordination or random_positive:seed=7");
    f.epsilon = sub->add_option("--epsilon", epsilon, "step size");
    f.lambda = sub->add_option("--lambda", lambda, "perturbation probability");
    f.lambdas = sub->add_option("--lambdas", lambdas, "non-increasing perturbation list")
                    ->delimiter(',');
    f.delta = sub->add_option("--delta", delta, "pure-state neighborhood radius");
    f.runs_per_state = sub->add_option("--runs-per-state", runs_per_state,
                                       "lifted chain samples per state");
    f.t_max = sub->add_option("--t-max", t_max, "absorption horizon per chain sample");
    f.steps = sub->add_option("--steps", steps, "trajectory horizon");
    f.burn_in = sub->add_option("--burn-in", burn_in, "discarded prefix");
    f.seed = sub->add_option("--seed", seed, "master seed");
    f.out = sub->add_option("--out", out_dir, "output directory");
    f.workers = sub->add_option("--workers", workers, "worker threads (0: all cores)");
    f.runs = sub->add_option("--runs", runs, "independent trajectories (simulate)");
    f.stride = sub->add_option("--stride", stride, "trajectory sampling stride");
    f.stop = sub->add_option("--stop-on-absorption", stop_on_absorption,
                             "stop unperturbed runs at absorption (true/false)");
    f.censoring = sub->add_option("--censoring-budget", censoring_budget,
                                  "max unabsorbed fraction per chain row");
    f.chain = sub->add_option("--chain", chain_path, "lifted chain CSV (stationary)");
    flags[sub->get_name()] = f;
  };
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"validate", "check a game file and list its pure strategy states"},
           {"simulate", "run trajectories of the learning dynamics"},
           {"estimate-chain", "estimate the lifted chain over pure strategy states"},
           {"stationary", "stationary distribution of a saved lifted chain"},
           {"sweep", "occupation measures over a decreasing perturbation sweep"}}) {
    add_common(app.add_subcommand(name, help));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "plearn " << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Flags& f = flags.at(sub->get_name());
  ExperimentConfig config;
  config.command = sub->get_name();
  try {
    if (f.config->count()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::kMalformedDocument, "config: cannot open " + config_path);
      json doc;
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kMalformedDocument, "config: " + std::string(e.what()));
      }
      ApplyConfigDocument(doc, config);
    }
    // Flags override the config file; a game flag replaces any game source.
    if (f.game->count() || f.builtin->count()) {
      config.game_path.clear();
      config.builtin.clear();
      config.inline_game.reset();
    }
    if (f.game->count()) config.game_path = game_path;
    if (f.builtin->count()) config.builtin = builtin;
    if (f.epsilon->count()) config.epsilon = epsilon;
    if (f.lambda->count()) config.lambda = lambda;
    if (f.lambdas->count()) config.lambdas = lambdas;
    if (f.delta->count()) config.delta = delta;
    if (f.runs_per_state->count()) config.runs_per_state = runs_per_state;
    if (f.t_max->count()) config.t_max = t_max;
    if (f.steps->count()) config.steps = steps;
    if (f.burn_in->count()) config.burn_in = burn_in;
    if (f.seed->count()) config.seed = seed;
    if (f.out->count()) config.out = out_dir;
    if (f.workers->count()) config.workers = workers;
    if (f.runs->count()) config.runs = runs;
    if (f.stride->count()) config.stride = stride;
    if (f.stop->count()) config.stop_on_absorption = stop_on_absorption;
    if (f.censoring->count()) config.censoring_budget = censoring_budget;
    if (f.chain->count()) config.chain_path = chain_path;
    if (config.workers < 0) throw Error(ErrorCode::kInvalidParams, "workers: must be >= 0");

    const std::string& c = config.command;
    if (c == "validate") return RunValidate(config, out);
    if (c == "simulate") return RunSimulate(config, out);
    if (c == "estimate-chain") return RunEstimateChain(config, out);
    if (c == "stationary") return RunStationary(config, out);
    return RunSweep(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsValidationError(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace plearn
