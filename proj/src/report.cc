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

#include "plearn/report.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plearn/error.h"

namespace plearn {
namespace {

Error Malformed(const std::string& what) {
  return Error(ErrorCode::kMalformedDocument, what);
}

void WriteMeta(std::ostringstream& os, const ReportMeta& meta,
               const std::vector<std::pair<std::string, std::string>>& local) {
  os << "# tool: plearn " << kToolVersion << "\n";
  os << "# config_hash: " << FormatHash(meta.config_hash) << "\n";
  os << "# seed: " << meta.seed << "\n";
  for (const auto& [key, value] : local) os << "# " << key << ": " << value << "\n";
  for (const auto& [key, value] : meta.extra) os << "# " << key << ": " << value << "\n";
}

std::string JoinInts(const std::vector<int>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(values[k]);
  }
  return out;
}

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

// Header plus rows of a CSV document, addressable by column name.
class Table {
 public:
  explicit Table(const std::string& text) {
    bool have_header = false;
    for (const std::string& line : CsvDataLines(text)) {
      if (!have_header) {
        header_ = Split(line, ',');
        for (std::size_t c = 0; c < header_.size(); ++c) column_[header_[c]] = c;
        have_header = true;
        continue;
      }
      rows_.push_back(Split(line, ','));
      if (rows_.back().size() != header_.size()) {
        throw Malformed("row " + std::to_string(rows_.size()) + ": expected " +
                        std::to_string(header_.size()) + " fields");
      }
    }
    if (!have_header) throw Malformed("csv: no header line");
  }

  int rows() const { return static_cast<int>(rows_.size()); }
  bool has(const std::string& name) const { return column_.count(name) > 0; }
  const std::vector<std::string>& header() const { return header_; }

  const std::string& Get(int row, const std::string& name) const {
    auto it = column_.find(name);
    if (it == column_.end()) throw Malformed("csv: missing column '" + name + "'");
    return rows_[row][it->second];
  }

  double Real(int row, const std::string& name) const {
    const std::string& s = Get(row, name);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Malformed("row " + std::to_string(row + 1) + ", column " + name +
                      ": not a number: '" + s + "'");
    }
    return value;
  }

  std::int64_t Int(int row, const std::string& name) const {
    const std::string& s = Get(row, name);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Malformed("row " + std::to_string(row + 1) + ", column " + name +
                      ": not an integer: '" + s + "'");
    }
    return value;
  }

 private:
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> column_;
  std::vector<std::vector<std::string>> rows_;
};

const std::string& MetaValue(const std::map<std::string, std::string>& meta,
                             const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw Malformed("csv: missing '# " + key + ":' line");
  return it->second;
}

double MetaReal(const std::map<std::string, std::string>& meta,
                const std::string& key) {
  const std::string& s = MetaValue(meta, key);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Malformed("# " + key + ": not a number");
  }
  return value;
}

std::int64_t MetaInt(const std::map<std::string, std::string>& meta,
                     const std::string& key) {
  const std::string& s = MetaValue(meta, key);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Malformed("# " + key + ": not an integer");
  }
  return value;
}

std::vector<int> MetaInts(const std::map<std::string, std::string>& meta,
                          const std::string& key) {
  std::vector<int> values;
  std::istringstream in(MetaValue(meta, key));
  int v;
  while (in >> v) values.push_back(v);
  if (values.empty()) throw Malformed("# " + key + ": expected integers");
  return values;
}

std::vector<std::string> ProfileLabels(const std::vector<int>& action_counts) {
  std::vector<std::string> labels;
  int total = 1;
  for (int m : action_counts) total *= m;
  ActionProfile profile(action_counts.size());
  for (int k = 0; k < total; ++k) {
    int rest = k;
    for (int i = static_cast<int>(action_counts.size()) - 1; i >= 0; --i) {
      profile[i] = rest % action_counts[i];
      rest /= action_counts[i];
    }
    labels.push_back(ProfileLabel(profile));
  }
  return labels;
}

std::vector<PureStrategyState> StatesFor(const std::vector<int>& action_counts) {
  std::vector<PureStrategyState> states;
  int total = 1;
  for (int m : action_counts) total *= m;
  for (int k = 0; k < total; ++k) {
    ActionProfile profile(action_counts.size());
    int rest = k;
    for (int i = static_cast<int>(action_counts.size()) - 1; i >= 0; --i) {
      profile[i] = rest % action_counts[i];
      rest /= action_counts[i];
    }
    states.push_back({profile, k});
  }
  return states;
}

void OccupationColumns(std::ostringstream& os, const std::vector<std::string>& labels) {
  os << "lambda,steps,burn_in,delta,mixed_mass,mixed_mass_se";
  for (const auto& label : labels) os << ",mass_" << label;
  for (const auto& label : labels) os << ",se_" << label;
}

void OccupationFields(std::ostringstream& os, const OccupationReport& r) {
  os << FormatDouble(r.lambda) << "," << r.steps << "," << r.burn_in << ","
     << FormatDouble(r.delta) << "," << FormatDouble(r.mixed_mass) << ","
     << FormatDouble(r.mixed_mass_se);
  for (double m : r.mass) os << "," << FormatDouble(m);
  for (double se : r.mass_se) os << "," << FormatDouble(se);
}

OccupationReport ReadOccupationRow(const Table& table, int row,
                                   const std::vector<int>& action_counts) {
  OccupationReport r;
  r.action_counts = action_counts;
  r.lambda = table.Real(row, "lambda");
  r.steps = table.Int(row, "steps");
  r.burn_in = table.Int(row, "burn_in");
  r.delta = table.Real(row, "delta");
  r.mixed_mass = table.Real(row, "mixed_mass");
  r.mixed_mass_se = table.Real(row, "mixed_mass_se");
  for (const auto& label : ProfileLabels(action_counts)) {
    r.mass.push_back(table.Real(row, "mass_" + label));
    r.mass_se.push_back(table.Real(row, "se_" + label));
  }
  return r;
}

}  // namespace

std::string FormatDouble(double x) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x,
                                 std::chars_format::general, 17);
  return std::string(buffer, ptr);
}

std::string FormatHash(std::uint64_t hash) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

std::string TrajectoryCsv(const TrajectoryRecord& record, const ReportMeta& meta) {
  std::ostringstream os;
  std::vector<std::pair<std::string, std::string>> local = {
      {"steps", std::to_string(record.steps)},
      {"trembles", std::to_string(record.trembles)},
      {"renormalizations", std::to_string(record.renormalizations)},
  };
  if (record.absorption) {
    local.push_back({"absorbed_state", ProfileLabel(record.absorption->state.profile)});
    local.push_back({"hitting_time", std::to_string(record.absorption->hitting_time)});
  } else {
    local.push_back({"absorbed_state", "none"});
  }
  WriteMeta(os, meta, local);
  os << "t";
  if (!record.samples.empty()) {
    const JointState& first = record.samples.front().state;
    for (std::size_t i = 0; i < first.profile.size(); ++i) os << ",a_" << i;
    for (std::size_t i = 0; i < first.strategies.size(); ++i) {
      for (int k = 0; k < first.strategies[i].size(); ++k) os << ",x_" << i << "_" << k;
    }
  }
  os << "\n";
  for (const TrajectorySample& sample : record.samples) {
    os << sample.t;
    for (int a : sample.state.profile) os << "," << a;
    for (const Strategy& x : sample.state.strategies) {
      for (double w : x.weights()) os << "," << FormatDouble(w);
    }
    os << "\n";
  }
  return os.str();
}

std::string OccupationCsv(const OccupationReport& report, const ReportMeta& meta) {
  std::ostringstream os;
  WriteMeta(os, meta, {{"actions", JoinInts(report.action_counts)}});
  OccupationColumns(os, ProfileLabels(report.action_counts));
  os << "\n";
  OccupationFields(os, report);
  os << "\n";
  return os.str();
}

std::string SweepCsv(const SweepReport& report, const ReportMeta& meta) {
  std::ostringstream os;
  const std::vector<int>& counts = report.chain.action_counts;
  WriteMeta(os, meta, {{"actions", JoinInts(counts)},
                       {"pi_unique", report.stationary.unique ? "true" : "false"}});
  OccupationColumns(os, ProfileLabels(counts));
  os << ",tv_to_pi,monotone_ok\n";
  for (const SweepRow& row : report.rows) {
    OccupationFields(os, row.occupation);
    os << "," << FormatDouble(row.tv_to_pi) << "," << (row.monotone_ok ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string ChainCsv(const LiftedChain& chain, const ReportMeta& meta) {
  std::ostringstream os;
  WriteMeta(os, meta,
            {{"actions", JoinInts(chain.action_counts)},
             {"epsilon", FormatDouble(chain.epsilon)},
             {"delta", FormatDouble(chain.delta)},
             {"runs_per_state", std::to_string(chain.runs_per_state)},
             {"t_max", std::to_string(chain.t_max)},
             {"chain_seed", std::to_string(chain.seed)}});
  os << "from,to,from_profile,to_profile,count,prob,censored\n";
  for (int s = 0; s < chain.size(); ++s) {
    for (int t = 0; t < chain.size(); ++t) {
      os << s << "," << t << "," << ProfileLabel(chain.states[s].profile) << ","
         << ProfileLabel(chain.states[t].profile) << ",";
      if (chain.has_counts()) os << chain.counts[s][t];
      os << "," << FormatDouble(chain.probs[s][t]) << "," << chain.censored[s] << "\n";
    }
  }
  return os.str();
}

std::string StationaryCsv(const StationaryDistribution& stationary,
                          const std::vector<PureStrategyState>& states,
                          const ReportMeta& meta) {
  std::ostringstream os;
  WriteMeta(os, meta,
            {{"unique", stationary.unique ? "true" : "false"},
             {"iterations", std::to_string(stationary.iterations)},
             {"used_direct_solve", stationary.used_direct_solve ? "true" : "false"},
             {"residual_l1", FormatDouble(stationary.residual_l1)},
             {"direct_gap_l1", FormatDouble(stationary.direct_gap_l1)}});
  os << "state,profile,pi\n";
  for (std::size_t s = 0; s < stationary.pi.size(); ++s) {
    os << s << "," << ProfileLabel(states[s].profile) << ","
       << FormatDouble(stationary.pi[s]) << "\n";
  }
  return os.str();
}

std::string ClassesCsv(const ChainClasses& classes, const ReportMeta& meta) {
  std::ostringstream os;
  WriteMeta(os, meta, {{"irreducible", classes.irreducible ? "true" : "false"}});
  os << "class,closed,members\n";
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    os << c << "," << (classes.closed[c] ? 1 : 0) << "," << JoinInts(classes.classes[c])
       << "\n";
  }
  return os.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  out << contents;
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> ParseCsvMeta(const std::string& text) {
  std::map<std::string, std::string> meta;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
  }
  return meta;
}

std::vector<std::string> CsvDataLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

LiftedChain ParseChainCsv(const std::string& text) {
  const auto meta = ParseCsvMeta(text);
  const Table table(text);
  LiftedChain chain;
  chain.action_counts = MetaInts(meta, "actions");
  chain.states = StatesFor(chain.action_counts);
  chain.epsilon = MetaReal(meta, "epsilon");
  chain.delta = MetaReal(meta, "delta");
  chain.runs_per_state = MetaInt(meta, "runs_per_state");
  chain.t_max = MetaInt(meta, "t_max");
  chain.seed = std::stoull(MetaValue(meta, "chain_seed"));
  const int n = static_cast<int>(chain.states.size());
  if (table.rows() != n * n) {
    throw Malformed("chain csv: expected " + std::to_string(n * n) +
                    " rows for " + std::to_string(n) + " states, got " +
                    std::to_string(table.rows()));
  }
  chain.probs.assign(n, std::vector<double>(n, 0.0));
  chain.censored.assign(n, 0);
  const bool has_counts = !table.Get(0, "count").empty();
  if (has_counts) chain.counts.assign(n, std::vector<std::int64_t>(n, 0));
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
  for (int r = 0; r < table.rows(); ++r) {
    const std::int64_t s = table.Int(r, "from");
    const std::int64_t t = table.Int(r, "to");
    if (s < 0 || s >= n || t < 0 || t >= n || seen[s][t]) {
      throw Malformed("chain csv row " + std::to_string(r + 1) +
                      ": bad or duplicate (from, to)");
    }
    seen[s][t] = true;
    chain.probs[s][t] = table.Real(r, "prob");
    if (has_counts) chain.counts[s][t] = table.Int(r, "count");
    chain.censored[s] = table.Int(r, "censored");
  }
  return chain;
}

OccupationReport ParseOccupationCsv(const std::string& text) {
  const auto meta = ParseCsvMeta(text);
  const Table table(text);
  if (table.rows() != 1) throw Malformed("occupation csv: expected one data row");
  return ReadOccupationRow(table, 0, MetaInts(meta, "actions"));
}

std::vector<SweepRow> ParseSweepCsv(const std::string& text) {
  const auto meta = ParseCsvMeta(text);
  const Table table(text);
  const std::vector<int> counts = MetaInts(meta, "actions");
  std::vector<SweepRow> rows;
  for (int r = 0; r < table.rows(); ++r) {
    SweepRow row;
    row.occupation = ReadOccupationRow(table, r, counts);
    row.tv_to_pi = table.Real(r, "tv_to_pi");
    row.monotone_ok = table.Int(r, "monotone_ok") != 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

StationaryDistribution ParseStationaryCsv(const std::string& text) {
  const auto meta = ParseCsvMeta(text);
  const Table table(text);
  StationaryDistribution st;
  st.unique = MetaValue(meta, "unique") == "true";
  st.iterations = MetaInt(meta, "iterations");
  st.used_direct_solve = MetaValue(meta, "used_direct_solve") == "true";
  st.residual_l1 = MetaReal(meta, "residual_l1");
  st.direct_gap_l1 = MetaReal(meta, "direct_gap_l1");
  for (int r = 0; r < table.rows(); ++r) {
    if (table.Int(r, "state") != r) {
      throw Malformed("stationary csv row " + std::to_string(r + 1) +
                      ": states must be listed in index order");
    }
    st.pi.push_back(table.Real(r, "pi"));
  }
  return st;
}

}  // namespace plearn
