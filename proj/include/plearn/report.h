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

#ifndef PLEARN_REPORT_H_
#define PLEARN_REPORT_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "plearn/chain.h"
#include "plearn/dynamics.h"
#include "plearn/game.h"
#include "plearn/occupation.h"

namespace plearn {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance written as "# key: value" lines at the top of every CSV.
struct ReportMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

// Shortest-to-read exact form: 17 significant digits, so parsing it back
// yields the same double.
std::string FormatDouble(double x);
std::string FormatHash(std::uint64_t hash);

// CSV writers return the file contents; WriteFile puts them on disk.
std::string TrajectoryCsv(const TrajectoryRecord& record, const ReportMeta& meta);
std::string OccupationCsv(const OccupationReport& report, const ReportMeta& meta);
std::string SweepCsv(const SweepReport& report, const ReportMeta& meta);
std::string ChainCsv(const LiftedChain& chain, const ReportMeta& meta);
std::string StationaryCsv(const StationaryDistribution& stationary,
                          const std::vector<PureStrategyState>& states,
                          const ReportMeta& meta);
std::string ClassesCsv(const ChainClasses& classes, const ReportMeta& meta);

// Throws IoFailure.
void WriteFile(const std::string& path, const std::string& contents);
std::string ReadFile(const std::string& path);

// Parsers for the formats above. Throw MalformedDocument with the offending
// line or column named.
LiftedChain ParseChainCsv(const std::string& text);
OccupationReport ParseOccupationCsv(const std::string& text);
std::vector<SweepRow> ParseSweepCsv(const std::string& text);
StationaryDistribution ParseStationaryCsv(const std::string& text);

// "# key: value" comment lines of a CSV document.
std::map<std::string, std::string> ParseCsvMeta(const std::string& text);

// Data rows (non-comment lines, header included), for comparing runs.
std::vector<std::string> CsvDataLines(const std::string& text);

}  // namespace plearn

#endif  // PLEARN_REPORT_H_
