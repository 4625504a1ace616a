// Copyright 2026 The mlot Authors
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

// File formats: JSON documents for margins, lotteries and solve reports, CSV
// tables for experiment outputs, and atomic file writes.
//
// JSON numbers are written in the shortest form that parses back to the
// same double. CSV numbers use 17 significant digits. NaN becomes null in
// JSON and "nan" in CSV.

#ifndef MLOT_IO_H_
#define MLOT_IO_H_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlot/evalharness.h"
#include "mlot/lottery.h"
#include "mlot/prefdata.h"
#include "mlot/robust.h"

namespace mlot {

using Json = nlohmann::ordered_json;

// {"roster", "groups", "eta", "tie_policy", "votes_per_group": {group: n},
//  "matrices": {group: m x m rows}, "counts": {group: m x m rows}}
Json GroupMarginsToJson(const GroupMargins& gm);
// Validates shapes and matrix invariants; throws InputError.
GroupMargins GroupMarginsFromJson(const Json& doc);

// {"roster", "probs", "value", "support": [ids]}
Json LotteryToJson(const Lottery& lottery);

// {"rho", "w0", "groups", "lottery", "robust_value", "robust_win_rate", "active",
//  "duals": {"mu", "lambda", "gamma"}, "worst_case": {...}}
Json RobustReportToJson(const RobustSolveReport& report,
                        const std::vector<std::string>& groups);

// One row per (rho, split, kind, group) with kind in
// {overall, worst_group, group}; the group column is empty except for kind
// "group".
std::string SweepToCsv(std::span<const SweepPoint> points,
                       const std::vector<std::string>& groups);
Json SweepToJson(std::span<const SweepPoint> points,
                 const std::vector<std::string>& groups);

std::string FrontierToCsv(std::span<const FrontierPoint> points);
Json FrontierToJson(std::span<const FrontierPoint> points);

std::string RegretToCsv(std::span<const RegretSample> samples);
Json RegretToJson(std::span<const RegretSample> samples, std::uint64_t n,
                  double delta);

// Header model_a,model_b,winner,group,weight.
std::string VotesToCsv(const VoteTable& votes);

// Two columns model,cost with an optional header; returns costs ordered like
// `roster`. Every roster model needs exactly one cost.
std::vector<double> ParseCosts(std::istream& input,
                               const std::vector<std::string>& roster);

std::string ReadFile(const std::string& path);
// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::string& path, const std::string& contents);

// CSV for *.csv, JSONL for *.jsonl / *.ndjson; throws InputError otherwise.
VoteFormat FormatFromPath(const std::string& path);

// Comma-separated doubles, e.g. "0,0.1,0.5".
std::vector<double> ParseDoubleList(const std::string& text);

}  // namespace mlot

#endif  // MLOT_IO_H_
