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

#include "mlot/io.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mlot {
namespace {

std::string Num(double v) { return std::isnan(v) ? "nan" : FormatDouble(v); }

// Quotes a CSV field when it contains a separator, quote or newline.
std::string Field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string TrimCopy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Json MatrixToJson(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Matrix MatrixFromJson(const Json& doc, std::size_t n, const std::string& what) {
  if (!doc.is_array() || doc.size() != n) {
    throw InputError("margins JSON: " + what + " must be a " + std::to_string(n) +
                     " x " + std::to_string(n) + " array");
  }
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!doc[i].is_array() || doc[i].size() != n) {
      throw InputError("margins JSON: row " + std::to_string(i) + " of " + what +
                       " has the wrong length");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!doc[i][j].is_number()) {
        throw InputError("margins JSON: non-numeric entry in " + what);
      }
      out(i, j) = doc[i][j].get<double>();
    }
  }
  return out;
}

template <typename T>
T Get(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw InputError(std::string("margins JSON: missing key '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("margins JSON: bad value for '") + key +
                     "': " + e.what());
  }
}

Json IdList(const std::vector<std::string>& roster,
            std::span<const std::size_t> idx) {
  Json out = Json::array();
  for (std::size_t i : idx) out.push_back(roster[i]);
  return out;
}

}  // namespace

Json GroupMarginsToJson(const GroupMargins& gm) {
  Json doc;
  doc["roster"] = gm.roster;
  doc["groups"] = gm.groups;
  doc["eta"] = gm.eta;
  doc["tie_policy"] = TiePolicyName(gm.tie_policy);
  Json votes = Json::object(), mats = Json::object(), counts = Json::object();
  for (std::size_t k = 0; k < gm.num_groups(); ++k) {
    votes[gm.groups[k]] = gm.votes_per_group[k];
    mats[gm.groups[k]] = MatrixToJson(gm.per_group[k].margins);
    counts[gm.groups[k]] = MatrixToJson(gm.per_group[k].counts);
  }
  doc["votes_per_group"] = std::move(votes);
  doc["matrices"] = std::move(mats);
  doc["counts"] = std::move(counts);
  return doc;
}

GroupMargins GroupMarginsFromJson(const Json& doc) {
  GroupMargins gm;
  gm.roster = Get<std::vector<std::string>>(doc, "roster");
  gm.groups = Get<std::vector<std::string>>(doc, "groups");
  gm.eta = Get<double>(doc, "eta");
  gm.tie_policy = ParseTiePolicy(Get<std::string>(doc, "tie_policy"));
  const auto keyed = [&](const char* key, bool required) -> const Json* {
    if (!doc.contains(key)) {
      if (required) throw InputError(std::string("margins JSON: missing key '") + key + "'");
      return nullptr;
    }
    const Json& obj = doc.at(key);
    if (!obj.is_object()) {
      throw InputError(std::string("margins JSON: '") + key + "' must map group ids to values");
    }
    for (const auto& g : gm.groups) {
      if (!obj.contains(g)) {
        throw InputError(std::string("margins JSON: '") + key + "' has no entry for group '" +
                         g + "'");
      }
    }
    if (obj.size() != gm.groups.size()) {
      throw InputError(std::string("margins JSON: '") + key + "' names groups not in 'groups'");
    }
    return &obj;
  };
  const Json* votes = keyed("votes_per_group", true);
  const Json* mats = keyed("matrices", true);
  const Json* counts = keyed("counts", false);
  const std::size_t m = gm.roster.size();
  for (const auto& g : gm.groups) {
    const Json& v = votes->at(g);
    if (!v.is_number() || !(v.get<double>() >= 0.0)) {
      throw InputError("margins JSON: votes_per_group['" + g + "'] must be a nonnegative number");
    }
    gm.votes_per_group.push_back(v.get<double>());
    MarginMatrix mm;
    mm.roster = gm.roster;
    mm.margins = MatrixFromJson(mats->at(g), m, "matrices['" + g + "']");
    mm.counts = counts != nullptr ? MatrixFromJson(counts->at(g), m, "counts['" + g + "']")
                                  : Matrix(m, m, 0.0);
    gm.per_group.push_back(std::move(mm));
  }
  gm.Validate();
  return gm;
}

Json LotteryToJson(const Lottery& lottery) {
  Json doc;
  doc["roster"] = lottery.roster;
  doc["probs"] = lottery.probs;
  doc["value"] = lottery.value;
  const auto support = lottery.Support();
  doc["support"] = IdList(lottery.roster, support);
  return doc;
}

Json RobustReportToJson(const RobustSolveReport& report,
                        const std::vector<std::string>& groups) {
  const auto& roster = report.lottery.roster;
  Json doc;
  doc["rho"] = report.rho;
  doc["w0"] = report.center;
  doc["groups"] = groups;
  doc["lottery"] = LotteryToJson(report.lottery);
  doc["robust_value"] = report.robust_value;
  doc["robust_win_rate"] = 0.5 + 0.5 * report.robust_value;
  doc["active"] = IdList(roster, report.active_alternatives);
  Json duals;
  duals["mu"] = report.duals.mu;
  duals["lambda"] = report.duals.lambda;
  duals["gamma"] = report.duals.gamma;
  doc["duals"] = std::move(duals);
  Json worst;
  worst["value"] = report.worst_case.value;
  worst["opponent"] = report.worst_case.alternative < roster.size()
                          ? Json(roster[report.worst_case.alternative])
                          : Json(nullptr);
  worst["weights"] = report.worst_case.weights;
  if (!report.worst_case.weights.empty()) {
    std::size_t heaviest = 0;
    for (std::size_t k = 1; k < report.worst_case.weights.size(); ++k) {
      if (report.worst_case.weights[k] > report.worst_case.weights[heaviest]) heaviest = k;
    }
    worst["heaviest_group"] = heaviest < groups.size() ? Json(groups[heaviest]) : Json(nullptr);
  }
  doc["worst_case"] = std::move(worst);
  return doc;
}

std::string SweepToCsv(std::span<const SweepPoint> points,
                       const std::vector<std::string>& groups) {
  std::ostringstream out;
  out << "rho,split,kind,group,mean,std_error\n";
  for (const auto& p : points) {
    const std::string head = Num(p.rho) + "," + SplitName(p.split) + ",";
    out << head << "overall,," << Num(p.overall.mean) << ','
        << Num(p.overall.std_error) << '\n';
    out << head << "worst_group,," << Num(p.worst_group.mean) << ','
        << Num(p.worst_group.std_error) << '\n';
    for (std::size_t k = 0; k < p.per_group.size(); ++k) {
      out << head << "group," << Field(groups.at(k)) << ','
          << Num(p.per_group[k].mean) << ',' << Num(p.per_group[k].std_error)
          << '\n';
    }
  }
  return out.str();
}

Json SweepToJson(std::span<const SweepPoint> points,
                 const std::vector<std::string>& groups) {
  auto ms = [](const MeanStderr& v) {
    Json j;
    j["mean"] = v.mean;
    j["std_error"] = v.std_error;
    return j;
  };
  Json doc;
  doc["groups"] = groups;
  Json arr = Json::array();
  for (const auto& p : points) {
    Json j;
    j["rho"] = p.rho;
    j["split"] = SplitName(p.split);
    j["overall"] = ms(p.overall);
    j["worst_group"] = ms(p.worst_group);
    Json per = Json::array();
    for (const auto& g : p.per_group) per.push_back(ms(g));
    j["per_group"] = std::move(per);
    j["lottery"] = LotteryToJson(p.lottery);
    arr.push_back(std::move(j));
  }
  doc["points"] = std::move(arr);
  return doc;
}

std::string FrontierToCsv(std::span<const FrontierPoint> points) {
  std::ostringstream out;
  out << "budget,feasible,worst_case_win_rate,expected_cost,support\n";
  for (const auto& p : points) {
    std::string support;
    if (p.feasible) {
      for (std::size_t i : p.lottery.Support()) {
        if (!support.empty()) support += ';';
        support += p.lottery.roster[i] + ":" + Num(p.lottery.probs[i]);
      }
    }
    out << Num(p.budget) << ',' << (p.feasible ? "true" : "false") << ','
        << Num(p.worst_case_win_rate) << ',' << Num(p.expected_cost) << ','
        << Field(support) << '\n';
  }
  return out.str();
}

Json FrontierToJson(std::span<const FrontierPoint> points) {
  Json arr = Json::array();
  for (const auto& p : points) {
    Json j;
    j["budget"] = p.budget;
    j["feasible"] = p.feasible;
    j["worst_case_win_rate"] = p.worst_case_win_rate;
    j["expected_cost"] = p.expected_cost;
    j["lottery"] = p.feasible ? LotteryToJson(p.lottery) : Json(nullptr);
    arr.push_back(std::move(j));
  }
  Json doc;
  doc["points"] = std::move(arr);
  return doc;
}

std::string RegretToCsv(std::span<const RegretSample> samples) {
  std::ostringstream out;
  out << "trial,rho_used,regret,tv_distance,covered,bound\n";
  for (const auto& s : samples) {
    out << s.trial << ',' << Num(s.rho_used) << ',' << Num(s.regret) << ','
        << Num(s.tv_distance) << ',' << (s.covered ? "true" : "false") << ','
        << Num(s.bound) << '\n';
  }
  return out.str();
}

Json RegretToJson(std::span<const RegretSample> samples, std::uint64_t n,
                  double delta) {
  const RegretSummary sum = SummarizeRegret(samples);
  Json doc;
  doc["n"] = n;
  doc["delta"] = delta;
  doc["trials"] = samples.size();
  doc["coverage"] = sum.coverage;
  doc["within_bound"] = sum.within_bound;
  doc["mean_regret"] = sum.regret.mean;
  doc["regret_std"] = sum.regret.std_error;
  Json arr = Json::array();
  for (const auto& s : samples) {
    Json j;
    j["trial"] = s.trial;
    j["rho_used"] = s.rho_used;
    j["regret"] = s.regret;
    j["tv_distance"] = s.tv_distance;
    j["covered"] = s.covered;
    j["bound"] = s.bound;
    arr.push_back(std::move(j));
  }
  doc["samples"] = std::move(arr);
  return doc;
}

std::string VotesToCsv(const VoteTable& votes) {
  std::ostringstream out;
  out << "model_a,model_b,winner,group,weight\n";
  for (const auto& r : votes.records()) {
    const char* w = r.outcome == Outcome::kAWins   ? "a"
                    : r.outcome == Outcome::kBWins ? "b"
                                                   : "tie";
    out << Field(r.model_a) << ',' << Field(r.model_b) << ',' << w << ','
        << Field(r.group) << ',' << Num(r.weight) << '\n';
  }
  return out.str();
}

std::vector<double> ParseCosts(std::istream& input,
                               const std::vector<std::string>& roster) {
  std::map<std::string, double> costs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (TrimCopy(line).empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw InputError("costs line " + std::to_string(line_no) + ": expected model,cost");
    }
    std::string id = TrimCopy(line.substr(0, comma));
    if (id.size() >= 2 && id.front() == '"' && id.back() == '"') id = id.substr(1, id.size() - 2);
    const std::string value = TrimCopy(line.substr(comma + 1));
    if (line_no == 1 && id == "model" && value == "cost") continue;
    char* end = nullptr;
    const double c = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(c) || c < 0.0) {
      throw InputError("costs line " + std::to_string(line_no) +
                       ": cost must be a nonnegative number");
    }
    if (!costs.emplace(id, c).second) {
      throw InputError("costs line " + std::to_string(line_no) + ": duplicate model '" + id + "'");
    }
  }
  std::vector<double> out;
  for (const auto& id : roster) {
    const auto it = costs.find(id);
    if (it == costs.end()) throw InputError("costs: no cost for model '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    if (!out) throw InputError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot rename onto '" + path + "'");
  }
}

VoteFormat FormatFromPath(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return VoteFormat::kCsv;
  if (ext == ".jsonl" || ext == ".ndjson") return VoteFormat::kJsonl;
  throw InputError("cannot infer vote format from '" + path +
                   "' (use .csv or .jsonl, or pass --format)");
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = TrimCopy(item);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(v)) {
      throw InputError("'" + text + "' is not a comma-separated list of numbers");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

}  // namespace mlot
