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

#include "mlot/prefdata.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "mlot/rng.h"

namespace mlot {
namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

std::vector<std::string> SortedUnique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string AtLine(std::size_t line) {
  return " at line " + std::to_string(line);
}

// One CSV line; double quotes may wrap fields and "" escapes a quote.
std::vector<std::string> SplitCsvLine(const std::string& line,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : Trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw InputError("malformed row" + AtLine(line_no) + ": unterminated quote");
  fields.push_back(was_quoted ? cur : Trim(cur));
  return fields;
}

Outcome ParseWinner(const std::string& token, std::size_t line_no) {
  if (token == "a" || token == "model_a") return Outcome::kAWins;
  if (token == "b" || token == "model_b") return Outcome::kBWins;
  if (token == "tie" || token == "tie (bothbad)") return Outcome::kTie;
  throw InputError("unknown winner token '" + token + "'" + AtLine(line_no));
}

double ParseWeight(const std::string& token, std::size_t line_no) {
  if (token.empty()) return 1.0;
  std::size_t used = 0;
  double w = 0.0;
  try {
    w = std::stod(token, &used);
  } catch (const std::exception&) {
    throw InputError("malformed row" + AtLine(line_no) + ": bad weight '" +
                     token + "'");
  }
  if (used != token.size() || !std::isfinite(w) || w < 0.0) {
    throw InputError("malformed row" + AtLine(line_no) + ": bad weight '" +
                     token + "'");
  }
  return w;
}

VoteRecord MakeRecord(std::string a, std::string b, const std::string& winner,
                      std::string group, double weight, std::size_t line_no) {
  if (a.empty() || b.empty() || group.empty()) {
    throw InputError("malformed row" + AtLine(line_no) + ": empty field");
  }
  if (a == b) throw InputError("self-comparison" + AtLine(line_no));
  return VoteRecord{std::move(a), std::move(b), ParseWinner(winner, line_no),
                    std::move(group), weight};
}

std::vector<VoteRecord> ParseCsv(std::istream& in, const ParseOptions& opt) {
  std::vector<VoteRecord> records;
  std::string line;
  std::size_t line_no = 0;
  // Column positions; default layout when there is no header.
  std::size_t ia = 0, ib = 1, iw = 2, ig = 3, iweight = 4;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitCsvLine(line, line_no);
    if (first) {
      first = false;
      const auto find = [&](const std::string& name) {
        const auto it = std::find(fields.begin(), fields.end(), name);
        return it == fields.end() ? kNpos : static_cast<std::size_t>(it - fields.begin());
      };
      if (find("model_a") != kNpos) {
        ia = find("model_a");
        ib = find("model_b");
        iw = find("winner");
        ig = find(opt.group_field);
        iweight = find("weight");
        if (ib == kNpos || iw == kNpos || ig == kNpos) {
          throw InputError("malformed row" + AtLine(line_no) +
                           ": header must name model_a, model_b, winner, " +
                           opt.group_field);
        }
        continue;
      }
    }
    const std::size_t needed = std::max({ia, ib, iw, ig}) + 1;
    if (fields.size() < needed) {
      throw InputError("malformed row" + AtLine(line_no) + ": expected at least " +
                       std::to_string(needed) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const double w = (iweight != kNpos && iweight < fields.size())
                         ? ParseWeight(fields[iweight], line_no)
                         : 1.0;
    records.push_back(MakeRecord(fields[ia], fields[ib], fields[iw], fields[ig],
                                 w, line_no));
  }
  return records;
}

std::vector<VoteRecord> ParseJsonl(std::istream& in, const ParseOptions& opt) {
  std::vector<VoteRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed row" + AtLine(line_no) + ": " + e.what());
    }
    const auto field = [&](const std::string& key) -> std::string {
      if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
        throw InputError("malformed row" + AtLine(line_no) +
                         ": missing string field '" + key + "'");
      }
      return obj[key].get<std::string>();
    };
    double w = 1.0;
    if (obj.is_object() && obj.contains("weight")) {
      if (!obj["weight"].is_number()) {
        throw InputError("malformed row" + AtLine(line_no) + ": weight is not a number");
      }
      w = obj["weight"].get<double>();
      if (!std::isfinite(w) || w < 0.0) {
        throw InputError("malformed row" + AtLine(line_no) + ": negative weight");
      }
    }
    records.push_back(MakeRecord(field("model_a"), field("model_b"),
                                 field("winner"), field(opt.group_field), w,
                                 line_no));
  }
  return records;
}

int Sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

// ---------------------------------------------------------------------------
// VoteTable

VoteTable::VoteTable(std::vector<VoteRecord> records)
    : records_(std::move(records)) {
  std::vector<std::string> models, groups;
  for (const auto& r : records_) {
    models.push_back(r.model_a);
    models.push_back(r.model_b);
    groups.push_back(r.group);
  }
  roster_ = SortedUnique(std::move(models));
  groups_ = SortedUnique(std::move(groups));
  Validate();
}

VoteTable::VoteTable(std::vector<VoteRecord> records,
                     std::vector<std::string> roster,
                     std::vector<std::string> groups)
    : records_(std::move(records)),
      roster_(std::move(roster)),
      groups_(std::move(groups)) {
  Validate();
}

void VoteTable::Validate() const {
  if (std::set<std::string>(roster_.begin(), roster_.end()).size() != roster_.size()) {
    throw InputError("VoteTable: duplicate model id in roster");
  }
  if (std::set<std::string>(groups_.begin(), groups_.end()).size() != groups_.size()) {
    throw InputError("VoteTable: duplicate group id");
  }
  for (const auto& r : records_) {
    if (r.model_a == r.model_b) throw InputError("VoteTable: self-comparison record");
    if (!(r.weight >= 0.0)) throw InputError("VoteTable: negative weight");
    ModelIndex(r.model_a);
    ModelIndex(r.model_b);
    GroupIndex(r.group);
  }
}

std::size_t VoteTable::ModelIndex(const std::string& id) const {
  const auto it = std::find(roster_.begin(), roster_.end(), id);
  if (it == roster_.end()) throw InputError("unknown model '" + id + "'");
  return static_cast<std::size_t>(it - roster_.begin());
}

std::size_t VoteTable::GroupIndex(const std::string& id) const {
  const auto it = std::find(groups_.begin(), groups_.end(), id);
  if (it == groups_.end()) throw InputError("unknown group '" + id + "'");
  return static_cast<std::size_t>(it - groups_.begin());
}

VoteTable ParseVotes(std::istream& input, VoteFormat format,
                     const ParseOptions& options) {
  return VoteTable(format == VoteFormat::kCsv ? ParseCsv(input, options)
                                              : ParseJsonl(input, options));
}

VoteTable FilterGroups(const VoteTable& votes,
                       std::span<const std::string> allowed,
                       std::size_t* dropped) {
  const std::set<std::string> keep(allowed.begin(), allowed.end());
  std::vector<VoteRecord> kept;
  std::size_t n_dropped = 0;
  for (const auto& r : votes.records()) {
    if (keep.count(r.group)) {
      kept.push_back(r);
    } else {
      ++n_dropped;
    }
  }
  if (dropped) *dropped = n_dropped;
  std::vector<std::string> groups;
  for (const auto& g : votes.groups()) {
    if (keep.count(g)) groups.push_back(g);
  }
  return VoteTable(std::move(kept), votes.roster(), std::move(groups));
}

const char* TiePolicyName(TiePolicy policy) {
  return policy == TiePolicy::kDrop ? "drop" : "half_win";
}

TiePolicy ParseTiePolicy(const std::string& name) {
  if (name == "drop") return TiePolicy::kDrop;
  if (name == "half_win") return TiePolicy::kHalfWin;
  throw InputError("unknown tie policy '" + name + "' (expected drop|half_win)");
}

// ---------------------------------------------------------------------------
// Matrices and weights

void MarginMatrix::Validate(double tol) const {
  const std::size_t m = roster.size();
  if (margins.rows() != m || margins.cols() != m) {
    throw InputError("MarginMatrix: margins shape does not match roster");
  }
  if (counts.rows() != m || counts.cols() != m) {
    throw InputError("MarginMatrix: counts shape does not match roster");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (margins(i, i) != 0.0) throw InputError("MarginMatrix: nonzero diagonal");
    for (std::size_t j = 0; j < m; ++j) {
      const double v = margins(i, j);
      if (!std::isfinite(v) || std::abs(v) > 1.0 + tol) {
        throw InputError("MarginMatrix: entry outside [-1, 1]");
      }
      if (std::abs(v + margins(j, i)) > tol) {
        throw InputError("MarginMatrix: not skew-symmetric");
      }
      if (counts(i, j) < 0.0 || counts(i, j) != counts(j, i)) {
        throw InputError("MarginMatrix: counts not symmetric and nonnegative");
      }
    }
  }
}

MarginMatrix MakeMarginMatrix(std::vector<std::string> roster, Matrix margins) {
  const std::size_t m = roster.size();
  MarginMatrix mm{std::move(roster), std::move(margins), Matrix(m, m, 0.0)};
  mm.Validate();
  return mm;
}

MixtureWeights::MixtureWeights(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("MixtureWeights: empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InputError("MixtureWeights: negative or non-finite entry");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InputError("MixtureWeights: entries sum to " + FormatDouble(sum) +
                     ", expected 1");
  }
}

MixtureWeights MixtureWeights::Normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("MixtureWeights: negative entry");
    sum += w;
  }
  if (!(sum > 0.0)) throw InputError("MixtureWeights: zero total weight");
  for (double& w : weights) w /= sum;
  return MixtureWeights(std::move(weights));
}

MixtureWeights MixtureWeights::Uniform(std::size_t k) {
  return Normalized(std::vector<double>(k, 1.0));
}

void GroupMargins::Validate() const {
  if (per_group.size() != groups.size() ||
      votes_per_group.size() != groups.size()) {
    throw InputError("GroupMargins: per-group arrays do not match group list");
  }
  for (const auto& mm : per_group) {
    if (mm.roster != roster) throw InputError("GroupMargins: roster mismatch");
    mm.Validate();
  }
}

GroupMargins MakeGroupMargins(std::vector<std::string> roster,
                              std::vector<std::string> groups,
                              std::vector<Matrix> matrices) {
  if (matrices.size() != groups.size()) {
    throw InputError("MakeGroupMargins: one matrix per group required");
  }
  GroupMargins gm;
  gm.roster = std::move(roster);
  gm.groups = std::move(groups);
  for (auto& mat : matrices) {
    gm.per_group.push_back(MakeMarginMatrix(gm.roster, std::move(mat)));
  }
  gm.votes_per_group.assign(gm.groups.size(), 0.0);
  return gm;
}

GroupMargins BuildMargins(const VoteTable& votes, double eta,
                          TiePolicy tie_policy) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw InputError("BuildMargins: smoothing eta must be nonnegative");
  }
  const std::size_t m = votes.roster().size();
  const std::size_t k_groups = votes.groups().size();
  std::vector<Matrix> wins(k_groups, Matrix(m, m, 0.0));
  GroupMargins gm;
  gm.roster = votes.roster();
  gm.groups = votes.groups();
  gm.votes_per_group.assign(k_groups, 0.0);
  gm.eta = eta;
  gm.tie_policy = tie_policy;

  for (const auto& r : votes.records()) {
    const std::size_t a = votes.ModelIndex(r.model_a);
    const std::size_t b = votes.ModelIndex(r.model_b);
    const std::size_t k = votes.GroupIndex(r.group);
    gm.votes_per_group[k] += r.weight;
    switch (r.outcome) {
      case Outcome::kAWins:
        wins[k](a, b) += r.weight;
        break;
      case Outcome::kBWins:
        wins[k](b, a) += r.weight;
        break;
      case Outcome::kTie:
        if (tie_policy == TiePolicy::kHalfWin) {
          wins[k](a, b) += 0.5 * r.weight;
          wins[k](b, a) += 0.5 * r.weight;
        }
        break;
    }
  }

  for (std::size_t k = 0; k < k_groups; ++k) {
    MarginMatrix mm{gm.roster, Matrix(m, m, 0.0), Matrix(m, m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double wij = wins[k](i, j);
        const double wji = wins[k](j, i);
        mm.counts(i, j) = mm.counts(j, i) = wij + wji;
        const double a = wij + eta;
        const double b = wji + eta;
        const double margin = (a + b > 0.0) ? (a - b) / (a + b) : 0.0;
        mm.margins(i, j) = margin;
        mm.margins(j, i) = -margin;
      }
    }
    gm.per_group.push_back(std::move(mm));
  }
  return gm;
}

MarginMatrix PooledMatrix(const GroupMargins& gm, const MixtureWeights& w) {
  if (w.size() != gm.num_groups()) {
    throw InputError("PooledMatrix: weights have length " +
                     std::to_string(w.size()) + ", expected " +
                     std::to_string(gm.num_groups()));
  }
  const std::size_t m = gm.num_models();
  MarginMatrix out{gm.roster, Matrix(m, m, 0.0), Matrix(m, m, 0.0)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double v = 0.0;
      double n = 0.0;
      for (std::size_t k = 0; k < gm.num_groups(); ++k) {
        v += w[k] * gm.per_group[k].margins(i, j);
        n += gm.per_group[k].counts(i, j);
      }
      v = std::clamp(v, -1.0, 1.0);
      out.margins(i, j) = v;
      out.margins(j, i) = -v;
      out.counts(i, j) = out.counts(j, i) = n;
    }
  }
  return out;
}

MixtureWeights EmpiricalWeights(const VoteTable& votes) {
  if (votes.empty()) throw InputError("EmpiricalWeights: empty vote table");
  std::vector<double> totals(votes.groups().size(), 0.0);
  for (const auto& r : votes.records()) totals[votes.GroupIndex(r.group)] += r.weight;
  return MixtureWeights::Normalized(std::move(totals));
}

MixtureWeights VoteShareWeights(const GroupMargins& gm) {
  return MixtureWeights::Normalized(gm.votes_per_group);
}

double WinRate(std::span<const double> p, const MarginMatrix& m,
               std::span<const double> q) {
  if (p.size() != m.size() || q.size() != m.size()) {
    throw InputError("WinRate: lottery dimension does not match roster");
  }
  return 0.5 + 0.5 * Dot(LeftMultiply(p, m.margins), q);
}

double ReversalRate(const GroupMargins& gm, const MixtureWeights& w,
                    std::size_t i, std::size_t j) {
  const std::size_t k_groups = gm.num_groups();
  if (k_groups < 2) throw InputError("reversal undefined for one group");
  if (w.size() != k_groups) throw InputError("ReversalRate: weight length mismatch");
  if (i == j || i >= gm.num_models() || j >= gm.num_models()) {
    throw InputError("ReversalRate: need two distinct valid model indices");
  }
  double disagree = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < k_groups; ++k) {
    for (std::size_t l = 0; l < k_groups; ++l) {
      if (k == l) continue;
      const double pw = w[k] * w[l];
      total += pw;
      if (Sign(gm.per_group[k].margins(i, j)) != Sign(gm.per_group[l].margins(i, j))) {
        disagree += pw;
      }
    }
  }
  if (!(total > 0.0)) {
    throw InputError("reversal undefined: fewer than two groups carry weight");
  }
  return disagree / total;
}

// ---------------------------------------------------------------------------
// Resampling

std::pair<VoteTable, VoteTable> Split(const VoteTable& votes,
                                      double train_fraction,
                                      std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("Split: train fraction must lie in (0, 1)");
  }
  if (votes.empty()) throw InputError("Split: empty vote table");
  std::vector<std::size_t> idx(votes.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, "split");
  rng.Shuffle(std::span<std::size_t>(idx));
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(votes.size())));
  std::vector<VoteRecord> train, test;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    (t < n_train ? train : test).push_back(votes.records()[idx[t]]);
  }
  return {VoteTable(std::move(train), votes.roster(), votes.groups()),
          VoteTable(std::move(test), votes.roster(), votes.groups())};
}

VoteTable BootstrapResample(const VoteTable& votes, std::uint64_t seed,
                            std::uint64_t replicate) {
  if (votes.empty()) throw InputError("BootstrapResample: empty vote table");
  Rng rng(seed, "bootstrap", replicate);
  const std::size_t n = votes.size();
  std::vector<VoteRecord> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    out.push_back(votes.records()[rng.UniformInt(n)]);
  }
  return VoteTable(std::move(out), votes.roster(), votes.groups());
}

VoteTable StratifiedBootstrapResample(const VoteTable& votes,
                                      std::uint64_t seed,
                                      std::uint64_t replicate) {
  if (votes.empty()) throw InputError("BootstrapResample: empty vote table");
  Rng rng(seed, "bootstrap-stratified", replicate);
  std::vector<std::vector<std::size_t>> by_group(votes.groups().size());
  for (std::size_t t = 0; t < votes.size(); ++t) {
    by_group[votes.GroupIndex(votes.records()[t].group)].push_back(t);
  }
  std::vector<VoteRecord> out;
  out.reserve(votes.size());
  for (const auto& members : by_group) {
    for (std::size_t t = 0; t < members.size(); ++t) {
      out.push_back(votes.records()[members[rng.UniformInt(members.size())]]);
    }
  }
  return VoteTable(std::move(out), votes.roster(), votes.groups());
}

}  // namespace mlot
