// Copyright 2026 The fairsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairsynth/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <utility>

#include "fairsynth/error.hpp"

namespace fairsynth {

double KsComplement(std::span<const double> real, std::span<const double> synth) {
  if (real.empty() || synth.empty()) {
    throw Error(ErrorCode::kEmptyColumn, "KS complement needs nonempty columns");
  }
  std::vector<double> a(real.begin(), real.end());
  std::vector<double> b(synth.begin(), synth.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Integer numerators: |i/na - j/nb| = |i*nb - j*na| / (na*nb).
  const std::uint64_t na = a.size();
  const std::uint64_t nb = b.size();
  std::size_t i = 0, j = 0;
  std::uint64_t d = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i == a.size()) {
      x = b[j];
    } else if (j == b.size()) {
      x = a[i];
    } else {
      x = std::min(a[i], b[j]);
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    const std::uint64_t lhs = i * nb;
    const std::uint64_t rhs = j * na;
    d = std::max(d, lhs > rhs ? lhs - rhs : rhs - lhs);
  }
  return 1.0 - static_cast<double>(d) / (static_cast<double>(na) * static_cast<double>(nb));
}

namespace {

// 1 - (1/2) sum |p/np - q/nq| with the sum kept as an exact integer
// numerator over np*nq.
template <typename Key>
double TvdComplement(const std::map<Key, std::size_t>& p, std::size_t np,
                     const std::map<Key, std::size_t>& q, std::size_t nq) {
  std::uint64_t total = 0;
  auto pi = p.begin();
  auto qi = q.begin();
  while (pi != p.end() || qi != q.end()) {
    if (qi == q.end() || (pi != p.end() && pi->first < qi->first)) {
      total += static_cast<std::uint64_t>(pi->second) * nq;
      ++pi;
    } else if (pi == p.end() || qi->first < pi->first) {
      total += static_cast<std::uint64_t>(qi->second) * np;
      ++qi;
    } else {
      const std::uint64_t lhs = static_cast<std::uint64_t>(pi->second) * nq;
      const std::uint64_t rhs = static_cast<std::uint64_t>(qi->second) * np;
      total += lhs > rhs ? lhs - rhs : rhs - lhs;
      ++pi;
      ++qi;
    }
  }
  const double denom = 2.0 * static_cast<double>(np) * static_cast<double>(nq);
  return std::clamp(1.0 - static_cast<double>(total) / denom, 0.0, 1.0);
}

}  // namespace

double TvComplement(std::span<const std::string> real,
                    std::span<const std::string> synth) {
  if (real.empty() || synth.empty()) {
    throw Error(ErrorCode::kEmptyColumn, "TV complement needs nonempty columns");
  }
  std::map<std::string, std::size_t> p, q;
  for (const auto& v : real) ++p[v];
  for (const auto& v : synth) ++q[v];
  return TvdComplement(p, real.size(), q, synth.size());
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "Pearson inputs differ in length");
  }
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  const double dn = static_cast<double>(n);
  if (saa / dn < 1e-12 || sbb / dn < 1e-12) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double CorrelationSimilarity(std::span<const double> real_a,
                             std::span<const double> real_b,
                             std::span<const double> synth_a,
                             std::span<const double> synth_b) {
  if (real_a.empty() || synth_a.empty()) {
    throw Error(ErrorCode::kEmptyColumn, "correlation similarity needs data");
  }
  const double rho_real = Pearson(real_a, real_b);
  const double rho_synth = Pearson(synth_a, synth_b);
  return std::clamp(1.0 - std::fabs(rho_real - rho_synth) / 2.0, 0.0, 1.0);
}

double ContingencySimilarity(std::span<const std::string> real_a,
                             std::span<const std::string> real_b,
                             std::span<const std::string> synth_a,
                             std::span<const std::string> synth_b) {
  if (real_a.size() != real_b.size() || synth_a.size() != synth_b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "contingency pair lengths differ");
  }
  if (real_a.empty() || synth_a.empty()) {
    throw Error(ErrorCode::kEmptyColumn, "contingency similarity needs data");
  }
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::size_t> p, q;
  for (std::size_t i = 0; i < real_a.size(); ++i) ++p[{real_a[i], real_b[i]}];
  for (std::size_t i = 0; i < synth_a.size(); ++i) ++q[{synth_a[i], synth_b[i]}];
  return TvdComplement(p, real_a.size(), q, synth_a.size());
}

std::array<double, 3> QuartileEdges(std::span<const double> real) {
  if (real.empty()) throw Error(ErrorCode::kEmptyColumn, "no values to bin");
  std::vector<double> x(real.begin(), real.end());
  std::sort(x.begin(), x.end());
  std::array<double, 3> edges{};
  const double last = static_cast<double>(x.size() - 1);
  for (int k = 0; k < 3; ++k) {
    const double h = last * 0.25 * (k + 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    edges[static_cast<std::size_t>(k)] = x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
  }
  return edges;
}

int QuartileBin(const std::array<double, 3>& edges, double x) {
  int bin = 0;
  for (double e : edges) {
    if (x > e) ++bin;
  }
  return bin;
}

namespace {

std::vector<std::string> Labels(const Column& col) {
  std::vector<std::string> out;
  out.reserve(col.size());
  for (std::size_t r = 0; r < col.size(); ++r) out.push_back(col.Label(r));
  return out;
}

std::vector<std::string> Binned(const Column& col, const std::array<double, 3>& edges) {
  static const char* const kNames[] = {"q1", "q2", "q3", "q4"};
  std::vector<std::string> out;
  out.reserve(col.size());
  for (double v : col.values) out.emplace_back(kNames[QuartileBin(edges, v)]);
  return out;
}

// Categorical view of a column for contingency tables; numeric columns are
// binned at the real column's quartiles.
std::vector<std::string> Discrete(const Column& col, const Column& real_ref) {
  if (col.kind == ColumnKind::kCategorical) return Labels(col);
  return Binned(col, QuartileEdges(real_ref.values));
}

PairTrend ScorePair(const Dataset& real, const Dataset& synth, std::size_t a,
                    std::size_t b) {
  const auto& names = real.schema().columns;
  const Column& ra = real.column(a);
  const Column& rb = real.column(b);
  const Column& sa = synth.column(a);
  const Column& sb = synth.column(b);
  PairTrend t{names[a].name, names[b].name, "", 0.0};
  if (ra.kind == ColumnKind::kNumeric && rb.kind == ColumnKind::kNumeric) {
    t.metric = kCorrelationSimilarity;
    t.score = CorrelationSimilarity(ra.values, rb.values, sa.values, sb.values);
  } else {
    t.metric = kContingencySimilarity;
    t.score = ContingencySimilarity(Discrete(ra, ra), Discrete(rb, rb),
                                    Discrete(sa, ra), Discrete(sb, rb));
  }
  return t;
}

std::vector<std::pair<std::size_t, std::size_t>> PairIndex(std::size_t d) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

namespace serial {

std::vector<PairTrend> PairTrends(const Dataset& real, const Dataset& synth) {
  std::vector<PairTrend> out;
  for (const auto& [a, b] : PairIndex(real.column_count())) {
    out.push_back(ScorePair(real, synth, a, b));
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<PairTrend> PairTrends(const Dataset& real, const Dataset& synth) {
  const auto index = PairIndex(real.column_count());
  std::vector<PairTrend> out(index.size());
  const long pairs = static_cast<long>(index.size());
  // Exceptions may not leave a parallel region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long p = 0; p < pairs; ++p) {
    try {
      const auto [a, b] = index[static_cast<std::size_t>(p)];
      out[static_cast<std::size_t>(p)] = ScorePair(real, synth, a, b);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace omp

QualityReport ComputeQualityReport(const Dataset& real, const Dataset& synth) {
  if (real.schema() != synth.schema()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "real and synthetic tables have different schemas");
  }
  QualityReport report;
  double shape_sum = 0.0;
  for (std::size_t c = 0; c < real.column_count(); ++c) {
    const Column& rc = real.column(c);
    const Column& sc = synth.column(c);
    ShapeScore s{real.schema().columns[c].name, "", 0.0};
    if (rc.kind == ColumnKind::kNumeric) {
      s.metric = kKsComplement;
      s.score = KsComplement(rc.values, sc.values);
    } else {
      s.metric = kTvComplement;
      s.score = TvComplement(Labels(rc), Labels(sc));
    }
    shape_sum += s.score;
    report.shapes.push_back(std::move(s));
  }
  report.shapes_average =
      report.shapes.empty() ? 0.0 : shape_sum / static_cast<double>(report.shapes.size());
  report.pair_trends = omp::PairTrends(real, synth);
  if (report.pair_trends.empty()) {
    report.trends_average = report.shapes_average;
  } else {
    double sum = 0.0;
    for (const auto& t : report.pair_trends) sum += t.score;
    report.trends_average = sum / static_cast<double>(report.pair_trends.size());
  }
  report.overall_score = (report.shapes_average + report.trends_average) / 2.0;
  return report;
}

}  // namespace fairsynth
