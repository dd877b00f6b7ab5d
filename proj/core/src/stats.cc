// Copyright 2026 The kfuse Authors.
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

#include "kfuse/stats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace kfuse {
namespace {

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

// Sum of squared deviations from the mean.
double SumSquares(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss;
}

// Continued fraction for I_x(a, b), modified Lentz's method.
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

}  // namespace

double Mse(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) {
    throw StatsError("mse: length mismatch (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(gold.size()) + ")");
  }
  if (pred.empty()) throw StatsError("mse: empty input");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gold[i];
    sum += d * d;
  }
  return sum / double(pred.size());
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double rank = 0.5 * double(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw StatsError("spearman: length mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw StatsError("spearman: need at least two values");
  std::vector<double> rx = FractionalRanks(x);
  std::vector<double> ry = FractionalRanks(y);
  const double mx = Mean(rx);
  const double my = Mean(ry);
  double sxy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) sxy += (rx[i] - mx) * (ry[i] - my);
  const double sxx = SumSquares(rx, mx);
  const double syy = SumSquares(ry, my);
  if (sxx == 0.0 || syy == 0.0) {
    throw StatsError("spearman: constant input, correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw StatsError("incomplete beta: a and b must be positive");
  }
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest for x < (a + 1) / (a + b + 2).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double TCdf(double t, double df) {
  if (!(df > 0.0)) throw StatsError("t_cdf: df must be positive");
  if (std::isnan(t)) return t;
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2).
  const double x = df / (df + t * t);
  const double tail = 0.5 * RegularizedIncompleteBeta(0.5 * df, 0.5, x);
  return t < 0.0 ? tail : 1.0 - tail;
}

TTestResult TTestOneTailed(const RunSeries &baseline,
                           const RunSeries &treatment) {
  const size_t n1 = baseline.values.size();
  const size_t n2 = treatment.values.size();
  if (n1 < 2 || n2 < 2) {
    throw StatsError("t-test: each series needs at least two runs (got " +
                     std::to_string(n1) + " and " + std::to_string(n2) + ")");
  }
  if (baseline.direction != treatment.direction) {
    throw StatsError("t-test: series disagree on metric direction");
  }
  const double m1 = Mean(baseline.values);
  const double m2 = Mean(treatment.values);
  const int df = int(n1 + n2 - 2);
  const double pooled_var =
      (SumSquares(baseline.values, m1) + SumSquares(treatment.values, m2)) /
      double(df);
  const double se =
      std::sqrt(pooled_var * (1.0 / double(n1) + 1.0 / double(n2)));

  TTestResult result;
  result.df = df;
  if (se == 0.0) {
    if (m1 == m2) {
      result.t_statistic = 0.0;
      result.p_value = 0.5;
      return result;
    }
    throw StatsError("t-test: zero variance with unequal means");
  }
  result.t_statistic = (m1 - m2) / se;
  result.p_value = treatment.direction == Direction::kHigherBetter
                       ? TCdf(result.t_statistic, df)
                       : TCdf(-result.t_statistic, df);
  return result;
}

Summary Aggregate(std::span<const double> values) {
  if (values.size() < 2) {
    throw StatsError("aggregate: need at least two values for a deviation");
  }
  Summary s;
  s.mean = Mean(values);
  s.stddev = std::sqrt(SumSquares(values, s.mean) / double(values.size() - 1));
  return s;
}

double RoundHalfAway(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string FormatFixed4(double value) {
  double rounded = RoundHalfAway(value, 4);
  if (rounded == 0.0) rounded = 0.0;  // no "-0.0000"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", rounded);
  return buf;
}

namespace {

struct Cells {
  std::string t, df, p, mean, sd;
};

Cells CellsOf(const ReportRow &row) {
  Cells c;
  if (const auto *t = std::get_if<TTestResult>(&row.cell)) {
    c.t = FormatFixed4(t->t_statistic);
    c.df = std::to_string(t->df);
    c.p = FormatFixed4(t->p_value);
  } else {
    const auto &s = std::get<Summary>(row.cell);
    c.mean = FormatFixed4(s.mean);
    c.sd = FormatFixed4(s.stddev);
  }
  return c;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string RenderReport(const std::vector<ReportRow> &rows) {
  size_t label_width = 5;
  for (const ReportRow &r : rows) label_width = std::max(label_width, r.label.size());
  char buf[512];
  std::string out;
  auto line = [&](const std::string &label, const Cells &c) {
    std::snprintf(buf, sizeof(buf), "%-*s  %12s  %4s  %8s  %12s  %10s\n",
                  int(label_width), label.c_str(), c.t.c_str(), c.df.c_str(),
                  c.p.c_str(), c.mean.c_str(), c.sd.c_str());
    out += buf;
  };
  line("Model", {"t-statistic", "df", "p-value", "mean", "std"});
  for (const ReportRow &r : rows) line(r.label, CellsOf(r));
  return out;
}

std::string RenderReportCsv(const std::vector<ReportRow> &rows) {
  std::string out = "model,t_statistic,df,p_value,mean,std\n";
  for (const ReportRow &r : rows) {
    Cells c = CellsOf(r);
    out += CsvField(r.label) + "," + c.t + "," + c.df + "," + c.p + "," +
           c.mean + "," + c.sd + "\n";
  }
  return out;
}

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(Trim(f));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

RunSeries LoadRunSeries(const std::string &path, const std::string &metric,
                        Direction direction) {
  std::ifstream in(path);
  if (!in) throw StatsError("cannot open run file '" + path + "'");
  std::string line;
  uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!Trim(line).empty()) break;
  }
  if (SplitCsv(line) != std::vector<std::string>{"run", "metric", "value"}) {
    throw StatsError(path + ": expected header 'run,metric,value'");
  }

  RunSeries series;
  series.label = path;
  series.direction = direction;
  std::set<std::string> metrics;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitCsv(line);
    auto where = path + ":" + std::to_string(line_number) + ": ";
    if (fields.size() != 3) throw StatsError(where + "expected 3 fields");
    if (!metric.empty() && fields[1] != metric) continue;
    metrics.insert(fields[1]);
    size_t used = 0;
    double value;
    try {
      value = std::stod(fields[2], &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != fields[2].size()) {
      throw StatsError(where + "bad value '" + fields[2] + "'");
    }
    series.values.push_back(value);
  }
  if (metrics.size() > 1) {
    throw StatsError(path + ": holds several metrics; choose one with --metric");
  }
  if (series.values.empty()) {
    throw StatsError(path + ": no values" +
                     (metric.empty() ? std::string() : " for metric '" + metric + "'"));
  }
  return series;
}

}  // namespace kfuse
