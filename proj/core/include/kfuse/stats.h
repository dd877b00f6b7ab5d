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

#ifndef KFUSE_STATS_H_
#define KFUSE_STATS_H_

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace kfuse {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction { kHigherBetter, kLowerBetter };

// Metric values of one model, one entry per seeded run.
struct RunSeries {
  std::string label;
  std::vector<double> values;
  Direction direction = Direction::kHigherBetter;
};

struct TTestResult {
  double t_statistic = 0.0;
  int df = 0;
  double p_value = 0.5;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
};

// Mean squared error. Throws StatsError for empty or mismatched input.
double Mse(std::span<const double> pred, std::span<const double> gold);

// Fractional (tie-averaged) ranks, 1-based.
std::vector<double> FractionalRanks(std::span<const double> values);

// Spearman's rho as the Pearson correlation of fractional ranks. Throws
// StatsError for mismatched lengths, fewer than two values, or a constant
// input.
double Spearman(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T <= t) for Student's t with df degrees of freedom.
double TCdf(double t, double df);

// One-tailed pooled-variance two-sample Student t-test with
// t = (mean(baseline) - mean(treatment)) / (s_p * sqrt(1/n1 + 1/n2)) and
// df = n1 + n2 - 2. The tail follows "treatment improves": P(T <= t) for
// higher-better metrics, P(T >= t) for lower-better ones. The direction is
// taken from the treatment series.
TTestResult TTestOneTailed(const RunSeries &baseline, const RunSeries &treatment);

// Mean and n-1 sample standard deviation. Throws StatsError for fewer than
// two values.
Summary Aggregate(std::span<const double> values);

// Round half away from zero to a number of decimals.
double RoundHalfAway(double value, int decimals);

// Fixed 4-decimal rendering; values that round to zero print as 0.0000.
std::string FormatFixed4(double value);

struct ReportRow {
  std::string label;
  std::variant<TTestResult, Summary> cell;
};

// Fixed-width table with columns model, t-statistic, df, p-value, mean, std.
std::string RenderReport(const std::vector<ReportRow> &rows);
std::string RenderReportCsv(const std::vector<ReportRow> &rows);

// Reads a run file (CSV header run,metric,value). When metric is non-empty
// only matching rows are read; otherwise the file must hold one metric.
RunSeries LoadRunSeries(const std::string &path, const std::string &metric,
                        Direction direction);

}  // namespace kfuse

#endif  // KFUSE_STATS_H_
