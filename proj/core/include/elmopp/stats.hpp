#pragma once

#include <span>
#include <string>
#include <vector>

namespace elmopp {

struct SampleSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  std::size_t n = 0;
};

/// Throws std::invalid_argument for fewer than 2 samples.
SampleSummary summarize(std::span<const double> samples);

/// Aggregate that also accepts a single sample (sd 0), for sweep tables.
SampleSummary describe(std::span<const double> samples);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double critical = 0.0;
  double alpha = 0.05;
  bool significant = false;
};

/// (a.mean - b.mean) / sqrt(a.sd^2/a.n + b.sd^2/b.n).
double welch_statistic(const SampleSummary& a, const SampleSummary& b);

/// One-sided test that a has the greater mean, against the Student-t critical
/// value with the given df. Throws std::invalid_argument if either n < 2 or
/// df < 1. When both sds are 0 the statistic is 0 for equal means and
/// +/-infinity otherwise.
TTestResult t_test(const SampleSummary& a, const SampleSummary& b, double df, double alpha = 0.05);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution.
double student_t_cdf(double t, double df);

/// t such that P(T > t) = alpha, by bisection to 1e-8. Throws
/// std::invalid_argument unless df >= 1 and 0 < alpha < 0.5.
double critical_value(double df, double alpha);

/// Published summaries (n = 150 each) behind the comparison table.
struct PublishedSummary {
  const char* name;
  SampleSummary summary;
};
inline constexpr PublishedSummary kPublishedElmopp{"ELMOPP", {2.09133, 0.158824, 150}};
inline constexpr PublishedSummary kPublishedItlc{"ITLC", {1.83414, 0.080730, 150}};
inline constexpr PublishedSummary kPublishedOaf{"OAF", {1.12108, 0.063498, 150}};
inline constexpr double kPublishedDf = 298.0;

struct ComparisonRow {
  std::string comparison;  // "A>B"
  TTestResult result;
};

/// The three comparisons ELMOPP>ITLC, ELMOPP>OAF, ITLC>OAF.
std::vector<ComparisonRow> paper_table(double alpha = 0.05);

}  // namespace elmopp
