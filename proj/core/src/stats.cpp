#include "elmopp/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace elmopp {

SampleSummary summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("summarize: need at least 2 samples");
  return describe(samples);
}

SampleSummary describe(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("describe: no samples");
  SampleSummary s;
  s.n = samples.size();
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double welch_statistic(const SampleSummary& a, const SampleSummary& b) {
  const double diff = a.mean - b.mean;
  const double se = std::sqrt(a.sd * a.sd / static_cast<double>(a.n) + b.sd * b.sd / static_cast<double>(b.n));
  if (se == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / se;
}

TTestResult t_test(const SampleSummary& a, const SampleSummary& b, double df, double alpha) {
  if (a.n < 2 || b.n < 2) throw std::invalid_argument("t_test: each sample needs n >= 2");
  TTestResult r;
  r.t = welch_statistic(a, b);
  r.df = df;
  r.alpha = alpha;
  r.critical = critical_value(df, alpha);
  r.significant = r.t >= r.critical;
  return r;
}

namespace {

// Lentz's method for the continued fraction of I_x(a, b).
double beta_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double critical_value(double df, double alpha) {
  if (!(df >= 1.0)) throw std::invalid_argument("critical_value: df must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("critical_value: alpha must be in (0, 0.5)");
  auto upper_tail = [df](double t) { return 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t)); };
  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi) > alpha) hi *= 2.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (upper_tail(mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<ComparisonRow> paper_table(double alpha) {
  std::vector<ComparisonRow> rows;
  const PublishedSummary pairs[][2] = {{kPublishedElmopp, kPublishedItlc},
                                       {kPublishedElmopp, kPublishedOaf},
                                       {kPublishedItlc, kPublishedOaf}};
  for (const auto& p : pairs) {
    rows.push_back({std::string(p[0].name) + ">" + p[1].name,
                    t_test(p[0].summary, p[1].summary, kPublishedDf, alpha)});
  }
  return rows;
}

}  // namespace elmopp
