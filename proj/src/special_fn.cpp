#include "batchq/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "batchq/errors.hpp"

namespace batchq::special {

namespace {

using tolerance::kMaxSeriesTerms;
using tolerance::kSeriesTermRelTol;

// sum_{k>=1} x^k / (k k!) for x >= 0; every term is positive.
double positive_ei_series(double x) {
  double term = 1.0; // x^k / k!
  double sum = 0.0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    term *= x / k;
    const double add = term / k;
    sum += add;
    if (add <= kSeriesTermRelTol * sum) break;
  }
  return sum;
}

// sum_{k>=1} (-x)^k / (k k!) for 0 <= x <= 1, alternating.
double alternating_e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) <= kSeriesTermRelTol * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of the E1 continued fraction, x > 1.
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxSeriesTerms; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kSeriesTermRelTol) break;
  }
  return h * std::exp(-x);
}

std::array<double, tolerance::kMaxBernoulliIndex + 1> bernoulli_table() {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  std::array<double, tolerance::kMaxBernoulliIndex + 1> out{};
  for (int i = 0; i <= tolerance::kMaxBernoulliIndex; ++i) {
    cpp_rational total = 0;
    for (int k = 0; k <= i; ++k) {
      // k-th forward difference of (j+1)^i, an exact integer.
      cpp_int inner = 0;
      cpp_int choose = 1;
      for (int j = 0; j <= k; ++j) {
        if (j > 0) choose = choose * (k - j + 1) / j;
        cpp_int power = boost::multiprecision::pow(cpp_int(j + 1), static_cast<unsigned>(i));
        if (j % 2 == 0) inner += choose * power;
        else inner -= choose * power;
      }
      total += cpp_rational(inner, k + 1);
    }
    out[static_cast<std::size_t>(i)] = total.convert_to<double>();
  }
  return out;
}

} // namespace

double harmonic(std::int64_t n) {
  if (n < 1) throw InvalidArgument("harmonic: n must be >= 1, got " + std::to_string(n));
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

double bernoulli(int i) {
  if (i < 0 || i > tolerance::kMaxBernoulliIndex) {
    throw InvalidArgument("bernoulli: index must be in [0, 40], got " + std::to_string(i));
  }
  static const auto table = bernoulli_table();
  return table[static_cast<std::size_t>(i)];
}

double falling_factorial(double n, int i) {
  if (i < 0) throw InvalidArgument("falling_factorial: i must be >= 0");
  double out = 1.0;
  for (int k = 0; k < i; ++k) out *= n - k;
  return out;
}

double trunc_polylog(double z, std::int64_t n, double s) {
  if (n < 1) throw InvalidArgument("trunc_polylog: n must be >= 1");
  double zk = 1.0;
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    zk *= z;
    sum += zk / std::pow(static_cast<double>(k), s);
  }
  return sum;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

double exp_integral_ei(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_ei: requires x > 0");
  return kEulerGamma + std::log(x) + positive_ei_series(x);
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
  if (x <= tolerance::kE1SeriesMaxX) {
    return -kEulerGamma - std::log(x) - alternating_e1_series(x);
  }
  return e1_continued_fraction(x);
}

double ei_minus_log(double x) {
  if (!(x >= 0.0)) throw DomainError("ei_minus_log: requires x >= 0");
  return kEulerGamma + positive_ei_series(x);
}

double e1_plus_log(double x) {
  if (!(x >= 0.0)) throw DomainError("e1_plus_log: requires x >= 0");
  if (x <= tolerance::kE1SeriesMaxX) return -kEulerGamma - alternating_e1_series(x);
  return e1_continued_fraction(x) + std::log(x);
}

} // namespace batchq::special
