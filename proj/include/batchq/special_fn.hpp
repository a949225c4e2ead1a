#pragma once

#include <cstdint>

namespace batchq::special {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Numerical tolerances used across the special functions. Series are summed
// until the next term is below kSeriesTermRelTol relative to the partial sum,
// which keeps the delivered relative error well inside kTargetRelTol.
namespace tolerance {
inline constexpr double kTargetRelTol = 1e-12;
inline constexpr double kSeriesTermRelTol = 1e-17;
inline constexpr int kMaxSeriesTerms = 5000;
// E1 switches from the power series to the continued fraction above this x.
inline constexpr double kE1SeriesMaxX = 1.0;
inline constexpr int kMaxBernoulliIndex = 40;
} // namespace tolerance

// H_n = sum_{k=1}^n 1/k, summed in increasing k.
double harmonic(std::int64_t n);

// B_i from the double sum
//   sum_{k=0}^{i} sum_{j=0}^{k} (-1)^j C(k,j) (j+1)^i / (k+1),
// evaluated in exact rational arithmetic and rounded once. This convention
// gives B_1 = +1/2. Throws InvalidArgument for i < 0 or i > 40.
double bernoulli(int i);

// n (n-1) ... (n-i+1); 1 for i == 0.
double falling_factorial(double n, int i);

// Li(z, n, s) = sum_{k=1}^n z^k / k^s.
double trunc_polylog(double z, std::int64_t n, double s);

double binomial(int n, int k);

/// Ei(x) = gamma + ln x + sum_{k>=1} x^k / (k k!) for x > 0.
/// Throws DomainError for x <= 0.
double exp_integral_ei(double x);

/// E1(x) = int_x^inf e^{-s}/s ds for x > 0. Power series
/// -gamma - ln x - sum (-x)^k/(k k!) up to x = 1, continued fraction beyond.
/// Throws DomainError for x <= 0.
double exp_integral_e1(double x);

// Ei(x) - ln x = gamma + sum_{k>=1} x^k/(k k!), defined for x >= 0.
double ei_minus_log(double x);

// E1(x) + ln x = -gamma - sum_{k>=1} (-x)^k/(k k!), defined for x >= 0.
double e1_plus_log(double x);

} // namespace batchq::special
