#pragma once

#include <span>
#include <vector>

namespace larmor::specfun {

/// Generalized Laguerre polynomial L_n^{(alpha)}(x), by the three-term recurrence in degree.
double laguerre(int n, double alpha, double x);

/// Value represented as mantissa * 2^exponent so that large polynomial values cannot overflow.
struct ScaledValue {
    double mantissa;
    long exponent;

    double value() const;
    /// ln|value|; -inf for zero.
    double log_abs() const;
    int sign() const { return (mantissa > 0) - (mantissa < 0); }
};

/// Jacobi polynomial P_n^{(a,b)}(x) with the recurrence rescaled whenever it grows large.
ScaledValue jacobi_scaled(int n, double a, double b, double x);
double jacobi(int n, double a, double b, double x);

/// ln(n!) for n >= 0.
double log_factorial(long n);

struct FactorialTerm {
    int sign;  ///< +1 or -1
    long argument;
};

/// Sum of sign * ln(argument!). Terms of opposite sign are paired so that close arguments
/// cancel exactly instead of through large log-gamma values.
double log_factorial_ratio(std::span<const FactorialTerm> terms);
double log_factorial_ratio(std::initializer_list<FactorialTerm> terms);

/// Sum_k C(m+k, k) k^order x^k in closed form; order 0 is (1-x)^{-m-1}.
double geometric_moment_sum(int m, double x, int order);

/// ln of int_0^inf x^{a+j} e^{-x} [L_n^{(a)}(x)]^2 dx for j = 1, 2.
double log_laguerre_square_integral(int j, int n, int a);
double laguerre_square_integral(int j, int n, int a);

}  // namespace larmor::specfun
