#include "larmor/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "larmor/errors.hpp"

namespace larmor::specfun {
namespace {

constexpr long kRescaleBits = 512;

const std::array<double, 171>& log_factorial_table() {
    static const std::array<double, 171> table = [] {
        std::array<double, 171> t{};
        double f = 1.0;
        t[0] = 0.0;
        for (int n = 1; n <= 170; ++n) {
            f *= n;
            t[n] = std::log(f);
        }
        return t;
    }();
    return table;
}

// ln(hi!/lo!) = sum_{j=lo+1}^{hi} ln j for hi >= lo.
double log_rising(long lo, long hi) {
    double s = 0.0;
    for (long j = lo + 1; j <= hi; ++j) s += std::log(static_cast<double>(j));
    return s;
}

}  // namespace

double laguerre(int n, double alpha, double x) {
    if (n < 0) throw DomainError("laguerre: degree must be non-negative");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double ScaledValue::value() const { return std::ldexp(mantissa, static_cast<int>(exponent)); }

double ScaledValue::log_abs() const {
    if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
}

ScaledValue jacobi_scaled(int n, double a, double b, double x) {
    if (n < 0) throw DomainError("jacobi: degree must be non-negative");
    if (n == 0) return {1.0, 0};
    double prev = 1.0;
    double cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    long exponent = 0;
    const double big = std::ldexp(1.0, kRescaleBits);
    for (int k = 2; k <= n; ++k) {
        const double c = 2.0 * k + a + b;
        const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        if (a1 == 0.0) throw DomainError("jacobi: degenerate recurrence for these parameters");
        const double a2 = (c - 1.0) * (a * a - b * b);
        const double a3 = (c - 2.0) * (c - 1.0) * c;
        const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        const double next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
            cur = std::ldexp(cur, -kRescaleBits);
            prev = std::ldexp(prev, -kRescaleBits);
            exponent += kRescaleBits;
        }
    }
    // Normalise the mantissa into [0.5, 1).
    int e = 0;
    const double m = std::frexp(cur, &e);
    return {m, exponent + e};
}

double jacobi(int n, double a, double b, double x) { return jacobi_scaled(n, a, b, x).value(); }

double log_factorial(long n) {
    if (n < 0) throw DomainError("log_factorial: negative argument");
    if (n <= 170) return log_factorial_table()[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_factorial_ratio(std::span<const FactorialTerm> terms) {
    std::vector<long> plus, minus;
    for (const auto& term : terms) {
        if (term.argument < 0) throw DomainError("log_factorial_ratio: negative argument");
        if (term.sign == 1)
            plus.push_back(term.argument);
        else if (term.sign == -1)
            minus.push_back(term.argument);
        else
            throw DomainError("log_factorial_ratio: sign must be +1 or -1");
    }
    std::sort(plus.rbegin(), plus.rend());
    std::sort(minus.rbegin(), minus.rend());
    double total = 0.0;
    const std::size_t paired = std::min(plus.size(), minus.size());
    for (std::size_t i = 0; i < paired; ++i) {
        const long p = plus[i], q = minus[i];
        if (std::abs(p - q) <= 64)
            total += p >= q ? log_rising(q, p) : -log_rising(p, q);
        else
            total += log_factorial(p) - log_factorial(q);
    }
    for (std::size_t i = paired; i < plus.size(); ++i) total += log_factorial(plus[i]);
    for (std::size_t i = paired; i < minus.size(); ++i) total -= log_factorial(minus[i]);
    return total;
}

double log_factorial_ratio(std::initializer_list<FactorialTerm> terms) {
    return log_factorial_ratio(std::span<const FactorialTerm>(terms.begin(), terms.size()));
}

double geometric_moment_sum(int m, double x, int order) {
    if (m < 0) throw DomainError("geometric_moment_sum: m must be non-negative");
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("geometric_moment_sum: x must lie in [0, 1)");
    const double l = std::log1p(-x);
    const double s0 = std::exp(-(m + 1.0) * l);
    switch (order) {
        case 0:
            return s0;
        case 1:
            return (m + 1.0) * x * std::exp(-(m + 2.0) * l);
        case 2:
            return (m + 1.0) * x * std::exp(-(m + 2.0) * l) +
                   (m + 1.0) * (m + 2.0) * x * x * std::exp(-(m + 3.0) * l);
        default:
            throw DomainError("geometric_moment_sum: order must be 0, 1 or 2");
    }
}

double log_laguerre_square_integral(int j, int n, int a) {
    if (n < 0 || a < 0) throw DomainError("laguerre_square_integral: n and a must be non-negative");
    const double lead = log_factorial_ratio({{1, n + a}, {-1, n}});
    if (j == 1) return lead + std::log(2.0 * n + a + 1.0);
    if (j == 2) return lead + std::log(6.0 * n * (n + a + 1.0) + (a + 1.0) * (a + 2.0));
    throw DomainError("laguerre_square_integral: j must be 1 or 2");
}

double laguerre_square_integral(int j, int n, int a) { return std::exp(log_laguerre_square_integral(j, n, a)); }

}  // namespace larmor::specfun
