/**
 * @file qfun.hpp
 * @brief q-combinatorics primitives: [n], q-binomials, q-power detection and
 *        the structure constants beta, delta, delta', alpha, Q_d.
 */
#pragma once

#include "tdlab/scalar.hpp"

#include <optional>
#include <vector>

namespace tdlab {

inline Scalar q_pow(const FieldConfig& fc, long long e) {
    Rat r = 1;
    Rat base = e >= 0 ? fc.q : Rat(1) / fc.q;
    long long n = e >= 0 ? e : -e;
    for (long long i = 0; i < n; ++i) r *= base;
    return Scalar(r);
}

/// [n] = (q^n - q^{-n}) / (q - q^{-1}); defined for all integers n.
inline Scalar q_integer(const FieldConfig& fc, long long n) {
    // [n] = q^{n-1} + q^{n-3} + ... + q^{1-n} avoids the division entirely
    if (n == 0) return Scalar(0);
    Rat qi2 = Rat(1) / (fc.q * fc.q);
    long long m = n < 0 ? -n : n;
    Rat qk = 1;
    for (long long j = 0; j < m - 1; ++j) qk *= fc.q; // q^{m-1}
    Rat num = 0;
    for (long long j = 0; j < m; ++j) {
        num += qk;
        qk *= qi2;
    }
    return Scalar(n < 0 ? -num : num);
}

/// [n]! / ([n-k]! [k]!) as a product of q-integer ratios; requires 0 <= k <= n.
inline Scalar q_binomial(const FieldConfig& fc, long long n, long long k) {
    if (k < 0 || k > n) throw field_error("q_binomial: need 0 <= k <= n");
    Scalar r(1);
    for (long long j = 1; j <= k; ++j) r = r * q_integer(fc, n - k + j) / q_integer(fc, j);
    return r;
}

/// The unique i with |i| <= i_max and b = a q^i, if any. Uniqueness holds
/// because |q| != 1 over Q.
inline std::optional<long long> q_power_ratio(const FieldConfig& fc, const Scalar& a, const Scalar& b) {
    if (a.is_zero() || b.is_zero()) throw field_error("q_power_ratio: zero input");
    Scalar ratio = b / a;
    // q^i is rational, so a surd ratio can never match
    if (!ratio.is_rational()) return std::nullopt;
    Rat r = ratio.rat_part();
    if (r == 1) return 0;
    Rat up = 1, down = 1, q = fc.q, qi = Rat(1) / fc.q;
    for (long long i = 1; i <= fc.i_max; ++i) {
        up *= q;
        if (r == up) return i;
        down *= qi;
        if (r == down) return -i;
    }
    return std::nullopt;
}

namespace detail {

/// Distinctness of the eigenvalue ladder b q^{2i-d} + eps b^{-1} q^{d-2i}:
/// for eps = 1 it requires b != +-q^i for |i| <= d-1; for eps = 0 the values
/// form a plain geometric ladder and are always distinct.
inline bool ladder_distinct(const FieldConfig& fc, const Scalar& b, int eps, int d) {
    if (eps == 0) return true;
    auto hit = [&](const Scalar& v) {
        auto i = q_power_ratio(fc, Scalar(1), v);
        return i && *i >= 1 - d && *i <= d - 1;
    };
    return !hit(b) && !hit(-b);
}

} // namespace detail

/// beta = q^2 + q^{-2}
inline Scalar beta_const(const FieldConfig& fc) { return q_pow(fc, 2) + q_pow(fc, -2); }

/// delta = -(q^2 - q^{-2})^2
inline Scalar delta_const(const FieldConfig& fc) {
    Scalar t = q_pow(fc, 2) - q_pow(fc, -2);
    return -(t * t);
}

/// delta' = -(q - q^{-1})(q^2 - q^{-2})(q^3 - q^{-3}) q^4
inline Scalar delta_prime_const(const FieldConfig& fc) {
    Scalar t1 = q_pow(fc, 1) - q_pow(fc, -1);
    Scalar t2 = q_pow(fc, 2) - q_pow(fc, -2);
    Scalar t3 = q_pow(fc, 3) - q_pow(fc, -3);
    return -(t1 * t2 * t3 * q_pow(fc, 4));
}

/// alpha = -q^{-1} (q - q^{-1})^2
inline Scalar alpha_const(const FieldConfig& fc) {
    Scalar t = q_pow(fc, 1) - q_pow(fc, -1);
    return -(q_pow(fc, -1) * t * t);
}

/// Q_d = (-1)^d prod_{j=1}^d (q^j - q^{-j})^2
inline Scalar q_d_norm(const FieldConfig& fc, int d) {
    Scalar r(d % 2 == 0 ? 1 : -1);
    for (int j = 1; j <= d; ++j) {
        Scalar t = q_pow(fc, j) - q_pow(fc, -j);
        r = r * t * t;
    }
    return r;
}

} // namespace tdlab
