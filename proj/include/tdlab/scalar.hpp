/**
 * @file scalar.hpp
 * @brief Exact arithmetic over the real quadratic field Q(sqrt(D)).
 *
 * A Scalar is x + y*sqrt(D) with x, y arbitrary-precision rationals and D a
 * square-free integer (D = 0 means plain Q). All arithmetic is exact; there
 * is no floating point anywhere in this library.
 */
#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlab {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

namespace detail {

/// GMP limb buffers are tiny (almost always <= 64 bytes) and are churned at
/// enormous rates by dense exact linear algebra. Recycling them through
/// per-thread size-binned free lists removes the malloc traffic that would
/// otherwise dominate the whole library's runtime profile.
class GmpChunkPool {
public:
    /// Installs the GMP memory hooks exactly once, before any GMP object
    /// exists (this header keeps no global Rat/Int values).
    static void install() {
        static const bool done = [] {
            mp_set_memory_functions(&alloc_fn, &realloc_fn, &free_fn);
            return true;
        }();
        (void)done;
    }

private:
    static constexpr size_t kBins = 8;        // chunk capacities 8, 16, ..., 64 bytes
    static constexpr size_t kBinCap = 8192;   // recycled chunks kept per bin

    struct Pool {
        std::array<std::vector<void*>, kBins> bins;
        bool alive = true;
        ~Pool() {
            alive = false;
            for (auto& bin : bins)
                for (void* p : bin) std::free(p);
        }
    };

    static Pool& pool() {
        static thread_local Pool p;
        return p;
    }

    static size_t bin_of(size_t sz) { return (sz + 7) / 8; } // 1-based

    static void* alloc_fn(size_t sz) {
        size_t b = bin_of(sz);
        if (b <= kBins) {
            auto& bin = pool().bins[b - 1];
            if (!bin.empty()) {
                void* p = bin.back();
                bin.pop_back();
                return p;
            }
            return std::malloc(b * 8); // full bin capacity, so chunks are interchangeable
        }
        return std::malloc(sz);
    }

    static void free_fn(void* p, size_t sz) {
        size_t b = bin_of(sz);
        if (b <= kBins) {
            Pool& pl = pool();
            if (pl.alive && pl.bins[b - 1].size() < kBinCap) {
                pl.bins[b - 1].push_back(p);
                return;
            }
        }
        std::free(p);
    }

    static void* realloc_fn(void* p, size_t old_sz, size_t new_sz) {
        size_t bo = bin_of(old_sz), bn = bin_of(new_sz);
        if (bo == bn && bo <= kBins) return p;
        if (bo <= kBins || bn <= kBins) {
            void* np = alloc_fn(new_sz);
            std::memcpy(np, p, std::min(old_sz, new_sz));
            free_fn(p, old_sz);
            return np;
        }
        return std::realloc(p, new_sz);
    }
};

} // namespace detail

inline const bool gmp_pool_ready = (detail::GmpChunkPool::install(), true);

/// Thrown when an operation would leave Q(sqrt(D)) or mix two distinct extensions.
class field_error : public std::domain_error {
public:
    explicit field_error(const std::string& what) : std::domain_error(what) {}
};

namespace detail {

/// acc += a * b without allocating: one persistent scratch per thread.
inline void add_mul_inplace(Rat& acc, const Rat& a, const Rat& b) {
    static thread_local Rat scratch;
    mpq_mul(scratch.backend().data(), a.backend().data(), b.backend().data());
    mpq_add(acc.backend().data(), acc.backend().data(), scratch.backend().data());
}

/// acc -= a * b without allocating.
inline void sub_mul_inplace(Rat& acc, const Rat& a, const Rat& b) {
    static thread_local Rat scratch;
    mpq_mul(scratch.backend().data(), a.backend().data(), b.backend().data());
    mpq_sub(acc.backend().data(), acc.backend().data(), scratch.backend().data());
}

inline bool is_square_free(long long d) {
    if (d == 0) return true;
    if (d == 1 || d == -1) return false; // sqrt(1) is rational; disallowed as a radicand
    long long n = d < 0 ? -d : d;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

/// Exact square root of a non-negative rational, if it exists.
inline std::optional<Rat> rat_sqrt(const Rat& v) {
    if (v < 0) return std::nullopt;
    Int num = numerator(v), den = denominator(v);
    Int rn = sqrt(num), rd = sqrt(den);
    if (rn * rn != num || rd * rd != den) return std::nullopt;
    return Rat(rn, rd);
}

} // namespace detail

/// Session-wide arithmetic parameters: the deformation parameter q (a rational
/// with |q| != 0, 1, hence never a root of unity), the radicand D, and the
/// search bound for q-power detection.
struct FieldConfig {
    Rat q = 2;
    long long D = 0;   // square-free, or 0 for plain Q
    int i_max = 64;    // q_power_ratio scans |i| <= i_max

    void validate() const {
        if (q == 0) throw field_error("FieldConfig: q must be nonzero");
        if (q == 1 || q == -1) throw field_error("FieldConfig: |q| = 1 is excluded (root of unity)");
        if (!detail::is_square_free(D)) throw field_error("FieldConfig: D must be square-free or 0");
        if (i_max < 0) throw field_error("FieldConfig: i_max must be non-negative");
    }
};

class Scalar {
public:
    Scalar() = default;
    Scalar(long long v) : x_(v) {} // NOLINT: implicit by design, mirrors integer literals
    explicit Scalar(const Rat& v) : x_(v) {}
    Scalar(const Rat& x, const Rat& y, long long d) : x_(x), y_(y), d_(d) { normalize(); }

    const Rat& rat_part() const { return x_; }
    const Rat& surd_part() const { return y_; }
    long long radicand() const { return d_; }

    bool is_zero() const { return x_.is_zero() && y_.is_zero(); }
    bool is_rational() const { return y_.is_zero(); }

    /// In-place *this += a * b; the hot path of matrix products.
    void add_mul(const Scalar& a, const Scalar& b) {
        if ((a.d_ | b.d_ | d_) == 0) {
            detail::add_mul_inplace(x_, a.x_, b.x_);
            return;
        }
        *this += a * b;
    }

    /// In-place *this -= a * b; the hot path of row elimination.
    void sub_mul(const Scalar& a, const Scalar& b) {
        if ((a.d_ | b.d_ | d_) == 0) {
            detail::sub_mul_inplace(x_, a.x_, b.x_);
            return;
        }
        *this -= a * b;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.x_ == b.x_ && a.y_ == b.y_ && a.d_ == b.d_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    friend Scalar operator-(const Scalar& a) { return Scalar(-a.x_, -a.y_, a.d_); }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        long long d = join(a, b);
        return Scalar(a.x_ + b.x_, a.y_ + b.y_, d);
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        long long d = join(a, b);
        return Scalar(a.x_ - b.x_, a.y_ - b.y_, d);
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        long long d = join(a, b);
        return Scalar(a.x_ * b.x_ + a.y_ * b.y_ * d, a.x_ * b.y_ + a.y_ * b.x_, d);
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

    Scalar& operator+=(const Scalar& b) {
        d_ = join(*this, b);
        x_ += b.x_;
        y_ += b.y_;
        if (y_.is_zero()) d_ = 0;
        return *this;
    }
    Scalar& operator-=(const Scalar& b) {
        d_ = join(*this, b);
        x_ -= b.x_;
        y_ -= b.y_;
        if (y_.is_zero()) d_ = 0;
        return *this;
    }
    Scalar& operator*=(const Scalar& b) {
        if ((d_ | b.d_) == 0) {
            x_ *= b.x_;
            return *this;
        }
        return *this = *this * b;
    }
    Scalar& operator/=(const Scalar& b) { return *this = *this / b; }

    Scalar conj() const { return Scalar(x_, -y_, d_); }

    /// Field norm x^2 - D y^2; zero only for the zero element (D square-free).
    Rat norm() const { return x_ * x_ - Rat(d_) * y_ * y_; }

    Scalar inverse() const {
        if (is_zero()) throw field_error("Scalar: inverse of zero");
        Rat n = norm();
        return Scalar(x_ / n, -y_ / n, d_);
    }

    Scalar pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        Scalar r(1), b = *this;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    /// Total order used only for deterministic tie-breaking, not field structure.
    friend bool lex_less(const Scalar& a, const Scalar& b) {
        if (a.x_ != b.x_) return a.x_ < b.x_;
        return a.y_ < b.y_;
    }

    std::string str() const;

private:
    Rat x_;           // rational part
    Rat y_;           // coefficient of sqrt(D)
    long long d_ = 0; // radicand; 0 whenever y_ == 0

    void normalize() {
        if (y_ == 0) d_ = 0;
        if (d_ == 0 && y_ != 0) throw field_error("Scalar: sqrt coefficient with D = 0");
    }

    static long long join(const Scalar& a, const Scalar& b) {
        if (a.d_ == b.d_) return a.d_;
        if (a.d_ == 0) return b.d_;
        if (b.d_ == 0) return a.d_;
        throw field_error("Scalar: incompatible field extensions sqrt(" + std::to_string(a.d_) +
                          ") and sqrt(" + std::to_string(b.d_) + ")");
    }
};

inline std::string rat_str(const Rat& v) {
    std::string s = numerator(v).str();
    if (denominator(v) != 1) s += "/" + denominator(v).str();
    return s;
}

inline std::string Scalar::str() const {
    if (y_ == 0) return rat_str(x_);
    std::string surd = "sqrt(" + std::to_string(d_) + ")";
    std::string ypart;
    Rat ay = y_ < 0 ? Rat(-y_) : y_;
    if (ay == 1)
        ypart = surd;
    else
        ypart = rat_str(ay) + "*" + surd;
    if (x_ == 0) return (y_ < 0 ? "-" : "") + ypart;
    return rat_str(x_) + (y_ < 0 ? "-" : "+") + ypart;
}

namespace detail {

inline Rat parse_rat(const std::string& s, size_t& pos) {
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/')) ++pos;
    if (pos == start) throw field_error("Scalar parse: expected number in '" + s + "'");
    std::string tok = s.substr(start, pos - start);
    try {
        // mpq construction from a string does not canonicalize; divide instead
        size_t slash = tok.find('/');
        if (slash == std::string::npos) return Rat(Int(tok));
        Int den(tok.substr(slash + 1));
        if (den == 0) throw field_error("Scalar parse: zero denominator in '" + tok + "'");
        return Rat(Int(tok.substr(0, slash))) / Rat(den);
    } catch (const field_error&) {
        throw;
    } catch (const std::exception&) {
        throw field_error("Scalar parse: bad rational '" + tok + "'");
    }
}

} // namespace detail

/// Parses "p/q", "p/q+r/s*sqrt(D)", "sqrt(D)", "-sqrt(D)", "r*sqrt(D)" and the like.
inline Scalar parse_scalar(const std::string& input) {
    std::string s;
    for (char c : input)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw field_error("Scalar parse: empty string");

    Rat x = 0, y = 0;
    long long d = 0;
    size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (!first) {
            throw field_error("Scalar parse: expected '+' or '-' in '" + input + "'");
        }
        Rat coef = 1;
        bool have_coef = false;
        if (pos < s.size() && s.compare(pos, 5, "sqrt(") != 0) {
            coef = detail::parse_rat(s, pos);
            have_coef = true;
            if (pos < s.size() && s[pos] == '*') ++pos;
        }
        if (pos < s.size() && s.compare(pos, 5, "sqrt(") == 0) {
            pos += 5;
            size_t close = s.find(')', pos);
            if (close == std::string::npos) throw field_error("Scalar parse: missing ')' in '" + input + "'");
            long long rad = std::stoll(s.substr(pos, close - pos));
            if (!detail::is_square_free(rad) || rad == 0)
                throw field_error("Scalar parse: radicand must be square-free nonzero");
            if (d != 0 && d != rad) throw field_error("Scalar parse: mixed radicands");
            d = rad;
            pos = close + 1;
            y += Rat(sign) * coef;
        } else {
            if (!have_coef) throw field_error("Scalar parse: dangling sign in '" + input + "'");
            x += Rat(sign) * coef;
        }
        first = false;
    }
    if (y == 0) d = 0;
    return y == 0 ? Scalar(x) : Scalar(x, y, d);
}

/// Exact square root inside Q(sqrt(D)), if one exists there.
/// For v = x + y*sqrt(D): a root a + b*sqrt(D) needs norm(v) to be a rational square.
inline std::optional<Scalar> sqrt_in_field(const Scalar& v, long long D) {
    if (v.is_zero()) return Scalar(0);
    if (v.is_rational()) {
        if (auto r = detail::rat_sqrt(v.rat_part())) return Scalar(*r);
        if (D != 0) {
            // try b*sqrt(D): b^2 D = v
            Rat b2 = v.rat_part() / Rat(D);
            if (auto b = detail::rat_sqrt(b2)) {
                if (*b != 0) return Scalar(Rat(0), *b, D);
            }
        }
        return std::nullopt;
    }
    if (v.radicand() != D) return std::nullopt;
    // (a + b sqrt D)^2 = a^2 + b^2 D + 2ab sqrt D
    auto nr = detail::rat_sqrt(v.norm());
    if (!nr) return std::nullopt;
    for (int pick = 0; pick < 2; ++pick) {
        Rat a2 = (v.rat_part() + (pick == 0 ? *nr : Rat(-*nr))) / 2;
        if (auto a = detail::rat_sqrt(a2)) {
            if (*a != 0) {
                Rat b = v.surd_part() / (2 * *a);
                return Scalar(*a, b, D);
            }
        }
    }
    return std::nullopt;
}

} // namespace tdlab
