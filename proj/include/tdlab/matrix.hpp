/**
 * @file matrix.hpp
 * @brief Dense matrices over Q(sqrt(D)) with exact row reduction.
 *
 * Sizes here are desk-scale (dim <= 64). The generator matrices are sparse in
 * practice (weight-graded), so products skip zero entries instead of using a
 * sparse format.
 */
#pragma once

#include "tdlab/scalar.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <string>
#include <vector>

namespace tdlab {

using Vec = std::vector<Scalar>;

class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
        return m;
    }
    static Mat diagonal(const Vec& d) {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool empty() const { return r_ == 0 || c_ == 0; }

    Scalar& at(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const Scalar& at(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    bool is_zero() const {
        for (const auto& v : a_)
            if (!v.is_zero()) return false;
        return true;
    }

    int nnz() const {
        int n = 0;
        for (const auto& v : a_)
            if (!v.is_zero()) ++n;
        return n;
    }

    /// A representative nonzero entry, for residual reports.
    std::string sample_entry() const {
        for (const auto& v : a_)
            if (!v.is_zero()) return v.str();
        return "0";
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
    }

    friend Mat operator+(Mat a, const Mat& b) {
        assert(a.r_ == b.r_ && a.c_ == b.c_);
        for (size_t i = 0; i < a.a_.size(); ++i)
            if (!b.a_[i].is_zero()) a.a_[i] += b.a_[i];
        return a;
    }
    friend Mat operator-(Mat a, const Mat& b) {
        assert(a.r_ == b.r_ && a.c_ == b.c_);
        for (size_t i = 0; i < a.a_.size(); ++i)
            if (!b.a_[i].is_zero()) a.a_[i] -= b.a_[i];
        return a;
    }
    friend Mat operator-(Mat a) {
        for (auto& v : a.a_)
            if (!v.is_zero()) v = -v;
        return a;
    }
    friend Mat operator*(const Scalar& s, Mat a) {
        if (s.is_zero()) return Mat(a.r_, a.c_);
        for (auto& v : a.a_)
            if (!v.is_zero()) v *= s;
        return a;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        assert(a.c_ == b.r_);
        Mat m(a.r_, b.c_);
        // row nonzero lists of b, computed once
        std::vector<std::vector<int>> bnz(b.r_);
        for (int k = 0; k < b.r_; ++k)
            for (int j = 0; j < b.c_; ++j)
                if (!b.at(k, j).is_zero()) bnz[k].push_back(j);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const Scalar& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j : bnz[k]) m.at(i, j).add_mul(aik, b.at(k, j));
            }
        return m;
    }

    friend Vec operator*(const Mat& a, const Vec& v) {
        assert(a.c_ == static_cast<int>(v.size()));
        Vec out(a.r_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const Scalar& aik = a.at(i, k);
                if (!aik.is_zero() && !v[k].is_zero()) out[i] += aik * v[k];
            }
        return out;
    }

    Mat transpose() const {
        Mat m(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    /// Kronecker product with row-major index pairing (i1*rows2 + i2).
    friend Mat kron(const Mat& a, const Mat& b) {
        Mat m(a.r_ * b.r_, a.c_ * b.c_);
        for (int i1 = 0; i1 < a.r_; ++i1)
            for (int j1 = 0; j1 < a.c_; ++j1) {
                const Scalar& v = a.at(i1, j1);
                if (v.is_zero()) continue;
                for (int i2 = 0; i2 < b.r_; ++i2)
                    for (int j2 = 0; j2 < b.c_; ++j2) {
                        const Scalar& w = b.at(i2, j2);
                        if (!w.is_zero()) m.at(i1 * b.r_ + i2, j1 * b.c_ + j2) = v * w;
                    }
            }
        return m;
    }

    friend Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

    Mat pow(int e) const {
        assert(r_ == c_ && e >= 0);
        Mat r = identity(r_), b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    Vec row(int i) const {
        Vec v(c_);
        for (int j = 0; j < c_; ++j) v[j] = at(i, j);
        return v;
    }
    Vec col(int j) const {
        Vec v(r_);
        for (int i = 0; i < r_; ++i) v[i] = at(i, j);
        return v;
    }
    void set_row(int i, const Vec& v) {
        for (int j = 0; j < c_; ++j) at(i, j) = v[j];
    }

    /// In-place reduced row echelon form. Returns the pivot column of each
    /// pivot row, in order.
    std::vector<int> rref() {
        std::vector<int> pivots;
        int pr = 0;
        for (int pc = 0; pc < c_ && pr < r_; ++pc) {
            int sel = -1;
            for (int i = pr; i < r_; ++i)
                if (!at(i, pc).is_zero()) {
                    sel = i;
                    break;
                }
            if (sel < 0) continue;
            if (sel != pr)
                for (int j = 0; j < c_; ++j) std::swap(at(sel, j), at(pr, j));
            Scalar inv = at(pr, pc).inverse();
            for (int j = pc; j < c_; ++j)
                if (!at(pr, j).is_zero()) at(pr, j) *= inv;
            for (int i = 0; i < r_; ++i) {
                if (i == pr) continue;
                Scalar f = at(i, pc);
                if (f.is_zero()) continue;
                for (int j = pc; j < c_; ++j)
                    if (!at(pr, j).is_zero()) at(i, j).sub_mul(f, at(pr, j));
            }
            pivots.push_back(pc);
            ++pr;
        }
        return pivots;
    }

    int rank() const {
        Mat m = *this;
        return static_cast<int>(m.rref().size());
    }

    /// Basis of the right nullspace, one solution per column.
    Mat nullspace() const {
        Mat m = *this;
        std::vector<int> pivots = m.rref();
        std::vector<bool> is_pivot(c_, false);
        for (int p : pivots) is_pivot[p] = true;
        std::vector<int> free_cols;
        for (int j = 0; j < c_; ++j)
            if (!is_pivot[j]) free_cols.push_back(j);
        Mat ns(c_, static_cast<int>(free_cols.size()));
        for (size_t fj = 0; fj < free_cols.size(); ++fj) {
            int f = free_cols[fj];
            ns.at(f, static_cast<int>(fj)) = Scalar(1);
            for (size_t pi = 0; pi < pivots.size(); ++pi)
                ns.at(pivots[pi], static_cast<int>(fj)) = -m.at(static_cast<int>(pi), f);
        }
        return ns;
    }

    /// Inverse of a square matrix; throws if singular.
    Mat inverse() const {
        assert(r_ == c_);
        Mat aug(r_, 2 * c_);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, c_ + i) = Scalar(1);
        }
        std::vector<int> piv = aug.rref();
        if (static_cast<int>(piv.size()) != r_ || piv.back() >= c_)
            throw field_error("Mat: inverse of singular matrix");
        Mat inv(r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) inv.at(i, j) = aug.at(i, c_ + j);
        return inv;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<Scalar> a_;
};

/// A subspace of F^n kept as an RREF row basis; rows() is its dimension.
struct Subspace {
    Mat rows; // RREF, no zero rows

    int dim() const { return rows.rows(); }
    int ambient() const { return rows.cols(); }
};

/// Row-space of the given rows, as a canonical RREF basis.
inline Subspace span_rows(const Mat& m) {
    Mat r = m;
    std::vector<int> piv = r.rref();
    Mat basis(static_cast<int>(piv.size()), m.cols());
    for (size_t i = 0; i < piv.size(); ++i) basis.set_row(static_cast<int>(i), r.row(static_cast<int>(i)));
    return Subspace{basis};
}

inline Mat stack_rows(const Mat& a, const Mat& b) {
    assert(a.cols() == b.cols() || a.rows() == 0 || b.rows() == 0);
    int cols = a.rows() ? a.cols() : b.cols();
    Mat m(a.rows() + b.rows(), cols);
    for (int i = 0; i < a.rows(); ++i) m.set_row(i, a.row(i));
    for (int i = 0; i < b.rows(); ++i) m.set_row(a.rows() + i, b.row(i));
    return m;
}

inline Mat rows_from_vectors(const std::vector<Vec>& vs, int ambient) {
    Mat m(static_cast<int>(vs.size()), ambient);
    for (size_t i = 0; i < vs.size(); ++i) m.set_row(static_cast<int>(i), vs[i]);
    return m;
}

inline bool is_zero_vec(const Vec& v) {
    for (const auto& s : v)
        if (!s.is_zero()) return false;
    return true;
}

/// Membership by reduction against the RREF basis rows.
inline bool subspace_contains(const Subspace& s, Vec v) {
    const int n = static_cast<int>(v.size());
    for (int r = 0; r < s.dim(); ++r) {
        int pivot = -1;
        for (int j = 0; j < n; ++j)
            if (!s.rows.at(r, j).is_zero()) {
                pivot = j;
                break;
            }
        if (pivot < 0) continue;
        Scalar coef = v[pivot];
        if (coef.is_zero()) continue;
        for (int j = pivot; j < n; ++j)
            if (!s.rows.at(r, j).is_zero()) v[j].sub_mul(coef, s.rows.at(r, j));
    }
    return is_zero_vec(v);
}

inline bool subspace_leq(const Subspace& a, const Subspace& b) {
    return stack_rows(b.rows, a.rows).rank() == b.dim();
}

/// Intersection of two row spaces.
inline Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.dim() == 0 || b.dim() == 0) return Subspace{Mat(0, a.ambient())};
    // solve alpha^T A = beta^T B: nullspace of [A^T | -B^T]
    int n = a.ambient();
    Mat sys(n, a.dim() + b.dim());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < a.dim(); ++j) sys.at(i, j) = a.rows.at(j, i);
        for (int j = 0; j < b.dim(); ++j) sys.at(i, a.dim() + j) = -b.rows.at(j, i);
    }
    Mat ns = sys.nullspace();
    Mat vecs(ns.cols(), n);
    for (int c = 0; c < ns.cols(); ++c)
        for (int i = 0; i < n; ++i) {
            Scalar acc(0);
            for (int j = 0; j < a.dim(); ++j)
                if (!ns.at(j, c).is_zero()) acc += ns.at(j, c) * a.rows.at(j, i);
            vecs.at(c, i) = acc;
        }
    return span_rows(vecs);
}

/// Thrown internally when the fast relation-check arithmetic would overflow
/// its machine-word denominators; callers fall back to generic Scalar math.
struct fq_unsupported {};

namespace detail {

inline long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw fq_unsupported{};
    return r;
}

inline long long llgcd(long long a, long long b) {
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

/// Rational matrix with lazily normalized entries: numerator an integer,
/// denominator a positive machine word. Skipping per-operation gcd
/// canonicalization makes the bounded-degree relation residuals several times
/// cheaper than canonical mpq arithmetic. Only rational (non-surd) scalars
/// are representable; anything else raises fq_unsupported.
class FMat {
public:
    FMat() = default;
    FMat(int rows, int cols)
        : r_(rows), c_(cols), num_(static_cast<size_t>(rows) * cols), den_(num_.size(), 1) {}

    explicit FMat(const Mat& m) : FMat(m.rows(), m.cols()) {
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) {
                const Scalar& v = m.at(i, j);
                if (v.is_zero()) continue;
                if (!v.is_rational()) throw fq_unsupported{};
                num(i, j) = numerator(v.rat_part());
                Int d = denominator(v.rat_part());
                if (d > Int(std::numeric_limits<long long>::max())) throw fq_unsupported{};
                den(i, j) = static_cast<long long>(d);
            }
    }

    int rows() const { return r_; }
    int cols() const { return c_; }

    bool is_zero() const {
        for (const auto& n : num_)
            if (!n.is_zero()) return false;
        return true;
    }

    int nnz() const {
        int k = 0;
        for (const auto& n : num_)
            if (!n.is_zero()) ++k;
        return k;
    }

    Scalar entry(int i, int j) const { return Scalar(Rat(num(i, j)) / Rat(den(i, j))); }

    std::string sample_entry() const {
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                if (!num(i, j).is_zero()) return entry(i, j).str();
        return "0";
    }

    friend FMat operator*(const FMat& a, const FMat& b) {
        FMat m(a.r_, b.c_);
        std::vector<std::vector<int>> bnz(b.r_);
        for (int k = 0; k < b.r_; ++k)
            for (int j = 0; j < b.c_; ++j)
                if (!b.num(k, j).is_zero()) bnz[k].push_back(j);
        static thread_local Int prod;
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const Int& an = a.num(i, k);
                if (an.is_zero()) continue;
                long long ad = a.den(i, k);
                for (int j : bnz[k]) {
                    mpz_mul(prod.backend().data(), an.backend().data(), b.num(k, j).backend().data());
                    m.accumulate(i, j, prod, detail::checked_mul(ad, b.den(k, j)));
                }
            }
        return m;
    }

    friend FMat operator+(FMat a, const FMat& b) {
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j)
                if (!b.num(i, j).is_zero()) a.accumulate(i, j, b.num(i, j), b.den(i, j));
        return a;
    }
    friend FMat operator-(FMat a, const FMat& b) {
        static thread_local Int neg;
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j)
                if (!b.num(i, j).is_zero()) {
                    mpz_neg(neg.backend().data(), b.num(i, j).backend().data());
                    a.accumulate(i, j, neg, b.den(i, j));
                }
        return a;
    }
    friend FMat commutator(const FMat& a, const FMat& b) { return a * b - b * a; }

    /// Scales by a rational scalar.
    friend FMat operator*(const Scalar& s, FMat a) {
        if (!s.is_rational()) throw fq_unsupported{};
        if (s.is_zero()) return FMat(a.r_, a.c_);
        Int sn = numerator(s.rat_part());
        Int sd = denominator(s.rat_part());
        if (sd > Int(std::numeric_limits<long long>::max())) throw fq_unsupported{};
        long long sdl = static_cast<long long>(sd);
        for (size_t i = 0; i < a.num_.size(); ++i)
            if (!a.num_[i].is_zero()) {
                a.num_[i] *= sn;
                a.den_[i] = detail::checked_mul(a.den_[i], sdl);
            }
        return a;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<Int> num_;
    std::vector<long long> den_;

    Int& num(int i, int j) { return num_[static_cast<size_t>(i) * c_ + j]; }
    const Int& num(int i, int j) const { return num_[static_cast<size_t>(i) * c_ + j]; }
    long long& den(int i, int j) { return den_[static_cast<size_t>(i) * c_ + j]; }
    long long den(int i, int j) const { return den_[static_cast<size_t>(i) * c_ + j]; }

    /// entry(i,j) += add_n / add_d without canonicalizing.
    void accumulate(int i, int j, const Int& add_n, long long add_d) {
        Int& n = num(i, j);
        long long& d = den(i, j);
        if (n.is_zero()) {
            n = add_n;
            d = add_d;
            return;
        }
        if (d == add_d) {
            n += add_n;
            return;
        }
        long long g = detail::llgcd(d, add_d);
        long long scale_mine = add_d / g;
        long long lcm = detail::checked_mul(d, scale_mine);
        static thread_local Int tmp;
        mpz_mul_si(n.backend().data(), n.backend().data(), scale_mine);
        mpz_mul_si(tmp.backend().data(), add_n.backend().data(), d / g);
        mpz_add(n.backend().data(), n.backend().data(), tmp.backend().data());
        d = lcm;
    }
};

/// Incrementally maintained RREF row basis; insert() reports whether the
/// vector enlarged the span.
class RowSpaceBuilder {
public:
    explicit RowSpaceBuilder(int ambient) : n_(ambient) {}

    int dim() const { return static_cast<int>(rows_.size()); }
    int ambient() const { return n_; }

    bool insert(Vec v) {
        for (size_t r = 0; r < rows_.size(); ++r) {
            Scalar lead = v[static_cast<size_t>(pivots_[r])]; // by value: v mutates below
            if (!lead.is_zero()) {
                for (int j = 0; j < n_; ++j)
                    if (!rows_[r][j].is_zero()) v[j].sub_mul(lead, rows_[r][j]);
            }
        }
        int pivot = -1;
        for (int j = 0; j < n_; ++j)
            if (!v[j].is_zero()) {
                pivot = j;
                break;
            }
        if (pivot < 0) return false;
        Scalar inv = v[pivot].inverse();
        for (int j = pivot; j < n_; ++j)
            if (!v[j].is_zero()) v[j] *= inv;
        // back-eliminate the new pivot from existing rows
        for (size_t r = 0; r < rows_.size(); ++r) {
            Scalar f = rows_[r][pivot];
            if (f.is_zero()) continue;
            for (int j = pivot; j < n_; ++j)
                if (!v[j].is_zero()) rows_[r][j].sub_mul(f, v[j]);
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(pivot);
        return true;
    }

    Subspace subspace() const {
        // emit rows sorted by pivot column for a canonical basis
        std::vector<int> order(rows_.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return pivots_[a] < pivots_[b]; });
        Mat m(static_cast<int>(rows_.size()), n_);
        for (size_t i = 0; i < order.size(); ++i) m.set_row(static_cast<int>(i), rows_[order[i]]);
        return Subspace{m};
    }

private:
    int n_;
    std::vector<Vec> rows_;
    std::vector<int> pivots_;
};

} // namespace tdlab
