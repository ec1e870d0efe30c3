/**
 * @file loopmod.hpp
 * @brief Evaluation modules of the U_q(sl2)-loop algebra as explicit matrices,
 *        coproduct tensor products, duals, and exact relation verification.
 *
 * Generators are stored as e0+, e1+, f0 = e0-k0, f1 = e1-k1, k0, k0^{-1}
 * (k1 is k0^{-1} throughout). The coproduct is stated on exactly these
 * elements, which is why f_i rather than e_i^- is the stored form; e_i^- is
 * recovered as f_i k_i^{-1} where a relation needs it.
 */
#pragma once

#include "tdlab/matrix.hpp"
#include "tdlab/qfun.hpp"

#include <string>
#include <vector>

namespace tdlab {

/// (epsilon, epsilon*) in {(1,1), (1,0), (0,0)}: 1st, 2nd, 3rd kind.
struct AlgebraKind {
    int eps = 1;
    int eps_star = 1;

    bool valid() const {
        return (eps == 1 && eps_star == 1) || (eps == 1 && eps_star == 0) || (eps == 0 && eps_star == 0);
    }
    bool is_first() const { return eps == 1 && eps_star == 1; }
    bool is_second() const { return eps == 1 && eps_star == 0; }
    bool is_third() const { return eps == 0 && eps_star == 0; }

    friend bool operator==(const AlgebraKind& a, const AlgebraKind& b) {
        return a.eps == b.eps && a.eps_star == b.eps_star;
    }
    std::string str() const { return "(" + std::to_string(eps) + "," + std::to_string(eps_star) + ")"; }
};

/// One evaluation-module factor V(ell, a); a = 0 encodes V(ell) and is legal
/// only for the second kind.
struct EvalFactor {
    int ell = 1;
    Scalar a = Scalar(1);
};

struct ModuleSpec {
    AlgebraKind kind;
    std::vector<EvalFactor> factors;
    int leading_trivial_ell = -1; // V(ell) leading factor for kind (1,0); -1 = absent

    int dimension() const {
        long long dim = leading_trivial_ell >= 0 ? leading_trivial_ell + 1 : 1;
        for (const auto& f : factors) dim *= f.ell + 1;
        return static_cast<int>(dim);
    }
    int diameter() const {
        int d = leading_trivial_ell >= 0 ? leading_trivial_ell : 0;
        for (const auto& f : factors) d += f.ell;
        return d;
    }

    void validate() const {
        if (!kind.valid()) throw field_error("ModuleSpec: invalid (epsilon, epsilon*)");
        if (leading_trivial_ell >= 0 && !kind.is_second())
            throw field_error("ModuleSpec: leading V(ell) requires kind (1,0)");
        for (const auto& f : factors) {
            if (f.ell < 1) throw field_error("ModuleSpec: factor ell must be >= 1");
            if (f.a.is_zero()) throw field_error("ModuleSpec: factor a must be nonzero (use leading_trivial_ell for V(ell))");
        }
    }
};

struct Representation {
    FieldConfig fc;
    AlgebraKind kind;
    int dim = 0;
    int d = 0;                // diameter; k0 eigenvalue on weight i is q^{2i-d}
    std::vector<int> weights; // basis index -> weight index
    Mat e0p, e1p, f1, k0, k0inv;
    Mat f0; // empty for kind (1,0)
    bool has_f0 = false;
};

struct RelationResidual {
    std::string name;
    bool zero = false;
    int nnz = 0;
    std::string sample; // a nonzero entry, when any
};

struct RelationReport {
    std::vector<RelationResidual> entries;
    bool pass = true;

    void add(const std::string& name, const Mat& residual) {
        RelationResidual r;
        r.name = name;
        r.zero = residual.is_zero();
        r.nnz = residual.nnz();
        r.sample = r.zero ? "0" : residual.sample_entry();
        if (!r.zero) pass = false;
        entries.push_back(std::move(r));
    }

    void add(const std::string& name, const FMat& residual) {
        RelationResidual r;
        r.name = name;
        r.zero = residual.is_zero();
        r.nnz = residual.nnz();
        r.sample = r.zero ? "0" : residual.sample_entry();
        if (!r.zero) pass = false;
        entries.push_back(std::move(r));
    }
};

namespace detail {

/// Residual of k m k^{-1} = c m for diagonal k, computed entrywise.
inline Mat conjugation_residual(const Mat& kdiag, const Mat& kdiag_inv, const Mat& m, const Scalar& c) {
    Mat res(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const Scalar& v = m.at(i, j);
            if (!v.is_zero()) res.at(i, j) = (kdiag.at(i, i) * kdiag_inv.at(j, j) - c) * v;
        }
    return res;
}

} // namespace detail

/// Standard-basis actions of Section 1.4: k0 v_i = q^{2i-l} v_i,
/// e0+ v_i = a q [i+1] v_{i+1}, e1+ v_i = [l-i+1] v_{i-1}, e1- v_i = [i+1] v_{i+1},
/// e0- v_i = a^{-1} q^{-1} [l-i+1] v_{i-1}.
inline Representation build_evaluation(const FieldConfig& fc, const EvalFactor& factor, AlgebraKind kind) {
    if (!kind.valid()) throw field_error("build_evaluation: invalid kind");
    if (factor.a.is_zero() && !kind.is_second())
        throw field_error("build_evaluation: a = 0 only for kind (1,0)");
    if (factor.ell < 0 || (factor.ell == 0 && !(kind.is_second() && factor.a.is_zero())))
        throw field_error("build_evaluation: ell = 0 only for the trivial module of kind (1,0)");

    const int l = factor.ell;
    const int n = l + 1;
    Representation r;
    r.fc = fc;
    r.kind = kind;
    r.dim = n;
    r.d = l;
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) r.weights[i] = i;

    r.e0p = Mat(n, n);
    r.e1p = Mat(n, n);
    r.f1 = Mat(n, n);
    r.k0 = Mat(n, n);
    r.k0inv = Mat(n, n);
    r.has_f0 = !kind.is_second();
    if (r.has_f0) r.f0 = Mat(n, n);

    for (int i = 0; i < n; ++i) {
        Scalar qw = q_pow(fc, 2 * i - l);
        r.k0.at(i, i) = qw;
        r.k0inv.at(i, i) = qw.inverse();
        if (i + 1 < n) {
            // e0+ v_i = a q [i+1] v_{i+1}
            r.e0p.at(i + 1, i) = factor.a * Scalar(fc.q) * q_integer(fc, i + 1);
            // f1 v_i = e1- k1 v_i = q^{l-2i} [i+1] v_{i+1}
            r.f1.at(i + 1, i) = q_pow(fc, l - 2 * i) * q_integer(fc, i + 1);
        }
        if (i - 1 >= 0) {
            // e1+ v_i = [l-i+1] v_{i-1}
            r.e1p.at(i - 1, i) = q_integer(fc, l - i + 1);
            if (r.has_f0) {
                // f0 v_i = e0- k0 v_i = q^{2i-l} a^{-1} q^{-1} [l-i+1] v_{i-1}
                r.f0.at(i - 1, i) = qw * factor.a.inverse() * q_pow(fc, -1) * q_integer(fc, l - i + 1);
            }
        }
    }
    return r;
}

/// The 1-dimensional trivial module: all raising/lowering actions zero, k = 1.
inline Representation make_trivial(const FieldConfig& fc, AlgebraKind kind) {
    Representation r;
    r.fc = fc;
    r.kind = kind;
    r.dim = 1;
    r.d = 0;
    r.weights = {0};
    r.e0p = Mat(1, 1);
    r.e1p = Mat(1, 1);
    r.f1 = Mat(1, 1);
    r.k0 = Mat::identity(1);
    r.k0inv = Mat::identity(1);
    r.has_f0 = !kind.is_second();
    if (r.has_f0) r.f0 = Mat(1, 1);
    return r;
}

/// Tensor product via the coproduct: Delta(e_i+) = k_i (x) e_i+ + e_i+ (x) 1,
/// Delta(e_i- k_i) = k_i (x) e_i- k_i + e_i- k_i (x) 1, Delta(k_i) = k_i (x) k_i.
/// Basis order is row-major over (index1, index2).
inline Representation tensor(const Representation& r1, const Representation& r2) {
    if (!(r1.kind == r2.kind)) throw field_error("tensor: kind mismatch");
    if (r1.fc.q != r2.fc.q || r1.fc.D != r2.fc.D) throw field_error("tensor: FieldConfig mismatch");
    Representation r;
    r.fc = r1.fc;
    r.kind = r1.kind;
    r.dim = r1.dim * r2.dim;
    r.d = r1.d + r2.d;
    r.weights.resize(r.dim);
    for (int i = 0; i < r1.dim; ++i)
        for (int j = 0; j < r2.dim; ++j) r.weights[i * r2.dim + j] = r1.weights[i] + r2.weights[j];

    Mat id1 = Mat::identity(r1.dim), id2 = Mat::identity(r2.dim);
    Mat k1a = r1.k0inv, k1b = r2.k0inv; // k1 = k0^{-1}
    r.e0p = kron(r1.k0, r2.e0p) + kron(r1.e0p, id2);
    r.e1p = kron(k1a, r2.e1p) + kron(r1.e1p, id2);
    r.f1 = kron(k1a, r2.f1) + kron(r1.f1, id2);
    r.k0 = kron(r1.k0, r2.k0);
    r.k0inv = kron(r1.k0inv, r2.k0inv);
    r.has_f0 = r1.has_f0;
    if (r.has_f0) r.f0 = kron(r1.k0, r2.f0) + kron(r1.f0, id2);
    return r;
}

/// Builds the full tensor module of a spec (leading V(ell) first when present).
inline Representation build_module(const FieldConfig& fc, const ModuleSpec& spec) {
    spec.validate();
    Representation acc;
    bool have = false;
    if (spec.leading_trivial_ell >= 0) {
        acc = build_evaluation(fc, EvalFactor{spec.leading_trivial_ell, Scalar(0)}, spec.kind);
        have = true;
    }
    for (const auto& f : spec.factors) {
        Representation r = build_evaluation(fc, f, spec.kind);
        acc = have ? tensor(acc, r) : r;
        have = true;
    }
    if (!have) acc = make_trivial(fc, spec.kind);
    return acc;
}

/// Exact residuals of every defining relation of L (or L' for kind (1,0)).
inline RelationReport verify_loop_relations(const Representation& r) {
    RelationReport rep;
    const FieldConfig& fc = r.fc;
    Mat id = Mat::identity(r.dim);
    Scalar q2 = q_pow(fc, 2), qm2 = q_pow(fc, -2);
    Scalar qqinv = Scalar(fc.q) - q_pow(fc, -1);
    const Mat &k1 = r.k0inv, &k1inv = r.k0;

    rep.add("k0*k0^-1 - 1", r.k0 * r.k0inv - id);

    Mat e1m = r.f1 * k1inv; // e1- = f1 k1^{-1}
    rep.add("k0 e0+ k0^-1 - q^2 e0+", detail::conjugation_residual(r.k0, r.k0inv, r.e0p, q2));
    rep.add("k1 e1+ k1^-1 - q^2 e1+", detail::conjugation_residual(k1, k1inv, r.e1p, q2));
    rep.add("k1 e1- k1^-1 - q^-2 e1-", detail::conjugation_residual(k1, k1inv, e1m, qm2));
    rep.add("k0 e1+ k0^-1 - q^-2 e1+", detail::conjugation_residual(r.k0, r.k0inv, r.e1p, qm2));

    Mat e0m = r.has_f0 ? r.f0 * r.k0inv : Mat(); // e0- = f0 k0^{-1}
    Scalar beta = beta_const(fc), coeff = qqinv.inverse();

    if (r.has_f0) {
        rep.add("k0 e0- k0^-1 - q^-2 e0-", detail::conjugation_residual(r.k0, r.k0inv, e0m, qm2));
        rep.add("k1 e0+ k1^-1 - q^-2 e0+", detail::conjugation_residual(k1, k1inv, r.e0p, qm2));
    }

    // bracket and q-Serre families, on the fast rational matrices when the
    // entries allow it
    auto run = [&](auto&& make, auto& report) {
        using M = std::decay_t<decltype(make(r.e0p))>;
        M E0 = make(r.e0p), E1 = make(r.e1p), E1m = make(e1m);
        M K1 = make(k1), K1i = make(k1inv);
        report("[e1+,e1-] - (k1-k1^-1)/(q-q^-1)", commutator(E1, E1m) - coeff * (K1 - K1i));
        report("[e0+,e1-]", commutator(E0, E1m));
        auto q_serre = [&](const M& a, const M& b) {
            M a2 = a * a;
            M inner = a2 * b - beta * ((a * b) * a) + b * a2;
            return commutator(a, inner);
        };
        report("serre(e0+,e1+)", q_serre(E0, E1));
        report("serre(e1+,e0+)", q_serre(E1, E0));
        if (r.has_f0) {
            M E0m = make(e0m);
            M K0 = make(r.k0), K0i = make(r.k0inv);
            report("[e0+,e0-] - (k0-k0^-1)/(q-q^-1)", commutator(E0, E0m) - coeff * (K0 - K0i));
            report("[e1+,e0-]", commutator(E1, E0m));
            report("serre(e0-,e1-)", q_serre(E0m, E1m));
            report("serre(e1-,e0-)", q_serre(E1m, E0m));
        }
    };
    try {
        RelationReport fast;
        auto emit = [&](const std::string& n, const FMat& m) { fast.add(n, m); };
        run([](const Mat& m) { return FMat(m); }, emit);
        for (auto& e : fast.entries) rep.entries.push_back(std::move(e));
        rep.pass = rep.pass && fast.pass;
    } catch (const fq_unsupported&) {
        auto emit = [&](const std::string& n, const Mat& m) { rep.add(n, m); };
        run([](const Mat& m) { return m; }, emit);
    }
    return rep;
}

/// Dual module via the anti-automorphism tau (e_i+ <-> e_i- k_i, k_i fixed):
/// each generator matrix X becomes transpose(tau(X)). Kind (1,1) only, since
/// tau needs all generators.
inline Representation dual(const Representation& r) {
    if (!r.kind.is_first()) throw field_error("dual: requires kind (1,1)");
    Representation d = r;
    d.e0p = r.f0.transpose();
    d.f0 = r.e0p.transpose();
    d.e1p = r.f1.transpose();
    d.f1 = r.e1p.transpose();
    d.k0 = r.k0.transpose();
    d.k0inv = r.k0inv.transpose();
    return d;
}

/// Witness for the highest-weight embedding V(l,a) -> V(l-1, a q^{-1}) (x) V(1, a q^{l-1}):
/// w_i = q^{-i} u_i (x) v_0 + u_{i-1} (x) v_1.
struct EmbeddingWitness {
    Representation ambient;
    Representation target; // standard V(ell, a)
    std::vector<Vec> w;    // w_0 ... w_ell inside the ambient module
    bool verified = false; // generators restricted to span(w) equal the target matrices
};

inline EmbeddingWitness highest_embedding(const FieldConfig& fc, int ell, const Scalar& a, AlgebraKind kind) {
    if (ell < 2) throw field_error("highest_embedding: need ell >= 2");
    if (a.is_zero()) throw field_error("highest_embedding: need a != 0");
    EmbeddingWitness ew;
    Representation left = build_evaluation(fc, EvalFactor{ell - 1, a * q_pow(fc, -1)}, kind);
    Representation right = build_evaluation(fc, EvalFactor{1, a * q_pow(fc, ell - 1)}, kind);
    ew.ambient = tensor(left, right);
    ew.target = build_evaluation(fc, EvalFactor{ell, a}, kind);

    const int n = ew.ambient.dim; // 2 * ell
    ew.w.resize(ell + 1);
    for (int i = 0; i <= ell; ++i) {
        Vec wv(n);
        if (i <= ell - 1) wv[2 * i] = q_pow(fc, -i);      // q^{-i} u_i (x) v_0
        if (i >= 1) wv[2 * (i - 1) + 1] = Scalar(1);      // u_{i-1} (x) v_1
        ew.w[i] = wv;
    }

    // Verify G * W = W * M_target(G) for every stored generator.
    Mat W(n, ell + 1);
    for (int i = 0; i <= ell; ++i)
        for (int rix = 0; rix < n; ++rix) W.at(rix, i) = ew.w[i][rix];

    auto matches = [&](const Mat& amb, const Mat& tgt) { return (amb * W) == (W * tgt); };
    ew.verified = matches(ew.ambient.e0p, ew.target.e0p) && matches(ew.ambient.e1p, ew.target.e1p) &&
                  matches(ew.ambient.f1, ew.target.f1) && matches(ew.ambient.k0, ew.target.k0) &&
                  matches(ew.ambient.k0inv, ew.target.k0inv) &&
                  (!ew.target.has_f0 || matches(ew.ambient.f0, ew.target.f0));
    return ew;
}

} // namespace tdlab
