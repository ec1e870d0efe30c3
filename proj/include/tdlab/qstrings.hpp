/**
 * @file qstrings.hpp
 * @brief q-string combinatorics: adjacency, (strongly) general position,
 *        equivalence, the two decomposition algorithms, the per-kind
 *        irreducibility criteria, and the inverse construction from roots.
 */
#pragma once

#include "tdlab/loopmod.hpp"
#include "tdlab/qfun.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tdlab {

/// S(ell, a) = { a q^{2i - ell + 1} | 0 <= i <= ell - 1 }, a != 0.
struct QString {
    int ell = 1;
    Scalar a = Scalar(1);

    std::vector<Scalar> elements(const FieldConfig& fc) const {
        std::vector<Scalar> out;
        for (int i = 0; i < ell; ++i) out.push_back(a * q_pow(fc, 2 * i - ell + 1));
        return out;
    }
    QString inverted() const { return QString{ell, a.inverse()}; }
};

inline bool qstring_less(const QString& s1, const QString& s2) {
    if (s1.ell != s2.ell) return s1.ell < s2.ell;
    return lex_less(s1.a, s2.a);
}

struct QStringMultiset {
    std::vector<QString> strings; // order-insensitive semantics

    QStringMultiset sorted() const {
        QStringMultiset m = *this;
        std::sort(m.strings.begin(), m.strings.end(), qstring_less);
        return m;
    }
};

/// A finite multiset of nonzero scalars (the paper's Omega).
struct ScalarMultiset {
    std::vector<std::pair<Scalar, long>> entries; // (value, multiplicity >= 1)

    long total() const {
        long t = 0;
        for (const auto& e : entries) t += e.second;
        return t;
    }
    void add(const Scalar& v, long mult = 1) {
        for (auto& e : entries)
            if (e.first == v) {
                e.second += mult;
                return;
            }
        entries.emplace_back(v, mult);
    }
    long multiplicity(const Scalar& v) const {
        for (const auto& e : entries)
            if (e.first == v) return e.second;
        return 0;
    }
    void remove_one(const Scalar& v) {
        for (size_t i = 0; i < entries.size(); ++i)
            if (entries[i].first == v) {
                if (--entries[i].second == 0) entries.erase(entries.begin() + static_cast<long>(i));
                return;
            }
        throw field_error("ScalarMultiset: removing absent element");
    }
    void canonicalize() {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    }
    friend bool operator==(const ScalarMultiset& a, const ScalarMultiset& b) {
        ScalarMultiset ca = a, cb = b;
        ca.canonicalize();
        cb.canonicalize();
        return ca.entries == cb.entries;
    }
};

/// Membership c in S(ell, a), decided by the q-power-ratio grid and
/// cross-checked by element enumeration.
inline bool qstring_contains(const FieldConfig& fc, const QString& s, const Scalar& c) {
    bool by_ratio = false;
    if (!c.is_zero()) {
        auto j = q_power_ratio(fc, s.a, c);
        // exponents run over -ell+1, -ell+3, ..., ell-1
        by_ratio = j && std::abs(*j) <= s.ell - 1 && ((*j - (s.ell - 1)) % 2 == 0);
    }
    bool by_enum = false;
    for (const auto& e : s.elements(fc))
        if (e == c) by_enum = true;
    if (by_ratio != by_enum) throw field_error("qstring_contains: ratio and enumeration routes disagree");
    return by_ratio;
}

/// Adjacent iff the union is a strictly longer q-string:
/// a^{-1} a' = q^{+-i} with i in {|l-l'|+2, |l-l'|+4, ..., l+l'}.
inline bool adjacent(const FieldConfig& fc, const QString& s1, const QString& s2) {
    auto j = q_power_ratio(fc, s1.a, s2.a);
    if (!j) return false;
    long ai = std::abs(*j);
    long lo = std::abs(s1.ell - s2.ell) + 2, hi = s1.ell + s2.ell;
    return ai >= lo && ai <= hi && (ai - hi) % 2 == 0;
}

inline bool general_position(const FieldConfig& fc, const QStringMultiset& ms) {
    for (size_t i = 0; i < ms.strings.size(); ++i)
        for (size_t j = i + 1; j < ms.strings.size(); ++j)
            if (adjacent(fc, ms.strings[i], ms.strings[j])) return false;
    return true;
}

/// General position for every choice of inversion signs. Adjacency is
/// invariant under inverting both strings, so two sign combinations per pair
/// suffice.
inline bool strongly_general_position(const FieldConfig& fc, const QStringMultiset& ms) {
    for (size_t i = 0; i < ms.strings.size(); ++i)
        for (size_t j = i + 1; j < ms.strings.size(); ++j) {
            if (adjacent(fc, ms.strings[i], ms.strings[j])) return false;
            if (adjacent(fc, ms.strings[i], ms.strings[j].inverted())) return false;
        }
    return true;
}

/// Equivalence: equal cardinality and some sign choice + permutation matching
/// S(l_i, a_i^{e_i}) with the other multiset.
inline bool equivalent(const FieldConfig& fc, const QStringMultiset& m1, const QStringMultiset& m2) {
    (void)fc;
    if (m1.strings.size() != m2.strings.size()) return false;
    const size_t n = m1.strings.size();
    std::vector<std::vector<int>> cand(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const QString &s1 = m1.strings[i], &s2 = m2.strings[j];
            if (s1.ell == s2.ell && (s1.a == s2.a || s1.a == s2.a.inverse())) cand[i].push_back(static_cast<int>(j));
        }
    // bipartite matching by augmenting paths
    std::vector<int> match_to(n, -1); // right -> left
    std::function<bool(size_t, std::vector<bool>&)> augment = [&](size_t i, std::vector<bool>& seen) {
        for (int j : cand[i]) {
            if (seen[j]) continue;
            seen[j] = true;
            if (match_to[j] < 0 || augment(static_cast<size_t>(match_to[j]), seen)) {
                match_to[j] = static_cast<int>(i);
                return true;
            }
        }
        return false;
    };
    for (size_t i = 0; i < n; ++i) {
        std::vector<bool> seen(n, false);
        if (!augment(i, seen)) return false;
    }
    return true;
}

namespace detail {

struct Ladder {
    Scalar rep;                    // value at position 0
    std::map<long, long> mult_at;  // position j -> multiplicity of rep * q^{2j}
};

inline std::vector<Ladder> ladder_classes(const FieldConfig& fc, const ScalarMultiset& omega) {
    ScalarMultiset om = omega;
    om.canonicalize();
    std::vector<Ladder> out;
    for (const auto& [v, mult] : om.entries) {
        if (v.is_zero()) throw field_error("decompose: Omega entries must be nonzero");
        bool placed = false;
        for (auto& lad : out) {
            auto j = q_power_ratio(fc, lad.rep, v);
            if (j && (*j % 2 == 0)) {
                lad.mult_at[*j / 2] += mult;
                placed = true;
                break;
            }
        }
        if (!placed) {
            Ladder lad;
            lad.rep = v;
            lad.mult_at[0] = mult;
            out.push_back(std::move(lad));
        }
    }
    return out;
}

} // namespace detail

/// The unique general-position multiset covering Omega: within each
/// q^2-ladder, peel multiplicity layers into maximal runs (layer strings are
/// nested or separated, never adjacent).
inline QStringMultiset decompose(const FieldConfig& fc, const ScalarMultiset& omega) {
    QStringMultiset out;
    for (const auto& lad : detail::ladder_classes(fc, omega)) {
        long max_mult = 0;
        for (const auto& [pos, m] : lad.mult_at) max_mult = std::max(max_mult, m);
        for (long layer = 1; layer <= max_mult; ++layer) {
            std::optional<long> run_start;
            long prev = 0;
            auto flush = [&](long end_pos) {
                if (!run_start) return;
                int ell = static_cast<int>(end_pos - *run_start + 1);
                Scalar a = lad.rep * q_pow(fc, 2 * *run_start + ell - 1);
                out.strings.push_back(QString{ell, a});
                run_start.reset();
            };
            for (const auto& [pos, m] : lad.mult_at) {
                bool in_layer = m >= layer;
                if (run_start && (pos != prev + 1 || !in_layer)) flush(prev);
                if (in_layer && !run_start) run_start = pos;
                prev = pos;
            }
            flush(prev);
        }
    }
    out = out.sorted();
    return out;
}

namespace detail {

inline void check_inversion_symmetric(const ScalarMultiset& omega) {
    for (const auto& [v, mult] : omega.entries) {
        if (v.is_zero()) throw field_error("decompose_symmetric: entries must be nonzero");
        Scalar vi = v.inverse();
        if (v == vi) {
            if (mult % 2 != 0)
                throw field_error("decompose_symmetric: +-1 must have even multiplicity");
        } else if (omega.multiplicity(vi) != mult) {
            throw field_error("decompose_symmetric: Omega is not inversion-symmetric");
        }
    }
}

/// A maximal element of Omega under a <= b iff b = a q^{2i}, i >= 0;
/// among maximal elements, the lexicographically smallest (x, y) encoding.
inline Scalar maximal_element(const FieldConfig& fc, const ScalarMultiset& omega) {
    std::optional<Scalar> best;
    for (const auto& [v, mult] : omega.entries) {
        (void)mult;
        bool maximal = true;
        for (const auto& [w, wm] : omega.entries) {
            (void)wm;
            auto j = q_power_ratio(fc, v, w);
            if (j && *j > 0 && *j % 2 == 0) {
                maximal = false;
                break;
            }
        }
        if (maximal && (!best || lex_less(v, *best))) best = v;
    }
    return *best; // omega nonempty by caller contract
}

} // namespace detail

/// Lemma-style symmetric decomposition: a strongly-general-position multiset
/// {S(l_i, a_i)} with Omega = union of S(l_i, a_i) and S(l_i, a_i^{-1}),
/// built by the recursion: remove a maximal c together with c^{-1}, recurse,
/// then extend the longest extendable string by c or append S(1, c).
inline QStringMultiset decompose_symmetric(const FieldConfig& fc, const ScalarMultiset& omega) {
    detail::check_inversion_symmetric(omega);
    ScalarMultiset om = omega;
    om.canonicalize();
    if (om.entries.empty()) return {};

    Scalar c = detail::maximal_element(fc, om);
    om.remove_one(c);
    om.remove_one(c.inverse());
    QStringMultiset rest = decompose_symmetric(fc, om);

    // extendable: c = a' q^{l'+1} directly, or after inverting the string
    int pick = -1;
    bool invert = false;
    for (size_t i = 0; i < rest.strings.size(); ++i) {
        const QString& s = rest.strings[i];
        bool direct = (s.a * q_pow(fc, s.ell + 1)) == c;
        bool flipped = (s.a.inverse() * q_pow(fc, s.ell + 1)) == c;
        if ((direct || flipped) && (pick < 0 || s.ell > rest.strings[pick].ell)) {
            pick = static_cast<int>(i);
            invert = !direct && flipped;
        }
    }
    if (pick >= 0) {
        QString& s = rest.strings[pick];
        if (invert) s.a = s.a.inverse();
        s = QString{s.ell + 1, s.a * Scalar(fc.q)};
    } else {
        rest.strings.push_back(QString{1, c});
    }
    return rest.sorted();
}

/// Union of all string elements as a multiset; with_inverses adds S(l, a^{-1}).
inline ScalarMultiset string_union(const FieldConfig& fc, const QStringMultiset& ms, bool with_inverses) {
    ScalarMultiset out;
    for (const auto& s : ms.strings) {
        for (const auto& e : s.elements(fc)) out.add(e);
        if (with_inverses)
            for (const auto& e : s.inverted().elements(fc)) out.add(e);
    }
    out.canonicalize();
    return out;
}

struct ClassificationReport {
    bool irreducible_as_T_module = false;
    bool m_sdt_member = false;
    bool has_t = false;
    std::vector<std::string> failed_conditions; // tags (i.1), (i.2), (17), (18), (ii.1)
    Scalar b, b_star;
    int d = 0;
};

/// Part (i) of the kind's classification theorem, plus the M^{s,t}_d
/// membership conditions (17), (18), (ii.1) when t is given.
inline ClassificationReport classify_module(const FieldConfig& fc, const ModuleSpec& spec, const Scalar& s,
                                            const std::optional<Scalar>& t) {
    spec.validate();
    if (s.is_zero()) throw field_error("classify_module: s must be nonzero");
    ClassificationReport rep;
    rep.d = spec.diameter();

    QStringMultiset ms;
    for (const auto& f : spec.factors) ms.strings.push_back(QString{f.ell, f.a});

    bool gp_ok = spec.kind.is_first() ? strongly_general_position(fc, ms) : general_position(fc, ms);
    if (!gp_ok) rep.failed_conditions.push_back("(i.1)");

    bool memb_ok = true;
    if (spec.kind.is_first()) {
        Scalar probe = -(s * s);
        for (const auto& str : ms.strings)
            if (qstring_contains(fc, str, probe) || qstring_contains(fc, str.inverted(), probe)) memb_ok = false;
    } else if (spec.kind.is_second()) {
        Scalar probe = -(s * s).inverse();
        for (const auto& str : ms.strings)
            if (qstring_contains(fc, str, probe)) memb_ok = false;
    }
    if (!memb_ok) rep.failed_conditions.push_back("(i.2)");

    rep.irreducible_as_T_module = gp_ok && memb_ok;

    if (t) {
        rep.has_t = true;
        if (t->is_zero()) throw field_error("classify_module: t must be nonzero");
        rep.b = s * *t;
        rep.b_star = s * t->inverse();
        bool c17 = detail::ladder_distinct(fc, rep.b, spec.kind.eps, rep.d);
        bool c18 = detail::ladder_distinct(fc, rep.b_star, spec.kind.eps_star, rep.d);
        if (!c17) rep.failed_conditions.push_back("(17)");
        if (!c18) rep.failed_conditions.push_back("(18)");
        Scalar probe = -(*t * *t);
        bool t_ok = true;
        for (const auto& str : ms.strings) {
            if (qstring_contains(fc, str, probe)) t_ok = false;
            if (spec.kind.is_first() && qstring_contains(fc, str.inverted(), probe)) t_ok = false;
        }
        if (!t_ok) rep.failed_conditions.push_back("(ii.1)");
        rep.m_sdt_member = rep.irreducible_as_T_module && c17 && c18 && t_ok;
    }
    return rep;
}

/// Inverse construction: a ModuleSpec whose Drinfel'd polynomial has exactly
/// the given roots. Kind (1,1) solves zeta^2 + lambda zeta + 1 = 0 over
/// Q(sqrt(D)) and decomposes the solution multiset symmetrically; kind (1,0)
/// splits off zero roots into the leading V(ell); kind (0,0) decomposes the
/// negated roots directly.
inline ModuleSpec realize_polynomial(const FieldConfig& fc, const std::vector<Scalar>& roots,
                                     AlgebraKind kind, const Scalar& s) {
    if (!kind.valid()) throw field_error("realize_polynomial: invalid kind");
    if (s.is_zero()) throw field_error("realize_polynomial: s must be nonzero");
    Scalar s2 = s * s;
    Scalar forbidden = Scalar(kind.eps) * s2.inverse() + Scalar(kind.eps_star) * s2;
    for (const auto& r : roots)
        if (r == forbidden)
            throw field_error("realize_polynomial: root at the forbidden value eps s^-2 + eps* s^2");

    ModuleSpec spec;
    spec.kind = kind;

    if (kind.is_first()) {
        ScalarMultiset omega;
        for (const auto& lam : roots) {
            auto disc = sqrt_in_field(lam * lam - Scalar(4), fc.D);
            if (!disc)
                throw field_error("realize_polynomial: zeta^2 + (" + lam.str() +
                                  ") zeta + 1 does not split over the field");
            Scalar zeta = (-lam + *disc) / Scalar(2);
            omega.add(zeta);
            omega.add(zeta.inverse());
        }
        for (const auto& str : decompose_symmetric(fc, omega).strings) spec.factors.push_back({str.ell, str.a});
    } else if (kind.is_second()) {
        ScalarMultiset omega;
        int zeros = 0;
        for (const auto& lam : roots) {
            if (lam.is_zero())
                ++zeros;
            else
                omega.add(-lam);
        }
        spec.leading_trivial_ell = zeros;
        for (const auto& str : decompose(fc, omega).strings) spec.factors.push_back({str.ell, str.a});
    } else {
        ScalarMultiset omega;
        for (const auto& lam : roots) {
            if (lam.is_zero()) throw field_error("realize_polynomial: kind (0,0) forbids zero roots");
            omega.add(-lam);
        }
        for (const auto& str : decompose(fc, omega).strings) spec.factors.push_back({str.ell, str.a});
    }
    spec.validate();
    return spec;
}

} // namespace tdlab
