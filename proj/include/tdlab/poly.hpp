/// Dense univariate polynomials over Q(sqrt(D)), coefficients constant-first.
#pragma once

#include "tdlab/scalar.hpp"

#include <vector>

namespace tdlab {

struct Poly {
    std::vector<Scalar> c; // c[i] multiplies lambda^i

    Poly() = default;
    explicit Poly(std::vector<Scalar> coeffs) : c(std::move(coeffs)) { trim(); }
    static Poly constant(const Scalar& v) { return Poly({v}); }
    static Poly lambda() { return Poly({Scalar(0), Scalar(1)}); }

    /// prod_i (lambda - r_i)
    static Poly from_roots(const std::vector<Scalar>& roots) {
        Poly p = constant(Scalar(1));
        for (const auto& r : roots) p = p * Poly({-r, Scalar(1)});
        return p;
    }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero poly
    bool is_zero() const { return c.empty(); }
    bool is_monic() const { return !c.empty() && c.back() == Scalar(1); }

    Scalar coeff(int i) const { return i >= 0 && i < static_cast<int>(c.size()) ? c[i] : Scalar(0); }

    Scalar eval(const Scalar& x) const {
        Scalar acc(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Scalar> out(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return Poly(std::move(out));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Scalar> out(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return Poly(std::move(out));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<Scalar> out(a.c.size() + b.c.size() - 1);
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i].is_zero()) continue;
            for (size_t j = 0; j < b.c.size(); ++j)
                if (!b.c[j].is_zero()) out[i + j] += a.c[i] * b.c[j];
        }
        return Poly(std::move(out));
    }
    friend Poly operator*(const Scalar& s, const Poly& a) {
        std::vector<Scalar> out(a.c.size());
        for (size_t i = 0; i < a.c.size(); ++i) out[i] = s * a.c[i];
        return Poly(std::move(out));
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::string str() const {
        if (c.empty()) return "0";
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            if (coeff(i).is_zero()) continue;
            if (!s.empty()) s += " + ";
            if (i == 0)
                s += coeff(i).str();
            else if (coeff(i) == Scalar(1))
                s += i == 1 ? "x" : "x^" + std::to_string(i);
            else
                s += "(" + coeff(i).str() + ")*" + (i == 1 ? "x" : "x^" + std::to_string(i));
        }
        return s.empty() ? "0" : s;
    }
};

} // namespace tdlab
