// Evaluation modules, coproduct tensor products, duals, highest-weight embedding.
#include <catch2/catch_amalgamated.hpp>

#include "tdlab/loopmod.hpp"

using namespace tdlab;

namespace {

FieldConfig fc_q2(long long D = 0) {
    FieldConfig fc;
    fc.q = 2;
    fc.D = D;
    fc.i_max = 64;
    fc.validate();
    return fc;
}

const AlgebraKind K11{1, 1};
const AlgebraKind K10{1, 0};
const AlgebraKind K00{0, 0};

} // namespace

TEST_CASE("V(1,a): explicit matrices") {
    FieldConfig fc = fc_q2();
    Scalar a(3);
    Representation r = build_evaluation(fc, {1, a}, K11);
    REQUIRE(r.dim == 2);
    // e0+ sends v0 to a q v1 and v1 to 0
    CHECK(r.e0p.at(1, 0) == a * Scalar(fc.q));
    CHECK(r.e0p.at(0, 0).is_zero());
    CHECK(r.e0p.at(0, 1).is_zero());
    CHECK(r.e0p.at(1, 1).is_zero());
    // k0 = diag(q^{-1}, q)
    CHECK(r.k0.at(0, 0) == q_pow(fc, -1));
    CHECK(r.k0.at(1, 1) == q_pow(fc, 1));
    CHECK((r.k0 * r.k0inv) == Mat::identity(2));
}

TEST_CASE("V(0) for kind (1,0) is trivial") {
    FieldConfig fc = fc_q2();
    Representation r = build_evaluation(fc, {0, Scalar(0)}, K10);
    CHECK(r.dim == 1);
    CHECK(r.e0p.is_zero());
    CHECK(r.e1p.is_zero());
    CHECK(r.f1.is_zero());
    CHECK(r.k0 == Mat::identity(1));
    CHECK_FALSE(r.has_f0);
}

TEST_CASE("V(2,a): e1+ action") {
    FieldConfig fc = fc_q2();
    Representation r = build_evaluation(fc, {2, Scalar(5)}, K11);
    // e1+ v1 = [2] v0, e1+ v2 = [1] v1
    CHECK(r.e1p.at(0, 1) == q_integer(fc, 2));
    CHECK(r.e1p.at(1, 2) == q_integer(fc, 1));
    CHECK(r.e1p.at(0, 2).is_zero());
}

TEST_CASE("a = 0 outside kind (1,0) is rejected") {
    FieldConfig fc = fc_q2();
    CHECK_THROWS_AS(build_evaluation(fc, {1, Scalar(0)}, K11), field_error);
    CHECK_THROWS_AS(build_evaluation(fc, {1, Scalar(0)}, K00), field_error);
    CHECK_NOTHROW(build_evaluation(fc, {1, Scalar(0)}, K10));
}

TEST_CASE("tensor: dimensions, weights, coproduct action") {
    FieldConfig fc = fc_q2();
    Scalar a(3), b(5);
    Representation va = build_evaluation(fc, {1, a}, K11);
    Representation vb = build_evaluation(fc, {2, b}, K11);
    Representation t = tensor(va, vb);
    CHECK(t.dim == 6);
    CHECK(t.d == 3);

    Representation v1 = build_evaluation(fc, {1, a}, K11);
    Representation v2 = build_evaluation(fc, {1, b}, K11);
    Representation tt = tensor(v1, v2);
    // Delta(k0) on v0 (x) v0: q^{-1} q^{-1} = q^{-2}
    CHECK(tt.k0.at(0, 0) == q_pow(fc, -2));
    // Delta(e0+) on v0 (x) v0 = b (v0 (x) v1) + a q (v1 (x) v0)
    CHECK(tt.e0p.at(1, 0) == b);               // v0 (x) v1 index = 0*2+1
    CHECK(tt.e0p.at(2, 0) == a * Scalar(fc.q)); // v1 (x) v0 index = 1*2+0
    // weights add
    CHECK(tt.weights == std::vector<int>{0, 1, 1, 2});
}

TEST_CASE("loop relations pass on evaluation modules and tensors, all kinds") {
    FieldConfig fc = fc_q2();
    for (AlgebraKind kind : {K11, K10, K00}) {
        Representation v1 = build_evaluation(fc, {1, Scalar(3)}, kind);
        Representation v2 = build_evaluation(fc, {2, Scalar(Rat(1, 2))}, kind);
        CHECK(verify_loop_relations(v1).pass);
        CHECK(verify_loop_relations(v2).pass);
        CHECK(verify_loop_relations(tensor(v1, v2)).pass);
    }
    // kind (1,0) with a zero-parameter factor
    Representation vz = build_evaluation(fc, {2, Scalar(0)}, K10);
    Representation vmix = tensor(vz, build_evaluation(fc, {1, Scalar(3)}, K10));
    CHECK(verify_loop_relations(vmix).pass);
}

TEST_CASE("a corrupted generator produces a nonzero residual") {
    FieldConfig fc = fc_q2();
    Representation v = tensor(build_evaluation(fc, {1, Scalar(3)}, K11),
                              build_evaluation(fc, {1, Scalar(5)}, K11));
    v.e0p.at(0, 1) += Scalar(1);
    RelationReport rep = verify_loop_relations(v);
    CHECK_FALSE(rep.pass);
    bool found = false;
    for (const auto& e : rep.entries)
        if (e.name == "[e0+,e1-]" && !e.zero) found = true;
    CHECK(found);
}

TEST_CASE("weight grading: raising and lowering block structure") {
    FieldConfig fc = fc_q2();
    Representation t = tensor(build_evaluation(fc, {2, Scalar(3)}, K11),
                              build_evaluation(fc, {1, Scalar(5)}, K11));
    for (int i = 0; i < t.dim; ++i)
        for (int j = 0; j < t.dim; ++j) {
            if (!t.e0p.at(i, j).is_zero()) CHECK(t.weights[i] == t.weights[j] + 1);
            if (!t.f1.at(i, j).is_zero()) CHECK(t.weights[i] == t.weights[j] + 1);
            if (!t.e1p.at(i, j).is_zero()) CHECK(t.weights[i] == t.weights[j] - 1);
            if (!t.f0.at(i, j).is_zero()) CHECK(t.weights[i] == t.weights[j] - 1);
            if (i != j) CHECK(t.k0.at(i, j).is_zero());
        }
    // k0 eigenvalue on weight block i is q^{2i-d}
    for (int i = 0; i < t.dim; ++i) CHECK(t.k0.at(i, i) == q_pow(fc, 2 * t.weights[i] - t.d));
}

TEST_CASE("tensor is associative on the nose in the row-major basis") {
    FieldConfig fc = fc_q2();
    Representation a = build_evaluation(fc, {1, Scalar(3)}, K00);
    Representation b = build_evaluation(fc, {1, Scalar(5)}, K00);
    Representation c = build_evaluation(fc, {2, Scalar(7)}, K00);
    Representation left = tensor(tensor(a, b), c);
    Representation right = tensor(a, tensor(b, c));
    CHECK(left.e0p == right.e0p);
    CHECK(left.e1p == right.e1p);
    CHECK(left.f1 == right.f1);
    CHECK(left.k0 == right.k0);
    CHECK(left.weights == right.weights);
}

TEST_CASE("kind mismatch is rejected") {
    FieldConfig fc = fc_q2();
    Representation a = build_evaluation(fc, {1, Scalar(3)}, K11);
    Representation b = build_evaluation(fc, {1, Scalar(3)}, K00);
    CHECK_THROWS_AS(tensor(a, b), field_error);
}

TEST_CASE("dual: V(l,a)* is V(l,a^{-1}) via the explicit g_i basis") {
    FieldConfig fc = fc_q2();
    for (int ell : {1, 2, 3}) {
        Scalar a(3);
        Representation v = build_evaluation(fc, {ell, a}, K11);
        Representation dv = dual(v);
        CHECK(verify_loop_relations(dv).pass);
        // g_i = q^{-i(l-i+1)} binom(l, i) f_i diagonalizes onto standard V(l, a^{-1})
        Representation target = build_evaluation(fc, {ell, a.inverse()}, K11);
        Mat C(ell + 1, ell + 1);
        for (int i = 0; i <= ell; ++i)
            C.at(i, i) = q_pow(fc, -i * (ell - i + 1)) * q_binomial(fc, ell, i);
        Mat Cinv = C.inverse();
        CHECK(Cinv * dv.e0p * C == target.e0p);
        CHECK(Cinv * dv.e1p * C == target.e1p);
        CHECK(Cinv * dv.f0 * C == target.f0);
        CHECK(Cinv * dv.f1 * C == target.f1);
        CHECK(dv.k0 == target.k0);
    }
}

TEST_CASE("dual of the trivial module is trivial; dual is involutive") {
    FieldConfig fc = fc_q2();
    Representation triv = make_trivial(fc, K11);
    Representation dt = dual(triv);
    CHECK(dt.e0p.is_zero());
    CHECK(dt.k0 == Mat::identity(1));

    Representation v = tensor(build_evaluation(fc, {1, Scalar(3)}, K11),
                              build_evaluation(fc, {2, Scalar(5)}, K11));
    Representation dd = dual(dual(v));
    CHECK(dd.e0p == v.e0p);
    CHECK(dd.e1p == v.e1p);
    CHECK(dd.f0 == v.f0);
    CHECK(dd.f1 == v.f1);
    CHECK(verify_loop_relations(dual(v)).pass);

    Representation w = build_evaluation(fc, {1, Scalar(3)}, K10);
    CHECK_THROWS_AS(dual(w), field_error);
}

TEST_CASE("highest_embedding: w-basis reproduces standard V(l,a)") {
    FieldConfig fc = fc_q2();
    for (int ell : {2, 3, 4}) {
        EmbeddingWitness ew = highest_embedding(fc, ell, Scalar(3), K11);
        CHECK(ew.verified);
        // w_0 = u_0 (x) v_0
        CHECK(ew.w[0][0] == Scalar(1));
        for (size_t i = 1; i < ew.w[0].size(); ++i) CHECK(ew.w[0][i].is_zero());
        // span{w_i} is (l+1)-dimensional
        Mat rows(ell + 1, ew.ambient.dim);
        for (int i = 0; i <= ell; ++i) rows.set_row(i, ew.w[i]);
        CHECK(rows.rank() == ell + 1);
    }
    CHECK_THROWS_AS(highest_embedding(fc_q2(), 1, Scalar(3), K11), field_error);
}

TEST_CASE("highest_embedding works for kinds (1,0) and (0,0) too") {
    FieldConfig fc = fc_q2();
    CHECK(highest_embedding(fc, 2, Scalar(3), K10).verified);
    CHECK(highest_embedding(fc, 3, Scalar(Rat(1, 2)), K00).verified);
}
