// Exact linear algebra: RREF, nullspace, rank, subspace operations.
#include <catch2/catch_amalgamated.hpp>

#include "tdlab/matrix.hpp"

#include <random>

using namespace tdlab;

namespace {

Mat random_matrix(std::mt19937_64& rng, int r, int c, int max_rank) {
    // product of random r x max_rank and max_rank x c integer matrices
    std::uniform_int_distribution<int> d(-3, 3);
    Mat a(r, max_rank), b(max_rank, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < max_rank; ++j) a.at(i, j) = Scalar(d(rng));
    for (int i = 0; i < max_rank; ++i)
        for (int j = 0; j < c; ++j) b.at(i, j) = Scalar(d(rng));
    return a * b;
}

} // namespace

TEST_CASE("rref and rank on a known system") {
    Mat m(3, 4);
    int vals[3][4] = {{1, 2, 3, 4}, {2, 4, 6, 8}, {1, 0, 1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) m.at(i, j) = Scalar(vals[i][j]);
    CHECK(m.rank() == 2);
    Mat ns = m.nullspace();
    CHECK(ns.cols() == 2);
    Mat prod = m * ns;
    CHECK(prod.is_zero());
}

TEST_CASE("nullspace property: A * null(A) = 0 and rank-nullity") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        int r = 2 + static_cast<int>(rng() % 6), c = 2 + static_cast<int>(rng() % 6);
        Mat m = random_matrix(rng, r, c, 2);
        Mat ns = m.nullspace();
        CHECK((m * ns).is_zero());
        CHECK(m.rank() + ns.cols() == c);
    }
}

TEST_CASE("inverse") {
    Mat m(2, 2);
    m.at(0, 0) = Scalar(Rat(1, 2));
    m.at(0, 1) = Scalar(3);
    m.at(1, 0) = Scalar(-1);
    m.at(1, 1) = Scalar(Rat(2, 5));
    Mat inv = m.inverse();
    CHECK(m * inv == Mat::identity(2));
    Mat sing(2, 2);
    sing.at(0, 0) = Scalar(1);
    sing.at(1, 0) = Scalar(2);
    CHECK_THROWS_AS(sing.inverse(), field_error);
}

TEST_CASE("kron is row-major and multiplicative") {
    std::mt19937_64 rng(5);
    Mat a = random_matrix(rng, 2, 2, 2), b = random_matrix(rng, 3, 3, 3);
    Mat c = random_matrix(rng, 2, 2, 2), d = random_matrix(rng, 3, 3, 3);
    CHECK(kron(a, b) * kron(c, d) == kron(a * c, b * d));
    CHECK(kron(a, b).at(0 * 3 + 1, 1 * 3 + 2) == a.at(0, 1) * b.at(1, 2));
}

TEST_CASE("subspace operations") {
    // row spaces in F^4
    Mat a(2, 4), b(2, 4);
    a.at(0, 0) = Scalar(1);
    a.at(1, 1) = Scalar(1); // span{e0, e1}
    b.at(0, 1) = Scalar(1);
    b.at(1, 2) = Scalar(1); // span{e1, e2}
    Subspace sa = span_rows(a), sb = span_rows(b);
    Subspace meet = intersect(sa, sb);
    CHECK(meet.dim() == 1);
    Vec e1(4);
    e1[1] = Scalar(1);
    CHECK(subspace_contains(meet, e1));
    CHECK(subspace_leq(meet, sa));
    CHECK(subspace_leq(meet, sb));
}

TEST_CASE("RowSpaceBuilder matches batch rref") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        Mat m = random_matrix(rng, 6, 5, 3);
        RowSpaceBuilder rsb(5);
        for (int i = 0; i < m.rows(); ++i) rsb.insert(m.row(i));
        Subspace inc = rsb.subspace();
        Subspace batch = span_rows(m);
        CHECK(inc.dim() == batch.dim());
        CHECK(subspace_leq(inc, batch));
        CHECK(subspace_leq(batch, inc));
        CHECK(inc.rows == batch.rows); // canonical RREF basis agrees exactly
    }
}
