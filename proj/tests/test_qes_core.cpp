#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qes/eigensolver.hpp"
#include "qes/qes_core.hpp"

using namespace qes;
using Catch::Approx;

TEST_CASE("QesProblem validates its inputs") {
    CHECK_THROWS_AS(QesProblem(0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(QesProblem(-3, 0.1), InvalidArgument);
    CHECK_THROWS_AS(QesProblem(3, std::nan("")), InvalidArgument);
    CHECK_THROWS_AS(QesProblem(3, INFINITY), InvalidArgument);
    const QesProblem p(4, 0.25);
    CHECK(p.spin() == 1.5);
    CHECK_FALSE(p.odd());
}

TEST_CASE("gauged matrix for N=1 is the single closed-form level") {
    const auto h = build_gauged_matrix(QesProblem(1, 0.3));
    REQUIRE(h.dim() == 1);
    CHECK(h.entries(0, 0) == Approx(-0.91).epsilon(1e-15));
}

TEST_CASE("gauged matrix at xi=0 is diagonal") {
    const auto h = build_gauged_matrix(QesProblem(3, 0.0));
    const RealMatrix expected{{-5, 0, 0}, {0, -9, 0}, {0, 0, -5}};
    CHECK(h.entries == expected);
}

TEST_CASE("gauged matrix for N=2, xi=1") {
    const auto h = build_gauged_matrix(QesProblem(2, 1.0));
    const RealMatrix expected{{-2, 2}, {-2, -2}};
    CHECK(h.entries == expected);
    // -3 + 2 i sigma xi + xi^2 at xi = 1
    const auto s = eigenvalues(h);
    REQUIRE(s.size() == 2);
    CHECK(s.eigenvalues[0].real() == Approx(-2.0));
    CHECK(s.eigenvalues[0].imag() == Approx(-2.0));
    CHECK(s.eigenvalues[1].imag() == Approx(2.0));
}

TEST_CASE("entry formulas, tridiagonality and trace hold on random samples") {
    std::mt19937_64 rng(20260416);
    std::uniform_int_distribution<int> pick_n(1, 50);
    std::uniform_real_distribution<double> pick_xi(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = pick_n(rng);
        const double xi = pick_xi(rng);
        const QesProblem p(n, xi);
        const auto h = build_gauged_matrix(p);
        const double j = 0.5 * (n - 1);
        REQUIRE(is_tridiagonal(h.entries));
        for (int k = 0; k < n; ++k) {
            REQUIRE(h.entries(k, k) == 4.0 * (k - j) * (k - j) - n * n + xi * xi);
            if (k + 1 < n) REQUIRE(h.entries(k + 1, k) == 2.0 * xi * (k - 2.0 * j));
            if (k >= 1) REQUIRE(h.entries(k - 1, k) == 2.0 * xi * k);
        }
        REQUIRE(trace_real(h.entries) == Approx(gauged_trace(p)).epsilon(1e-14));
    }
}

TEST_CASE("signed reversal commutes exactly with the gauged matrix") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pick_xi(-5.0, 5.0);
    for (int n = 1; n <= 20; ++n) {
        const auto h = build_gauged_matrix(QesProblem(n, pick_xi(rng)));
        const auto s = signed_reversal(n);
        CHECK(max_abs(s * h.entries - h.entries * s) == 0.0);
        RealMatrix expected = RealMatrix::identity(n);
        if (n % 2 == 0)
            for (int i = 0; i < n; ++i) expected(i, i) = -1.0;
        CHECK(s * s == expected);
    }
}

TEST_CASE("split_sectors rejects even N") {
    CHECK_THROWS_AS(split_sectors(build_gauged_matrix(QesProblem(4, 0.3))), EvenNNoSplit);
    CHECK_THROWS_AS(split_sectors(build_gauged_matrix(QesProblem(2, 0.3))), InvalidArgument);
}

TEST_CASE("split_sectors for N=1 leaves the odd block empty") {
    const auto split = split_sectors(build_gauged_matrix(QesProblem(1, 0.7)));
    CHECK(split.even_block.rows() == 1);
    CHECK(split.odd_block.rows() == 0);
    CHECK(split.even_block(0, 0) == Approx(-1.0 + 0.49));
}

TEST_CASE("split_sectors for N=3 isolates E0 = -5 + xi^2") {
    const auto split = split_sectors(build_gauged_matrix(QesProblem(3, 0.2)));
    REQUIRE(split.even_block.rows() == 1);
    REQUIRE(split.odd_block.rows() == 2);
    CHECK(split.even_block(0, 0) == Approx(-4.96).epsilon(1e-14));
}

TEST_CASE("split_sectors for N=5 gives the quadratic pair in the two-dimensional block") {
    const double xi = 0.1;
    const auto split = split_sectors(build_gauged_matrix(QesProblem(5, xi)));
    REQUIRE(split.even_block.rows() == 3);
    REQUIRE(split.odd_block.rows() == 2);
    const auto s = eigenvalues(split.odd_block);
    const double root = std::sqrt(9.0 - 4.0 * xi * xi);
    CHECK(s.eigenvalues[0].real() == Approx(-15.0 + xi * xi - 2.0 * root).epsilon(1e-13));
    CHECK(s.eigenvalues[1].real() == Approx(-15.0 + xi * xi + 2.0 * root).epsilon(1e-13));
    CHECK(s.is_real[0]);
    CHECK(s.is_real[1]);
}

TEST_CASE("sector blocks are tridiagonal with orthonormal bases and partition the spectrum") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pick_xi(-3.0, 3.0);
    for (int n = 1; n <= 21; n += 2) {
        const double xi = pick_xi(rng);
        const auto h = build_gauged_matrix(QesProblem(n, xi));
        const auto split = split_sectors(h);
        const std::size_t de = split.even_block.rows(), dodd = split.odd_block.rows();
        CHECK(de + dodd == static_cast<std::size_t>(n));
        CHECK(std::max(de, dodd) == static_cast<std::size_t>((n + 1) / 2));
        CHECK(is_tridiagonal(split.even_block));
        CHECK(is_tridiagonal(split.odd_block));
        for (Sector sec : {Sector::even, Sector::odd}) {
            const auto& b = split.basis(sec);
            const auto gram = transpose(b) * b;
            CHECK(max_abs(gram - RealMatrix::identity(gram.rows())) < 1e-15);
            const auto s = signed_reversal(n);
            const double sign = sec == Sector::even ? 1.0 : -1.0;
            RealMatrix sb = s * b;
            for (std::size_t i = 0; i < sb.rows(); ++i)
                for (std::size_t c = 0; c < sb.cols(); ++c) CHECK(sb(i, c) == sign * b(i, c));
        }
    }
}
