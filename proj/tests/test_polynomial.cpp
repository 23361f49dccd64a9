#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qes/eigensolver.hpp"
#include "qes/polynomial.hpp"
#include "test_support.hpp"

using namespace qes;
using Catch::Approx;

TEST_CASE("RealPolynomial trimming") {
    const RealPolynomial p({1.0, 2.0, 1e-20});
    CHECK(p.degree() == 2);
    CHECK(p.trimmed().degree() == 1);
    CHECK(RealPolynomial({1.0, 2.0, 0.0, 0.0}).degree() == 1);
    CHECK(RealPolynomial({0.0}).degree() == 0);
    // A monic characteristic polynomial with large roots keeps its degree.
    const auto big = characteristic_polynomial(build_gauged_matrix(QesProblem(15, -3.0)));
    CHECK(big.degree() == 15);
    CHECK(big.leading() == 1.0);
    CHECK_THROWS_AS(RealPolynomial({1.0, NAN}), InvalidArgument);
}

TEST_CASE("characteristic polynomial of N=1") {
    const auto p = characteristic_polynomial(build_gauged_matrix(QesProblem(1, 0.5)));
    REQUIRE(p.degree() == 1);
    CHECK(p[0] == Approx(0.75));
    CHECK(p[1] == 1.0);
}

TEST_CASE("characteristic polynomial of N=3 at xi=0 is (E+5)^2 (E+9)") {
    const auto p = characteristic_polynomial(build_gauged_matrix(QesProblem(3, 0.0)));
    // E^3 + 19 E^2 + 115 E + 225
    REQUIRE(p.degree() == 3);
    CHECK(p[0] == 225.0);
    CHECK(p[1] == 115.0);
    CHECK(p[2] == 19.0);
    CHECK(p[3] == 1.0);
}

TEST_CASE("characteristic polynomial rejects dense input") {
    const RealMatrix dense{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    CHECK_THROWS_AS(characteristic_polynomial(dense), InvalidArgument);
}

TEST_CASE("N=5 even-sector polynomial matches the shifted cubic") {
    const double xi = 0.2;
    const auto split = split_sectors(build_gauged_matrix(QesProblem(5, xi)));
    REQUIRE(split.even_block.rows() == 3);
    const auto p = characteristic_polynomial(split.even_block);
    // E = xi^2 - 25 - calE  =>  q(calE) = p(xi^2 - 25 - calE) = -(calE^3 + 20 calE^2 + ...)
    const auto q = substitute_affine(p, xi * xi - 25.0, -1.0);
    REQUIRE(q.degree() == 3);
    CHECK(-q[3] == Approx(1.0).margin(1e-12));
    CHECK(-q[2] == Approx(20.0).margin(1e-11));
    CHECK(-q[1] == Approx(64.0 * 1.04).margin(1e-10));
    CHECK(-q[0] == Approx(768.0 * 0.04).margin(1e-10));
}

TEST_CASE("N=7 sector polynomials match the shifted cubic and quartic") {
    const double xi = 0.37;
    const double s = xi * xi;
    const auto split = split_sectors(build_gauged_matrix(QesProblem(7, xi)));
    REQUIRE(split.even_block.rows() == 3);
    REQUIRE(split.odd_block.rows() == 4);
    const auto cubic = substitute_affine(characteristic_polynomial(split.even_block), s - 49.0, -1.0);
    const std::vector<double> cubic_expected{768.0 * (3.0 + 2.0 * s), 16.0 * (49.0 + 4.0 * s), 56.0, 1.0};
    for (std::size_t k = 0; k < 4; ++k) CHECK(-cubic[k] == Approx(cubic_expected[k]).epsilon(1e-12));
    const auto quartic = substitute_affine(characteristic_polynomial(split.odd_block), s - 49.0, -1.0);
    const std::vector<double> quartic_expected{2304.0 * s * (24.0 + s), 384.0 * (6.0 + 17.0 * s),
                                               16.0 * (49.0 + 10.0 * s), 56.0, 1.0};
    for (std::size_t k = 0; k < 5; ++k) CHECK(quartic[k] == Approx(quartic_expected[k]).epsilon(1e-12));
}

TEST_CASE("roots of a linear polynomial") {
    const auto r = roots(RealPolynomial({0.75, 1.0}));
    REQUIRE(r.size() == 1);
    CHECK(r[0] == cplx(-0.75, 0.0));
    CHECK_THROWS_AS(roots(RealPolynomial({3.0})), InvalidArgument);
}

TEST_CASE("roots of the xi=0 cubic factor as 0, -4, -16") {
    const auto r = roots(RealPolynomial({0.0, 64.0, 20.0, 1.0}));
    REQUIRE(r.size() == 3);
    CHECK(r[0].real() == Approx(-16.0).epsilon(1e-13));
    CHECK(r[1].real() == Approx(-4.0).epsilon(1e-13));
    CHECK(std::abs(r[2]) < 1e-13);
    for (const auto& z : r) CHECK(z.imag() == 0.0);
}

TEST_CASE("roots near the N=5 coalescence are a near-degenerate pair") {
    const double s = 0.0876;
    const RealPolynomial cubic({768.0 * s, 64.0 * (1.0 + s), 20.0, 1.0});
    const auto r = roots(cubic);
    std::size_t a = 0, b = 0;
    const double gap = min_pair_gap(r, &a, &b);
    CHECK(gap < 0.1);
    // The lone root is far away from the merging pair.
    const double others = std::abs(r[3 - a - b] - r[a]);
    CHECK(others > 5.0);
    for (const auto& z : r) CHECK(std::abs(cubic(z)) <= 1e-10 * cubic.scale_at(z));
}

TEST_CASE("roots are closed under conjugation") {
    const RealPolynomial p({5.0, -2.0, 3.0, 1.0, 0.5, 2.0});
    const auto r = roots(p);
    REQUIRE(r.size() == 5);
    for (const auto& z : r) {
        if (z.imag() == 0.0) continue;
        bool found = false;
        for (const auto& w : r) found = found || (w == std::conj(z));
        CHECK(found);
    }
}

TEST_CASE("discriminant of known polynomials") {
    CHECK(discriminant(RealPolynomial({0.0, 0.0, 1.0})) == 0.0);
    // (E-1)(E-2)(E-3) = E^3 - 6E^2 + 11E - 6 -> 18abcd - 4b^3d + b^2c^2 - 4ac^3 - 27a^2d^2
    const double a = 1, b = -6, c = 11, d = -6;
    const double direct = 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
    REQUIRE(direct == 4.0);
    CHECK(discriminant(RealPolynomial({-6.0, 11.0, -6.0, 1.0})) == Approx(direct).epsilon(1e-12));
    // quadratic: b^2 - 4ac
    CHECK(discriminant(RealPolynomial({2.0, 3.0, 1.0})) == Approx(1.0).epsilon(1e-13));
    CHECK(discriminant(RealPolynomial({1.0, 0.0, 1.0})) == Approx(-4.0).epsilon(1e-13));
    // cubic with one real root and a pair is negative
    CHECK(discriminant(RealPolynomial({-1.0, 0.0, 0.0, 1.0})) < 0.0);
    CHECK_THROWS_AS(discriminant(RealPolynomial({1.0, 1.0})), InvalidArgument);
}

TEST_CASE("discriminant agrees with the direct cubic formula on random cubics") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 100; ++t) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const double direct = 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
        const double ours = discriminant(RealPolynomial({d, c, b, a}));
        CHECK(ours == Approx(direct).epsilon(1e-10).margin(1e-10));
        CHECK(discriminant_sign(RealPolynomial({d, c, b, a})) == (direct > 0) - (direct < 0));
    }
}

TEST_CASE("delta_n5 closed form") {
    CHECK(delta_n5(0.0) == -9.0);
    CHECK(delta_n5(1.0) == 106.0);
    CHECK(std::abs(delta_n5(std::sqrt(0.0876))) < 5e-3);
}

TEST_CASE("delta_n5 sign matches discriminant sign and root reality of the N=5 cubic") {
    // Brute-force grid: sign(discriminant) = sign(-Delta), and Delta > 0 iff a complex pair exists.
    for (int i = 0; i <= 100; ++i) {
        const double xi = 0.01 * i;
        const double s = xi * xi;
        const RealPolynomial cubic({768.0 * s, 64.0 * (1.0 + s), 20.0, 1.0});
        const double delta = delta_n5(xi);
        if (std::abs(delta) < 1e-9) continue;
        const double disc = discriminant(cubic);
        INFO("xi = " << xi);
        CHECK((disc > 0) == (delta < 0));
        const auto r = roots(cubic);
        const bool has_pair = std::any_of(r.begin(), r.end(), [](cplx z) { return z.imag() != 0.0; });
        CHECK(has_pair == (delta > 0));
    }
}

TEST_CASE("discriminant sign change coincides with a root-gap minimum on the N=5 cubic family") {
    auto cubic_at = [](double xi) {
        const double s = xi * xi;
        return RealPolynomial({768.0 * s, 64.0 * (1.0 + s), 20.0, 1.0});
    };
    // Bisection on the discriminant sign.
    double lo = 0.2, hi = 0.4;
    const int sign_lo = discriminant_sign(cubic_at(lo));
    REQUIRE(sign_lo != discriminant_sign(cubic_at(hi)));
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (discriminant_sign(cubic_at(mid)) == sign_lo ? lo : hi) = mid;
    }
    const double xi_disc = 0.5 * (lo + hi);
    // Golden-section minimisation of the smallest root gap.
    auto gap = [&](double xi) { return min_pair_gap(roots(cubic_at(xi))); };
    const double xi_gap = test_support::golden_min(gap, 0.28, 0.31, 1e-14);
    CHECK(gap(xi_gap) < 1e-4);
    CHECK(std::abs(xi_gap - xi_disc) < 1e-6);
    // and it is the square root of the closed-form Delta root
    CHECK(std::abs(delta_n5(xi_disc)) < 1e-9);
}

TEST_CASE("closed-form solvers reproduce polynomial roots") {
    const auto q = solve_quadratic(1.0, -3.0, 2.0);
    CHECK(test_support::multiset_distance(q, {1.0, 2.0}) < 1e-14);
    const auto c = solve_cubic(-6.0, 11.0, -6.0);
    CHECK(test_support::multiset_distance(c, {1.0, 2.0, 3.0}) < 1e-12);
    const auto f = solve_quartic(-10.0, 35.0, -50.0, 24.0);
    CHECK(test_support::multiset_distance(f, {1.0, 2.0, 3.0, 4.0}) < 1e-10);
    const auto g = solve_quartic(0.0, 0.0, 0.0, 1.0);  // x^4 + 1
    for (const auto& z : g) CHECK(std::abs(z * z * z * z + 1.0) < 1e-12);
}

TEST_CASE("Aberth roots agree with closed-form cubic and quartic solvers") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int t = 0; t < 50; ++t) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const auto aberth3 = roots(RealPolynomial({c, b, a, 1.0}));
        CHECK(test_support::multiset_distance(aberth3, solve_cubic(a, b, c)) < 1e-9);
        const auto aberth4 = roots(RealPolynomial({d, c, b, a, 1.0}));
        CHECK(test_support::multiset_distance(aberth4, solve_quartic(a, b, c, d)) < 1e-8);
    }
}
