#pragma once

// Finite sl(2) representation of the periodic PT-symmetric potential
//
//     V(x) = -(i xi sin 2x + N)^2,
//
// obtained after the gauge transform psi = mu(z) p(z), z = exp(2ix). The
// gauged operator 4 J0^2 + 2 xi J+ + 2 xi J- - N^2 + xi^2 with spin
// j = (N-1)/2 closes on polynomials of degree < N. On the monomial z^k:
//
//     J0 z^k = (k - j) z^k,   J+ z^k = (k - 2j) z^{k+1},   J- z^k = k z^{k-1},
//
// so the matrix (columns = images of z^k, ascending k) is tridiagonal with
//
//     H[k][k]   = 4(k - j)^2 - N^2 + xi^2
//     H[k+1][k] = 2 xi (k - 2j)
//     H[k-1][k] = 2 xi k.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qes/error.hpp"
#include "qes/matrix.hpp"

namespace qes {

/// One spectral problem: potential depth index N and real coupling xi.
class QesProblem {
public:
    QesProblem(int big_n, double xi) : big_n_(big_n), xi_(xi) {
        if (big_n < 1) throw InvalidArgument("QesProblem: N must be >= 1, got " + std::to_string(big_n));
        if (!std::isfinite(xi)) throw InvalidArgument("QesProblem: xi must be finite");
    }

    [[nodiscard]] int big_n() const noexcept { return big_n_; }
    [[nodiscard]] double xi() const noexcept { return xi_; }
    /// sl(2) spin label j = (N - 1) / 2.
    [[nodiscard]] double spin() const noexcept { return 0.5 * (big_n_ - 1); }
    [[nodiscard]] bool odd() const noexcept { return big_n_ % 2 == 1; }

    friend bool operator==(const QesProblem&, const QesProblem&) = default;

private:
    int big_n_;
    double xi_;
};

struct GaugedMatrix {
    QesProblem problem;
    RealMatrix entries;

    [[nodiscard]] std::size_t dim() const noexcept { return entries.rows(); }
};

/// Diagonal entry 4(k - j)^2 - N^2 + xi^2.
inline double gauged_diagonal(const QesProblem& p, int k) {
    const double shift = k - p.spin();
    const double n = p.big_n();
    return 4.0 * shift * shift - n * n + p.xi() * p.xi();
}

inline GaugedMatrix build_gauged_matrix(const QesProblem& problem) {
    const int n = problem.big_n();
    const double xi = problem.xi();
    const int two_j = n - 1;
    RealMatrix h(n, n);
    for (int k = 0; k < n; ++k) {
        h(k, k) = gauged_diagonal(problem, k);
        if (k + 1 < n) h(k + 1, k) = 2.0 * xi * (k - two_j);
        if (k >= 1) h(k - 1, k) = 2.0 * xi * k;
    }
    return {problem, std::move(h)};
}

/// Closed-form trace: sum_k [4(k - j)^2 - N^2 + xi^2].
inline double gauged_trace(const QesProblem& problem) {
    double t = 0.0;
    for (int k = 0; k < problem.big_n(); ++k) t += gauged_diagonal(problem, k);
    return t;
}

/// The signed reversal S: e_k -> (-1)^k e_{2j-k}. Commutes with the gauged matrix;
/// S^2 = +1 for odd N and -1 for even N.
inline RealMatrix signed_reversal(int big_n) {
    if (big_n < 1) throw InvalidArgument("signed_reversal: N must be >= 1");
    RealMatrix s(big_n, big_n);
    for (int k = 0; k < big_n; ++k) s(big_n - 1 - k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return s;
}

enum class Sector { even, odd };

inline const char* to_string(Sector s) { return s == Sector::even ? "even" : "odd"; }

/// Block decomposition of the gauged matrix for odd N. The even block lives on the
/// S = +1 eigenspace, the odd block on S = -1. Each basis is stored as the columns
/// of an N x dim embedding with orthonormal columns.
struct SectorSplit {
    RealMatrix even_block;
    RealMatrix odd_block;
    RealMatrix even_basis;
    RealMatrix odd_basis;

    [[nodiscard]] const RealMatrix& block(Sector s) const { return s == Sector::even ? even_block : odd_block; }
    [[nodiscard]] const RealMatrix& basis(Sector s) const { return s == Sector::even ? even_basis : odd_basis; }
};

inline SectorSplit split_sectors(const GaugedMatrix& matrix) {
    const int n = matrix.problem.big_n();
    if (n % 2 == 0)
        throw EvenNNoSplit("split_sectors: N = " + std::to_string(n) + " is even; the reversal involution squares to -1");

    const int j = (n - 1) / 2;
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<std::vector<std::pair<int, double>>> plus, minus;
    for (int k = 0; k < j; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        plus.push_back({{k, r}, {2 * j - k, sign * r}});
        minus.push_back({{k, r}, {2 * j - k, -sign * r}});
    }
    // Middle vector e_j is an S-eigenvector with eigenvalue (-1)^j.
    (j % 2 == 0 ? plus : minus).push_back({{j, 1.0}});

    auto embed = [n](const auto& vectors) {
        RealMatrix b(n, vectors.size());
        for (std::size_t c = 0; c < vectors.size(); ++c)
            for (auto [idx, coef] : vectors[c]) b(idx, c) = coef;
        return b;
    };

    SectorSplit split;
    split.even_basis = embed(plus);
    split.odd_basis = embed(minus);
    split.even_block = transpose(split.even_basis) * matrix.entries * split.even_basis;
    split.odd_block = transpose(split.odd_basis) * matrix.entries * split.odd_basis;
    return split;
}

}  // namespace qes
