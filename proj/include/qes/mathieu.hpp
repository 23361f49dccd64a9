#pragma once

// -psi'' - 2 i g sin(2x) psi = Ebar psi on pi-periodic functions, truncated to the
// Fourier modes exp(2 i n x), |n| <= n_max.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qes/eigensolver.hpp"
#include "qes/error.hpp"
#include "qes/matrix.hpp"
#include "qes/qes_core.hpp"

namespace qes {

class MathieuProblem {
public:
    static constexpr int min_modes = 4;

    MathieuProblem(double g, int n_max) : g_(g), n_max_(n_max) {
        if (!std::isfinite(g)) throw InvalidArgument("MathieuProblem: g must be finite");
        if (n_max < min_modes) throw InvalidArgument("MathieuProblem: n_max must be >= 4");
    }

    [[nodiscard]] double g() const noexcept { return g_; }
    [[nodiscard]] int n_max() const noexcept { return n_max_; }
    [[nodiscard]] int dim() const noexcept { return 2 * n_max_ + 1; }
    /// Eigenvalues at or above this modulus are polluted by the truncation.
    [[nodiscard]] double trusted_cutoff() const noexcept {
        const double k = 2.0 * (n_max_ - 2);
        return k * k;
    }

private:
    double g_;
    int n_max_;
};

struct HillMatrix {
    MathieuProblem problem;
    RealMatrix entries;
};

/// Rows and columns run over modes n = -n_max .. n_max. Diagonal (2n)^2, -g above the
/// diagonal and +g below it.
inline HillMatrix build_hill_matrix(const MathieuProblem& problem) {
    const int dim = problem.dim();
    RealMatrix h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - problem.n_max();
        h(i, i) = 4.0 * n * n;
        if (i + 1 < dim) {
            h(i, i + 1) = -problem.g();
            h(i + 1, i) = problem.g();
        }
    }
    return {problem, std::move(h)};
}

/// Trusted part of the Hill spectrum, sorted by (Re, Im).
inline Spectrum mathieu_eigenvalues(const MathieuProblem& problem, const SpectralOptions& opts = {}) {
    const auto all = eigenvalue_list(build_hill_matrix(problem).entries, opts);
    std::vector<cplx> trusted;
    for (const auto& e : all)
        if (std::abs(e) < problem.trusted_cutoff()) trusted.push_back(e);
    return make_spectrum(std::move(trusted), opts.tol_reality);
}

/// True once the lowest pair has left the real axis.
inline bool lowest_pair_complex(double g, int n_max, const SpectralOptions& opts = {}) {
    const Spectrum s = mathieu_eigenvalues(MathieuProblem(g, n_max), opts);
    if (s.size() < 2) throw Inconclusive("lowest_pair_complex: fewer than two trusted eigenvalues");
    return !s.is_real[0];
}

struct GcResult {
    double g_c = 0.0;
    /// Same bisection with the truncation doubled.
    double g_c_doubled = 0.0;
    int n_max = 0;
    bool certified = false;
};

namespace detail {

inline double bisect_gc(double lo, double hi, double tol, int n_max, const SpectralOptions& opts) {
    const bool at_lo = lowest_pair_complex(lo, n_max, opts);
    if (at_lo == lowest_pair_complex(hi, n_max, opts))
        throw NoBracket("locate_gc: lowest pair is " + std::string(at_lo ? "complex" : "real") + " at both ends of [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (lowest_pair_complex(mid, n_max, opts) == at_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Coupling where the two lowest pi-periodic levels merge. Repeats the search at
/// 2 * n_max and throws TruncationUnstable if the two disagree by more than 10 * tol.
inline GcResult locate_gc(double g_lo = 1.0, double g_hi = 2.0, double tol = 1e-6, int n_max = 32,
                          const SpectralOptions& opts = {}) {
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi) || !(g_hi > g_lo))
        throw InvalidArgument("locate_gc: need g_lo < g_hi");
    if (!(tol > 0.0)) throw InvalidArgument("locate_gc: tol must be positive");
    if (n_max < MathieuProblem::min_modes) throw InvalidArgument("locate_gc: n_max must be >= 4");
    GcResult r;
    r.n_max = n_max;
    r.g_c = detail::bisect_gc(g_lo, g_hi, tol, n_max, opts);
    r.g_c_doubled = detail::bisect_gc(g_lo, g_hi, tol, 2 * n_max, opts);
    if (std::abs(r.g_c - r.g_c_doubled) > 10.0 * tol)
        throw TruncationUnstable("locate_gc: g_c moved from " + std::to_string(r.g_c) + " to " +
                                 std::to_string(r.g_c_doubled) + " when n_max was doubled");
    r.certified = true;
    return r;
}

struct ComparisonRow {
    int level;
    cplx qes_shifted;
    cplx mathieu;
    double abs_dev;
};

struct ComparisonReport {
    int big_n = 0;
    double g = 0.0;
    double xi = 0.0;
    int n_max = 0;
    std::vector<ComparisonRow> rows;
};

/// The k lowest QES levels E + N^2 at xi = g / N next to the k lowest trusted Hill
/// eigenvalues. Odd N only, since only those eigenfunctions are pi-periodic.
inline ComparisonReport qes_vs_mathieu(int big_n, double g, int k, int n_max = 32, const SpectralOptions& opts = {}) {
    if (big_n < 1 || big_n % 2 == 0) throw InvalidArgument("qes_vs_mathieu: N must be a positive odd integer");
    if (k < 1 || k > big_n) throw InvalidArgument("qes_vs_mathieu: need 1 <= k <= N");
    ComparisonReport rep;
    rep.big_n = big_n;
    rep.g = g;
    rep.xi = g / big_n;
    rep.n_max = n_max;

    const Spectrum q = qes_spectrum(QesProblem(big_n, rep.xi), opts);
    const Spectrum m = mathieu_eigenvalues(MathieuProblem(g, n_max), opts);
    if (m.size() < static_cast<std::size_t>(k))
        throw InvalidArgument("qes_vs_mathieu: n_max too small for " + std::to_string(k) + " trusted levels");
    const double shift = static_cast<double>(big_n) * big_n;
    for (int i = 0; i < k; ++i) {
        const cplx a = q.eigenvalues[i] + shift;
        const cplx b = m.eigenvalues[i];
        rep.rows.push_back({i, a, b, std::abs(a - b)});
    }
    return rep;
}

}  // namespace qes
