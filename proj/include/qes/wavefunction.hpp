#pragma once

// Eigenfunctions psi(x) = exp(i(1-N)x) exp((i/2) xi sin 2x) sum_k c_k exp(2ikx) of
// -psi'' - (i xi sin 2x + N)^2 psi = E psi, built from gauged eigenvectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qes/eigensolver.hpp"
#include "qes/error.hpp"
#include "qes/matrix.hpp"
#include "qes/qes_core.hpp"

namespace qes {

struct EigenvectorOptions {
    /// Relative distance to the nearest computed eigenvalue still accepted.
    double snap_tolerance = 1e-6;
    /// Another eigenvalue this close (relative) marks a near-defective pair.
    double defective_radius = 1e-4;
    double residual_target = 1e-8;
    double defective_residual_target = 1e-4;
    int min_iterations = 3;
    int max_iterations = 10;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct EigenvectorResult {
    /// Monomial coefficients, scaled so the largest-modulus entry equals 1.
    std::vector<cplx> coeffs;
    /// The computed eigenvalue the request was snapped to.
    cplx energy{};
    /// ||(H - E) c||_inf with ||c||_inf = 1.
    double residual = 0.0;
    /// The eigenvector is ill-conditioned: a second eigenvalue of the same block sits
    /// within the defective radius, as happens next to an exceptional point.
    bool defective_pair = false;
    std::optional<Sector> sector;
};

namespace detail {

inline void sup_normalize(std::vector<cplx>& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    const cplx pivot = v[arg];
    if (pivot == cplx(0.0)) throw NonConvergence("eigenvector: iterate collapsed to zero");
    for (auto& x : v) x /= pivot;
    v[arg] = 1.0;
}

// LU with partial pivoting, in place. Exactly-zero pivots are nudged so the shifted
// (singular by design) system stays solvable.
struct ComplexLU {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;

    explicit ComplexLU(ComplexMatrix a) : lu(std::move(a)), perm(lu.rows()) {
        const std::size_t n = lu.rows();
        const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, max_abs(lu));
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::abs(lu(r, c)) > std::abs(lu(p, c))) p = r;
            if (p != c) {
                for (std::size_t k = 0; k < n; ++k) std::swap(lu(p, k), lu(c, k));
                std::swap(perm[p], perm[c]);
            }
            if (std::abs(lu(c, c)) < tiny) lu(c, c) = tiny;
            for (std::size_t r = c + 1; r < n; ++r) {
                const cplx f = lu(r, c) / lu(c, c);
                lu(r, c) = f;
                for (std::size_t k = c + 1; k < n; ++k) lu(r, k) -= f * lu(c, k);
            }
        }
    }

    [[nodiscard]] std::vector<cplx> solve(const std::vector<cplx>& b) const {
        const std::size_t n = lu.rows();
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = b[perm[i]];
            for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * x[k];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            cplx s = x[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= lu(i, k) * x[k];
            x[i] = s / lu(i, i);
        }
        return x;
    }
};

inline double shifted_residual(const RealMatrix& a, cplx shift, const std::vector<cplx>& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s = -shift * v[i];
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * v[k];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

}  // namespace detail

/// Eigenvector of the gauged matrix for the computed eigenvalue nearest to `energy`,
/// by inverse iteration. For odd N the iteration runs inside one symmetry block, so
/// accidental near-degeneracies between the two sectors do not mix eigenvectors;
/// `sector` pins the block when the energy is degenerate across sectors.
inline EigenvectorResult eigenvector_for(const GaugedMatrix& m, cplx energy, std::optional<Sector> sector = std::nullopt,
                                         const EigenvectorOptions& opts = {}) {
    if (!std::isfinite(energy.real()) || !std::isfinite(energy.imag()))
        throw InvalidArgument("eigenvector_for: energy must be finite");

    struct Block {
        std::optional<Sector> sector;
        RealMatrix a;
        RealMatrix basis;
    };
    std::vector<Block> blocks;
    if (m.problem.odd()) {
        const SectorSplit split = split_sectors(m);
        for (Sector s : {Sector::even, Sector::odd})
            if ((!sector || *sector == s) && split.block(s).rows() > 0)
                blocks.push_back({s, split.block(s), split.basis(s)});
    } else {
        if (sector) throw EvenNNoSplit("eigenvector_for: sectors only exist for odd N");
        blocks.push_back({std::nullopt, m.entries, RealMatrix::identity(m.dim())});
    }

    std::size_t best_block = 0;
    cplx best{};
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<std::vector<cplx>> spectra;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        spectra.push_back(eigenvalue_list(blocks[b].a));
        for (const auto& e : spectra.back()) {
            const double d = std::abs(e - energy);
            if (d < best_d) {
                best_d = d;
                best = e;
                best_block = b;
            }
        }
    }
    if (!(best_d <= opts.snap_tolerance * (1.0 + std::abs(energy))))
        throw NotAnEigenvalue("eigenvector_for: no eigenvalue within " + std::to_string(opts.snap_tolerance) +
                              " (relative) of the requested energy");

    EigenvectorResult out;
    out.energy = best;
    out.sector = blocks[best_block].sector;
    int close = 0;
    for (const auto& e : spectra[best_block])
        if (std::abs(e - best) <= opts.defective_radius * (1.0 + std::abs(best))) ++close;
    out.defective_pair = close > 1;

    const RealMatrix& a = blocks[best_block].a;
    const std::size_t n = a.rows();
    ComplexMatrix shifted = to_complex(a);
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= best;
    const detail::ComplexLU lu(std::move(shifted));

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx(u(rng), u(rng));
    detail::sup_normalize(v);

    const double target = out.defective_pair ? opts.defective_residual_target : opts.residual_target;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        v = lu.solve(v);
        detail::sup_normalize(v);
        residual = detail::shifted_residual(a, best, v);
        if (it >= opts.min_iterations && residual <= target) break;
    }

    const RealMatrix& basis = blocks[best_block].basis;
    out.coeffs.assign(basis.rows(), cplx(0.0));
    for (std::size_t r = 0; r < basis.rows(); ++r)
        for (std::size_t c = 0; c < n; ++c) out.coeffs[r] += basis(r, c) * v[c];
    detail::sup_normalize(out.coeffs);
    out.residual = detail::shifted_residual(m.entries, best, out.coeffs);
    if (!(out.residual <= target))
        throw NonConvergence("eigenvector_for: inverse iteration stalled at residual " + std::to_string(out.residual),
                             out.coeffs, out.residual);
    return out;
}

struct Eigenfunction {
    QesProblem problem;
    cplx energy;
    std::vector<cplx> coeffs;
    bool defective_pair = false;
};

inline Eigenfunction make_eigenfunction(const QesProblem& problem, cplx energy,
                                        std::optional<Sector> sector = std::nullopt,
                                        const EigenvectorOptions& opts = {}) {
    const auto r = eigenvector_for(build_gauged_matrix(problem), energy, sector, opts);
    return {problem, r.energy, r.coeffs, r.defective_pair};
}

/// One eigenfunction per eigenvalue, in spectrum order.
inline std::vector<Eigenfunction> all_eigenfunctions(const QesProblem& problem, const EigenvectorOptions& opts = {}) {
    const Spectrum s = qes_spectrum(problem);
    const GaugedMatrix h = build_gauged_matrix(problem);
    std::vector<Eigenfunction> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto r = eigenvector_for(h, s.eigenvalues[i], s.sector[i], opts);
        out.push_back({problem, r.energy, r.coeffs, r.defective_pair});
    }
    return out;
}

/// The function conj(psi(-x)): same form with conjugated coefficients and energy.
inline Eigenfunction pt_image(const Eigenfunction& f) {
    Eigenfunction g = f;
    g.energy = std::conj(f.energy);
    for (auto& c : g.coeffs) c = std::conj(c);
    return g;
}

inline cplx evaluate_psi(const Eigenfunction& f, double x) {
    const int n = f.problem.big_n();
    const cplx z = std::polar(1.0, 2.0 * x);
    cplx poly = 0.0;
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) poly = poly * z + *it;
    const double phase = (1.0 - n) * x + 0.5 * f.problem.xi() * std::sin(2.0 * x);
    return std::polar(1.0, phase) * poly;
}

/// psi''(x) by the product rule on exp(phi) P with phi' = i(1-N) + i xi cos 2x.
inline cplx evaluate_psi_second(const Eigenfunction& f, double x) {
    const int n = f.problem.big_n();
    const double xi = f.problem.xi();
    const cplx i1(0.0, 1.0);
    cplx p = 0.0, dp = 0.0, ddp = 0.0;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
        const cplx term = f.coeffs[k] * std::polar(1.0, 2.0 * k * x);
        const double w = 2.0 * static_cast<double>(k);
        p += term;
        dp += i1 * w * term;
        ddp -= w * w * term;
    }
    const cplx d1 = i1 * ((1.0 - n) + xi * std::cos(2.0 * x));
    const cplx d2 = -2.0 * i1 * xi * std::sin(2.0 * x);
    const cplx e = std::polar(1.0, (1.0 - n) * x + 0.5 * xi * std::sin(2.0 * x));
    return e * ((d2 + d1 * d1) * p + 2.0 * d1 * dp + ddp);
}

/// `count` points spaced evenly over [lo, hi), right end excluded.
inline std::vector<double> uniform_grid(std::size_t count, double lo = 0.0, double hi = std::numbers::pi) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
    return g;
}

/// max_x |-psi'' - (i xi sin 2x + N)^2 psi - E psi| / max_x |psi| over the grid.
inline double schrodinger_residual(const Eigenfunction& f, const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidArgument("schrodinger_residual: empty grid");
    const double xi = f.problem.xi();
    const double n = f.problem.big_n();
    double worst = 0.0, peak = 0.0;
    for (double x : grid) {
        const cplx psi = evaluate_psi(f, x);
        const cplx w = cplx(n, xi * std::sin(2.0 * x));
        const cplx r = -evaluate_psi_second(f, x) - w * w * psi - f.energy * psi;
        worst = std::max(worst, std::abs(r));
        peak = std::max(peak, std::abs(psi));
    }
    if (peak == 0.0) throw InvalidArgument("schrodinger_residual: psi vanishes on the grid");
    return worst / peak;
}

enum class Periodicity { pi_periodic, pi_anti_periodic };

inline const char* to_string(Periodicity p) { return p == Periodicity::pi_periodic ? "pi-periodic" : "pi-anti-periodic"; }

/// Classifies psi(x + pi) / psi(x) as +1 or -1 on a 257-point grid, skipping samples
/// near zeros of psi.
inline Periodicity periodicity_class(const Eigenfunction& f, double tol = 1e-8) {
    const auto grid = uniform_grid(257);
    std::vector<cplx> vals;
    double peak = 0.0;
    for (double x : grid) {
        vals.push_back(evaluate_psi(f, x));
        peak = std::max(peak, std::abs(vals.back()));
    }
    bool plus = true, minus = true;
    int used = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(vals[i]) < 1e-6 * peak) continue;
        const cplx ratio = evaluate_psi(f, grid[i] + std::numbers::pi) / vals[i];
        plus = plus && std::abs(ratio - 1.0) <= tol;
        minus = minus && std::abs(ratio + 1.0) <= tol;
        ++used;
    }
    if (used > 0 && plus) return Periodicity::pi_periodic;
    if (used > 0 && minus) return Periodicity::pi_anti_periodic;
    throw Inconclusive("periodicity_class: psi(x + pi) / psi(x) is neither +1 nor -1");
}

struct PtCheck {
    bool symmetric = false;
    /// Phase with conj(psi(-x)) = alpha psi(x), fitted where |psi| peaks.
    cplx alpha{};
    /// Largest relative mismatch, including | |alpha| - 1 |.
    double deviation = 0.0;
};

inline PtCheck pt_symmetry_check(const Eigenfunction& f, double tol = 1e-6) {
    const auto grid = uniform_grid(257);
    std::vector<cplx> psi, mirrored;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        psi.push_back(evaluate_psi(f, grid[i]));
        mirrored.push_back(std::conj(evaluate_psi(f, -grid[i])));
        if (std::abs(psi[i]) > std::abs(psi[arg])) arg = i;
    }
    const double peak = std::abs(psi[arg]);
    PtCheck out;
    out.alpha = mirrored[arg] / psi[arg];
    out.deviation = std::abs(std::abs(out.alpha) - 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.deviation = std::max(out.deviation, std::abs(mirrored[i] - out.alpha * psi[i]) / peak);
    out.symmetric = out.deviation <= tol;
    return out;
}

struct QuadraticSineForm {
    cplx b, c;
};

/// For N = 5, rewrites the polynomial part as a multiple of sin^2 2x + b sin 2x + c.
/// In z that polynomial is z^2 times a combination of 1, z - 1/z and (z - 1/z)^2, so
/// c_0 = c_4 and c_1 = -c_3; eigenfunctions breaking that pattern are rejected.
inline QuadraticSineForm n5_sine_form(const Eigenfunction& f, double tol = 1e-8) {
    if (f.problem.big_n() != 5) throw InvalidArgument("n5_sine_form: N must be 5");
    const auto& c = f.coeffs;
    if (std::abs(c[4]) < tol || std::abs(c[0] - c[4]) > tol || std::abs(c[1] + c[3]) > tol)
        throw InvalidArgument("n5_sine_form: eigenfunction is not of the form sin^2 2x + b sin 2x + c");
    const cplx lambda = -1.0 / (4.0 * c[4]);
    return {2.0 * cplx(0.0, 1.0) * lambda * c[3], lambda * c[2] - 0.5};
}

}  // namespace qes
