#pragma once

// Exceptional points of the QES family in the real coupling xi.
//
// Within one symmetry sector the characteristic polynomial has real coefficients, so
// the sign of its discriminant is (-1)^(number of conjugate pairs). A real pair
// turning complex flips that sign, which makes bisection on it a clean classifier.
// The eigenvalue gap only serves as the coalescence certificate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qes/eigensolver.hpp"
#include "qes/error.hpp"
#include "qes/parallel.hpp"
#include "qes/polynomial.hpp"
#include "qes/qes_core.hpp"

namespace qes {

enum class LocateMethod { discriminant_bisection, gap_minimization };

inline const char* to_string(LocateMethod m) {
    return m == LocateMethod::discriminant_bisection ? "discriminant-bisection" : "gap-minimization";
}

struct ExceptionalPoint {
    int big_n = 0;
    double xi_c = 0.0;
    cplx coalesced_energy{};
    /// Indices of the merging pair in the sorted full spectrum at xi_c.
    std::array<std::size_t, 2> pair{};
    double gap_at_xic = 0.0;
    LocateMethod method = LocateMethod::discriminant_bisection;
    Sector sector = Sector::even;
    bool first = false;
};

struct RealityProfile {
    std::vector<double> xi_grid;
    std::vector<int> n_real;
    std::vector<int> n_pairs;
};

struct CriticalOptions {
    /// Largest merging-pair gap accepted as proof of coalescence.
    double certificate_gap = 1e-5;
    /// Pre-scan points per locate_critical_xi bracket.
    int prescan_points = 100;
    /// Grid step of all_critical_points.
    double scan_step = 1e-3;
    /// A grid gap minimum is a candidate when below this times (1 + |E|).
    double gap_candidate_rel = 1e-3;
    /// Worker threads for grid scans; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// Characteristic polynomial of one symmetry block (odd N only).
inline RealPolynomial sector_polynomial(const QesProblem& problem, Sector s) {
    return characteristic_polynomial(split_sectors(build_gauged_matrix(problem)).block(s));
}

namespace detail {

inline void require_odd(int big_n, const char* who) {
    if (big_n < 1 || big_n % 2 == 0)
        throw InvalidArgument(std::string(who) + ": N must be a positive odd integer");
}

/// +1 / -1 as the number of conjugate pairs in the block is even / odd, 0 on an exact
/// double root. Blocks of dimension < 2 are always +1.
inline int sector_sign(int big_n, double xi, Sector s) {
    const RealPolynomial p = sector_polynomial(QesProblem(big_n, xi), s);
    if (p.degree() < 2) return 1;
    return discriminant_sign(p);
}

/// Smallest pairwise distance among the roots of the block polynomial, with the two
/// closest roots. Roots are computed from 113-bit coefficients, so the gap stays
/// meaningful down to ~1e-15 in xi from the exceptional point.
struct SectorGap {
    double gap = std::numeric_limits<double>::infinity();
    cplx a{}, b{};
};

inline SectorGap sector_gap(int big_n, double xi, Sector s) {
    const RealPolynomial p = sector_polynomial(QesProblem(big_n, xi), s);
    SectorGap out;
    if (p.degree() < 2) return out;
    const auto r = roots(p);
    std::size_t i = 0, j = 0;
    out.gap = min_pair_gap(r, &i, &j);
    out.a = r[i];
    out.b = r[j];
    return out;
}

template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

// Index pair in the full sorted spectrum closest to the two coalescing roots.
inline std::array<std::size_t, 2> match_pair(const Spectrum& full, cplx a, cplx b) {
    auto nearest = [&](cplx z, std::optional<std::size_t> skip) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < full.size(); ++i) {
            if (skip && *skip == i) continue;
            const double d = std::abs(full.eigenvalues[i] - z);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };
    const std::size_t i = nearest(a, std::nullopt);
    const std::size_t j = nearest(b, i);
    return {std::min(i, j), std::max(i, j)};
}

inline ExceptionalPoint finish_point(int big_n, double xi, Sector s, LocateMethod method, const SectorGap& g,
                                     const CriticalOptions& opts) {
    if (!(g.gap <= opts.certificate_gap))
        throw NonConvergence("exceptional point at xi = " + std::to_string(xi) +
                                 " failed the coalescence certificate (gap " + std::to_string(g.gap) + ")",
                             {g.a, g.b}, g.gap);
    ExceptionalPoint ep;
    ep.big_n = big_n;
    ep.xi_c = xi;
    ep.coalesced_energy = 0.5 * (g.a + g.b);
    ep.pair = match_pair(qes_spectrum(QesProblem(big_n, xi)), g.a, g.b);
    ep.gap_at_xic = g.gap;
    ep.method = method;
    ep.sector = s;
    return ep;
}

// Polishes xi by minimising the sector gap around [lo, hi]; keeps whichever of the
// bisection midpoint and the polished point has the smaller gap.
inline std::pair<double, SectorGap> polish(int big_n, Sector s, double lo, double hi) {
    const double width = std::max(hi - lo, 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + hi));
    const double a = std::max(0.0, lo - width), b = hi + width;
    auto gap_at = [&](double xi) {
        try {
            return sector_gap(big_n, xi, s).gap;
        } catch (const NonConvergence&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const double mid = 0.5 * (lo + hi);
    const double polished = golden_min(gap_at, a, b, 1e-15 * (1.0 + b));
    const SectorGap g_mid = sector_gap(big_n, mid, s);
    const SectorGap g_pol = sector_gap(big_n, polished, s);
    return g_pol.gap < g_mid.gap ? std::pair{polished, g_pol} : std::pair{mid, g_mid};
}

// Sign-change bisection inside a bracket already known to hold exactly one change.
inline ExceptionalPoint refine_sign_change(int big_n, Sector s, double lo, double hi, int sign_lo, double tol,
                                           const CriticalOptions& opts) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int sm = sector_sign(big_n, mid, s);
        if (sm == 0) {
            lo = hi = mid;
            break;
        }
        (sm == sign_lo ? lo : hi) = mid;
    }
    const auto [xi, g] = polish(big_n, s, lo, hi);
    return finish_point(big_n, xi, s, LocateMethod::discriminant_bisection, g, opts);
}

struct SignChange {
    double lo, hi;
    int sign_lo;
};

// Sign changes along a grid of signs, ignoring exact zeros.
inline std::vector<SignChange> sign_changes(const std::vector<double>& grid, const std::vector<int>& signs) {
    std::vector<SignChange> out;
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (signs[i] == 0) continue;
        if (prev && signs[*prev] != signs[i]) out.push_back({grid[*prev], grid[i], signs[*prev]});
        prev = i;
    }
    return out;
}

}  // namespace detail

/// Per-xi count of real eigenvalues and conjugate pairs over the full spectrum.
inline RealityProfile reality_profile(int big_n, const std::vector<double>& xi_grid,
                                      const SpectralOptions& sopts = {}) {
    if (xi_grid.empty()) throw InvalidArgument("reality_profile: empty grid");
    for (std::size_t i = 1; i < xi_grid.size(); ++i)
        if (!(xi_grid[i] > xi_grid[i - 1])) throw InvalidArgument("reality_profile: grid must be strictly increasing");
    struct Counts {
        int real = 0, pairs = 0;
    };
    const auto counts = parallel_map(xi_grid.size(), [&](std::size_t i) {
        const Spectrum s = qes_spectrum(QesProblem(big_n, xi_grid[i]), sopts);
        Counts c;
        c.real = static_cast<int>(s.real_count());
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s.pair_index[k] && *s.pair_index[k] > k) ++c.pairs;
        return c;
    });
    RealityProfile out;
    out.xi_grid = xi_grid;
    for (const auto& c : counts) {
        out.n_real.push_back(c.real);
        out.n_pairs.push_back(c.pairs);
    }
    return out;
}

/// Locates the single exceptional point inside [xi_lo, xi_hi] for odd N.
///
/// Throws NoBracket if neither sector changes its discriminant sign across the
/// pre-scan, AmbiguousBracket if more than one change is seen.
inline ExceptionalPoint locate_critical_xi(int big_n, double xi_lo, double xi_hi, double tol = 1e-10,
                                           const CriticalOptions& opts = {}) {
    detail::require_odd(big_n, "locate_critical_xi");
    if (!std::isfinite(xi_lo) || !std::isfinite(xi_hi) || !(xi_lo >= 0.0) || !(xi_hi > xi_lo))
        throw InvalidArgument("locate_critical_xi: need 0 <= xi_lo < xi_hi");
    if (!(tol > 0.0)) throw InvalidArgument("locate_critical_xi: tol must be positive");
    if (opts.prescan_points < 1) throw InvalidArgument("locate_critical_xi: prescan_points must be >= 1");

    const int n = opts.prescan_points;
    std::vector<double> grid(n + 1);
    for (int i = 0; i <= n; ++i) grid[i] = xi_lo + (xi_hi - xi_lo) * i / n;
    grid[n] = xi_hi;

    std::vector<std::pair<Sector, detail::SignChange>> found;
    for (Sector s : {Sector::even, Sector::odd}) {
        const auto signs = parallel_map(grid.size(), [&](std::size_t i) { return detail::sector_sign(big_n, grid[i], s); },
                                        opts.threads);
        for (const auto& c : detail::sign_changes(grid, signs)) found.emplace_back(s, c);
    }
    if (found.empty())
        throw NoBracket("locate_critical_xi: reality classification is the same across [" + std::to_string(xi_lo) +
                        ", " + std::to_string(xi_hi) + "]");
    if (found.size() > 1)
        throw AmbiguousBracket("locate_critical_xi: " + std::to_string(found.size()) +
                               " transitions inside the bracket; narrow it");
    const auto& [sector, change] = found.front();
    return detail::refine_sign_change(big_n, sector, change.lo, change.hi, change.sign_lo, tol, opts);
}

/// Every exceptional point with 0 <= xi_c <= xi_max, sorted by xi_c; the lowest is
/// flagged `first`.
inline std::vector<ExceptionalPoint> all_critical_points(int big_n, double xi_max, const CriticalOptions& opts = {},
                                                         double tol = 1e-10) {
    detail::require_odd(big_n, "all_critical_points");
    if (!(xi_max > 0.0) || !std::isfinite(xi_max)) throw InvalidArgument("all_critical_points: xi_max must be > 0");
    if (!(opts.scan_step > 0.0)) throw InvalidArgument("all_critical_points: scan step must be > 0");

    std::vector<double> grid;
    const auto steps = static_cast<std::size_t>(std::floor(xi_max / opts.scan_step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * opts.scan_step);
    if (grid.back() < xi_max) grid.push_back(xi_max);

    struct Sample {
        std::array<int, 2> sign{1, 1};
        std::array<double, 2> gap{};
        std::array<double, 2> scale{};
    };
    const auto samples = parallel_map(grid.size(), [&](std::size_t i) {
        Sample out;
        const SectorSplit split = split_sectors(build_gauged_matrix(QesProblem(big_n, grid[i])));
        for (int k = 0; k < 2; ++k) {
            const RealMatrix& block = split.block(k == 0 ? Sector::even : Sector::odd);
            const RealPolynomial p = characteristic_polynomial(block);
            out.sign[k] = p.degree() < 2 ? 1 : discriminant_sign(p);
            const auto ev = eigenvalue_list(block);
            out.gap[k] = ev.size() < 2 ? std::numeric_limits<double>::infinity() : min_pair_gap(ev);
            for (const auto& e : ev) out.scale[k] = std::max(out.scale[k], std::abs(e));
        }
        return out;
    }, opts.threads);

    struct Job {
        Sector sector;
        double lo, hi;
        int sign_lo;
        bool by_gap;
    };
    std::vector<Job> jobs;
    for (int k = 0; k < 2; ++k) {
        const Sector s = k == 0 ? Sector::even : Sector::odd;
        std::vector<int> signs;
        for (const auto& smp : samples) signs.push_back(smp.sign[k]);
        const auto changes = detail::sign_changes(grid, signs);
        for (const auto& c : changes) jobs.push_back({s, c.lo, c.hi, c.sign_lo, false});

        // Touching coalescences that leave the sign alone.
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double g = samples[i].gap[k];
            if (!(g < samples[i - 1].gap[k] && g <= samples[i + 1].gap[k])) continue;
            if (!(g < opts.gap_candidate_rel * (1.0 + samples[i].scale[k]))) continue;
            const double lo = grid[i - 1], hi = grid[i + 1];
            const bool near_change = std::any_of(changes.begin(), changes.end(), [&](const detail::SignChange& c) {
                return c.hi >= lo - 2.0 * opts.scan_step && c.lo <= hi + 2.0 * opts.scan_step;
            });
            if (!near_change) jobs.push_back({s, lo, hi, 0, true});
        }
    }

    std::vector<ExceptionalPoint> out;
    for (const auto& job : jobs) {
        if (!job.by_gap) {
            out.push_back(detail::refine_sign_change(big_n, job.sector, job.lo, job.hi, job.sign_lo, tol, opts));
            continue;
        }
        auto gap_at = [&](double xi) { return detail::sector_gap(big_n, xi, job.sector).gap; };
        const double xi = detail::golden_min(gap_at, job.lo, job.hi, 1e-15 * (1.0 + job.hi));
        const auto g = detail::sector_gap(big_n, xi, job.sector);
        if (g.gap <= opts.certificate_gap)
            out.push_back(detail::finish_point(big_n, xi, job.sector, LocateMethod::gap_minimization, g, opts));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.xi_c < b.xi_c; });
    if (!out.empty()) out.front().first = true;
    return out;
}

struct ScalingRow {
    int big_n;
    double xi_c;
    double n_xi_c;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    /// N * xi_c strictly decreasing down the table. Reported, not enforced.
    bool monotone_decreasing = true;
};

/// First exceptional point for each odd N >= 3.
inline ScalingTable scaling_table(const std::vector<int>& odd_n, const CriticalOptions& opts = {},
                                  double xi_max = 2.0) {
    if (odd_n.empty()) throw InvalidArgument("scaling_table: empty N list");
    ScalingTable table;
    for (int n : odd_n) {
        if (n < 3 || n % 2 == 0) throw InvalidArgument("scaling_table: every N must be odd and >= 3");
        const auto points = all_critical_points(n, xi_max, opts);
        if (points.empty()) throw NoBracket("scaling_table: no exceptional point below xi = " + std::to_string(xi_max));
        table.rows.push_back({n, points.front().xi_c, n * points.front().xi_c});
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        if (!(table.rows[i].n_xi_c < table.rows[i - 1].n_xi_c)) table.monotone_decreasing = false;
    return table;
}

struct BranchFit {
    double exponent = 0.0;
    double prefactor = 0.0;
};

/// Least-squares fit of log(gap) against log|xi - xi_c| using log-spaced offsets in
/// [delta_lo, delta_hi] on both sides of the exceptional point.
inline BranchFit branch_exponent(const ExceptionalPoint& ep, double delta_lo = 1e-6, double delta_hi = 1e-4,
                                 int samples = 9) {
    if (!(delta_lo > 0.0 && delta_hi > delta_lo) || samples < 2)
        throw InvalidArgument("branch_exponent: need 0 < delta_lo < delta_hi and samples >= 2");
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const double delta = std::exp(std::log(delta_lo) + t * (std::log(delta_hi) - std::log(delta_lo)));
        for (double side : {-1.0, 1.0}) {
            const double xi = ep.xi_c + side * delta;
            if (xi < 0.0) continue;
            const double g = detail::sector_gap(ep.big_n, xi, ep.sector).gap;
            xs.push_back(std::log(delta));
            ys.push_back(std::log(g));
        }
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    BranchFit fit;
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.prefactor = std::exp((sy - fit.exponent * sx) / n);
    return fit;
}

}  // namespace qes
