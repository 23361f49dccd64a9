#pragma once

// Dense eigenvalues for small nonsymmetric matrices.
//
// Real input: Parlett-Reinsch balancing, Householder reduction to upper
// Hessenberg form, then Francis double-shift QR. Complex conjugate pairs come out
// of 2x2 blocks and are exactly symmetric.
// Complex input: the same reduction followed by single-shift QR with Wilkinson
// shifts and Givens rotations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qes/error.hpp"
#include "qes/matrix.hpp"
#include "qes/polynomial.hpp"
#include "qes/qes_core.hpp"

namespace qes {

struct SpectralOptions {
    /// |Im E| <= tol_reality * (1 + |E|) counts as real.
    double tol_reality = 1e-9;
    int max_qr_iterations = 60;
};

/// Eigenvalues sorted by (Re, Im) with reality flags and conjugate-partner indices.
struct Spectrum {
    std::vector<cplx> eigenvalues;
    std::vector<bool> is_real;
    std::vector<std::optional<std::size_t>> pair_index;
    std::vector<std::optional<Sector>> sector;

    [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] std::size_t real_count() const {
        return static_cast<std::size_t>(std::count(is_real.begin(), is_real.end(), true));
    }
};

inline bool is_real_value(cplx e, double tol_reality) { return std::abs(e.imag()) <= tol_reality * (1.0 + std::abs(e)); }

/// Sorts, flags reality, and links conjugate partners of the flagged-complex values.
inline Spectrum make_spectrum(std::vector<cplx> values, double tol_reality,
                              std::vector<std::optional<Sector>> sectors = {}) {
    if (sectors.empty()) sectors.assign(values.size(), std::nullopt);
    if (sectors.size() != values.size()) throw InvalidArgument("make_spectrum: sector labels do not match values");
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return complex_less(values[a], values[b]); });

    Spectrum s;
    for (std::size_t i : order) {
        s.eigenvalues.push_back(values[i]);
        s.sector.push_back(sectors[i]);
    }
    const std::size_t n = s.eigenvalues.size();
    s.is_real.resize(n);
    s.pair_index.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) s.is_real[i] = is_real_value(s.eigenvalues[i], tol_reality);
    std::vector<bool> taken(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.is_real[i] || taken[i] || s.eigenvalues[i].imag() < 0.0) continue;
        const cplx target = std::conj(s.eigenvalues[i]);
        std::optional<std::size_t> best;
        double best_d = 1e-6 * (1.0 + std::abs(target));
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i || taken[k] || s.is_real[k]) continue;
            const double d = std::abs(s.eigenvalues[k] - target);
            if (d <= best_d) {
                best_d = d;
                best = k;
            }
        }
        if (best) {
            taken[i] = taken[*best] = true;
            s.pair_index[i] = *best;
            s.pair_index[*best] = i;
        }
    }
    return s;
}

namespace detail {

template <typename T>
double l1(const T& v) {
    return std::abs(std::real(v)) + std::abs(std::imag(v));
}

// Parlett-Reinsch balancing by powers of two (exact, spectrum preserving).
template <typename T>
void balance(Matrix<T>& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += l1(a(j, i));
                    r += l1(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

template <typename T>
T conj_if_complex(const T& v) {
    if constexpr (std::is_same_v<T, cplx>) return std::conj(v);
    else return v;
}

// Householder similarity reduction to upper Hessenberg form.
template <typename T>
void hessenberg(Matrix<T>& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<T> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm += std::norm(a(i, k));
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const T x0 = a(k + 1, k);
        T phase = T{1};
        if (std::abs(x0) != 0.0) phase = x0 / std::abs(x0);
        const T alpha = -phase * norm;
        std::fill(v.begin(), v.end(), T{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        if (vnorm == 0.0) continue;
        const double beta = 2.0 / vnorm;
        // A <- (I - beta v v^H) A
        for (std::size_t j = 0; j < n; ++j) {
            T dot{};
            for (std::size_t i = k + 1; i < n; ++i) dot += conj_if_complex(v[i]) * a(i, j);
            dot *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * dot;
        }
        // A <- A (I - beta v v^H)
        for (std::size_t i = 0; i < n; ++i) {
            T dot{};
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            dot *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * conj_if_complex(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = T{};
    }
}

// Francis double-shift QR on an upper Hessenberg matrix (1-based internally,
// following the classic EISPACK hqr layout).
inline std::vector<cplx> hqr(const RealMatrix& hess, int max_its) {
    const int n = static_cast<int>(hess.rows());
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) a[i][j] = hess(i - 1, j - 1);
    std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a[i][j]);

    auto sign = [](double x, double s) { return s >= 0.0 ? std::abs(x) : -std::abs(x); };

    int nn = n;
    double t = 0.0;
    while (nn >= 1) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 2; --l) {
                double s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
                if (s == 0.0) s = anorm;
                if (std::abs(a[l][l - 1]) <= eps * s) {
                    a[l][l - 1] = 0.0;
                    break;
                }
            }
            double x = a[nn][nn];
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                double y = a[nn - 1][nn - 1];
                double w = a[nn][nn - 1] * a[nn - 1][nn];
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -(wi[nn] = z);
                    }
                    nn -= 2;
                } else {
                    if (its == max_its) {
                        std::vector<cplx> partial;
                        for (int i = nn + 1; i <= n; ++i) partial.emplace_back(wr[i], wi[i]);
                        throw NonConvergence("eigenvalues: Francis QR did not converge", partial,
                                             std::abs(a[nn][nn - 1]));
                    }
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 1; i <= nn; ++i) a[i][i] -= x;
                        const double s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z;
                    for (m = nn - 2; m >= l; --m) {
                        z = a[m][m];
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a[i][i - 2] = 0.0;
                        if (i != m + 2) a[i][i - 3] = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if (k != nn - 1) r = a[k + 2][k - 1];
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a[k][k - 1] = -a[k][k - 1];
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a[k][j] + q * a[k + 1][j];
                                if (k != nn - 1) {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if (k != nn - 1) {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<cplx> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
    return out;
}

// Single-shift complex QR on an upper Hessenberg matrix.
inline std::vector<cplx> complex_qr(ComplexMatrix h, int max_its) {
    const int n = static_cast<int>(h.rows());
    std::vector<cplx> eig(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int hi = n - 1;
    int its = 0;
    struct Rot {
        double c;
        cplx s;
    };
    std::vector<Rot> rots(n);
    while (hi >= 0) {
        int l = hi;
        while (l > 0) {
            const double s = std::abs(h(l, l)) + std::abs(h(l - 1, l - 1));
            if (std::abs(h(l, l - 1)) <= eps * (s == 0.0 ? 1.0 : s)) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            eig[hi] = h(hi, hi);
            --hi;
            its = 0;
            continue;
        }
        if (its == max_its) {
            std::vector<cplx> partial(eig.begin() + hi + 1, eig.end());
            throw NonConvergence("eigenvalues: complex QR did not converge", partial, std::abs(h(hi, hi - 1)));
        }
        ++its;
        cplx mu;
        if (its % 10 == 0) {
            mu = h(hi, hi) + std::abs(h(hi, hi - 1));
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx half = 0.5 * (a - d);
            const cplx root = std::sqrt(half * half + b * c);
            const cplx m1 = 0.5 * (a + d) + root, m2 = 0.5 * (a + d) - root;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }
        for (int k = l; k <= hi; ++k) h(k, k) -= mu;
        for (int k = l; k < hi; ++k) {
            const cplx x = h(k, k), y = h(k + 1, k);
            const double norm = std::hypot(std::abs(x), std::abs(y));
            Rot rot{0.0, 1.0};
            if (norm == 0.0) {
                rot = {1.0, 0.0};
            } else if (std::abs(x) != 0.0) {
                const cplx phase = x / std::abs(x);
                rot = {std::abs(x) / norm, phase * std::conj(y) / norm};
            }
            rots[k] = rot;
            for (int j = k; j <= hi; ++j) {
                const cplx top = h(k, j), bot = h(k + 1, j);
                h(k, j) = rot.c * top + rot.s * bot;
                h(k + 1, j) = -std::conj(rot.s) * top + rot.c * bot;
            }
        }
        for (int k = l; k < hi; ++k) {
            const Rot rot = rots[k];
            for (int i = l; i <= std::min(k + 1, hi); ++i) {
                const cplx left = h(i, k), right = h(i, k + 1);
                h(i, k) = left * rot.c + right * std::conj(rot.s);
                h(i, k + 1) = -left * rot.s + right * rot.c;
            }
        }
        for (int k = l; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

}  // namespace detail

/// Raw eigenvalues (unsorted) of a real square matrix.
inline std::vector<cplx> eigenvalue_list(const RealMatrix& m, const SpectralOptions& opts = {}) {
    if (!m.square()) throw InvalidArgument("eigenvalues: matrix must be square");
    if (!all_finite(m)) throw InvalidArgument("eigenvalues: non-finite entries");
    if (m.rows() == 0) return {};
    RealMatrix a = m;
    detail::balance(a);
    detail::hessenberg(a);
    return detail::hqr(a, opts.max_qr_iterations);
}

/// Raw eigenvalues (unsorted) of a complex square matrix.
inline std::vector<cplx> eigenvalue_list(const ComplexMatrix& m, const SpectralOptions& opts = {}) {
    if (!m.square()) throw InvalidArgument("eigenvalues: matrix must be square");
    if (!all_finite(m)) throw InvalidArgument("eigenvalues: non-finite entries");
    if (m.rows() == 0) return {};
    ComplexMatrix a = m;
    detail::balance(a);
    detail::hessenberg(a);
    return detail::complex_qr(std::move(a), opts.max_qr_iterations);
}

template <typename T>
Spectrum eigenvalues(const Matrix<T>& m, const SpectralOptions& opts = {}) {
    return make_spectrum(eigenvalue_list(m, opts), opts.tol_reality);
}

inline Spectrum eigenvalues(const GaugedMatrix& m, const SpectralOptions& opts = {}) {
    return eigenvalues(m.entries, opts);
}

/// Full QES spectrum. For odd N each eigenvalue is computed inside its symmetry
/// block and labelled with that sector; for even N the whole matrix is used.
inline Spectrum qes_spectrum(const QesProblem& problem, const SpectralOptions& opts = {}) {
    const GaugedMatrix h = build_gauged_matrix(problem);
    if (!problem.odd()) return eigenvalues(h, opts);
    const SectorSplit split = split_sectors(h);
    std::vector<cplx> values;
    std::vector<std::optional<Sector>> labels;
    for (Sector s : {Sector::even, Sector::odd}) {
        for (const cplx& e : eigenvalue_list(split.block(s), opts)) {
            values.push_back(e);
            labels.emplace_back(s);
        }
    }
    return make_spectrum(std::move(values), opts.tol_reality, std::move(labels));
}

/// Smallest pairwise distance inside a list of eigenvalues (infinity for < 2 values).
inline double min_pair_gap(const std::vector<cplx>& values, std::size_t* first = nullptr, std::size_t* second = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t k = i + 1; k < values.size(); ++k) {
            const double d = std::abs(values[i] - values[k]);
            if (d < best) {
                best = d;
                if (first) *first = i;
                if (second) *second = k;
            }
        }
    return best;
}

}  // namespace qes
