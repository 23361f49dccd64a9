#pragma once

// Real polynomials for the spectral module: characteristic polynomials of
// tridiagonal matrices, Aberth-Ehrlich root finding and Sylvester discriminants.
//
// Coefficients and all arithmetic on them use a 113-bit binary float. The monomial
// basis is badly conditioned here: for N = 13 the constant term is ~1e30 while
// eigenvalues from the two symmetry sectors sit 1e-11 apart, so double or 80-bit
// coefficients cannot locate the roots to 1e-8.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "qes/error.hpp"
#include "qes/matrix.hpp"
#include "qes/qes_core.hpp"

namespace qes {

using quad = boost::multiprecision::cpp_bin_float_quad;
using cquad = boost::multiprecision::cpp_complex_quad;

inline cquad to_quad(std::complex<double> z) { return {quad(z.real()), quad(z.imag())}; }
inline std::complex<double> to_double(const cquad& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

/// Polynomial with real coefficients stored in ascending degree.
///
/// Exactly-zero leading coefficients are dropped on construction; relative trimming
/// is the explicit trimmed() step, since a monic characteristic polynomial with
/// large roots legitimately has a leading coefficient 1e-30 of its constant term.
class RealPolynomial {
public:
    static constexpr double trim_tolerance = 1e-13;

    RealPolynomial() : coeffs_{quad(0)} {}
    RealPolynomial(std::initializer_list<double> ascending) : RealPolynomial(std::vector<double>(ascending)) {}
    explicit RealPolynomial(const std::vector<double>& ascending)
        : RealPolynomial(std::vector<quad>(ascending.begin(), ascending.end())) {}
    explicit RealPolynomial(std::vector<quad> ascending) : coeffs_(std::move(ascending)) {
        if (coeffs_.empty()) coeffs_.push_back(quad(0));
        for (const quad& c : coeffs_)
            if (!boost::multiprecision::isfinite(c)) throw InvalidArgument("RealPolynomial: non-finite coefficient");
        while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
    }

    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    /// Coefficients rounded to double.
    [[nodiscard]] std::vector<double> coeffs() const {
        std::vector<double> out;
        for (const quad& c : coeffs_) out.push_back(static_cast<double>(c));
        return out;
    }
    [[nodiscard]] const std::vector<quad>& exact_coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] double leading() const { return static_cast<double>(coeffs_.back()); }
    [[nodiscard]] double operator[](std::size_t k) const {
        return k < coeffs_.size() ? static_cast<double>(coeffs_[k]) : 0.0;
    }
    [[nodiscard]] quad at(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : quad(0); }

    /// Drops leading coefficients whose magnitude is <= tol * max |coefficient|.
    [[nodiscard]] RealPolynomial trimmed(double tol = trim_tolerance) const {
        quad biggest = 0;
        for (const quad& c : coeffs_) biggest = std::max(biggest, quad(abs(c)));
        std::vector<quad> c = coeffs_;
        while (c.size() > 1 && abs(c.back()) <= tol * biggest) c.pop_back();
        return RealPolynomial(std::move(c));
    }

    [[nodiscard]] cquad eval(const cquad& x) const {
        cquad acc = coeffs_.back();
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    [[nodiscard]] std::complex<double> operator()(std::complex<double> x) const { return to_double(eval(to_quad(x))); }
    [[nodiscard]] double operator()(double x) const {
        quad acc = coeffs_.back();
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return static_cast<double>(acc);
    }

    [[nodiscard]] RealPolynomial derivative() const {
        if (degree() == 0) return RealPolynomial{};
        std::vector<quad> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = quad(static_cast<int>(k)) * coeffs_[k];
        return RealPolynomial(std::move(d));
    }

    /// sum_k |a_k| |x|^k, the natural magnitude against which |p(x)| is judged.
    [[nodiscard]] double scale_at(std::complex<double> x) const {
        const quad r = std::abs(x);
        quad acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + abs(*it);
        return static_cast<double>(acc);
    }

    [[nodiscard]] RealPolynomial monic() const {
        std::vector<quad> c = coeffs_;
        const quad lead = c.back();
        for (quad& v : c) v /= lead;
        c.back() = 1;
        return RealPolynomial(std::move(c));
    }

    friend bool operator==(const RealPolynomial&, const RealPolynomial&) = default;

private:
    std::vector<quad> coeffs_;
};

namespace detail {

using qvec = std::vector<quad>;

inline qvec poly_mul(const qvec& a, const qvec& b) {
    qvec out(a.size() + b.size() - 1, quad(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline qvec poly_axpy(const quad& alpha, const qvec& x, const qvec& y) {
    qvec out(std::max(x.size(), y.size()), quad(0));
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
    for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i];
    return out;
}

}  // namespace detail

/// det(E I - T) for a tridiagonal T via the three-term recurrence
///   p_k = (E - T[k-1][k-1]) p_{k-1} - T[k-1][k-2] T[k-2][k-1] p_{k-2}.
inline RealPolynomial characteristic_polynomial(const RealMatrix& t) {
    if (!t.square()) throw InvalidArgument("characteristic_polynomial: matrix must be square");
    if (!is_tridiagonal(t)) throw InvalidArgument("characteristic_polynomial: matrix must be tridiagonal");
    if (!all_finite(t)) throw InvalidArgument("characteristic_polynomial: non-finite entries");
    const std::size_t n = t.rows();
    detail::qvec prev2{quad(1)};
    if (n == 0) return RealPolynomial(prev2);
    detail::qvec prev1{-quad(t(0, 0)), quad(1)};
    for (std::size_t k = 2; k <= n; ++k) {
        const detail::qvec linear{-quad(t(k - 1, k - 1)), quad(1)};
        const quad coupling = quad(t(k - 1, k - 2)) * quad(t(k - 2, k - 1));
        detail::qvec next = detail::poly_axpy(-coupling, prev2, detail::poly_mul(linear, prev1));
        prev2 = std::move(prev1);
        prev1 = std::move(next);
    }
    return RealPolynomial(prev1);
}

inline RealPolynomial characteristic_polynomial(const GaugedMatrix& m) { return characteristic_polynomial(m.entries); }

/// q(t) = p(shift + scale * t).
inline RealPolynomial substitute_affine(const RealPolynomial& p, const quad& shift, const quad& scale) {
    const detail::qvec linear{shift, scale};
    detail::qvec acc{p.exact_coeffs().back()};
    for (int k = p.degree() - 1; k >= 0; --k) {
        acc = detail::poly_mul(acc, linear);
        acc[0] += p.at(static_cast<std::size_t>(k));
    }
    return RealPolynomial(std::move(acc));
}

inline RealPolynomial substitute_affine(const RealPolynomial& p, double shift, double scale) {
    return substitute_affine(p, quad(shift), quad(scale));
}

struct RootOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-13;
    int polish_steps = 3;
};

/// Orders complex numbers by (real part, imaginary part).
inline bool complex_less(const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

namespace detail {

// Greedy matching of roots of a real polynomial into real singletons and conjugate
// pairs, followed by exact symmetrization.
inline void enforce_conjugate_symmetry(std::vector<std::complex<double>>& z) {
    struct Candidate {
        double cost;
        std::size_t i, j;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < z.size(); ++i) {
        cands.push_back({2.0 * std::abs(z[i].imag()), i, i});
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (z[i].imag() * z[j].imag() <= 0.0) cands.push_back({std::abs(z[j] - std::conj(z[i])), i, j});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    std::vector<bool> used(z.size(), false);
    for (const auto& c : cands) {
        if (used[c.i] || used[c.j]) continue;
        used[c.i] = used[c.j] = true;
        if (c.i == c.j) {
            z[c.i] = {z[c.i].real(), 0.0};
        } else {
            const std::complex<double> upper = z[c.i].imag() >= 0.0 ? z[c.i] : std::conj(z[c.i]);
            const std::complex<double> other = z[c.j].imag() >= 0.0 ? z[c.j] : std::conj(z[c.j]);
            const std::complex<double> mid = 0.5 * (upper + other);
            z[c.i] = mid;
            z[c.j] = std::conj(mid);
        }
    }
}

}  // namespace detail

/// All complex roots by Aberth-Ehrlich simultaneous iteration with Newton polishing.
///
/// Converged when the largest step falls below step_tolerance * (1 + |root|), or when
/// every root satisfies |p(root)| <= tol * scale_at(root). Returned roots are closed
/// under conjugation and sorted by (Re, Im).
inline std::vector<std::complex<double>> roots(const RealPolynomial& poly, double tol = 1e-12,
                                               const RootOptions& opts = {}) {
    const int n = poly.degree();
    if (n < 1) throw InvalidArgument("roots: degree must be >= 1");
    if (n == 1) return {std::complex<double>(static_cast<double>(-poly.at(0) / poly.at(1)), 0.0)};

    const RealPolynomial dp = poly.derivative();
    const quad center = -poly.at(n - 1) / (n * poly.at(n));
    // Fujiwara-type radius of the roots about the centroid.
    const RealPolynomial shifted = substitute_affine(poly, center, quad(1));
    double radius = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double ratio = static_cast<double>(abs(shifted.at(static_cast<std::size_t>(n - k)) / shifted.at(n)));
        radius = std::max(radius, std::pow(ratio, 1.0 / k));
    }
    radius = std::max(2.0 * radius, 1e-3);

    std::vector<cquad> z(n);
    for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
        z[k] = cquad(center, quad(0)) + to_quad(radius * std::complex<double>(std::cos(theta), std::sin(theta)));
    }

    auto as_double = [](const std::vector<cquad>& v) {
        std::vector<std::complex<double>> out;
        for (const auto& x : v) out.push_back(to_double(x));
        return out;
    };
    auto worst_residual = [&](const std::vector<cquad>& pts) {
        double worst = 0.0;
        for (const auto& r : pts) {
            const double mag = static_cast<double>(abs(poly.eval(r)));
            worst = std::max(worst, mag / std::max(poly.scale_at(to_double(r)), 1e-300));
        }
        return worst;
    };

    const quad step_tol(opts.step_tolerance);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations && !converged; ++it) {
        bool step_small = true;
        for (int k = 0; k < n; ++k) {
            const cquad pv = poly.eval(z[k]);
            if (pv == cquad(0)) continue;
            const cquad dv = dp.eval(z[k]);
            cquad repulsion = 0;
            for (int m = 0; m < n; ++m)
                if (m != k) repulsion += cquad(1) / (z[k] - z[m]);
            cquad step;
            if (dv == cquad(0)) {
                step = cquad(quad(0), quad(1e-3)) * (cquad(1) + z[k]);
            } else {
                const cquad ratio = pv / dv;
                const cquad denom = cquad(1) - ratio * repulsion;
                step = denom == cquad(0) ? ratio : ratio / denom;
            }
            z[k] -= step;
            if (abs(step) >= step_tol * (1 + abs(z[k]))) step_small = false;
        }
        converged = step_small;
    }
    if (!converged) {
        const double worst = worst_residual(z);
        if (!(worst <= tol))
            throw NonConvergence("roots: Aberth iteration did not converge (residual " + std::to_string(worst) + ")",
                                 as_double(z), worst);
    }

    for (auto& r : z) {
        for (int s = 0; s < opts.polish_steps; ++s) {
            const cquad pv = poly.eval(r), dv = dp.eval(r);
            if (dv == cquad(0)) break;
            const cquad candidate = r - pv / dv;
            if (abs(poly.eval(candidate)) < abs(pv)) r = candidate;
            else break;
        }
    }

    auto out = as_double(z);
    detail::enforce_conjugate_symmetry(out);
    std::sort(out.begin(), out.end(), complex_less);
    return out;
}

namespace detail {

inline quad determinant(std::vector<std::vector<quad>> a) {
    const std::size_t n = a.size();
    quad det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0) return quad(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            const quad f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

inline quad discriminant_quad(const RealPolynomial& p) {
    const int n = p.degree();
    const RealPolynomial dp = p.derivative();
    const int m = n - 1;
    const int size = n + m;
    std::vector<std::vector<quad>> syl(size, std::vector<quad>(size, quad(0)));
    // m rows of p, then n rows of p', coefficients in descending order.
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) syl[r][r + k] = p.at(static_cast<std::size_t>(n - k));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) syl[m + r][r + k] = dp.at(static_cast<std::size_t>(m - k));
    const quad res = determinant(std::move(syl));
    const int sign = ((n * (n - 1) / 2) % 2 == 0) ? 1 : -1;
    return sign * res / p.at(static_cast<std::size_t>(n));
}

}  // namespace detail

/// Discriminant (-1)^{n(n-1)/2} Res(p, p') / a_n via the Sylvester determinant.
/// Positive when all roots are real and distinct; a cubic with one real root and a
/// conjugate pair gives a negative value.
inline double discriminant(const RealPolynomial& p) {
    if (p.degree() < 2) throw InvalidArgument("discriminant: degree must be >= 2");
    return static_cast<double>(detail::discriminant_quad(p));
}

/// Sign of the discriminant evaluated on the centred and rescaled polynomial.
/// Translation leaves the discriminant unchanged and scaling multiplies it by a
/// positive power, so the sign is that of discriminant(p) with far less cancellation.
inline int discriminant_sign(const RealPolynomial& p) {
    const int n = p.degree();
    if (n < 2) throw InvalidArgument("discriminant_sign: degree must be >= 2");
    const quad center = -p.at(n - 1) / (n * p.at(n));
    RealPolynomial q = substitute_affine(p, center, quad(1)).monic();
    double scale = 0.0;
    for (int k = 2; k <= n; ++k)
        scale = std::max(scale, std::pow(static_cast<double>(abs(q.at(static_cast<std::size_t>(n - k)))), 1.0 / k));
    if (scale == 0.0) return 0;
    q = substitute_affine(q, quad(0), quad(scale)).monic();
    const quad d = detail::discriminant_quad(q);
    return (d > 0) - (d < 0);
}

/// Closed-form reality discriminant of the N = 5 cubic sector,
/// 16 xi^6 - 4 xi^4 + 103 xi^2 - 9. Positive iff the cubic has one real root and a
/// conjugate pair.
inline double delta_n5(double xi) {
    const double s = xi * xi;
    return ((16.0 * s - 4.0) * s + 103.0) * s - 9.0;
}

// Closed-form solvers, kept as independent cross-checks for small matrices.

/// Roots of a x^2 + b x + c with complex coefficients.
inline std::vector<std::complex<double>> solve_quadratic(std::complex<double> a, std::complex<double> b,
                                                         std::complex<double> c) {
    const auto disc = std::sqrt(b * b - 4.0 * a * c);
    // Pick the sign that avoids cancellation.
    const auto q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
    if (q == std::complex<double>(0.0)) return {0.0, 0.0};
    return {q / a, c / q};
}

/// Roots of x^3 + a x^2 + b x + c (Cardano with complex arithmetic).
inline std::vector<std::complex<double>> solve_cubic(std::complex<double> a, std::complex<double> b,
                                                     std::complex<double> c) {
    using C = std::complex<double>;
    const C p = b - a * a / 3.0;
    const C q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const C d = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    C u3 = -q / 2.0 + d;
    if (std::abs(-q / 2.0 - d) > std::abs(u3)) u3 = -q / 2.0 - d;
    const C omega(-0.5, std::sqrt(3.0) / 2.0);
    std::vector<C> out;
    if (std::abs(u3) == 0.0) {
        const C t = std::pow(-q, 1.0 / 3.0);
        for (int k = 0; k < 3; ++k) out.push_back(t * std::pow(omega, k) - a / 3.0);
        return out;
    }
    const C u = std::pow(u3, 1.0 / 3.0);
    C w = 1.0;
    for (int k = 0; k < 3; ++k, w *= omega) {
        const C uk = u * w;
        out.push_back(uk - p / (3.0 * uk) - a / 3.0);
    }
    return out;
}

/// Roots of x^4 + a x^3 + b x^2 + c x + d (Ferrari via the resolvent cubic).
inline std::vector<std::complex<double>> solve_quartic(std::complex<double> a, std::complex<double> b,
                                                       std::complex<double> c, std::complex<double> d) {
    using C = std::complex<double>;
    // Depressed quartic y^4 + p y^2 + q y + r, x = y - a/4.
    const C p = b - 3.0 * a * a / 8.0;
    const C q = c - a * b / 2.0 + a * a * a / 8.0;
    const C r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
    std::vector<C> ys;
    if (std::abs(q) < 1e-14 * (1.0 + std::abs(p) * std::abs(p) + std::abs(r))) {
        for (const C& s : solve_quadratic(1.0, p, r)) {
            const C y = std::sqrt(s);
            ys.push_back(y);
            ys.push_back(-y);
        }
    } else {
        // Resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0; use the largest-modulus root.
        auto ms = solve_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
        C m = ms[0];
        for (const C& cand : ms)
            if (std::abs(cand) > std::abs(m)) m = cand;
        const C s = std::sqrt(2.0 * m);
        for (const C& y : solve_quadratic(1.0, s, p / 2.0 + m - q / (2.0 * s))) ys.push_back(y);
        for (const C& y : solve_quadratic(1.0, -s, p / 2.0 + m + q / (2.0 * s))) ys.push_back(y);
    }
    for (C& y : ys) y -= a / 4.0;
    return ys;
}

}  // namespace qes
