#include "mtphase/spectral.hpp"

#include "mtphase/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace mtphase {

double LaplacianMode::eval(double x) const {
    const double arg = m * std::numbers::pi * x / ell;
    return basis == Basis::Sin ? std::sin(arg) : std::cos(arg);
}

LaplacianMode laplacian_mode(double ell, int m, BoundaryCondition bc) {
    const double k = m * std::numbers::pi / ell;
    return {m, k * k, bc == BoundaryCondition::Dirichlet ? Basis::Sin : Basis::Cos, ell};
}

Mat3 mode_matrix(const ModelParams& p, double rho) {
    Mat3 e = linearization_matrix(p);
    e(0, 0) -= rho * p.d1;
    e(1, 1) -= rho * p.d2;
    e(2, 2) -= rho * p.d3;
    return e;
}

std::array<double, 3> characteristic_coefficients(const Mat3& m) {
    const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                          m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    return {-m.trace(), minors, -m.determinant()};
}

namespace {

// Parlett-Reinsch balancing with radix 2 (exact in floating point).
void balance(Mat3& a) {
    constexpr double radix = 2.0;
    bool converged = false;
    for (int sweep = 0; sweep < 64 && !converged; ++sweep) {
        converged = true;
        for (int i = 0; i < 3; ++i) {
            double c = 0.0, r = 0.0;
            for (int j = 0; j < 3; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

bool is_tie(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b))); }

Complex poly(double p2, double p1, double p0, Complex s) { return ((s + p2) * s + p1) * s + p0; }
Complex dpoly(double p2, double p1, Complex s) { return (3.0 * s + 2.0 * p2) * s + p1; }

Complex newton_polish(double p2, double p1, double p0, Complex s) {
    for (int it = 0; it < 4; ++it) {
        const Complex f = poly(p2, p1, p0, s);
        const Complex df = dpoly(p2, p1, s);
        if (std::abs(df) == 0.0) break;
        const Complex next = s - f / df;
        if (!(std::abs(poly(p2, p1, p0, next)) < std::abs(f))) break;
        s = next;
    }
    return s;
}

}  // namespace

void sort_spectrum(Spectrum& s) {
    // Conjugate pairs share one real part exactly.
    for (int i = 0; i < 3; ++i) {
        if (s[i].imag() == 0.0) continue;
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(s[j] - std::conj(s[i])) <= 1e-12 * (1.0 + std::abs(s[i]))) {
                const double re = 0.5 * (s[i].real() + s[j].real());
                const double im = 0.5 * (std::abs(s[i].imag()) + std::abs(s[j].imag()));
                s[i] = {re, s[i].imag() > 0 ? im : -im};
                s[j] = {re, -s[i].imag()};
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const Complex& a, const Complex& b) {
        if (!is_tie(a.real(), b.real())) return a.real() > b.real();
        return a.imag() < b.imag();
    });
}

Spectrum solve_spectrum(const Mat3& m) {
    const auto [p2, p1, p0] = characteristic_coefficients(m);
    Mat3 companion;
    companion << -p2, -p1, -p0,
                 1.0, 0.0, 0.0,
                 0.0, 1.0, 0.0;
    balance(companion);
    Eigen::EigenSolver<Mat3> solver(companion, false);
    const auto ev = solver.eigenvalues();
    Spectrum s{ev(0), ev(1), ev(2)};
    sort_spectrum(s);
    return s;
}

Spectrum cubic_roots_closed_form(double p2, double p1, double p0) {
    const double shift = p2 / 3.0;
    const double p = p1 - p2 * p2 / 3.0;
    const double q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    Spectrum s;
    if (p == 0.0 && q == 0.0) {
        s = {Complex(-shift), Complex(-shift), Complex(-shift)};
    } else if (disc < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            s[k] = Complex(r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift);
        }
    } else {
        const double sq = std::sqrt(disc);
        // Choose the sign that avoids cancellation, then recover the partner from u*v = -p/3.
        const double u = std::cbrt(q > 0 ? -0.5 * q - sq : -0.5 * q + sq);
        const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        const double re = -0.5 * (u + v) - shift;
        const double im = 0.5 * std::sqrt(3.0) * std::abs(u - v);
        s = {Complex(u + v - shift), Complex(re, im), Complex(re, -im)};
    }
    for (auto& root : s) {
        const bool real = root.imag() == 0.0;
        root = newton_polish(p2, p1, p0, root);
        if (real) root = {root.real(), 0.0};
    }
    sort_spectrum(s);
    return s;
}

namespace {

// Minimal complex arithmetic over __float128. The adjugate column/row used by
// the eigenvector formulas can nearly vanish (e.g. nearly diagonal high modes),
// where a one-ulp error in sigma is amplified by ||E|| / ||omega||; evaluating
// at a quad-precision eigenvalue keeps the formulas accurate to double.
struct QC {
    __float128 re = 0, im = 0;
};
QC operator+(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
QC operator-(QC a, QC b) { return {a.re - b.re, a.im - b.im}; }
QC operator*(QC a, QC b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
QC operator/(QC a, QC b) {
    const __float128 n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

using QMat = std::array<std::array<QC, 3>, 3>;

QMat shifted(const Mat3& e, QC sigma) {
    QMat a;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = {static_cast<__float128>(e(i, j)), 0};
        a[i][i] = a[i][i] - sigma;
    }
    return a;
}

/// Newton on det(E - sigma I) in quad precision; returns sigma unchanged when
/// it does not converge to an eigenvalue within rounding distance.
QC polish_eigenvalue(const Mat3& e, Complex sigma) {
    const QC start{sigma.real(), sigma.imag()};
    QC z = start;
    for (int it = 0; it < 8; ++it) {
        const QMat a = shifted(e, z);
        const QC m00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
        const QC m11 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
        const QC m22 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        const QC det = a[0][0] * m00 - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        const QC deriv = QC{0, 0} - (m00 + m11 + m22);  // d/dsigma det(E - sigma I)
        if (deriv.re == 0 && deriv.im == 0) break;
        z = z - det / deriv;
    }
    const double moved = std::abs(Complex(static_cast<double>(z.re - start.re), static_cast<double>(z.im - start.im)));
    const double scale = std::max(1.0, e.cwiseAbs().rowwise().sum().maxCoeff());
    return moved <= 1e-8 * scale ? z : start;
}

Complex to_complex(QC z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }

}  // namespace

CVec3 omega_formula(const Mat3& e, Complex sigma) {
    const QMat a = shifted(e, polish_eigenvalue(e, sigma));
    // Column 3 of adj(E - sigma I).
    return {to_complex(a[0][1] * a[1][2] - a[0][2] * a[1][1]), to_complex(a[0][2] * a[1][0] - a[0][0] * a[1][2]),
            to_complex(a[0][0] * a[1][1] - a[0][1] * a[1][0])};
}

CVec3 omega_star_formula(const Mat3& e, Complex sigma) {
    const QMat a = shifted(e, polish_eigenvalue(e, sigma));
    // Row 3 of adj(E - sigma I).
    return {to_complex(a[1][0] * a[2][1] - a[1][1] * a[2][0]), to_complex(a[0][1] * a[2][0] - a[0][0] * a[2][1]),
            to_complex(a[0][0] * a[1][1] - a[0][1] * a[1][0])};
}

double eigen_residual(const Mat3& e, Complex sigma, const CVec3& v, bool adjoint) {
    const Eigen::Matrix3cd ec = adjoint ? Eigen::Matrix3cd(e.transpose().cast<Complex>()) : Eigen::Matrix3cd(e.cast<Complex>());
    const double n = v.norm();
    if (n == 0.0) return std::numeric_limits<double>::infinity();
    return (ec * v - sigma * v).norm() / n;
}

double eigen_tolerance(const Mat3& e) {
    return 1e-10 * std::max(1.0, e.cwiseAbs().rowwise().sum().maxCoeff());
}

namespace {

CVec3 checked(const Mat3& e, Complex sigma, CVec3 v, bool adjoint) {
    const double res = eigen_residual(e, sigma, v, adjoint);
    if (!(res <= eigen_tolerance(e))) {
        throw Error(ErrorCode::NotAnEigenvalue,
                    "sigma = (" + std::to_string(sigma.real()) + ", " + std::to_string(sigma.imag()) +
                        ") is not an eigenvalue: relative residual " + std::to_string(res));
    }
    return v;
}

}  // namespace

CVec3 eigenvector_omega(const ModelParams& p, double rho, Complex sigma) {
    const Mat3 e = mode_matrix(p, rho);
    return checked(e, sigma, omega_formula(e, sigma), false);
}

Vec3 eigenvector_omega(const ModelParams& p, double rho, double sigma) {
    return eigenvector_omega(p, rho, Complex(sigma)).real();
}

CVec3 adjoint_omega(const ModelParams& p, double rho, Complex sigma) {
    const Mat3 e = mode_matrix(p, rho);
    return checked(e, sigma, omega_star_formula(e, sigma), true);
}

Vec3 adjoint_omega(const ModelParams& p, double rho, double sigma) {
    return adjoint_omega(p, rho, Complex(sigma)).real();
}

ModeSpectrum mode_spectrum(const ModelParams& p, const LaplacianMode& mode) {
    ModeSpectrum ms;
    ms.mode = mode;
    const Mat3 e = mode_matrix(p, mode.rho);
    ms.sigma = solve_spectrum(e);
    for (int i = 0; i < 3; ++i) {
        ms.omega[i] = omega_formula(e, ms.sigma[i]);
        ms.omega_star[i] = omega_star_formula(e, ms.sigma[i]);
    }
    return ms;
}

std::vector<ModeSpectrum> mode_spectra(const ModelParams& p, int m_max) {
    if (m_max < 1) throw Error(ErrorCode::ValidationError, "M_max must be at least 1", "M_max");
    std::vector<ModeSpectrum> out;
    out.reserve(static_cast<std::size_t>(m_max));
    for (int m = 1; m <= m_max; ++m) out.push_back(mode_spectrum(p, laplacian_mode(p.ell, m, p.bc)));
    return out;
}

}  // namespace mtphase
