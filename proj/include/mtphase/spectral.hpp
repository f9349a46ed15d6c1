#pragma once

#include "mtphase/model.hpp"

#include <array>
#include <complex>
#include <vector>

namespace mtphase {

using Complex = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

enum class Basis { Sin, Cos };

/// Eigenpair of -d^2/dx^2 on (0, ell): sin(m pi x/ell) under Dirichlet,
/// cos(m pi x/ell), m >= 1, under Neumann with zero average.
struct LaplacianMode {
    int m = 1;
    double rho = 1.0;
    Basis basis = Basis::Sin;
    double ell = 3.14159265358979323846;

    double eval(double x) const;
};

LaplacianMode laplacian_mode(double ell, int m, BoundaryCondition bc);

inline double first_laplacian_eigenvalue(const ModelParams& p) {
    return laplacian_mode(p.ell, 1, p.bc).rho;
}

/// A - rho*D.
Mat3 mode_matrix(const ModelParams& p, double rho);

/// Coefficients (p2, p1, p0) of the monic characteristic polynomial
/// s^3 + p2 s^2 + p1 s + p0; p2 = -trace, p1 = sum of principal 2x2 minors, p0 = -det.
std::array<double, 3> characteristic_coefficients(const Mat3& m);

using Spectrum = std::array<Complex, 3>;

/// Eigenvalues via the balanced companion matrix of the characteristic cubic,
/// sorted by descending real part, ties by ascending imaginary part.
Spectrum solve_spectrum(const Mat3& m);

/// Roots of s^3 + p2 s^2 + p1 s + p0 from the trigonometric/Cardano closed
/// form, Newton-polished, in the same order as solve_spectrum.
Spectrum cubic_roots_closed_form(double p2, double p1, double p0);

void sort_spectrum(Spectrum& s);

/// omega = (E - sigma I) adjugate, third column. For k1 = E = 1 this is
/// (k5, d1 rho + k7 + sigma, (d1 rho + k7 + sigma)(d2 rho + k5 + sigma) - k5 k7).
/// Throws NotAnEigenvalue when the residual exceeds 1e-10 relative.
CVec3 eigenvector_omega(const ModelParams& p, double rho, Complex sigma);
Vec3 eigenvector_omega(const ModelParams& p, double rho, double sigma);

/// omega* = (E - sigma I) adjugate, third row; solves E^T omega* = sigma omega*.
CVec3 adjoint_omega(const ModelParams& p, double rho, Complex sigma);
Vec3 adjoint_omega(const ModelParams& p, double rho, double sigma);

/// Unchecked versions, used where sigma is known exactly (e.g. sigma = 0 at a threshold).
/// A sigma within rounding distance of an eigenvalue is first polished to it in
/// quad precision, and the adjugate is evaluated in that precision.
CVec3 omega_formula(const Mat3& e, Complex sigma);
CVec3 omega_star_formula(const Mat3& e, Complex sigma);

/// ||E v - sigma v|| / ||v|| (forward) or with E^T (adjoint).
double eigen_residual(const Mat3& e, Complex sigma, const CVec3& v, bool adjoint);

/// Tolerance scale used by the eigenpair checks: 1e-10 * max(1, ||E||_inf).
double eigen_tolerance(const Mat3& e);

struct ModeSpectrum {
    LaplacianMode mode;
    Spectrum sigma{};
    std::array<CVec3, 3> omega;
    std::array<CVec3, 3> omega_star;
};

ModeSpectrum mode_spectrum(const ModelParams& p, const LaplacianMode& mode);

/// Spectra for m = 1..m_max.
std::vector<ModeSpectrum> mode_spectra(const ModelParams& p, int m_max);

/// Bilinear (unconjugated) dot product, as used by the projection formulas.
inline Complex bdot(const CVec3& a, const CVec3& b) { return (a.array() * b.array()).sum(); }

}  // namespace mtphase
