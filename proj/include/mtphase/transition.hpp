#pragma once

#include "mtphase/model.hpp"
#include "mtphase/spectral.hpp"
#include "mtphase/threshold.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtphase {

inline constexpr double kResonanceGuard = 1e-6;
inline constexpr double kTypeIIIBand = 1e-10;
inline constexpr double kDegenerateAlpha = 1e-12;

/// L2 inner products of the Laplacian eigenfunctions on (0, ell).
struct ModeIntegrals {
    double e1_e1 = 0;     ///< <e1, e1>
    double e1_cubed = 0;  ///< int e1^3
    double e1sq_e2 = 0;   ///< <e1^2, e2>
    double e2_e2 = 0;     ///< <e2, e2>
};
ModeIntegrals mode_integrals(double ell, BoundaryCondition bc);

// --- Dirichlet: quadratic coefficient of the reduced equation --------------

struct AlphaResult {
    double alpha = 0;             ///< closed form (8/(3 pi)) F(omega).omega* / (omega.omega*)
    double alpha_quadrature = 0;  ///< <F(e1 omega), e1 omega*> / <e1 omega, e1 omega*> by Simpson's rule
    Vec3 omega;
    Vec3 omega_star;
};

double alpha_closed_form(const ModelParams& p, const Vec3& omega, const Vec3& omega_star);
double alpha_by_quadrature(const ModelParams& p, const Vec3& omega, const Vec3& omega_star, int intervals = 4096);

/// Throws BoundaryMismatch for Neumann points and DegenerateAlpha when |alpha| <= 1e-12.
AlphaResult alpha_dirichlet(const ThresholdPoint& tp);

// --- Neumann zero-average: cubic transition number --------------------------

/// Quadratic center-manifold coefficients of the interaction mode I = 2:
/// y_{I,i} = c_i y^2 + o(y^2).
struct CenterManifoldCoefficients {
    int I = 2;
    std::array<Complex, 3> yI_coeff{};
    Spectrum sigmaI{};
    std::array<CVec3, 3> omegaI;
    std::array<CVec3, 3> omegaI_star;
};

/// Throws Resonance when some |sigma_{2,i}| <= kResonanceGuard.
CenterManifoldCoefficients center_manifold_coefficients(const ModelParams& p, const Vec3& omega);
CenterManifoldCoefficients center_manifold_coefficients(const ThresholdPoint& tp);

struct BResult {
    double b = 0;          ///< cubic coefficient of y' = sigma11 y + b y^3
    double b_imag = 0;     ///< imaginary residue from complex mode-2 pairs (should vanish)
    Complex B1{}, B2{};    ///< B^1(2), B^2(2)
    Vec3 B;                ///< (k5 B2 - k7 B1, -k5 B2 + k7 B1, -k3 B1)
    double B_dot_omega_star = 0;
    bool degenerate = false;  ///< |b| <= kTypeIIIBand
    Vec3 omega;
    Vec3 omega_star;
    CenterManifoldCoefficients cm;
};

BResult b_from_vectors(const ModelParams& p, const Vec3& omega, const Vec3& omega_star);
/// Throws BoundaryMismatch for Dirichlet points; Resonance propagates.
BResult b_neumann(const ThresholdPoint& tp);

/// B.omega* assembled in full versus the closed single-term expression that
/// holds when C1 k7 = k3 (k5 + rho1 d2) (with k1 = E = 1).
struct ConstrainedBCheck {
    double full = 0;
    double simplified = 0;
    double rel_diff = 0;
};
ConstrainedBCheck constrained_b_two_path(const ThresholdPoint& tp);

/// C1 satisfying C1 k7 = k3 (k5 + rho1 d2).
double constrained_C1(const ModelParams& p);

// --- Classification and predictions -----------------------------------------

enum class TransitionType { TranscriticalMixed, TypeI, TypeII, TypeIII };
std::string_view to_string(TransitionType t);

struct TransitionReport {
    ThresholdPoint lambda0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    std::optional<double> alpha;
    std::optional<double> b;
    TransitionType type = TransitionType::TranscriticalMixed;
    Vec3 omega = Vec3::Zero();
    Vec3 omega_star = Vec3::Zero();
    double rho1 = 0;

    /// Nonzero steady amplitudes y of the reduced equation at the given sigma11:
    /// Dirichlet -sigma/alpha; Neumann +-sqrt(-sigma/b) where real.
    std::vector<double> branch_amplitudes(double sigma11) const;
    /// "attractor", "saddle", "repeller" or "none" for the bifurcated points.
    std::string branch_stability(double sigma11) const;
};

struct TransitionInputs {
    ThresholdPoint lambda0;
    std::optional<double> alpha;
    std::optional<double> b;
    Vec3 omega = Vec3::Zero();
    Vec3 omega_star = Vec3::Zero();
};

TransitionReport classify_transition(const TransitionInputs& in);

/// Full analysis at a threshold using the given (possibly rescaled) eigenvectors.
TransitionReport transition_report(const ThresholdPoint& tp, const Vec3& omega, const Vec3& omega_star);
/// Same with the unnormalized formula eigenvectors at sigma = 0.
TransitionReport analyze_transition(const ThresholdPoint& tp);

struct PredictedBranch {
    double y = 0;
    std::array<std::vector<double>, 3> fields;  ///< y * omega_j * e1(x)
};

struct PredictedState {
    double sigma11 = 0;
    std::vector<PredictedBranch> branches;
    std::string note;  ///< accuracy disclaimer: leading order, o(|sigma11|) or o(sigma11^(1/2)) error
};

/// Bifurcated state near the threshold evaluated on the grid points `x`.
/// Throws OutOfTheory for Type II / Type III (no attractor prediction) and
/// BoundaryMismatch when p_near.bc differs from the report.
PredictedState predicted_state(const TransitionReport& report, const ModelParams& p_near, std::span<const double> x);

}  // namespace mtphase
