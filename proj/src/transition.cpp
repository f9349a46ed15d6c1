#include "mtphase/transition.hpp"

#include "mtphase/errors.hpp"

#include <cmath>
#include <numbers>

namespace mtphase {

ModeIntegrals mode_integrals(double ell, BoundaryCondition bc) {
    ModeIntegrals mi;
    mi.e1_e1 = 0.5 * ell;
    mi.e2_e2 = 0.5 * ell;
    if (bc == BoundaryCondition::Dirichlet) {
        mi.e1_cubed = 4.0 * ell / (3.0 * std::numbers::pi);
        mi.e1sq_e2 = 0.0;  // sin^2 is symmetric about ell/2, sin(2 pi x/ell) antisymmetric
    } else {
        mi.e1_cubed = 0.0;
        mi.e1sq_e2 = 0.25 * ell;
    }
    return mi;
}

double alpha_closed_form(const ModelParams& p, const Vec3& omega, const Vec3& omega_star) {
    const auto mi = mode_integrals(p.ell, BoundaryCondition::Dirichlet);
    return mi.e1_cubed / mi.e1_e1 * nonlinearity_F(p, omega).dot(omega_star) / omega.dot(omega_star);
}

double alpha_by_quadrature(const ModelParams& p, const Vec3& omega, const Vec3& omega_star, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = p.ell / intervals;
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= intervals; ++k) {
        const double x = k * h;
        const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const double e = std::sin(std::numbers::pi * x / p.ell);
        const Vec3 field = e * omega;
        const Vec3 adj = e * omega_star;
        num += w * nonlinearity_F(p, field).dot(adj);
        den += w * field.dot(adj);
    }
    return num / den;
}

namespace {

void require_bc(const ModelParams& p, BoundaryCondition bc, const char* what) {
    if (p.bc != bc) {
        throw Error(ErrorCode::BoundaryMismatch,
                    std::string(what) + " requires " + std::string(to_string(bc)) + " boundary conditions");
    }
}

Vec3 principal_omega(const ModelParams& p) {
    return omega_formula(mode_matrix(p, first_laplacian_eigenvalue(p)), 0.0).real();
}

Vec3 principal_omega_star(const ModelParams& p) {
    return omega_star_formula(mode_matrix(p, first_laplacian_eigenvalue(p)), 0.0).real();
}

}  // namespace

AlphaResult alpha_dirichlet(const ThresholdPoint& tp) {
    const ModelParams& p = tp.lambda0;
    require_bc(p, BoundaryCondition::Dirichlet, "alpha_dirichlet");
    AlphaResult r;
    r.omega = principal_omega(p);
    r.omega_star = principal_omega_star(p);
    r.alpha = alpha_closed_form(p, r.omega, r.omega_star);
    r.alpha_quadrature = alpha_by_quadrature(p, r.omega, r.omega_star);
    if (std::abs(r.alpha) <= kDegenerateAlpha) {
        throw Error(ErrorCode::DegenerateAlpha, "quadratic coefficient alpha vanishes at the threshold");
    }
    return r;
}

CenterManifoldCoefficients center_manifold_coefficients(const ModelParams& p, const Vec3& omega) {
    const auto mi = mode_integrals(p.ell, BoundaryCondition::NeumannZeroAverage);
    const LaplacianMode mode2 = laplacian_mode(p.ell, 2, BoundaryCondition::NeumannZeroAverage);
    const ModeSpectrum ms = mode_spectrum(p, mode2);
    const CVec3 f_omega = nonlinearity_F(p, omega).cast<Complex>();

    CenterManifoldCoefficients cm;
    cm.sigmaI = ms.sigma;
    cm.omegaI = ms.omega;
    cm.omegaI_star = ms.omega_star;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(ms.sigma[i]) <= kResonanceGuard) {
            throw Error(ErrorCode::Resonance, "mode-2 eigenvalue " + std::to_string(i + 1) + " has |sigma| = " +
                                                  std::to_string(std::abs(ms.sigma[i])) + " <= resonance guard");
        }
        const Complex norm = ms.sigma[i] * mi.e2_e2 * bdot(ms.omega[i], ms.omega_star[i]);
        cm.yI_coeff[i] = -mi.e1sq_e2 * bdot(f_omega, ms.omega_star[i]) / norm;
    }
    return cm;
}

CenterManifoldCoefficients center_manifold_coefficients(const ThresholdPoint& tp) {
    require_bc(tp.lambda0, BoundaryCondition::NeumannZeroAverage, "center_manifold_coefficients");
    return center_manifold_coefficients(tp.lambda0, principal_omega(tp.lambda0));
}

BResult b_from_vectors(const ModelParams& p, const Vec3& omega, const Vec3& omega_star) {
    const auto mi = mode_integrals(p.ell, BoundaryCondition::NeumannZeroAverage);
    BResult r;
    r.omega = omega;
    r.omega_star = omega_star;
    r.cm = center_manifold_coefficients(p, omega);

    // b^j_{2,i} = omega^j omega^3_{2,i} + omega^3 omega^j_{2,i}, j = 1, 2.
    Complex B1 = 0.0, B2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const CVec3& wi = r.cm.omegaI[i];
        const Complex b1 = omega(0) * wi(2) + omega(2) * wi(0);
        const Complex b2 = omega(1) * wi(2) + omega(2) * wi(1);
        B1 += b1 * r.cm.yI_coeff[i];
        B2 += b2 * r.cm.yI_coeff[i];
    }
    r.B1 = mi.e1sq_e2 * B1;
    r.B2 = mi.e1sq_e2 * B2;
    const Complex c1 = p.k5 * r.B2 - p.k7 * r.B1;
    const Complex c3 = -p.k3 * r.B1;
    const Complex dot = c1 * omega_star(0) - c1 * omega_star(1) + c3 * omega_star(2);
    r.B = Vec3(c1.real(), -c1.real(), c3.real());
    r.B_dot_omega_star = dot.real();
    const double denom = mi.e1_e1 * omega.dot(omega_star);
    r.b = dot.real() / denom;
    r.b_imag = dot.imag() / denom;
    r.degenerate = std::abs(r.b) <= kTypeIIIBand;
    return r;
}

BResult b_neumann(const ThresholdPoint& tp) {
    require_bc(tp.lambda0, BoundaryCondition::NeumannZeroAverage, "b_neumann");
    return b_from_vectors(tp.lambda0, principal_omega(tp.lambda0), principal_omega_star(tp.lambda0));
}

double constrained_C1(const ModelParams& p) {
    const double rho1 = first_laplacian_eigenvalue(p);
    return p.k3 * (p.k5 + rho1 * p.d2) / p.k7;
}

ConstrainedBCheck constrained_b_two_path(const ThresholdPoint& tp) {
    const ModelParams& p = tp.lambda0;
    if (p.k1 != 1.0 || p.E != 1.0) {
        throw Error(ErrorCode::ValidationError, "the simplified expression is stated for k1 = E = 1", "k1");
    }
    const double rho = first_laplacian_eigenvalue(p);
    const double lhs = p.C1 * p.k7, rhs = p.k3 * (p.k5 + rho * p.d2);
    if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs))) {
        throw Error(ErrorCode::ValidationError, "C1 k7 = k3 (k5 + rho1 d2) does not hold", "C1");
    }
    const BResult br = b_neumann(tp);
    ConstrainedBCheck rc;
    rc.full = br.B_dot_omega_star;
    rc.simplified =
        -(p.k3 * p.k5 * rho / p.k7) * (p.k5 * p.d1 + p.k7 * p.d2 + p.d1 * p.d2 * rho) * br.B2.real();
    rc.rel_diff = std::abs(rc.full - rc.simplified) / std::max(std::abs(rc.full), std::abs(rc.simplified));
    return rc;
}

std::string_view to_string(TransitionType t) {
    switch (t) {
        case TransitionType::TranscriticalMixed: return "transcritical_mixed";
        case TransitionType::TypeI: return "type_I";
        case TransitionType::TypeII: return "type_II";
        case TransitionType::TypeIII: return "type_III";
    }
    return "?";
}

std::vector<double> TransitionReport::branch_amplitudes(double sigma11) const {
    if (bc == BoundaryCondition::Dirichlet) {
        if (!alpha || sigma11 == 0.0) return {};
        return {-sigma11 / *alpha};
    }
    if (!b || type == TransitionType::TypeIII) return {};
    const double y2 = -sigma11 / *b;
    if (!(y2 > 0.0)) return {};
    const double y = std::sqrt(y2);
    return {y, -y};
}

std::string TransitionReport::branch_stability(double sigma11) const {
    if (branch_amplitudes(sigma11).empty()) return "none";
    if (bc == BoundaryCondition::Dirichlet) return sigma11 > 0.0 ? "attractor" : "saddle";
    return type == TransitionType::TypeI ? "attractor" : "repeller";
}

TransitionReport classify_transition(const TransitionInputs& in) {
    TransitionReport r;
    r.lambda0 = in.lambda0;
    r.bc = in.lambda0.lambda0.bc;
    r.alpha = in.alpha;
    r.b = in.b;
    r.omega = in.omega;
    r.omega_star = in.omega_star;
    r.rho1 = first_laplacian_eigenvalue(in.lambda0.lambda0);
    if (r.bc == BoundaryCondition::Dirichlet) {
        r.type = TransitionType::TranscriticalMixed;
    } else if (!r.b || std::abs(*r.b) <= kTypeIIIBand) {
        r.type = TransitionType::TypeIII;
    } else {
        r.type = *r.b < 0.0 ? TransitionType::TypeI : TransitionType::TypeII;
    }
    return r;
}

TransitionReport transition_report(const ThresholdPoint& tp, const Vec3& omega, const Vec3& omega_star) {
    TransitionInputs in{tp, std::nullopt, std::nullopt, omega, omega_star};
    if (tp.lambda0.bc == BoundaryCondition::Dirichlet) {
        in.alpha = alpha_closed_form(tp.lambda0, omega, omega_star);
        if (std::abs(*in.alpha) <= kDegenerateAlpha) {
            throw Error(ErrorCode::DegenerateAlpha, "quadratic coefficient alpha vanishes at the threshold");
        }
    } else {
        in.b = b_from_vectors(tp.lambda0, omega, omega_star).b;
    }
    return classify_transition(in);
}

TransitionReport analyze_transition(const ThresholdPoint& tp) {
    return transition_report(tp, principal_omega(tp.lambda0), principal_omega_star(tp.lambda0));
}

PredictedState predicted_state(const TransitionReport& report, const ModelParams& p_near, std::span<const double> x) {
    if (p_near.bc != report.bc) {
        throw Error(ErrorCode::BoundaryMismatch, "p_near uses a different boundary condition than the report");
    }
    if (report.type == TransitionType::TypeII || report.type == TransitionType::TypeIII) {
        throw Error(ErrorCode::OutOfTheory, std::string(to_string(report.type)) +
                                                " transitions have no local attractor to predict");
    }
    PredictedState out;
    out.sigma11 = solve_spectrum(mode_matrix(p_near, first_laplacian_eigenvalue(p_near)))[0].real();
    const LaplacianMode e1 = laplacian_mode(p_near.ell, 1, p_near.bc);

    std::vector<double> ys = report.branch_amplitudes(out.sigma11);
    if (report.bc == BoundaryCondition::Dirichlet) {
        out.note = "leading order; error o(|sigma11|)";
    } else {
        out.note = "leading order; error o(sigma11^(1/2))";
    }
    if (ys.empty()) ys.push_back(0.0);
    for (double y : ys) {
        PredictedBranch br;
        br.y = y;
        for (int j = 0; j < 3; ++j) {
            br.fields[j].reserve(x.size());
            for (double xi : x) br.fields[j].push_back(y * report.omega(j) * e1.eval(xi));
        }
        out.branches.push_back(std::move(br));
    }
    return out;
}

}  // namespace mtphase
