#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string_view>

namespace mtphase {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class BoundaryCondition { Dirichlet, NeumannZeroAverage };

std::string_view to_string(BoundaryCondition bc);
std::optional<BoundaryCondition> parse_boundary_condition(std::string_view text);

/// Control and rate parameters of the microtubule model.
///
/// Rates: nucleation N = k1*Df, growth V_g = k3*Df, shrinkage V_s = C1,
/// catastrophe k7*Df, rescue k5*Df, extinction E (constant). d1..d3 are the
/// diffusion rates of (Mg, Ms, Df) on the interval (0, ell).
struct ModelParams {
    double k1 = 1.0;
    double k3 = 1.0;
    double k5 = 1.0;
    double k7 = 2.0;
    double C1 = 1.0;
    double E = 1.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double ell = 3.14159265358979323846;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;

    /// K1 = C1*k1*k7 - k3*k5*E; must be positive for a feasible steady state.
    double K1() const { return C1 * k1 * k7 - k3 * k5 * E; }
    /// K2 = k1*(1 + C1*k1*k3/K1).
    double K2() const { return k1 * (1.0 + C1 * k1 * k3 / K1()); }

    bool operator==(const ModelParams&) const = default;
};

/// Numeric fields addressable by name, in a fixed order used by rays, sweeps
/// and CSV schemas.
enum class Param { k1, k3, k5, k7, C1, E, d1, d2, d3, ell };
inline constexpr std::array<Param, 10> kAllParams{Param::k1, Param::k3, Param::k5, Param::k7, Param::C1,
                                                  Param::E,  Param::d1, Param::d2, Param::d3, Param::ell};

std::string_view param_name(Param p);
std::optional<Param> parse_param(std::string_view name);
double get_param(const ModelParams& p, Param which);
void set_param(ModelParams& p, Param which, double value);

struct SteadyState {
    double Mg = 0;
    double Ms = 0;
    double Df = 0;
    double K1 = 0;
    double K2 = 0;

    Vec3 as_vector() const { return {Mg, Ms, Df}; }
};

struct ConditionReport {
    bool cond0_ok = false;
    bool cond1_ok = false;
    bool cond2_ok = false;
    double K1 = 0;
    double k5K2_minus_C1 = 0;
    /// The two sides of the non-degeneracy inequality: C1 and d2*d3*rho1^2 + d2*K2*rho1.
    std::array<double, 2> cond1_lhs_rhs{};
};

/// Throws Error(NonPositiveParameter, detail = field name) or Error(K1NotPositive).
ModelParams validate_params(const ModelParams& raw);

SteadyState steady_state(const ModelParams& p);

/// Reaction part of the PDE right-hand side at a point value (Mg, Ms, Df).
Vec3 reaction_rhs(const ModelParams& p, const Vec3& state);

/// Jacobian of the reaction terms at the uniform steady state.
Mat3 linearization_matrix(const ModelParams& p);

Mat3 diffusion_matrix(const ModelParams& p);

/// Quadratic remainder: reaction_rhs(ss + w) = A*w + F(w) exactly.
template <typename Vector>
Vector nonlinearity(const ModelParams& p, const Vector& w) {
    const auto cross = p.k5 * w(1) * w(2) - p.k7 * w(0) * w(2);
    Vector out;
    out(0) = cross;
    out(1) = -cross;
    out(2) = -p.k3 * w(0) * w(2);
    return out;
}

inline Vec3 nonlinearity_F(const ModelParams& p, const Vec3& w) { return nonlinearity(p, w); }

ConditionReport check_conditions(const ModelParams& p, double rho1);

}  // namespace mtphase
