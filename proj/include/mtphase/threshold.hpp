#pragma once

#include "mtphase/model.hpp"
#include "mtphase/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mtphase {

/// Affine path through parameter space: params(s) = base + s * direction,
/// with s restricted to [lo, hi]. Direction components follow kAllParams.
struct ParameterRay {
    ModelParams base;
    std::array<double, 10> direction{};
    double lo = 0.0;
    double hi = 1.0;

    ModelParams at(double s) const;

    /// Varies a single field: params(s).which == s.
    static ParameterRay along(const ModelParams& base, Param which, double lo, double hi);
    /// d1 = d2 = d3 = s.
    static ParameterRay equal_diffusion(const ModelParams& base, double lo, double hi);
    /// d = s * (d1, d2, d3) of the base.
    static ParameterRay scaled_diffusion(const ModelParams& base, double lo, double hi);
};

struct StabilityReport {
    bool cond2_ok = false;
    bool principal_zero = false;      ///< |sigma_11| <= 1e-8 and real
    bool principal_simple = false;    ///< sigma_12, sigma_13 bounded away from zero
    bool others_negative = false;     ///< Re sigma_12, Re sigma_13 < 0
    bool higher_modes_stable = false; ///< Re sigma_mi < 0 for 2 <= m <= m_max
    bool traces_negative = false;
    bool p1_positive = false;
    bool scaling_consistent = false;  ///< E_m(lambda0) == E_1(kappa, rho_m/rho1 d) and that point lies in Lambda^-
    bool skipped = false;             ///< k5 K2 > C1 failed; remaining checks not evaluated
    int m_max = 0;
    double max_higher_re = 0.0;       ///< max Re sigma over modes 2..m_max
    double p1 = 0.0;

    bool all_passed() const {
        return cond2_ok && principal_zero && principal_simple && others_negative && higher_modes_stable &&
               traces_negative && p1_positive && scaling_consistent;
    }
};

struct ThresholdPoint {
    ModelParams lambda0;
    double ray_coord = 0.0;
    Complex sigma11{};
    double detE1 = 0.0;
    double crossing_derivative = 0.0;  ///< d/ds det E1 along the ray
    bool near_tangential = false;      ///< |crossing_derivative| < 1e-8
    StabilityReport stability;
};

double det_E1(const ModelParams& p);

/// Safeguarded secant/bisection on det E1 along the ray. Throws NoSignChange
/// when the bracket does not straddle the threshold and ComplexCrossing when
/// the principal eigenvalue at the root is not real.
ThresholdPoint find_threshold(const ParameterRay& ray, double tol = 1e-10, int m_max = 50);

enum class Region { Minus, Zero, Plus };
std::string_view to_string(Region r);

struct RegionReport {
    Region region = Region::Minus;
    bool cond2_ok = false;  ///< false (k5 K2 <= C1): the classification is outside its hypotheses
    Complex sigma11{};
};

RegionReport classify_region(const ModelParams& p);

StabilityReport exchange_of_stability_report(const ThresholdPoint& tp, int m_max = 50);
StabilityReport exchange_of_stability_report(const ModelParams& lambda0, int m_max = 50);

/// Two-parameter slice through a base point: params(x, y) = base + x*dx + y*dy.
struct ParameterPlane {
    ModelParams base;
    std::array<double, 10> x_direction{};
    std::array<double, 10> y_direction{};
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    std::string x_name = "x", y_name = "y";

    ModelParams at(double x, double y) const;

    /// Axis names are field names ("k7", "d2", ...) or "d" for d1 = d2 = d3.
    /// Throws ValidationError on unknown names.
    static ParameterPlane from_names(const ModelParams& base, const std::string& x_axis, double x_lo, double x_hi,
                                     const std::string& y_axis, double y_lo, double y_hi);
};

/// Direction vector for an axis name ("k7", "d1", ... or "d" for equal diffusion).
/// Returns nullopt for unknown names.
std::optional<std::array<double, 10>> axis_direction(const std::string& name);
/// Base with the axis coordinates zeroed so that base + s*direction puts s on the axis.
ModelParams zero_axis(ModelParams base, const std::array<double, 10>& direction);

struct CurveVertex {
    double x = 0.0;
    double y = 0.0;
    ThresholdPoint point;
};

struct ThresholdCurve {
    std::vector<CurveVertex> vertices;
    bool step_collapsed = false;  ///< set when tracing stopped early; vertices hold the last good points
};

/// Pseudo-arclength continuation of det E1 = 0 across the plane, starting
/// from the first bracketing vertical ray. Throws CurveLeftDomain when no
/// crossing exists in the slice and StepCollapse if the very first steps fail.
ThresholdCurve trace_threshold_curve(const ParameterPlane& plane, int n_points);

}  // namespace mtphase
