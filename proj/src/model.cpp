#include "mtphase/model.hpp"

#include "mtphase/errors.hpp"

#include <cmath>
#include <string>

namespace mtphase {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
        case ErrorCode::K1NotPositive: return "K1NotPositive";
        case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::ComplexCrossing: return "ComplexCrossing";
        case ErrorCode::CurveLeftDomain: return "CurveLeftDomain";
        case ErrorCode::StepCollapse: return "StepCollapse";
        case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
        case ErrorCode::Resonance: return "Resonance";
        case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
        case ErrorCode::OutOfTheory: return "OutOfTheory";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::StepUnstable: return "StepUnstable";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::string_view to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann_zero_average";
}

std::optional<BoundaryCondition> parse_boundary_condition(std::string_view text) {
    if (text == "dirichlet") return BoundaryCondition::Dirichlet;
    if (text == "neumann_zero_average" || text == "neumann") return BoundaryCondition::NeumannZeroAverage;
    return std::nullopt;
}

std::string_view param_name(Param p) {
    switch (p) {
        case Param::k1: return "k1";
        case Param::k3: return "k3";
        case Param::k5: return "k5";
        case Param::k7: return "k7";
        case Param::C1: return "C1";
        case Param::E: return "E";
        case Param::d1: return "d1";
        case Param::d2: return "d2";
        case Param::d3: return "d3";
        case Param::ell: return "ell";
    }
    return "?";
}

std::optional<Param> parse_param(std::string_view name) {
    for (Param p : kAllParams) {
        if (param_name(p) == name) return p;
    }
    return std::nullopt;
}

double get_param(const ModelParams& p, Param which) {
    switch (which) {
        case Param::k1: return p.k1;
        case Param::k3: return p.k3;
        case Param::k5: return p.k5;
        case Param::k7: return p.k7;
        case Param::C1: return p.C1;
        case Param::E: return p.E;
        case Param::d1: return p.d1;
        case Param::d2: return p.d2;
        case Param::d3: return p.d3;
        case Param::ell: return p.ell;
    }
    return 0.0;
}

void set_param(ModelParams& p, Param which, double value) {
    switch (which) {
        case Param::k1: p.k1 = value; break;
        case Param::k3: p.k3 = value; break;
        case Param::k5: p.k5 = value; break;
        case Param::k7: p.k7 = value; break;
        case Param::C1: p.C1 = value; break;
        case Param::E: p.E = value; break;
        case Param::d1: p.d1 = value; break;
        case Param::d2: p.d2 = value; break;
        case Param::d3: p.d3 = value; break;
        case Param::ell: p.ell = value; break;
    }
}

ModelParams validate_params(const ModelParams& raw) {
    for (Param which : kAllParams) {
        const double v = get_param(raw, which);
        if (!std::isfinite(v) || !(v > 0.0)) {
            const auto name = std::string(param_name(which));
            throw Error(ErrorCode::NonPositiveParameter, "parameter " + name + " must be strictly positive", name);
        }
    }
    if (!(raw.K1() > 0.0)) {
        throw Error(ErrorCode::K1NotPositive,
                    "K1 = C1*k1*k7 - k3*k5*E = " + std::to_string(raw.K1()) + " is not positive", "K1");
    }
    return raw;
}

SteadyState steady_state(const ModelParams& p) {
    SteadyState ss;
    ss.K1 = p.K1();
    ss.K2 = p.K2();
    ss.Mg = p.k1 * p.k1 * p.C1 / ss.K1;
    ss.Ms = p.k1 * p.k3 * p.E / ss.K1;
    ss.Df = p.E / p.k1;
    return ss;
}

Vec3 reaction_rhs(const ModelParams& p, const Vec3& state) {
    const double Mg = state(0), Ms = state(1), Df = state(2);
    return {-p.k7 * Df * Mg + p.k5 * Df * Ms + p.k1 * Df,
            p.k7 * Df * Mg - p.k5 * Df * Ms - p.E,
            -p.k3 * Df * Mg + p.C1 * Ms - p.k1 * Df + p.E};
}

Mat3 linearization_matrix(const ModelParams& p) {
    const double r = p.E / p.k1;
    Mat3 A;
    A << -p.k7 * r, p.k5 * r, 0.0,
          p.k7 * r, -p.k5 * r, p.k1,
         -p.k3 * r, p.C1, -p.K2();
    return A;
}

Mat3 diffusion_matrix(const ModelParams& p) { return Vec3(p.d1, p.d2, p.d3).asDiagonal(); }

ConditionReport check_conditions(const ModelParams& p, double rho1) {
    ConditionReport r;
    const double K2 = p.K2();
    r.K1 = p.K1();
    r.cond0_ok = r.K1 > 0.0;
    r.k5K2_minus_C1 = p.k5 * K2 - p.C1;
    r.cond2_ok = r.k5K2_minus_C1 > 0.0;
    r.cond1_lhs_rhs = {p.C1, p.d2 * p.d3 * rho1 * rho1 + p.d2 * K2 * rho1};

    auto distinct = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    r.cond1_ok = distinct(p.k5 * K2, p.C1) && distinct(r.cond1_lhs_rhs[0], r.cond1_lhs_rhs[1]);
    return r;
}

}  // namespace mtphase
