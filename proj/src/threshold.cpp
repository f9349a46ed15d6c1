#include "mtphase/threshold.hpp"

#include "mtphase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mtphase {

namespace {

ModelParams offset(const ModelParams& base, const std::array<double, 10>& dir, double s) {
    ModelParams p = base;
    for (std::size_t i = 0; i < kAllParams.size(); ++i) {
        if (dir[i] != 0.0) set_param(p, kAllParams[i], get_param(base, kAllParams[i]) + s * dir[i]);
    }
    return p;
}

std::size_t index_of(Param which) {
    return static_cast<std::size_t>(std::find(kAllParams.begin(), kAllParams.end(), which) - kAllParams.begin());
}

}  // namespace

ModelParams ParameterRay::at(double s) const { return offset(base, direction, s); }

ParameterRay ParameterRay::along(const ModelParams& base, Param which, double lo, double hi) {
    ParameterRay ray;
    ray.direction[index_of(which)] = 1.0;
    ray.base = zero_axis(base, ray.direction);
    ray.lo = lo;
    ray.hi = hi;
    return ray;
}

ParameterRay ParameterRay::equal_diffusion(const ModelParams& base, double lo, double hi) {
    ParameterRay ray;
    ray.direction = *axis_direction("d");
    ray.base = zero_axis(base, ray.direction);
    ray.lo = lo;
    ray.hi = hi;
    return ray;
}

ParameterRay ParameterRay::scaled_diffusion(const ModelParams& base, double lo, double hi) {
    ParameterRay ray;
    ray.direction[index_of(Param::d1)] = base.d1;
    ray.direction[index_of(Param::d2)] = base.d2;
    ray.direction[index_of(Param::d3)] = base.d3;
    ray.base = zero_axis(base, ray.direction);
    ray.lo = lo;
    ray.hi = hi;
    return ray;
}

std::optional<std::array<double, 10>> axis_direction(const std::string& name) {
    std::array<double, 10> dir{};
    if (name == "d") {
        dir[index_of(Param::d1)] = dir[index_of(Param::d2)] = dir[index_of(Param::d3)] = 1.0;
        return dir;
    }
    const auto which = parse_param(name);
    if (!which) return std::nullopt;
    dir[index_of(*which)] = 1.0;
    return dir;
}

ModelParams zero_axis(ModelParams base, const std::array<double, 10>& direction) {
    for (std::size_t i = 0; i < kAllParams.size(); ++i) {
        if (direction[i] != 0.0) set_param(base, kAllParams[i], 0.0);
    }
    return base;
}

double det_E1(const ModelParams& p) { return mode_matrix(p, first_laplacian_eigenvalue(p)).determinant(); }

std::string_view to_string(Region r) {
    switch (r) {
        case Region::Minus: return "minus";
        case Region::Zero: return "zero";
        case Region::Plus: return "plus";
    }
    return "?";
}

RegionReport classify_region(const ModelParams& p) {
    validate_params(p);
    RegionReport r;
    const double rho1 = first_laplacian_eigenvalue(p);
    r.cond2_ok = check_conditions(p, rho1).cond2_ok;
    r.sigma11 = solve_spectrum(mode_matrix(p, rho1))[0];
    if (std::abs(r.sigma11) <= 1e-8) {
        r.region = Region::Zero;
    } else {
        r.region = r.sigma11.real() > 0.0 ? Region::Plus : Region::Minus;
    }
    return r;
}

StabilityReport exchange_of_stability_report(const ModelParams& lambda0, int m_max) {
    StabilityReport rep;
    rep.m_max = m_max;
    const double rho1 = first_laplacian_eigenvalue(lambda0);
    rep.cond2_ok = check_conditions(lambda0, rho1).cond2_ok;
    if (!rep.cond2_ok) {
        rep.skipped = true;
        return rep;
    }

    const auto spectra = mode_spectra(lambda0, m_max);
    const Spectrum& s1 = spectra.front().sigma;
    rep.principal_zero = std::abs(s1[0]) <= 1e-8 && std::abs(s1[0].imag()) <= 1e-8;
    rep.principal_simple = std::abs(s1[1]) > 1e-8 && std::abs(s1[2]) > 1e-8;
    rep.others_negative = s1[1].real() < 0.0 && s1[2].real() < 0.0;

    rep.traces_negative = true;
    rep.p1_positive = true;
    rep.scaling_consistent = true;
    rep.max_higher_re = -std::numeric_limits<double>::infinity();
    rep.p1 = characteristic_coefficients(mode_matrix(lambda0, rho1))[1];
    for (const auto& ms : spectra) {
        const Mat3 em = mode_matrix(lambda0, ms.mode.rho);
        rep.traces_negative = rep.traces_negative && em.trace() < 0.0;
        rep.p1_positive = rep.p1_positive && characteristic_coefficients(em)[1] > 0.0;
        if (ms.mode.m < 2) continue;
        rep.max_higher_re = std::max(rep.max_higher_re, ms.sigma[0].real());

        // E_m(kappa, d) must equal E_1(kappa, rho_m/rho1 d), and the latter must be stable.
        ModelParams scaled = lambda0;
        const double f = ms.mode.rho / rho1;
        scaled.d1 *= f;
        scaled.d2 *= f;
        scaled.d3 *= f;
        const Mat3 e1_scaled = mode_matrix(scaled, rho1);
        const double scale = std::max(1.0, em.cwiseAbs().maxCoeff());
        const bool same = (em - e1_scaled).cwiseAbs().maxCoeff() <= 1e-14 * scale;
        const bool stable = solve_spectrum(e1_scaled)[0].real() < 0.0 && e1_scaled.determinant() < 0.0;
        rep.scaling_consistent = rep.scaling_consistent && same && stable;
    }
    rep.higher_modes_stable = m_max < 2 || rep.max_higher_re < 0.0;
    return rep;
}

StabilityReport exchange_of_stability_report(const ThresholdPoint& tp, int m_max) {
    return exchange_of_stability_report(tp.lambda0, m_max);
}

ThresholdPoint find_threshold(const ParameterRay& ray, double tol, int m_max) {
    auto f = [&](double s) { return det_E1(ray.at(s)); };
    double a = std::min(ray.lo, ray.hi), b = std::max(ray.lo, ray.hi);
    double fa = f(a), fb = f(b);
    if (!(fa * fb <= 0.0)) {
        throw Error(ErrorCode::NoSignChange, "det E1 has the same sign at both ends of [" + std::to_string(a) + ", " +
                                                 std::to_string(b) + "]");
    }

    double root = fa == 0.0 ? a : b;
    if (fa != 0.0 && fb != 0.0) {
        double width_prev = b - a, width_prev2 = b - a;
        bool force_bisect = false;
        for (int it = 0; it < 400; ++it) {
            const double width = b - a;
            if (width <= tol * std::max({1.0, std::abs(a), std::abs(b)})) break;
            double s = b - fb * (b - a) / (fb - fa);
            if (force_bisect || !(s > a && s < b)) s = 0.5 * (a + b);
            const double fs = f(s);
            if (fs == 0.0) {
                a = b = s;
                fa = fb = 0.0;
                break;
            }
            if ((fs < 0.0) == (fa < 0.0)) {
                a = s;
                fa = fs;
            } else {
                b = s;
                fb = fs;
            }
            // Regula falsi can stall with one end fixed; bisect unless the bracket halves every two steps.
            force_bisect = (b - a) > 0.5 * width_prev2;
            width_prev2 = width_prev;
            width_prev = b - a;
        }
        root = std::abs(fa) <= std::abs(fb) ? a : b;
    }

    ThresholdPoint tp;
    tp.ray_coord = root;
    tp.lambda0 = ray.at(root);
    tp.detE1 = det_E1(tp.lambda0);
    const double h = 1e-6 * std::max({1e-3, std::abs(root), ray.hi - ray.lo});
    tp.crossing_derivative = (f(root + h) - f(root - h)) / (2.0 * h);
    tp.near_tangential = std::abs(tp.crossing_derivative) < 1e-8;
    tp.sigma11 = solve_spectrum(mode_matrix(tp.lambda0, first_laplacian_eigenvalue(tp.lambda0)))[0];
    if (std::abs(tp.sigma11.imag()) > 1e-8) {
        throw Error(ErrorCode::ComplexCrossing, "principal eigenvalue at the threshold is complex (Im = " +
                                                    std::to_string(tp.sigma11.imag()) + ")");
    }
    tp.stability = exchange_of_stability_report(tp.lambda0, m_max);
    return tp;
}

// ---------------------------------------------------------------------------
// Continuation of det E1 = 0 in a two-parameter slice.

ModelParams ParameterPlane::at(double x, double y) const {
    return offset(offset(base, x_direction, x), y_direction, y);
}

ParameterPlane ParameterPlane::from_names(const ModelParams& base, const std::string& x_axis, double x_lo,
                                          double x_hi, const std::string& y_axis, double y_lo, double y_hi) {
    const auto dx = axis_direction(x_axis);
    const auto dy = axis_direction(y_axis);
    if (!dx) throw Error(ErrorCode::ValidationError, "unknown axis " + x_axis, x_axis);
    if (!dy) throw Error(ErrorCode::ValidationError, "unknown axis " + y_axis, y_axis);
    ParameterPlane plane;
    plane.x_direction = *dx;
    plane.y_direction = *dy;
    plane.base = zero_axis(zero_axis(base, *dx), *dy);
    plane.x_lo = x_lo;
    plane.x_hi = x_hi;
    plane.y_lo = y_lo;
    plane.y_hi = y_hi;
    plane.x_name = x_axis;
    plane.y_name = y_axis;
    return plane;
}

namespace {

struct Normalized {
    const ParameterPlane& plane;

    double x(double u) const { return plane.x_lo + u * (plane.x_hi - plane.x_lo); }
    double y(double v) const { return plane.y_lo + v * (plane.y_hi - plane.y_lo); }
    double g(const Eigen::Vector2d& z) const { return det_E1(plane.at(x(z(0)), y(z(1)))); }
    Eigen::Vector2d grad(const Eigen::Vector2d& z) const {
        constexpr double h = 1e-6;
        const Eigen::Vector2d ex(h, 0), ey(0, h);
        return {(g(z + ex) - g(z - ex)) / (2 * h), (g(z + ey) - g(z - ey)) / (2 * h)};
    }
    bool inside(const Eigen::Vector2d& z) const {
        return z(0) >= -1e-12 && z(0) <= 1 + 1e-12 && z(1) >= -1e-12 && z(1) <= 1 + 1e-12;
    }

    ParameterRay vertical(double u, double v_lo, double v_hi) const {
        ParameterRay ray;
        ray.base = plane.at(x(u), 0.0);
        ray.direction = plane.y_direction;
        ray.lo = y(v_lo);
        ray.hi = y(v_hi);
        return ray;
    }
    ParameterRay horizontal(double v, double u_lo, double u_hi) const {
        ParameterRay ray;
        ray.base = plane.at(0.0, y(v));
        ray.direction = plane.x_direction;
        ray.lo = x(u_lo);
        ray.hi = x(u_hi);
        return ray;
    }
};

// Re-verify a continuation vertex with a bracketed root solve along a
// vertical ray, falling back to a horizontal one for steep curve segments.
std::optional<CurveVertex> verify_vertex(const Normalized& nz, const Eigen::Vector2d& z) {
    for (double delta : {1e-4, 1e-3, 1e-2}) {
        for (int orient = 0; orient < 2; ++orient) {
            try {
                if (orient == 0) {
                    const auto tp = find_threshold(nz.vertical(z(0), z(1) - delta, z(1) + delta));
                    return CurveVertex{nz.x(z(0)), tp.ray_coord, tp};
                }
                const auto tp = find_threshold(nz.horizontal(z(1), z(0) - delta, z(0) + delta));
                return CurveVertex{tp.ray_coord, nz.y(z(1)), tp};
            } catch (const Error&) {
            }
        }
    }
    return std::nullopt;
}

// Traces from z0 in direction sign*tangent until the curve leaves the unit square.
// Returns the vertices (excluding z0) and whether tracing stopped on step collapse.
std::pair<std::vector<CurveVertex>, bool> trace_branch(const Normalized& nz, Eigen::Vector2d z, double sign,
                                                       int max_vertices) {
    constexpr double h_init = 1e-2, h_max = 5e-2, h_min = 1e-7;
    std::vector<CurveVertex> out;
    double h = h_init;
    Eigen::Vector2d prev_t(0, 0);
    while (static_cast<int>(out.size()) < max_vertices) {
        const Eigen::Vector2d gr = nz.grad(z);
        if (gr.norm() == 0.0) return {out, true};
        Eigen::Vector2d t(-gr(1), gr(0));
        t.normalize();
        if (prev_t.squaredNorm() == 0.0) {
            if (t(0) * sign < 0.0 || (t(0) == 0.0 && t(1) * sign < 0.0)) t = -t;
        } else if (t.dot(prev_t) < 0.0) {
            t = -t;
        }

        bool accepted = false;
        while (!accepted) {
            if (h < h_min) return {out, true};
            const Eigen::Vector2d zp = z + h * t;
            Eigen::Vector2d zc = zp;
            int iters = 0;
            bool converged = false;
            for (; iters < 10; ++iters) {
                const double gv = nz.g(zc);
                const Eigen::Vector2d gg = nz.grad(zc);
                Eigen::Matrix2d J;
                J << gg(0), gg(1), t(0), t(1);
                const Eigen::Vector2d r(gv, t.dot(zc - zp));
                const Eigen::Vector2d dz = J.fullPivLu().solve(r);
                if (!dz.allFinite()) break;
                zc -= dz;
                if (dz.norm() <= 1e-12) {
                    converged = true;
                    break;
                }
            }
            if (!converged || (zc - z).norm() > 2.0 * h) {
                h *= 0.5;
                continue;
            }
            accepted = true;
            if (!nz.inside(zc)) return {out, false};
            const auto vertex = verify_vertex(nz, zc);
            if (!vertex) return {out, true};
            out.push_back(*vertex);
            prev_t = t;
            z = zc;
            if (iters <= 3) h = std::min(1.5 * h, h_max);
        }
    }
    return {out, false};
}

}  // namespace

ThresholdCurve trace_threshold_curve(const ParameterPlane& plane, int n_points) {
    const Normalized nz{plane};

    // Locate a starting crossing on a vertical ray, scanning columns left to right.
    std::optional<CurveVertex> start;
    Eigen::Vector2d z0;
    constexpr int columns = 21, rows = 41;
    for (int i = 0; i < columns && !start; ++i) {
        const double u = static_cast<double>(i) / (columns - 1);
        double prev = nz.g({u, 0.0});
        for (int j = 1; j < rows && !start; ++j) {
            const double v = static_cast<double>(j) / (rows - 1);
            const double cur = nz.g({u, v});
            if (prev * cur <= 0.0) {
                try {
                    const double v_lo = static_cast<double>(j - 1) / (rows - 1);
                    const auto tp = find_threshold(nz.vertical(u, v_lo, v));
                    start = CurveVertex{nz.x(u), tp.ray_coord, tp};
                    z0 = {u, (tp.ray_coord - plane.y_lo) / (plane.y_hi - plane.y_lo)};
                } catch (const Error&) {
                }
            }
            prev = cur;
        }
    }
    if (!start) throw Error(ErrorCode::CurveLeftDomain, "no det E1 = 0 crossing found in the slice");

    const int budget = std::max(1, n_points - 1);
    auto [backward, back_collapsed] = trace_branch(nz, z0, -1.0, budget / 2);
    auto [forward, fwd_collapsed] =
        trace_branch(nz, z0, +1.0, budget - static_cast<int>(backward.size()));

    ThresholdCurve curve;
    curve.vertices.assign(backward.rbegin(), backward.rend());
    curve.vertices.push_back(*start);
    curve.vertices.insert(curve.vertices.end(), forward.begin(), forward.end());
    curve.step_collapsed = back_collapsed || fwd_collapsed;
    if (curve.vertices.size() == 1 && curve.step_collapsed) {
        throw Error(ErrorCode::StepCollapse, "continuation could not leave the starting point");
    }
    return curve;
}

}  // namespace mtphase
