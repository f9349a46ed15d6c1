#include "mtphase/simulator.hpp"

#include "mtphase/spectral.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace mtphase {

Grid make_grid(const ModelParams& p, int N) {
    if (N < kMinGridPoints) {
        throw Error(ErrorCode::GridTooCoarse,
                    "grid needs at least " + std::to_string(kMinGridPoints) + " points, got " + std::to_string(N), "N");
    }
    Grid g;
    g.N = N;
    g.ell = p.ell;
    g.bc = p.bc;
    g.x.resize(static_cast<std::size_t>(N));
    if (p.bc == BoundaryCondition::Dirichlet) {
        g.dx = p.ell / (N + 1);
        for (int i = 0; i < N; ++i) g.x[i] = (i + 1) * g.dx;
    } else {
        g.dx = p.ell / N;
        for (int i = 0; i < N; ++i) g.x[i] = (i + 0.5) * g.dx;
    }
    return g;
}

double discrete_laplacian_eigenvalue(const Grid& grid, int m) {
    const double s = std::sin(m * std::numbers::pi * grid.dx / (2.0 * grid.ell));
    return 4.0 * s * s / (grid.dx * grid.dx);
}

void apply_laplacian(const Grid& grid, const std::vector<double>& u, std::vector<double>& out) {
    const int n = grid.N;
    const double inv = 1.0 / (grid.dx * grid.dx);
    out.resize(u.size());
    // Dirichlet: zero ghost values; Neumann: mirrored ghosts u_{-1} = u_0, u_N = u_{N-1}.
    const bool dir = grid.bc == BoundaryCondition::Dirichlet;
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : (dir ? 0.0 : u[0]);
        const double right = i < n - 1 ? u[i + 1] : (dir ? 0.0 : u[n - 1]);
        out[i] = (left - 2.0 * u[i] + right) * inv;
    }
}

double max_stable_dt(const ModelParams& p) {
    return 0.1 / linearization_matrix(p).cwiseAbs().rowwise().sum().maxCoeff();
}

Stepper::Stepper(const ModelParams& p, Grid grid, double dt, StepOptions options)
    : p_(p), grid_(std::move(grid)), dt_(dt), options_(options), A_(linearization_matrix(p)) {
    const int n = grid_.N;
    const double r_base = 0.5 * dt_ / (grid_.dx * grid_.dx);
    const std::array<double, 3> d{p.d1, p.d2, p.d3};
    const bool dir = grid_.bc == BoundaryCondition::Dirichlet;
    for (int j = 0; j < 3; ++j) {
        const double r = r_base * d[j];
        // Tridiagonal (-r, 1 + 2r, -r); Neumann end rows are (1 + r, -r).
        std::vector<double> diag(n, 1.0 + 2.0 * r), off(n, -r);
        if (!dir) {
            diag[0] = 1.0 + r;
            diag[n - 1] = 1.0 + r;
        }
        auto& cp = c_prime_[j];
        auto& inv = inv_denom_[j];
        cp.assign(n, 0.0);
        inv.assign(n, 0.0);
        lower_[j] = off;
        inv[0] = 1.0 / diag[0];
        cp[0] = off[0] * inv[0];
        for (int i = 1; i < n; ++i) {
            inv[i] = 1.0 / (diag[i] - off[i] * cp[i - 1]);
            cp[i] = off[i] * inv[i];
        }
    }
}

void Stepper::solve_implicit(int component, std::vector<double>& rhs) const {
    const auto& cp = c_prime_[component];
    const auto& inv = inv_denom_[component];
    const auto& low = lower_[component];
    const int n = grid_.N;
    rhs[0] *= inv[0];
    for (int i = 1; i < n; ++i) rhs[i] = (rhs[i] - low[i] * rhs[i - 1]) * inv[i];
    for (int i = n - 2; i >= 0; --i) rhs[i] -= cp[i] * rhs[i + 1];
}

std::array<std::vector<double>, 3> Stepper::reaction(const FieldState& s) const {
    const int n = grid_.N;
    std::array<std::vector<double>, 3> r;
    for (auto& v : r) v.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 w(s.u[0][i], s.u[1][i], s.u[2][i]);
        Vec3 f = A_ * w;
        if (options_.nonlinear) f += nonlinearity_F(p_, w);
        r[0][i] = f(0);
        r[1][i] = f(1);
        r[2][i] = f(2);
    }
    return r;
}

void Stepper::remove_mean(FieldState& s) const {
    for (auto& v : s.u) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        for (double& x : v) x -= mean;
    }
}

FieldState Stepper::step(const FieldState& state) const {
    const int n = grid_.N;
    const std::array<double, 3> d{p_.d1, p_.d2, p_.d3};

    // Explicit half of Crank-Nicolson: u + dt/2 d_j L u.
    std::array<std::vector<double>, 3> base;
    std::vector<double> lap;
    for (int j = 0; j < 3; ++j) {
        apply_laplacian(grid_, state.u[j], lap);
        base[j].resize(n);
        for (int i = 0; i < n; ++i) base[j][i] = state.u[j][i] + 0.5 * dt_ * d[j] * lap[i];
    }

    const auto r0 = reaction(state);
    FieldState pred;
    pred.t = state.t + dt_;
    for (int j = 0; j < 3; ++j) {
        pred.u[j] = base[j];
        for (int i = 0; i < n; ++i) pred.u[j][i] += dt_ * r0[j][i];
        solve_implicit(j, pred.u[j]);
    }

    const auto r1 = reaction(pred);
    FieldState next;
    next.t = pred.t;
    for (int j = 0; j < 3; ++j) {
        next.u[j] = std::move(base[j]);
        for (int i = 0; i < n; ++i) next.u[j][i] += 0.5 * dt_ * (r0[j][i] + r1[j][i]);
        solve_implicit(j, next.u[j]);
    }
    if (options_.project_mean && grid_.bc == BoundaryCondition::NeumannZeroAverage) remove_mean(next);

    for (const auto& v : next.u) {
        for (double x : v) {
            if (!std::isfinite(x) || std::abs(x) > 1e12) {
                throw StepUnstableError("non-finite or overflowing field at t = " + std::to_string(next.t), state);
            }
        }
    }
    return next;
}

FieldState step(const FieldState& state, const ModelParams& p, const Grid& grid, double dt, StepOptions options) {
    return Stepper(p, grid, dt, options).step(state);
}

double AmplitudeProjector::project(const FieldState& s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) {
        acc += e1[i] * (s.u[0][i] * omega_star(0) + s.u[1][i] * omega_star(1) + s.u[2][i] * omega_star(2));
    }
    return acc / denom;
}

AmplitudeProjector make_projector(const Grid& grid, const Vec3& omega, const Vec3& omega_star) {
    AmplitudeProjector pr;
    pr.omega = omega;
    pr.omega_star = omega_star;
    const LaplacianMode mode = laplacian_mode(grid.ell, 1, grid.bc);
    pr.e1.reserve(grid.x.size());
    double e1sq = 0.0;
    for (double x : grid.x) {
        pr.e1.push_back(mode.eval(x));
        e1sq += pr.e1.back() * pr.e1.back();
    }
    pr.denom = e1sq * omega.dot(omega_star);
    return pr;
}

AmplitudeProjector principal_projector(const ModelParams& p, const Grid& grid) {
    const Mat3 e = mode_matrix(p, first_laplacian_eigenvalue(p));
    const Complex s = solve_spectrum(e)[0];
    if (std::abs(s.imag()) > 1e-8) {
        throw Error(ErrorCode::ComplexCrossing, "principal eigenvalue is complex; no real amplitude projection");
    }
    return make_projector(grid, omega_formula(e, s.real()).real(), omega_star_formula(e, s.real()).real());
}

FieldState make_initial_state(const ModelParams& p, const Grid& grid, const InitialCondition& ic,
                              const AmplitudeProjector& projector) {
    FieldState s;
    for (auto& v : s.u) v.assign(static_cast<std::size_t>(grid.N), 0.0);
    switch (ic.kind) {
        case InitialKind::Zero:
            break;
        case InitialKind::Aligned:
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < grid.N; ++i) s.u[j][i] = ic.epsilon * projector.omega(j) * projector.e1[i];
            }
            break;
        case InitialKind::Random: {
            const Vec3 ss = steady_state(p).as_vector();
            std::mt19937_64 rng(ic.seed);
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < grid.N; ++i) s.u[j][i] = ic.random_amplitude * ss(j) * unit(rng);
            }
            if (grid.bc == BoundaryCondition::NeumannZeroAverage) {
                for (auto& v : s.u) {
                    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
                    for (double& x : v) x -= mean;
                }
            }
            break;
        }
    }
    return s;
}

SimulationResult simulate(const ModelParams& p, const SimulationSpec& spec) {
    SimulationResult res;
    res.grid = make_grid(p, spec.N);
    res.dt = spec.dt > 0.0 ? spec.dt : max_stable_dt(p);
    const AmplitudeProjector projector =
        spec.projector_vectors ? make_projector(res.grid, (*spec.projector_vectors)[0], (*spec.projector_vectors)[1])
                               : principal_projector(p, res.grid);
    const Stepper stepper(p, res.grid, res.dt, spec.options);

    FieldState state = make_initial_state(p, res.grid, spec.ic, projector);
    auto record = [&](const FieldState& s) {
        res.series.times.push_back(s.t);
        res.series.y.push_back(projector.project(s));
    };
    record(state);

    const auto steps = static_cast<long long>(std::llround(spec.T / res.dt));
    const int every = std::max(1, spec.record_every);
    res.reason = StopReason::TimeReached;
    for (long long n = 1; n <= steps; ++n) {
        state = stepper.step(state);
        // Keep the nominal time grid exact instead of accumulating dt.
        state.t = static_cast<double>(n) * res.dt;
        // Growing runs can blow up between recordings, so the cap is checked every step.
        if (std::isfinite(spec.amplitude_cap) && std::abs(projector.project(state)) >= spec.amplitude_cap) {
            record(state);
            res.reason = StopReason::AmplitudeCap;
            break;
        }
        if (n % every != 0 && n != steps) continue;
        record(state);
        const auto& y = res.series.y;
        if (spec.amplitude_floor > 0.0 && std::abs(y.back()) <= spec.amplitude_floor) {
            res.reason = StopReason::AmplitudeFloor;
            break;
        }
        const auto window = static_cast<std::size_t>(std::max(1, spec.saturation_window));
        if (spec.stop_on_saturation && y.size() > window &&
            std::abs(y.back() - y[y.size() - 1 - window]) < spec.saturation_tol) {
            res.reason = StopReason::Saturated;
            break;
        }
    }
    res.final_state = std::move(state);
    return res;
}

FitResult fit_amplitude_dynamics(const AmplitudeSeries& series, AmplitudeModel model, double y_max) {
    const auto& t = series.times;
    const auto& y = series.y;
    if (t.size() != y.size()) throw Error(ErrorCode::InsufficientData, "times and amplitudes differ in length");

    const int power = model == AmplitudeModel::Quadratic ? 2 : 3;
    // Normal equations for dy/dt = sigma*y + coef*y^power.
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    std::vector<std::array<double, 3>> rows;  // (y, y^power, dy/dt)
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (std::abs(y[i]) > y_max) continue;
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        if (!(h0 > 0.0 && h1 > 0.0)) continue;
        // Second-order three-point derivative on a possibly nonuniform grid.
        const double dydt = -h1 / (h0 * (h0 + h1)) * y[i - 1] + (h1 - h0) / (h0 * h1) * y[i] +
                            h0 / (h1 * (h0 + h1)) * y[i + 1];
        const double a = y[i], b = std::pow(y[i], power);
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        r1 += a * dydt;
        r2 += b * dydt;
        rows.push_back({a, b, dydt});
    }
    if (rows.size() < 5) throw Error(ErrorCode::InsufficientData, "fewer than 5 usable samples for the fit");
    const double det = s11 * s22 - s12 * s12;
    if (!(std::abs(det) > 0.0)) throw Error(ErrorCode::InsufficientData, "amplitude samples do not determine the fit");

    FitResult fit;
    fit.samples = rows.size();
    fit.sigma = (r1 * s22 - r2 * s12) / det;
    fit.coef = (s11 * r2 - s12 * r1) / det;
    double ss_res = 0, mean = 0;
    for (const auto& r : rows) mean += r[2];
    mean /= static_cast<double>(rows.size());
    double ss_tot = 0;
    for (const auto& r : rows) {
        const double e = r[2] - fit.sigma * r[0] - fit.coef * r[1];
        ss_res += e * e;
        ss_tot += (r[2] - mean) * (r[2] - mean);
    }
    fit.residual = std::sqrt(ss_res / static_cast<double>(rows.size()));
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.poor_fit = fit.r_squared < 0.99;
    return fit;
}

}  // namespace mtphase
