#include "support.hpp"

#include "mtphase/errors.hpp"
#include "mtphase/simulator.hpp"
#include "mtphase/spectral.hpp"
#include "mtphase/threshold.hpp"
#include "mtphase/verification.hpp"

#include <doctest.h>

#include <numbers>
#include <numeric>

using namespace mtphase;

namespace {

/// Principal discrete growth rate: largest real eigenvalue of A - rho_h D (Eigen).
double discrete_rate(const ModelParams& p, const Grid& g) {
    return testing::max_real_eigenvalue(p, discrete_laplacian_eigenvalue(g, 1));
}

ModelParams canonical_with_sigma(double sigma, BoundaryCondition bc) {
    const ModelParams base = testing::canonical(0.2, bc);
    const ParameterRay ray = ParameterRay::equal_diffusion(base, 0.01, 1.0);
    return point_with_sigma11(ray, find_threshold(ray).ray_coord, sigma);
}

}  // namespace

TEST_CASE("grids") {
    const ModelParams p = testing::canonical(0.2);
    CHECK_THROWS_AS(make_grid(p, 8), Error);
    try {
        make_grid(p, 8);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridTooCoarse);
    }
    const Grid d = make_grid(p, 31);
    CHECK(d.dx == doctest::Approx(std::numbers::pi / 32));
    CHECK(d.x.front() == doctest::Approx(d.dx));
    ModelParams q = p;
    q.bc = BoundaryCondition::NeumannZeroAverage;
    const Grid n = make_grid(q, 32);
    CHECK(n.dx == doctest::Approx(std::numbers::pi / 32));
    CHECK(n.x.front() == doctest::Approx(n.dx / 2));
}

TEST_CASE("discrete Laplacian eigenpairs") {
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::NeumannZeroAverage}) {
        ModelParams p = testing::canonical(0.2, bc);
        p.ell = 3.0;
        const Grid g = make_grid(p, 255);
        for (int m = 1; m <= 3; ++m) {
            std::vector<double> u(g.N), lu;
            for (int i = 0; i < g.N; ++i) u[i] = laplacian_mode(p.ell, m, bc).eval(g.x[i]);
            apply_laplacian(g, u, lu);
            const double lambda_h = discrete_laplacian_eigenvalue(g, m);
            for (int i = 0; i < g.N; ++i) CHECK(lu[i] == doctest::Approx(-lambda_h * u[i]).epsilon(1e-9).scale(1.0));
            const double rho = laplacian_mode(p.ell, m, bc).rho;
            if (m == 1) CHECK(std::abs(lambda_h - rho) / rho <= 1e-4);
        }
    }
}

TEST_CASE("zero deviation is preserved exactly") {
    const ModelParams p = testing::canonical(0.2);
    const Grid g = make_grid(p, 16);
    const Stepper stepper(p, g, max_stable_dt(p));
    FieldState s;
    for (auto& c : s.u) c.assign(g.N, 0.0);
    for (int n = 0; n < 100000; ++n) s = stepper.step(s);
    for (const auto& c : s.u)
        for (double v : c) CHECK(v == 0.0);
}

TEST_CASE("linear mode grows like exp(sigma t)") {
    const ModelParams p = canonical_with_sigma(0.01, BoundaryCondition::Dirichlet);
    SimulationSpec spec;
    spec.N = 127;
    spec.T = 100;
    spec.options.nonlinear = false;
    spec.ic.epsilon = 1e-3;
    const SimulationResult r = simulate(p, spec);
    const double expected = 1e-3 * std::exp(discrete_rate(p, r.grid) * r.final_state.t);
    CHECK(r.series.y.back() == doctest::Approx(expected).epsilon(0.01));
    // Continuous-in-space prediction is equally close at this resolution.
    CHECK(r.series.y.back() == doctest::Approx(1e-3 * std::exp(0.01 * r.final_state.t)).epsilon(0.01));
}

TEST_CASE("Neumann mode in Lambda^- decays at the predicted rate") {
    const ModelParams p = canonical_with_sigma(-0.02, BoundaryCondition::NeumannZeroAverage);
    SimulationSpec spec;
    spec.N = 64;
    spec.T = 100;
    spec.record_every = 40;
    spec.options.nonlinear = false;
    spec.ic.epsilon = 1e-3;
    const SimulationResult r = simulate(p, spec);
    // Slope of log y over the second half (fast modes have died out).
    const auto& t = r.series.times;
    const auto& y = r.series.y;
    const std::size_t a = y.size() / 2, b = y.size() - 1;
    const double slope = (std::log(y[b]) - std::log(y[a])) / (t[b] - t[a]);
    CHECK(slope == doctest::Approx(discrete_rate(p, r.grid)).epsilon(1e-3));
    CHECK(slope == doctest::Approx(-0.02).epsilon(0.01));
}

TEST_CASE("zero-average projection keeps the mean at zero") {
    const ModelParams p = testing::canonical(0.3, BoundaryCondition::NeumannZeroAverage);
    SimulationSpec spec;
    spec.N = 32;
    spec.T = 10;
    spec.ic.kind = InitialKind::Random;
    spec.ic.random_amplitude = 0.05;
    spec.ic.seed = 7;
    const SimulationResult r = simulate(p, spec);
    for (const auto& c : r.final_state.u) {
        const double mean = std::accumulate(c.begin(), c.end(), 0.0) / c.size();
        CHECK(std::abs(mean) <= 1e-15);
    }
}

TEST_CASE("random initial conditions are reproducible") {
    const ModelParams p = testing::canonical(0.3);
    const Grid g = make_grid(p, 32);
    const AmplitudeProjector proj = principal_projector(p, g);
    InitialCondition ic;
    ic.kind = InitialKind::Random;
    ic.seed = 99;
    const FieldState a = make_initial_state(p, g, ic, proj);
    const FieldState b = make_initial_state(p, g, ic, proj);
    CHECK(a.u == b.u);
    ic.seed = 100;
    CHECK(make_initial_state(p, g, ic, proj).u != a.u);
}

TEST_CASE("oversized step is reported as StepUnstable") {
    const ModelParams p = testing::canonical(0.2);
    SimulationSpec spec;
    spec.N = 32;
    spec.dt = 100 * max_stable_dt(p);
    spec.T = 1e6;
    spec.ic.kind = InitialKind::Random;
    spec.ic.random_amplitude = 0.1;
    bool thrown = false;
    try {
        simulate(p, spec);
    } catch (const StepUnstableError& e) {
        thrown = true;
        CHECK(e.code() == ErrorCode::StepUnstable);
        for (const auto& c : e.last_good().u)
            for (double v : c) CHECK(std::isfinite(v));
    }
    CHECK(thrown);
}

TEST_CASE("amplitude cap and floor stop the run") {
    const ModelParams p = canonical_with_sigma(0.02, BoundaryCondition::Dirichlet);
    SimulationSpec spec;
    spec.N = 32;
    spec.T = 1e4;
    spec.options.nonlinear = false;
    spec.ic.epsilon = 1e-3;
    spec.amplitude_cap = 1e-2;
    const SimulationResult grow = simulate(p, spec);
    CHECK(grow.reason == StopReason::AmplitudeCap);
    CHECK(grow.series.y.back() >= 1e-2);

    const ModelParams q = canonical_with_sigma(-0.05, BoundaryCondition::Dirichlet);
    spec.amplitude_cap = INFINITY;
    spec.amplitude_floor = 1e-6;
    const SimulationResult decay = simulate(q, spec);
    CHECK(decay.reason == StopReason::AmplitudeFloor);
    CHECK(std::abs(decay.series.y.back()) <= 1e-6);
    CHECK(decay.final_state.t < 1e4);
}

TEST_CASE("amplitude fit recovers a cubic ODE") {
    // y' = s y + b y^3 has 1/y^2 = -b/s + (1/y0^2 + b/s) exp(-2 s t).
    const double s = 0.01, b = -0.05, y0 = 0.01;
    AmplitudeSeries series;
    for (int i = 0; i <= 4000; ++i) {
        const double t = 0.25 * i;
        series.times.push_back(t);
        series.y.push_back(1.0 / std::sqrt(-b / s + (1.0 / (y0 * y0) + b / s) * std::exp(-2 * s * t)));
    }
    const FitResult fit = fit_amplitude_dynamics(series, AmplitudeModel::Cubic);
    CHECK(fit.sigma == doctest::Approx(s).epsilon(1e-3));
    CHECK(fit.coef == doctest::Approx(b).epsilon(1e-3));
    CHECK_FALSE(fit.poor_fit);
}

TEST_CASE("amplitude fit recovers a quadratic ODE") {
    // y' = s y + a y^2: logistic, y = s / (c exp(-s t) - a), c = s/y0 + a.
    const double s = 0.02, a = 0.07, y0 = 0.01;
    AmplitudeSeries series;
    for (int i = 0; i <= 2000; ++i) {  // t <= 100, well before the blow-up at t ~ 169
        const double t = 0.05 * i;
        series.times.push_back(t);
        series.y.push_back(s / ((s / y0 + a) * std::exp(-s * t) - a));
    }
    const FitResult fit = fit_amplitude_dynamics(series, AmplitudeModel::Quadratic);
    CHECK(fit.sigma == doctest::Approx(s).epsilon(1e-3));
    CHECK(fit.coef == doctest::Approx(a).epsilon(1e-3));
}

TEST_CASE("amplitude fit needs data") {
    AmplitudeSeries series{{0, 1, 2}, {1, 2, 3}};
    try {
        fit_amplitude_dynamics(series, AmplitudeModel::Cubic);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
}
