#pragma once

#include "mtphase/errors.hpp"
#include "mtphase/model.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace mtphase {

/// Uniform 1D grid on (0, ell). Dirichlet uses N interior nodes x_i = i*dx,
/// dx = ell/(N+1); Neumann uses N cells centred at (i + 1/2)*dx, dx = ell/N.
struct Grid {
    int N = 0;
    double ell = 0;
    double dx = 0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    std::vector<double> x;
};

inline constexpr int kMinGridPoints = 16;

/// Throws GridTooCoarse for N < 16.
Grid make_grid(const ModelParams& p, int N);

/// Eigenvalue of the discrete -Laplacian on the m-th sine/cosine mode:
/// 4 sin^2(m pi dx / (2 ell)) / dx^2 (exact for both grid types).
double discrete_laplacian_eigenvalue(const Grid& grid, int m);

/// out = Laplacian(u) with the grid's boundary closure.
void apply_laplacian(const Grid& grid, const std::vector<double>& u, std::vector<double>& out);

/// Deviation fields (u1, u2, u3) = (Mg, Ms, Df) - steady state.
struct FieldState {
    double t = 0;
    std::array<std::vector<double>, 3> u;
};

class StepUnstableError : public Error {
public:
    StepUnstableError(std::string message, FieldState last_good)
        : Error(ErrorCode::StepUnstable, std::move(message)), last_good_(std::move(last_good)) {}
    const FieldState& last_good() const noexcept { return last_good_; }

private:
    FieldState last_good_;
};

struct StepOptions {
    bool nonlinear = true;
    bool project_mean = true;  ///< only meaningful under NeumannZeroAverage
};

/// 0.1 / ||A||_inf: bound for the explicit reaction part; diffusion is implicit.
double max_stable_dt(const ModelParams& p);

/// IMEX stepper: Crank-Nicolson diffusion with a Heun (explicit trapezoidal)
/// treatment of the reaction terms. Fixed points of the step are exactly the
/// steady states of the semi-discrete system, independent of dt.
class Stepper {
public:
    Stepper(const ModelParams& p, Grid grid, double dt, StepOptions options = {});

    /// Throws StepUnstableError on non-finite or overflowing values.
    FieldState step(const FieldState& state) const;

    /// Pointwise reaction term A w (+ F(w) when nonlinear).
    std::array<std::vector<double>, 3> reaction(const FieldState& state) const;

    const Grid& grid() const { return grid_; }
    double dt() const { return dt_; }

private:
    void solve_implicit(int component, std::vector<double>& rhs) const;
    void remove_mean(FieldState& s) const;

    ModelParams p_;
    Grid grid_;
    double dt_;
    StepOptions options_;
    Mat3 A_;
    // Thomas factorization of (I - dt/2 d_j L) per component.
    std::array<std::vector<double>, 3> c_prime_;
    std::array<std::vector<double>, 3> inv_denom_;
    std::array<std::vector<double>, 3> lower_;
};

FieldState step(const FieldState& state, const ModelParams& p, const Grid& grid, double dt, StepOptions options = {});

/// y(t) = <w, w*_11> / <w_11, w*_11> by discrete quadrature on the grid.
struct AmplitudeProjector {
    Vec3 omega = Vec3::Zero();
    Vec3 omega_star = Vec3::Zero();
    std::vector<double> e1;
    double denom = 1;

    double project(const FieldState& s) const;
};

AmplitudeProjector make_projector(const Grid& grid, const Vec3& omega, const Vec3& omega_star);
/// Projector onto the principal (mode 1) eigenpair of p. Throws ComplexCrossing
/// if the principal eigenvalue is complex.
AmplitudeProjector principal_projector(const ModelParams& p, const Grid& grid);

struct AmplitudeSeries {
    std::vector<double> times;
    std::vector<double> y;
};

enum class InitialKind { Zero, Aligned, Random };

struct InitialCondition {
    InitialKind kind = InitialKind::Aligned;
    double epsilon = 1e-2;           ///< aligned: w = epsilon * omega_11 * e1(x)
    double random_amplitude = 1e-4;  ///< random: relative to the steady-state component
    std::uint64_t seed = 0;
};

FieldState make_initial_state(const ModelParams& p, const Grid& grid, const InitialCondition& ic,
                              const AmplitudeProjector& projector);

struct SimulationSpec {
    int N = 256;
    double dt = 0;  ///< 0 selects max_stable_dt
    double T = 1000;
    int record_every = 10;
    InitialCondition ic;
    StepOptions options;
    bool stop_on_saturation = false;
    double saturation_tol = 1e-8;
    int saturation_window = 100;
    double amplitude_cap = std::numeric_limits<double>::infinity();  ///< stop once |y| >= cap
    double amplitude_floor = 0;                                      ///< stop once |y| <= floor (checked at recordings)
    std::optional<std::array<Vec3, 2>> projector_vectors;           ///< defaults to the principal pair of p
};

enum class StopReason { TimeReached, Saturated, AmplitudeCap, AmplitudeFloor };

struct SimulationResult {
    FieldState final_state;
    AmplitudeSeries series;
    StopReason reason = StopReason::TimeReached;
    Grid grid;
    double dt = 0;
};

SimulationResult simulate(const ModelParams& p, const SimulationSpec& spec);

enum class AmplitudeModel { Quadratic, Cubic };

struct FitResult {
    double sigma = 0;
    double coef = 0;      ///< alpha (quadratic) or b (cubic)
    double residual = 0;  ///< RMS of the dy/dt misfit
    double r_squared = 0;
    bool poor_fit = false;  ///< r_squared < 0.99
    std::size_t samples = 0;
};

/// Least-squares fit of finite-differenced dy/dt against sigma*y + coef*y^2
/// (or y^3), using samples with |y| <= y_max. Throws InsufficientData.
FitResult fit_amplitude_dynamics(const AmplitudeSeries& series, AmplitudeModel model,
                                 double y_max = std::numeric_limits<double>::infinity());

}  // namespace mtphase
