#include "mtphase/commands.hpp"

#include "mtphase/output.hpp"
#include "mtphase/simulator.hpp"
#include "mtphase/spectral.hpp"
#include "mtphase/sweep.hpp"
#include "mtphase/threshold.hpp"
#include "mtphase/transition.hpp"
#include "mtphase/verification.hpp"

#include <cstdio>

namespace mtphase {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError:
        case ErrorCode::UnknownKey:
            return kExitConfig;
        case ErrorCode::Io:
            return kExitInternal;
        default:
            return kExitNumerical;
    }
}

namespace {

using Row = std::vector<std::string>;

std::string fmt(double x) { return format_double(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

const std::vector<std::string> kParamColumns{"k1", "k3", "k5", "k7", "C1", "E", "d1", "d2", "d3", "ell", "bc"};

void append_params(Row& row, const ModelParams& p) {
    for (Param q : kAllParams) row.push_back(fmt(get_param(p, q)));
    row.emplace_back(to_string(p.bc));
}

std::vector<std::string> with_params(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), kParamColumns.begin(), kParamColumns.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

ParameterRay make_ray(const RunConfig& c) {
    const auto& a = c.analysis;
    if (a.ray_axis == "d") return ParameterRay::equal_diffusion(c.model, a.ray_lo, a.ray_hi);
    if (a.ray_axis == "d_scale") return ParameterRay::scaled_diffusion(c.model, a.ray_lo, a.ray_hi);
    return ParameterRay::along(c.model, *parse_param(a.ray_axis), a.ray_lo, a.ray_hi);
}

/// Threshold columns shared by threshold.csv and transition.csv.
const std::vector<std::string> kThresholdTail{"detE1",        "sigma11_re",         "sigma11_im",
                                              "cond2_ok",     "crossing_derivative", "near_tangential",
                                              "exchange_ok",    "residual_forward",    "residual_adjoint"};

void append_threshold(Row& row, const ThresholdPoint& tp) {
    row.push_back(fmt(tp.ray_coord));
    append_params(row, tp.lambda0);
    const Mat3 e = mode_matrix(tp.lambda0, first_laplacian_eigenvalue(tp.lambda0));
    const Complex s = tp.sigma11;
    row.push_back(fmt(tp.detE1));
    row.push_back(fmt(s.real()));
    row.push_back(fmt(s.imag()));
    row.push_back(fmt(tp.stability.cond2_ok));
    row.push_back(fmt(tp.crossing_derivative));
    row.push_back(fmt(tp.near_tangential));
    row.push_back(fmt(tp.stability.all_passed()));
    row.push_back(fmt(eigen_residual(e, s, omega_formula(e, s), false)));
    row.push_back(fmt(eigen_residual(e, s, omega_star_formula(e, s), true)));
}

void cmd_steady_state(const RunConfig& c, RunWriter& w) {
    const ModelParams& p = c.model;
    const SteadyState ss = steady_state(p);
    const double rho1 = first_laplacian_eigenvalue(p);
    const ConditionReport cr = check_conditions(p, rho1);
    const Vec3 res = reaction_rhs(p, ss.as_vector());
    CsvTable t(with_params({}, {"Mg", "Ms", "Df", "K1", "K2", "rho1", "cond0_ok", "cond1_ok", "cond2_ok",
                                "residual_max_abs"}));
    Row row;
    append_params(row, p);
    for (double v : {ss.Mg, ss.Ms, ss.Df, ss.K1, ss.K2, rho1}) row.push_back(fmt(v));
    row.push_back(fmt(cr.cond0_ok));
    row.push_back(fmt(cr.cond1_ok));
    row.push_back(fmt(cr.cond2_ok));
    row.push_back(fmt(res.cwiseAbs().maxCoeff()));
    t.add_row(std::move(row));
    w.write("steady_state.csv", t.str());
}

void cmd_spectrum(const RunConfig& c, RunWriter& w) {
    CsvTable t({"m", "rho", "basis", "i", "sigma_re", "sigma_im", "residual_forward", "residual_adjoint"});
    for (const ModeSpectrum& ms : mode_spectra(c.model, c.analysis.M_max)) {
        const Mat3 e = mode_matrix(c.model, ms.mode.rho);
        for (int i = 0; i < 3; ++i) {
            t.add_row({std::to_string(ms.mode.m), fmt(ms.mode.rho), ms.mode.basis == Basis::Sin ? "sin" : "cos",
                       std::to_string(i + 1), fmt(ms.sigma[i].real()), fmt(ms.sigma[i].imag()),
                       fmt(eigen_residual(e, ms.sigma[i], ms.omega[i], false)),
                       fmt(eigen_residual(e, ms.sigma[i], ms.omega_star[i], true))});
        }
    }
    w.write("spectrum.csv", t.str());
}

void cmd_threshold(const RunConfig& c, RunWriter& w) {
    const ThresholdPoint tp = find_threshold(make_ray(c), c.analysis.threshold_tol, c.analysis.M_max);
    CsvTable t(with_params({"ray_coord"}, kThresholdTail));
    Row row;
    append_threshold(row, tp);
    t.add_row(std::move(row));
    w.write("threshold.csv", t.str());
}

void cmd_transition(const RunConfig& c, RunWriter& w) {
    const ThresholdPoint tp = find_threshold(make_ray(c), c.analysis.threshold_tol, c.analysis.M_max);
    const TransitionReport tr = analyze_transition(tp);
    std::vector<std::string> tail = kThresholdTail;
    for (const char* col : {"type", "rho1", "alpha", "alpha_quadrature", "b", "b_imag", "omega1", "omega2", "omega3",
                            "omega_star1", "omega_star2", "omega_star3"}) {
        tail.emplace_back(col);
    }
    CsvTable t(with_params({"ray_coord"}, tail));
    Row row;
    append_threshold(row, tp);
    row.emplace_back(to_string(tr.type));
    row.push_back(fmt(tr.rho1));
    if (tr.bc == BoundaryCondition::Dirichlet) {
        const AlphaResult a = alpha_dirichlet(tp);
        row.push_back(fmt(a.alpha));
        row.push_back(fmt(a.alpha_quadrature));
        row.insert(row.end(), {"", ""});
    } else {
        const BResult b = b_neumann(tp);
        row.insert(row.end(), {"", ""});
        row.push_back(fmt(b.b));
        row.push_back(fmt(b.b_imag));
    }
    for (int j = 0; j < 3; ++j) row.push_back(fmt(tr.omega(j)));
    for (int j = 0; j < 3; ++j) row.push_back(fmt(tr.omega_star(j)));
    t.add_row(std::move(row));
    w.write("transition.csv", t.str());
}

std::string final_state_csv(const ModelParams& p, const Grid& g, const FieldState& s) {
    const SteadyState ss = steady_state(p);
    CsvTable t({"x", "u1", "u2", "u3", "Mg", "Ms", "Df"});
    for (int i = 0; i < g.N; ++i) {
        t.add_row({fmt(g.x[i]), fmt(s.u[0][i]), fmt(s.u[1][i]), fmt(s.u[2][i]), fmt(ss.Mg + s.u[0][i]),
                   fmt(ss.Ms + s.u[1][i]), fmt(ss.Df + s.u[2][i])});
    }
    return t.str();
}

int cmd_simulate(const RunConfig& c, std::uint64_t seed, RunWriter& w, std::ostream& log) {
    const auto& sc = c.simulate;
    SimulationSpec spec;
    spec.N = sc.N;
    spec.dt = sc.dt;
    spec.T = sc.T;
    spec.record_every = sc.record_every;
    spec.ic.kind = sc.ic == "zero" ? InitialKind::Zero : sc.ic == "random" ? InitialKind::Random : InitialKind::Aligned;
    spec.ic.epsilon = sc.ic_epsilon;
    spec.ic.random_amplitude = sc.ic_amplitude;
    spec.ic.seed = seed;
    spec.options.nonlinear = sc.nonlinear;
    spec.options.project_mean = sc.project_mean;
    spec.stop_on_saturation = sc.stop_on_saturation;

    SimulationResult res;
    try {
        res = simulate(c.model, spec);
    } catch (const StepUnstableError& e) {
        w.write("final_state.csv", final_state_csv(c.model, make_grid(c.model, sc.N), e.last_good()));
        w.add_manifest_entry("simulation_status", "StepUnstable");
        log << "error: StepUnstable: " << e.what() << " (last good state written)\n";
        return kExitNumerical;
    }

    CsvTable amp({"t", "y"});
    for (std::size_t i = 0; i < res.series.times.size(); ++i) amp.add_row({fmt(res.series.times[i]), fmt(res.series.y[i])});
    w.write("amplitude.csv", amp.str());
    w.write("final_state.csv", final_state_csv(c.model, res.grid, res.final_state));

    static constexpr const char* reasons[] = {"time_reached", "saturated", "amplitude_cap", "amplitude_floor"};
    CsvTable summary({"N", "dx", "dt", "t_end", "stop_reason", "y_final", "sigma11_re", "sigma11_im"});
    const Complex s11 = solve_spectrum(mode_matrix(c.model, first_laplacian_eigenvalue(c.model)))[0];
    summary.add_row({std::to_string(res.grid.N), fmt(res.grid.dx), fmt(res.dt), fmt(res.final_state.t),
                     reasons[static_cast<int>(res.reason)], fmt(res.series.y.back()), fmt(s11.real()),
                     fmt(s11.imag())});
    w.write("simulation.csv", summary.str());
    return kExitOk;
}

void cmd_phase_diagram(const RunConfig& c, int workers, RunWriter& w, std::ostream& log) {
    const auto& sw = c.sweep;
    SweepSpec spec{ParameterPlane::from_names(c.model, sw.x_axis, sw.x_lo, sw.x_hi, sw.y_axis, sw.y_lo, sw.y_hi),
                   sw.x_points, sw.y_points};
    const auto cells = sweep_regions(spec, workers);
    CsvTable grid({"ix", "iy", sw.x_axis, sw.y_axis, "region", "cond2_ok", "sigma11_re", "sigma11_im", "error"});
    for (const auto& cell : cells) {
        Row row{std::to_string(cell.ix), std::to_string(cell.iy), fmt(cell.x), fmt(cell.y)};
        if (cell.region) {
            row.emplace_back(to_string(cell.region->region));
            row.push_back(fmt(cell.region->cond2_ok));
            row.push_back(fmt(cell.region->sigma11.real()));
            row.push_back(fmt(cell.region->sigma11.imag()));
        } else {
            row.insert(row.end(), {"", "", "", ""});
        }
        row.push_back(cell.error);
        grid.add_row(std::move(row));
    }
    w.write("phase_grid.csv", grid.str());

    CsvTable curve({"index", sw.x_axis, sw.y_axis, "sigma11_re", "sigma11_im", "detE1"});
    std::string status = "ok";
    try {
        const ThresholdCurve tc = trace_threshold_curve(spec.plane, sw.curve_points);
        for (std::size_t i = 0; i < tc.vertices.size(); ++i) {
            const auto& v = tc.vertices[i];
            curve.add_row({std::to_string(i), fmt(v.x), fmt(v.y), fmt(v.point.sigma11.real()),
                           fmt(v.point.sigma11.imag()), fmt(v.point.detE1)});
        }
        if (tc.step_collapsed) status = "step_collapsed";
    } catch (const Error& e) {
        status = std::string(error_code_name(e.code()));
        log << "threshold curve: " << status << ": " << e.what() << "\n";
    }
    w.write("threshold_curve.csv", curve.str());
    w.add_manifest_entry("curve_status", status);
}

int cmd_verify(const RunConfig& c, std::uint64_t seed, int workers, RunWriter& w, std::ostream& log) {
    const auto results = run_verification(c.verify.criteria, {seed, workers});
    bool all = true;
    for (const auto& r : results) {
        const bool ok = r.passed && r.within_budget();
        all = all && ok;
        char line[160];
        std::snprintf(line, sizeof line, "[%s] criterion %2d %-30s %8.3f s (budget %g s)", ok ? "PASS" : "FAIL", r.id,
                      r.name.c_str(), r.seconds, r.budget_seconds);
        log << line << (r.note.empty() ? "" : "  -- " + r.note) << "\n";
    }
    w.write("verify.csv", verification_csv(results));
    return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_subcommand(std::string_view name, const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const std::uint64_t seed = options.seed.value_or(config.simulate.seed);
    try {
        RunWriter writer(options.out_dir.value_or(config.output.directory));
        const std::string config_text = serialize_config(config);
        writer.write("config.ini", config_text);

        int code = kExitOk;
        if (name == "steady-state") {
            cmd_steady_state(config, writer);
        } else if (name == "spectrum") {
            cmd_spectrum(config, writer);
        } else if (name == "threshold") {
            cmd_threshold(config, writer);
        } else if (name == "transition") {
            cmd_transition(config, writer);
        } else if (name == "simulate") {
            code = cmd_simulate(config, seed, writer, log);
        } else if (name == "phase-diagram") {
            cmd_phase_diagram(config, options.workers, writer, log);
        } else if (name == "verify") {
            code = cmd_verify(config, seed, options.workers, writer, log);
        } else {
            log << "error: unknown subcommand '" << name << "'\n";
            return kExitConfig;
        }
        writer.write_manifest(std::string(name), config_text, seed);
        return code;
    } catch (const Error& e) {
        log << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace mtphase
