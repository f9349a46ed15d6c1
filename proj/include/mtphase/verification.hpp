#pragma once

#include "mtphase/threshold.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtphase {

struct Metric {
    std::string name;
    double value = 0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::vector<Metric> metrics;
    std::string note;
    double seconds = 0;         ///< wall time; reported but never written to verify.csv
    double budget_seconds = 0;

    bool within_budget() const { return seconds <= budget_seconds; }
};

struct CriterionInfo {
    int id;
    std::string_view name;
    double budget_seconds;
};

std::span<const CriterionInfo> criteria_catalog();

struct VerifyContext {
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Runs one acceptance check (1..12). Criterion 12 alone re-runs 1..11 twice.
CriterionResult run_criterion(int id, const VerifyContext& ctx);

/// Runs the requested checks in ascending order. When 12 is requested, the
/// other requested checks are run a second time and the two verify.csv
/// renderings (without row 12) are compared byte for byte.
std::vector<CriterionResult> run_verification(std::vector<int> ids, const VerifyContext& ctx);

/// Deterministic table: criterion, name, passed, metrics, note. Timings are excluded.
std::string verification_csv(const std::vector<CriterionResult>& results);

// --- Random sampling shared by the checks -----------------------------------

/// Log-uniform rates in e^[-1.5, 1.5], diffusion in e^[-3, 0.5], ell in [1, 2 pi];
/// rejection-sampled so that K1 > 0.
ModelParams sample_valid_params(std::mt19937_64& rng, BoundaryCondition bc);

/// One attempt at a threshold with K1 > 0, the non-degeneracy conditions and k5 K2 > C1 along a random
/// diffusion-scaling ray; nullopt if the draw has no admissible crossing.
std::optional<ThresholdPoint> try_sample_threshold(std::mt19937_64& rng, BoundaryCondition bc);

/// Ray through the diffusion scale of `p` whose low end is unstable; returns
/// nullopt when det E1 does not change sign for s in (0, 1e6].
std::optional<ParameterRay> unstable_to_stable_ray(const ModelParams& p);

/// Parameters on `ray` where the principal eigenvalue equals `target`
/// (secant with bracketing, starting from the threshold coordinate s0).
ModelParams point_with_sigma11(const ParameterRay& ray, double s0, double target);

/// Positive root of d^3 + 5 d^2 + 5 d - 1 by plain bisection.
double canonical_polynomial_root();

}  // namespace mtphase
