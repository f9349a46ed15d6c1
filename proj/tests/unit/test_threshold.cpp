#include "support.hpp"

#include "mtphase/errors.hpp"
#include "mtphase/threshold.hpp"
#include "mtphase/verification.hpp"

#include <doctest.h>

using namespace mtphase;

namespace {

constexpr double kCanonicalThreshold = 0.17008648662603368;

/// d* from an independent bisection on Eigen's determinant of A - rho1 D.
double oracle_threshold(BoundaryCondition bc) {
    return testing::bisect([&](double d) { return testing::det_oracle(testing::canonical(d, bc), 1.0); }, 0.01, 1.0);
}

}  // namespace

TEST_CASE("canonical threshold matches the bisection oracle") {
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::NeumannZeroAverage}) {
        const ThresholdPoint tp = find_threshold(ParameterRay::equal_diffusion(testing::canonical(0.2, bc), 0.01, 1.0));
        const double oracle = oracle_threshold(bc);
        CHECK(oracle == doctest::Approx(kCanonicalThreshold).epsilon(1e-12));
        CHECK(tp.ray_coord == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(std::abs(tp.ray_coord - 0.17009) < 5e-6);
        CHECK(std::abs(tp.sigma11.real()) <= 1e-8);
        CHECK(tp.sigma11.imag() == 0.0);
        CHECK(tp.stability.all_passed());
    }
}

TEST_CASE("canonical threshold is the positive root of d^3 + 5 d^2 + 5 d - 1") {
    const double root =
        testing::bisect([](double d) { return d * d * d + 5 * d * d + 5 * d - 1; }, 0.0, 1.0);
    CHECK(root == doctest::Approx(kCanonicalThreshold).epsilon(1e-13));
    CHECK(canonical_polynomial_root() == doctest::Approx(root).epsilon(1e-13));
}

TEST_CASE("det E1 sign matches the principal eigenvalue") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        ModelParams p = testing::random_params(rng);
        const double rho1 = first_laplacian_eigenvalue(p);
        const RegionReport rr = classify_region(p);
        const double oracle = testing::max_real_eigenvalue(p, rho1);
        if (std::abs(oracle) < 1e-9) continue;
        if (oracle > 0) CHECK(rr.region == Region::Plus);
        else CHECK(rr.region == Region::Minus);
        CHECK(det_E1(p) == doctest::Approx(testing::det_oracle(p, rho1)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("canonical regions on either side of d*") {
    CHECK(classify_region(testing::canonical(0.10)).region == Region::Plus);
    CHECK(classify_region(testing::canonical(0.30)).region == Region::Minus);
}

TEST_CASE("a ray without a crossing reports NoSignChange") {
    try {
        find_threshold(ParameterRay::equal_diffusion(testing::canonical(0.5), 0.3, 1.0));
        FAIL("expected NoSignChange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSignChange);
    }
}

TEST_CASE("scaling identity E_m(kappa, d) = E_1(kappa, (rho_m/rho1) d)") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = testing::random_params(rng);
        const double rho1 = first_laplacian_eigenvalue(p);
        for (int m = 2; m <= 6; ++m) {
            const double rho_m = laplacian_mode(p.ell, m, p.bc).rho;
            ModelParams scaled = p;
            const double f = rho_m / rho1;
            scaled.d1 *= f;
            scaled.d2 *= f;
            scaled.d3 *= f;
            const Mat3 lhs = mode_matrix(p, rho_m);
            CHECK((lhs - mode_matrix(scaled, rho1)).cwiseAbs().maxCoeff() <= 1e-12 * lhs.cwiseAbs().maxCoeff());
            // The reciprocal ratio does not give the same matrix.
            ModelParams inverse = p;
            inverse.d1 /= f;
            inverse.d2 /= f;
            inverse.d3 /= f;
            CHECK((lhs - mode_matrix(inverse, rho1)).cwiseAbs().maxCoeff() > 1e-6);
        }
    }
}

TEST_CASE("det E(rho) is decreasing on [rho1, 100 rho1] at sampled thresholds") {
    std::mt19937_64 rng(33);
    int checked = 0;
    for (int attempt = 0; attempt < 4000 && checked < 100; ++attempt) {
        const auto tp = try_sample_threshold(rng, BoundaryCondition::NeumannZeroAverage);
        if (!tp) continue;
        ++checked;
        const double rho1 = first_laplacian_eigenvalue(tp->lambda0);
        double prev = testing::det_oracle(tp->lambda0, rho1);
        for (int k = 1; k <= 400; ++k) {
            const double rho = rho1 * (1.0 + 99.0 * k / 400.0);
            const double cur = testing::det_oracle(tp->lambda0, rho);
            CHECK(cur < prev + 1e-12 * std::abs(prev));
            prev = cur;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("det E(rho) need not be monotone below rho1") {
    // Counterexample search: a threshold where det E increases somewhere on [0, rho1).
    std::mt19937_64 rng(34);
    bool found = false;
    for (int attempt = 0; attempt < 4000 && !found; ++attempt) {
        const auto tp = try_sample_threshold(rng, BoundaryCondition::NeumannZeroAverage);
        if (!tp) continue;
        const double rho1 = first_laplacian_eigenvalue(tp->lambda0);
        double prev = testing::det_oracle(tp->lambda0, 0.0);
        for (int k = 1; k <= 200 && !found; ++k) {
            const double cur = testing::det_oracle(tp->lambda0, rho1 * k / 200.0);
            found = cur > prev;
            prev = cur;
        }
    }
    CHECK(found);
}

TEST_CASE("exchange of stability at sampled thresholds") {
    std::mt19937_64 rng(35);
    int checked = 0;
    for (int attempt = 0; attempt < 4000 && checked < 30; ++attempt) {
        const auto tp = try_sample_threshold(rng, BoundaryCondition::Dirichlet);
        if (!tp) continue;
        ++checked;
        CHECK(tp->stability.all_passed());
        // Just below / above the crossing the principal eigenvalue changes sign (Eigen oracle).
        const double rho1 = first_laplacian_eigenvalue(tp->lambda0);
        CHECK(std::abs(testing::max_real_eigenvalue(tp->lambda0, rho1)) <= 1e-7);
    }
    CHECK(checked == 30);
}

TEST_CASE("traced threshold curve lies on det E1 = 0") {
    const ModelParams base = testing::canonical(0.2);
    const ParameterPlane plane = ParameterPlane::from_names(base, "d", 0.02, 0.5, "k7", 1.2, 4.0);
    const ThresholdCurve curve = trace_threshold_curve(plane, 40);
    REQUIRE(curve.vertices.size() >= 10);
    for (const auto& v : curve.vertices) {
        const ModelParams p = plane.at(v.x, v.y);
        const Mat3 a = linearization_matrix(p);
        CHECK(std::abs(testing::det_oracle(p, 1.0)) <= 1e-8 * std::max(1.0, std::pow(a.norm(), 3)));
        CHECK(v.x >= plane.x_lo - 1e-12);
        CHECK(v.x <= plane.x_hi + 1e-12);
    }
    // k7 = 2 on the curve must sit at d*.
    bool near_canonical = false;
    for (std::size_t i = 1; i < curve.vertices.size(); ++i) {
        const auto& a = curve.vertices[i - 1];
        const auto& b = curve.vertices[i];
        if ((a.y - 2.0) * (b.y - 2.0) <= 0 && a.y != b.y) {
            const double x = a.x + (2.0 - a.y) * (b.x - a.x) / (b.y - a.y);
            near_canonical = std::abs(x - kCanonicalThreshold) < 1e-2;
        }
    }
    CHECK(near_canonical);
}

TEST_CASE("unknown plane axis is a validation error") {
    try {
        ParameterPlane::from_names(testing::canonical(0.2), "k9", 0, 1, "k7", 1, 2);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
    }
}
