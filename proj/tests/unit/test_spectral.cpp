#include "support.hpp"

#include "mtphase/errors.hpp"
#include "mtphase/spectral.hpp"

#include <doctest.h>

#include <numbers>

using namespace mtphase;

namespace {

/// Eigen's general eigensolver, sorted like solve_spectrum.
Spectrum eigen_oracle(const Mat3& m) {
    const auto ev = Eigen::EigenSolver<Mat3>(m, false).eigenvalues();
    Spectrum s{ev(0), ev(1), ev(2)};
    sort_spectrum(s);
    return s;
}

double spectrum_distance(const Spectrum& a, const Spectrum& b) {
    // Best matching over the six permutations; conjugate pairs may swap on ties.
    std::array<int, 3> perm{0, 1, 2};
    double best = INFINITY;
    do {
        double worst = 0;
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("Laplacian eigenvalues") {
    const double ell = 2.5;
    for (int m = 1; m <= 5; ++m) {
        const double expected = std::pow(m * std::numbers::pi / ell, 2);
        CHECK(laplacian_mode(ell, m, BoundaryCondition::Dirichlet).rho == doctest::Approx(expected).epsilon(1e-14));
        CHECK(laplacian_mode(ell, m, BoundaryCondition::NeumannZeroAverage).rho ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(laplacian_mode(ell, 1, BoundaryCondition::Dirichlet).eval(ell / 2) == doctest::Approx(1.0));
    CHECK(laplacian_mode(ell, 1, BoundaryCondition::NeumannZeroAverage).eval(0.0) == doctest::Approx(1.0));
}

TEST_CASE("characteristic coefficients") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        Mat3 m;
        for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = g(rng);
        const auto [p2, p1, p0] = characteristic_coefficients(m);
        CHECK(p2 == doctest::Approx(-m.trace()));
        CHECK(p0 == doctest::Approx(-m.determinant()));
        // p(s) = det(sI - m) at s = 1.7.
        const double s = 1.7;
        const double direct = (s * Mat3::Identity() - m).determinant();
        CHECK(s * s * s + p2 * s * s + p1 * s + p0 == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("closed-form cubic roots on known polynomials") {
    // (s - 1)(s + 2)(s + 3) = s^3 + 4 s^2 + s - 6
    const Spectrum real_roots = cubic_roots_closed_form(4, 1, -6);
    CHECK(real_roots[0].real() == doctest::Approx(1.0));
    CHECK(real_roots[1].real() == doctest::Approx(-2.0));
    CHECK(real_roots[2].real() == doctest::Approx(-3.0));
    // (s + 1)(s^2 + 1) = s^3 + s^2 + s + 1
    const Spectrum complex_roots = cubic_roots_closed_form(1, 1, 1);
    CHECK(std::abs(complex_roots[0] - Complex(0, -1)) < 1e-12);
    CHECK(std::abs(complex_roots[1] - Complex(0, 1)) < 1e-12);
    CHECK(std::abs(complex_roots[2] - Complex(-1, 0)) < 1e-12);
    // Triple root.
    const Spectrum triple = cubic_roots_closed_form(-6, 12, -8);
    for (const auto& r : triple) CHECK(std::abs(r - 2.0) < 1e-4);
}

TEST_CASE("solve_spectrum and closed form agree with Eigen") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 300; ++i) {
        const ModelParams p = testing::random_params(rng);
        const int m = 1 + i % 6;
        const Mat3 e = mode_matrix(p, laplacian_mode(p.ell, m, p.bc).rho);
        const Spectrum oracle = eigen_oracle(e);
        const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
        CHECK(spectrum_distance(solve_spectrum(e), oracle) <= 1e-9 * scale);
        const auto [p2, p1, p0] = characteristic_coefficients(e);
        CHECK(spectrum_distance(cubic_roots_closed_form(p2, p1, p0), oracle) <= 1e-7 * scale);
    }
}

TEST_CASE("eigenvector formulas solve the eigenproblem") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
        const ModelParams p = testing::random_params(rng);
        const double rho = laplacian_mode(p.ell, 1 + i % 4, p.bc).rho;
        const Mat3 e = mode_matrix(p, rho);
        for (const Complex& s : solve_spectrum(e)) {
            const CVec3 w = eigenvector_omega(p, rho, s);
            const CVec3 ws = adjoint_omega(p, rho, s);
            // Independent residual, computed here rather than through eigen_residual.
            const double scale = std::max(1.0, e.cwiseAbs().rowwise().sum().maxCoeff());
            CHECK((e.cast<Complex>() * w - s * w).norm() <= 1e-9 * scale * w.norm());
            CHECK((e.transpose().cast<Complex>() * ws - s * ws).norm() <= 1e-9 * scale * ws.norm());
        }
    }
}

TEST_CASE("omega reduces to the normalized closed form when k1 = E = 1") {
    ModelParams p = testing::canonical(0.3);
    p.k3 = 0.7;
    p.k5 = 1.3;
    p.k7 = 2.2;
    p.d1 = 0.11;
    p.d2 = 0.23;
    const double rho = 1.0;
    const Complex s = solve_spectrum(mode_matrix(p, rho))[0];
    const CVec3 w = eigenvector_omega(p, rho, s);
    const Complex a = p.d1 * rho + p.k7 + s, b = p.d2 * rho + p.k5 + s;
    CHECK(std::abs(w(0) - p.k5) < 1e-10);
    CHECK(std::abs(w(1) - a) < 1e-10);
    CHECK(std::abs(w(2) - (a * b - p.k5 * p.k7)) < 1e-10);
}

TEST_CASE("a non-eigenvalue is rejected") {
    const ModelParams p = testing::canonical(0.2);
    try {
        eigenvector_omega(p, 1.0, Complex(123.0, 0.0));
        FAIL("expected NotAnEigenvalue");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotAnEigenvalue);
    }
}
