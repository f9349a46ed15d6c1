#pragma once

#include "mtphase/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace testing {

/// P0: k1 = k3 = k5 = C1 = E = 1, k7 = 2 on (0, pi), equal diffusions d.
inline mtphase::ModelParams canonical(double d, mtphase::BoundaryCondition bc = mtphase::BoundaryCondition::Dirichlet) {
    mtphase::ModelParams p;
    p.d1 = p.d2 = p.d3 = d;
    p.bc = bc;
    return p;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(lo, hi)(rng));
}

/// Random parameters with K1 > 0.
inline mtphase::ModelParams random_params(std::mt19937_64& rng) {
    for (;;) {
        mtphase::ModelParams p;
        p.k1 = log_uniform(rng, -1.5, 1.5);
        p.k3 = log_uniform(rng, -1.5, 1.5);
        p.k5 = log_uniform(rng, -1.5, 1.5);
        p.k7 = log_uniform(rng, -1.5, 1.5);
        p.C1 = log_uniform(rng, -1.5, 1.5);
        p.E = log_uniform(rng, -1.5, 1.5);
        p.d1 = log_uniform(rng, -3, 0.5);
        p.d2 = log_uniform(rng, -3, 0.5);
        p.d3 = log_uniform(rng, -3, 0.5);
        p.ell = std::uniform_real_distribution<double>(1.0, 6.0)(rng);
        if (p.K1() > 0) return p;
    }
}

/// Largest real part of the eigenvalues of A - rho D, straight from Eigen.
inline double max_real_eigenvalue(const mtphase::ModelParams& p, double rho) {
    const mtphase::Mat3 m = mtphase::linearization_matrix(p) - rho * mtphase::diffusion_matrix(p);
    const auto ev = Eigen::EigenSolver<mtphase::Mat3>(m, false).eigenvalues();
    double best = -INFINITY;
    for (int i = 0; i < 3; ++i) best = std::max(best, ev(i).real());
    return best;
}

inline double det_oracle(const mtphase::ModelParams& p, double rho) {
    return (mtphase::linearization_matrix(p) - rho * mtphase::diffusion_matrix(p)).determinant();
}

/// Plain bisection of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
template <typename F>
double bisect(F f, double lo, double hi, int iterations = 200) {
    const bool lo_positive = f(lo) > 0;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) > 0) == lo_positive ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testing
