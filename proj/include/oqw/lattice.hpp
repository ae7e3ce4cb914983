// lattice.hpp — lattice states, exact density-matrix evolution, and position
// distribution statistics.
#pragma once

#include "oqw/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace oqw {

using Site = std::vector<std::int64_t>;

// Position-diagonal state: site x -> unnormalized PSD coin block tau_x with
// sum_x Tr(tau_x) = 1. Ordered map so iteration (and CSV emission) is
// lexicographic in the site coordinates.
struct LatticeState {
    int d{1};
    int D{1};
    std::map<Site, Matrix> sites;
    std::uint64_t step_count{0};

    double total_trace() const;
};

// Probability distribution over lattice sites.
struct Distribution {
    int d{1};
    std::map<Site, double> probs;

    double total() const;
};

struct Moments {
    RealVector mean;    // d
    RealMatrix cov;     // d x d, central second moments
};

// State concentrated at `site` with coin block tau (trace 1 expected).
LatticeState point_state(const WalkModel& model, const Site& site, const Matrix& tau);

// Default initial state (I/D at the origin).
LatticeState default_initial_state(const WalkModel& model);

// One application of the walk map: tau'_x = sum_j A_j tau_{x-e_j} A_j^dag.
// Blocks are re-Hermitized and sites with Tr(tau_x) < 1e-15 are dropped.
LatticeState step_lattice(const WalkModel& model, const LatticeState& state);

// n-fold composition of step_lattice; n = 0 returns the input unchanged.
// Uses a contiguous fast path for d = 1, D = 2.
LatticeState evolve(const WalkModel& model, const LatticeState& init, std::uint64_t n);

// p(x) = Tr(tau_x).
Distribution position_distribution(const LatticeState& state);

// Exact mean vector and central covariance of a distribution.
Moments distribution_moments(const Distribution& dist);

}  // namespace oqw
