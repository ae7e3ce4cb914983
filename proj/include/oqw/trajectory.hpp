// trajectory.hpp — Monte Carlo unraveling of the walk as the classical Markov
// chain (tau_n, X_n): seeded single trajectories, parallel ensembles with
// batch-means errors, ergodic averages, and exhaustive branch enumeration.
#pragma once

#include "oqw/lattice.hpp"
#include "oqw/types.hpp"

#include <cstdint>
#include <vector>

namespace oqw::traj {

// --------------------------- reproducible RNG -------------------------------

// SplitMix64; used to derive per-trajectory stream states from (seed, k).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next();
};

// xoshiro256++ with uniform doubles from the top 53 bits. Deterministic across
// platforms, unlike the standard-library distributions.
struct Xoshiro256pp {
    std::uint64_t s[4];
    explicit Xoshiro256pp(std::uint64_t seed);
    std::uint64_t next();
    double uniform01();  // in [0, 1)
};

// Independent stream for trajectory k of an ensemble keyed by seed.
Xoshiro256pp trajectory_stream(std::uint64_t seed, std::uint64_t k);

// --------------------------- single trajectories ----------------------------

struct TrajectoryState {
    Matrix tau;      // normalized coin state
    Site x;          // lattice position
    std::uint64_t n{0};
};

TrajectoryState initial_trajectory_state(const WalkModel& model);

// One jump: draw j with probability Tr(A_j tau A_j^dag), renormalize the coin
// state, displace by e_j. The stay branch still transforms tau.
TrajectoryState sample_step(const WalkModel& model, const TrajectoryState& state,
                            Xoshiro256pp& rng);

// Full path (n+1 states including the initial one); deterministic in
// (model, init, n, seed).
std::vector<TrajectoryState> run_trajectory(const WalkModel& model, const TrajectoryState& init,
                                            std::uint64_t n, std::uint64_t seed);

// Running average (1/n) sum_{t=1..n} tau_t along one trajectory.
Matrix ergodic_average(const WalkModel& model, const TrajectoryState& init, std::uint64_t n,
                       std::uint64_t seed);

// --------------------------- ensembles --------------------------------------

struct EnsembleStats {
    std::uint64_t n_traj{0};
    std::uint64_t n_steps{0};
    std::uint64_t seed{0};
    int batches{0};
    RealVector emp_mean;           // of X_n
    RealMatrix emp_cov;            // of X_n
    RealVector scaled_mean;        // of (X_n - n m)/sqrt(n)
    RealMatrix scaled_cov;         // of (X_n - n m)/sqrt(n)
    RealMatrix scaled_cov_stderr;  // batch-means standard errors, entrywise
    RealVector stderr_mean;        // standard error of emp_mean components
    RealVector kurtosis;           // componentwise sample kurtosis of the scaled statistic
};

// Independent trajectories on per-trajectory streams; batch-partitioned so the
// merge order is fixed and results are bitwise identical for any worker count.
EnsembleStats ensemble_stats(const WalkModel& model, const TrajectoryState& init,
                             std::uint64_t n_steps, std::uint64_t n_traj, std::uint64_t seed,
                             const RealVector& m, int batches = 100);

// Optional per-trajectory endpoint dump used by the CLI (traj_id, n, x_1..x_d).
struct TrajectoryRecord {
    std::uint64_t traj_id;
    std::uint64_t n;
    Site x;
};
std::vector<TrajectoryRecord> sample_positions(const WalkModel& model,
                                               const TrajectoryState& init,
                                               std::uint64_t n_steps, std::uint64_t n_traj,
                                               std::uint64_t seed);

// --------------------------- branch enumeration -----------------------------

struct BranchEnumeration {
    Distribution dist;      // exact endpoint distribution
    LatticeState averaged;  // sum over branches of weight x outcome
};

// Exact sum over all (2d+1)^n jump sequences from a single-site start; the
// averaged state reproduces n-fold density evolution. Throws BudgetExceeded
// when (2d+1)^n > 1e7.
BranchEnumeration enumerate_branches(const WalkModel& model, const Site& site,
                                     const Matrix& tau0, std::uint64_t n);

}  // namespace oqw::traj
