#include "oqw/trajectory.hpp"

#include "oqw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace oqw::traj {

// --------------------------- RNG ---------------------------------------------

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s) word = sm.next();
}

std::uint64_t Xoshiro256pp::next() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double Xoshiro256pp::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Xoshiro256pp trajectory_stream(std::uint64_t seed, std::uint64_t k) {
    // decorrelate the per-trajectory seeds before expanding them into state
    SplitMix64 sm(seed + 0x9E3779B97F4A7C15ULL * (k + 1));
    return Xoshiro256pp(sm.next());
}

// --------------------------- single steps ------------------------------------

TrajectoryState initial_trajectory_state(const WalkModel& model) {
    TrajectoryState st;
    st.tau = maximally_mixed(model.D);
    st.x = Site(static_cast<std::size_t>(model.d), 0);
    st.n = 0;
    return st;
}

namespace {

// One jump on preallocated storage. `work[j]` receives A_j tau A_j^dag (only
// the chosen branch is fully formed). Returns the chosen direction.
template <typename Mat>
int jump(const std::vector<Mat>& ops, const std::vector<Mat>& adj, Mat& tau, Mat& scratch,
         std::vector<double>& w, Xoshiro256pp& rng) {
    const int nops = static_cast<int>(ops.size());
    double total = 0.0;
    for (int j = 0; j < nops; ++j) {
        scratch.noalias() = ops[static_cast<std::size_t>(j)] * tau;
        // Tr(A tau A^dag) without forming the product
        const double wj =
            scratch.cwiseProduct(ops[static_cast<std::size_t>(j)].conjugate()).sum().real();
        w[static_cast<std::size_t>(j)] = std::max(wj, 0.0);
        total += w[static_cast<std::size_t>(j)];
    }
    if (total < 1e-15)
        throw NumericalFailure("sample_step: all jump probabilities vanished (corrupted state)");
    const double u = rng.uniform01() * total;
    int chosen = nops - 1;
    double cum = 0.0;
    for (int j = 0; j < nops; ++j) {
        cum += w[static_cast<std::size_t>(j)];
        if (u < cum) {
            chosen = j;
            break;
        }
    }
    scratch.noalias() = ops[static_cast<std::size_t>(chosen)] * tau;
    tau.noalias() = scratch * adj[static_cast<std::size_t>(chosen)];
    tau /= tau.trace().real();
    return chosen;
}

template <typename Mat>
std::vector<Mat> ops_as(const WalkModel& model) {
    std::vector<Mat> out;
    out.reserve(model.ops.size());
    for (const auto& A : model.ops) out.emplace_back(A);
    return out;
}

template <typename Mat>
std::vector<Mat> adjoints(const std::vector<Mat>& ops) {
    std::vector<Mat> out;
    out.reserve(ops.size());
    for (const auto& A : ops) out.emplace_back(A.adjoint());
    return out;
}

// Endpoint of one trajectory; optionally visits every intermediate state.
template <typename Mat, typename Visitor>
void walk_trajectory(const WalkModel& model, const std::vector<Mat>& ops,
                     const std::vector<Mat>& adj, const TrajectoryState& init, std::uint64_t n,
                     Xoshiro256pp rng, Site& x, Mat& tau, Visitor&& visit) {
    tau = init.tau;
    x = init.x;
    Mat scratch = tau;
    std::vector<double> w(ops.size());
    for (std::uint64_t t = 1; t <= n; ++t) {
        const int j = jump(ops, adj, tau, scratch, w, rng);
        const auto e = model.displacement(j);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += e[k];
        visit(t, tau, x);
    }
}

struct NullVisit {
    template <typename Mat>
    void operator()(std::uint64_t, const Mat&, const Site&) const {}
};

}  // namespace

TrajectoryState sample_step(const WalkModel& model, const TrajectoryState& state,
                            Xoshiro256pp& rng) {
    if (state.tau.rows() != model.D || state.tau.cols() != model.D ||
        state.x.size() != static_cast<std::size_t>(model.d))
        throw StructuralError("trajectory state does not match the model dimensions");
    TrajectoryState next = state;
    Matrix scratch = next.tau;
    std::vector<double> w(model.ops.size());
    const auto adj = adjoints(model.ops);
    const int j = jump(model.ops, adj, next.tau, scratch, w, rng);
    const auto e = model.displacement(j);
    for (std::size_t k = 0; k < next.x.size(); ++k) next.x[k] += e[k];
    next.n = state.n + 1;
    return next;
}

std::vector<TrajectoryState> run_trajectory(const WalkModel& model, const TrajectoryState& init,
                                            std::uint64_t n, std::uint64_t seed) {
    std::vector<TrajectoryState> path;
    path.reserve(n + 1);
    path.push_back(init);
    Xoshiro256pp rng = trajectory_stream(seed, 0);
    TrajectoryState state = init;
    for (std::uint64_t t = 0; t < n; ++t) {
        state = sample_step(model, state, rng);
        path.push_back(state);
    }
    return path;
}

Matrix ergodic_average(const WalkModel& model, const TrajectoryState& init, std::uint64_t n,
                       std::uint64_t seed) {
    if (n == 0) throw StructuralError("ergodic_average needs at least one step");
    Matrix acc = Matrix::Zero(model.D, model.D);
    const auto visit = [&acc](std::uint64_t, const Matrix& tau, const Site&) { acc += tau; };
    Site x;
    Matrix tau;
    const auto adj = adjoints(model.ops);
    walk_trajectory(model, model.ops, adj, init, n, trajectory_stream(seed, 0), x, tau, visit);
    return acc / static_cast<double>(n);
}

// --------------------------- ensembles ---------------------------------------

namespace {

struct BatchAccum {
    RealVector sum_x;       // sum of endpoints
    RealMatrix sum_xx;      // sum of outer products
    RealVector sum_p3;      // componentwise third powers
    RealVector sum_p4;      // componentwise fourth powers
    std::uint64_t count{0};

    explicit BatchAccum(int d)
        : sum_x(RealVector::Zero(d)),
          sum_xx(RealMatrix::Zero(d, d)),
          sum_p3(RealVector::Zero(d)),
          sum_p4(RealVector::Zero(d)) {}
};

template <typename Mat>
void run_batches(const WalkModel& model, const TrajectoryState& init, std::uint64_t n_steps,
                 std::uint64_t n_traj, std::uint64_t seed, int batches,
                 std::vector<BatchAccum>& acc) {
    const auto ops = ops_as<Mat>(model);
    const auto adj = adjoints(ops);
    const int d = model.d;
    linalg::parallel_for(batches, [&](std::int64_t blo, std::int64_t bhi) {
        Site x;
        Mat tau;
        for (std::int64_t b = blo; b < bhi; ++b) {
            const std::uint64_t t0 = static_cast<std::uint64_t>(b) * n_traj /
                                     static_cast<std::uint64_t>(batches);
            const std::uint64_t t1 = static_cast<std::uint64_t>(b + 1) * n_traj /
                                     static_cast<std::uint64_t>(batches);
            BatchAccum& a = acc[static_cast<std::size_t>(b)];
            for (std::uint64_t k = t0; k < t1; ++k) {
                walk_trajectory(model, ops, adj, init, n_steps, trajectory_stream(seed, k), x,
                                tau, NullVisit{});
                for (int i = 0; i < d; ++i) {
                    const double xi = static_cast<double>(x[static_cast<std::size_t>(i)]);
                    a.sum_x[i] += xi;
                    a.sum_p3[i] += xi * xi * xi;
                    a.sum_p4[i] += xi * xi * xi * xi;
                    for (int j = 0; j < d; ++j)
                        a.sum_xx(i, j) += xi * static_cast<double>(x[static_cast<std::size_t>(j)]);
                }
                ++a.count;
            }
        }
    });
}

}  // namespace

EnsembleStats ensemble_stats(const WalkModel& model, const TrajectoryState& init,
                             std::uint64_t n_steps, std::uint64_t n_traj, std::uint64_t seed,
                             const RealVector& m, int batches) {
    if (n_traj < 2) throw StructuralError("ensemble_stats needs at least two trajectories");
    if (n_steps == 0) throw StructuralError("ensemble_stats needs at least one step");
    batches = std::max(1, std::min<int>(batches, static_cast<int>(n_traj)));
    const int d = model.d;

    std::vector<BatchAccum> acc(static_cast<std::size_t>(batches), BatchAccum(d));
    if (model.D == 2)
        run_batches<Eigen::Matrix2cd>(model, init, n_steps, n_traj, seed, batches, acc);
    else
        run_batches<Matrix>(model, init, n_steps, n_traj, seed, batches, acc);

    // fixed merge order over batches, so results do not depend on thread count
    RealVector sum_x = RealVector::Zero(d), sum_p3 = RealVector::Zero(d),
               sum_p4 = RealVector::Zero(d);
    RealMatrix sum_xx = RealMatrix::Zero(d, d);
    std::vector<RealMatrix> batch_cov;
    batch_cov.reserve(static_cast<std::size_t>(batches));
    for (const auto& a : acc) {
        sum_x += a.sum_x;
        sum_xx += a.sum_xx;
        sum_p3 += a.sum_p3;
        sum_p4 += a.sum_p4;
        const double nb = static_cast<double>(a.count);
        const RealVector mu_b = a.sum_x / nb;
        batch_cov.push_back((a.sum_xx / nb - mu_b * mu_b.transpose()) /
                            static_cast<double>(n_steps));
    }

    const double N = static_cast<double>(n_traj);
    const double n = static_cast<double>(n_steps);
    EnsembleStats out;
    out.n_traj = n_traj;
    out.n_steps = n_steps;
    out.seed = seed;
    out.batches = batches;
    out.emp_mean = sum_x / N;
    out.emp_cov = sum_xx / N - out.emp_mean * out.emp_mean.transpose();
    out.scaled_mean = (out.emp_mean - n * m) / std::sqrt(n);
    out.scaled_cov = out.emp_cov / n;

    RealMatrix mean_bc = RealMatrix::Zero(d, d);
    for (const auto& cb : batch_cov) mean_bc += cb;
    mean_bc /= static_cast<double>(batches);
    out.scaled_cov_stderr = RealMatrix::Zero(d, d);
    if (batches > 1) {
        for (const auto& cb : batch_cov)
            out.scaled_cov_stderr += (cb - mean_bc).cwiseProduct(cb - mean_bc);
        out.scaled_cov_stderr /= static_cast<double>(batches - 1);
        out.scaled_cov_stderr =
            (out.scaled_cov_stderr / static_cast<double>(batches)).cwiseSqrt();
    }

    out.stderr_mean = RealVector(d);
    out.kurtosis = RealVector(d);
    for (int i = 0; i < d; ++i) {
        out.stderr_mean[i] = std::sqrt(std::max(out.emp_cov(i, i), 0.0) / N);
        const double mu = out.emp_mean[i];
        const double m2 = sum_xx(i, i) / N - mu * mu;
        const double m4 = sum_p4[i] / N - 4.0 * mu * sum_p3[i] / N +
                          6.0 * mu * mu * sum_xx(i, i) / N - 3.0 * std::pow(mu, 4);
        out.kurtosis[i] = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    }
    return out;
}

std::vector<TrajectoryRecord> sample_positions(const WalkModel& model,
                                               const TrajectoryState& init,
                                               std::uint64_t n_steps, std::uint64_t n_traj,
                                               std::uint64_t seed) {
    std::vector<TrajectoryRecord> records;
    records.reserve((n_steps + 1) * n_traj);
    const auto adj = adjoints(model.ops);
    for (std::uint64_t k = 0; k < n_traj; ++k) {
        records.push_back({k, 0, init.x});
        Site x;
        Matrix tau;
        const auto visit = [&](std::uint64_t t, const Matrix&, const Site& pos) {
            records.push_back({k, t, pos});
        };
        walk_trajectory(model, model.ops, adj, init, n_steps, trajectory_stream(seed, k), x, tau,
                        visit);
    }
    return records;
}

// --------------------------- branch enumeration -------------------------------

namespace {

void enumerate_rec(const WalkModel& model, const Matrix& tau, const Site& x, std::uint64_t depth,
                   BranchEnumeration& out) {
    if (depth == 0) {
        out.dist.probs[x] += tau.trace().real();
        auto [it, inserted] = out.averaged.sites.try_emplace(x, tau);
        if (!inserted) it->second += tau;
        return;
    }
    for (int j = 0; j < model.op_count(); ++j) {
        const Matrix next = model.op(j) * tau * model.op(j).adjoint();
        Site xn = x;
        const auto e = model.displacement(j);
        for (std::size_t k = 0; k < xn.size(); ++k) xn[k] += e[k];
        enumerate_rec(model, next, xn, depth - 1, out);
    }
}

}  // namespace

BranchEnumeration enumerate_branches(const WalkModel& model, const Site& site, const Matrix& tau0,
                                     std::uint64_t n) {
    if (site.size() != static_cast<std::size_t>(model.d))
        throw StructuralError("site dimension does not match the model");
    double budget = 1.0;
    for (std::uint64_t i = 0; i < n; ++i) budget *= static_cast<double>(model.op_count());
    if (budget > 1e7) {
        std::ostringstream msg;
        msg << "enumerate_branches: " << model.op_count() << "^" << n
            << " branch sequences exceed the 1e7 budget";
        throw BudgetExceeded(msg.str());
    }
    BranchEnumeration out;
    out.dist.d = model.d;
    out.averaged.d = model.d;
    out.averaged.D = model.D;
    out.averaged.step_count = n;
    enumerate_rec(model, tau0, site, n, out);
    return out;
}

}  // namespace oqw::traj
