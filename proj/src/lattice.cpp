#include "oqw/lattice.hpp"

#include "oqw/linalg.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace oqw {

namespace {

constexpr double kSupportTrim = 1e-15;  // blocks below this trace are dropped

// Gather-form update for one target site, fixed summation order over j.
Matrix gather_block(const WalkModel& model, const LatticeState& state, const Site& x) {
    Matrix out = Matrix::Zero(model.D, model.D);
    Site src(x.size());
    for (int j = 0; j < model.op_count(); ++j) {
        const auto e = model.displacement(j);
        for (std::size_t k = 0; k < src.size(); ++k) src[k] = x[k] - e[k];
        const auto it = state.sites.find(src);
        if (it == state.sites.end()) continue;
        out += model.op(j) * it->second * model.op(j).adjoint();
    }
    return linalg::hermitize(out);
}

LatticeState step_generic(const WalkModel& model, const LatticeState& state) {
    // candidate targets: every source shifted by every direction
    std::set<Site> target_set;
    for (const auto& [x, tau] : state.sites) {
        for (int j = 0; j < model.op_count(); ++j) {
            const auto e = model.displacement(j);
            Site t(x.size());
            for (std::size_t k = 0; k < t.size(); ++k) t[k] = x[k] + e[k];
            target_set.insert(std::move(t));
        }
    }
    const std::vector<Site> targets(target_set.begin(), target_set.end());
    std::vector<Matrix> blocks(targets.size());
    linalg::parallel_for(static_cast<std::int64_t>(targets.size()),
                         [&](std::int64_t lo, std::int64_t hi) {
                             for (std::int64_t i = lo; i < hi; ++i)
                                 blocks[static_cast<std::size_t>(i)] =
                                     gather_block(model, state, targets[static_cast<std::size_t>(i)]);
                         });
    LatticeState next;
    next.d = state.d;
    next.D = state.D;
    next.step_count = state.step_count + 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (blocks[i].trace().real() < kSupportTrim) continue;
        next.sites.emplace(targets[i], std::move(blocks[i]));
    }
    return next;
}

// Contiguous line evolution for d = 1, D = 2. The window grows by one site per
// side and is trimmed where the boundary trace falls below the support cutoff,
// so the live width tracks the diffusive spread rather than the step count.
LatticeState evolve_line_2(const WalkModel& model, const LatticeState& init, std::uint64_t n) {
    using M2 = Eigen::Matrix2cd;
    const M2 A0 = model.op(0), A1 = model.op(1), A2 = model.op(2);
    const M2 A0d = A0.adjoint(), A1d = A1.adjoint(), A2d = A2.adjoint();

    std::int64_t lo = init.sites.begin()->first[0];
    std::int64_t hi = init.sites.rbegin()->first[0];
    const std::int64_t cap_lo = lo - static_cast<std::int64_t>(n);
    const std::int64_t cap_hi = hi + static_cast<std::int64_t>(n);
    const std::size_t width = static_cast<std::size_t>(cap_hi - cap_lo + 1);
    std::vector<M2> cur(width, M2::Zero()), nxt(width, M2::Zero());
    for (const auto& [x, tau] : init.sites) cur[static_cast<std::size_t>(x[0] - cap_lo)] = tau;

    for (std::uint64_t step = 0; step < n; ++step) {
        const std::int64_t tlo = std::max(lo - 1, cap_lo);
        const std::int64_t thi = std::min(hi + 1, cap_hi);
        linalg::parallel_for(thi - tlo + 1, [&](std::int64_t a, std::int64_t b) {
            for (std::int64_t i = a; i < b; ++i) {
                const std::int64_t x = tlo + i;
                const std::size_t k = static_cast<std::size_t>(x - cap_lo);
                // sources outside [lo, hi] carry no mass; the buffer may hold
                // stale blocks there after a trim, so every read is guarded
                M2 acc = M2::Zero();
                if (x >= lo && x <= hi) acc += A0 * cur[k] * A0d;
                if (x - 1 >= lo && x - 1 <= hi) acc += A1 * cur[k - 1] * A1d;
                if (x + 1 <= hi && x + 1 >= lo) acc += A2 * cur[k + 1] * A2d;
                nxt[k] = 0.5 * (acc + acc.adjoint());
            }
        });
        lo = tlo;
        hi = thi;
        while (lo < hi && nxt[static_cast<std::size_t>(lo - cap_lo)].trace().real() < kSupportTrim) {
            nxt[static_cast<std::size_t>(lo - cap_lo)].setZero();
            ++lo;
        }
        while (hi > lo && nxt[static_cast<std::size_t>(hi - cap_lo)].trace().real() < kSupportTrim) {
            nxt[static_cast<std::size_t>(hi - cap_lo)].setZero();
            --hi;
        }
        std::swap(cur, nxt);
    }

    LatticeState out;
    out.d = 1;
    out.D = 2;
    out.step_count = init.step_count + n;
    for (std::int64_t x = lo; x <= hi; ++x) {
        const M2& tau = cur[static_cast<std::size_t>(x - cap_lo)];
        if (tau.trace().real() < kSupportTrim) continue;
        out.sites.emplace(Site{x}, tau);
    }
    return out;
}

}  // namespace

double LatticeState::total_trace() const {
    double t = 0.0;
    for (const auto& [x, tau] : sites) t += tau.trace().real();
    return t;
}

double Distribution::total() const {
    double t = 0.0;
    for (const auto& [x, p] : probs) t += p;
    return t;
}

LatticeState point_state(const WalkModel& model, const Site& site, const Matrix& tau) {
    if (site.size() != static_cast<std::size_t>(model.d))
        throw StructuralError("site dimension does not match the model");
    validate_coin_state(tau, 1e-10);
    LatticeState state;
    state.d = model.d;
    state.D = model.D;
    state.sites.emplace(site, tau);
    return state;
}

LatticeState default_initial_state(const WalkModel& model) {
    return point_state(model, Site(static_cast<std::size_t>(model.d), 0),
                       maximally_mixed(model.D));
}

LatticeState step_lattice(const WalkModel& model, const LatticeState& state) {
    if (state.d != model.d || state.D != model.D)
        throw StructuralError("lattice state does not match the model dimensions");
    return step_generic(model, state);
}

LatticeState evolve(const WalkModel& model, const LatticeState& init, std::uint64_t n) {
    if (init.d != model.d || init.D != model.D)
        throw StructuralError("lattice state does not match the model dimensions");
    if (n == 0) return init;
    if (model.d == 1 && model.D == 2 && !init.sites.empty()) return evolve_line_2(model, init, n);
    LatticeState state = init;
    for (std::uint64_t i = 0; i < n; ++i) state = step_generic(model, state);
    return state;
}

Distribution position_distribution(const LatticeState& state) {
    Distribution dist;
    dist.d = state.d;
    for (const auto& [x, tau] : state.sites) dist.probs[x] = tau.trace().real();
    return dist;
}

Moments distribution_moments(const Distribution& dist) {
    const int d = dist.d;
    Moments mom;
    mom.mean = RealVector::Zero(d);
    mom.cov = RealMatrix::Zero(d, d);
    for (const auto& [x, p] : dist.probs)
        for (int i = 0; i < d; ++i) mom.mean[i] += p * static_cast<double>(x[static_cast<std::size_t>(i)]);
    for (const auto& [x, p] : dist.probs) {
        for (int i = 0; i < d; ++i) {
            const double dx_i = static_cast<double>(x[static_cast<std::size_t>(i)]) - mom.mean[i];
            for (int j = 0; j < d; ++j) {
                const double dx_j = static_cast<double>(x[static_cast<std::size_t>(j)]) - mom.mean[j];
                mom.cov(i, j) += p * dx_i * dx_j;
            }
        }
    }
    return mom;
}

}  // namespace oqw
