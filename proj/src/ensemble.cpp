#include "qsme/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <utility>

#include "qsme/errors.hpp"
#include "qsme/rng.hpp"

namespace qsme {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested, int n_jobs) {
    int t = requested;
    if (t <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        t = hw == 0 ? 1 : static_cast<int>(std::min(hw, 32u));
    }
    return std::max(1, std::min(t, n_jobs));
}

// fn(i) for i in [0, n); fn must not throw.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

double quantile_sorted(const std::vector<double>& v, double q) {
    // Linear interpolation between order statistics (the common "type 7").
    if (v.empty()) return kNaN;
    double pos = q * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

std::pair<double, double> fit_window(const SdeConfig& cfg, const EnsembleOptions& opts) {
    if (opts.fit_start >= 0.0 && opts.fit_end > opts.fit_start)
        return {opts.fit_start, opts.fit_end};
    return default_fit_window(cfg.t_final);
}

SdeConfig with_seed(const SdeConfig& cfg, std::uint64_t seed) {
    SdeConfig c = cfg;
    c.seed = seed;
    return c;
}

} // namespace

EnsembleSummary run_ensemble(const CoupledState& ic, const PhysParams& p,
                             const EstParams& e, const FeedbackLaw& law,
                             const SdeConfig& cfg, int n_traj,
                             const EnsembleOptions& opts) {
    if (n_traj < 1) throw config_error("n_traj must be >= 1");
    validate(p);
    validate(e);
    validate(cfg);

    struct Slot {
        std::vector<double> V;
        double terminal_dist = kNaN;
        double exponent = kNaN;
        bool failed = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(n_traj));
    const auto [w0, w1] = fit_window(cfg, opts);

    parallel_for(n_traj, resolve_threads(opts.threads, n_traj), [&](int i) {
        Slot& slot = slots[static_cast<std::size_t>(i)];
        try {
            Trajectory traj = simulate(
                ic, p, e, law,
                with_seed(cfg, rng::derive_seed(cfg.seed, 0,
                                                static_cast<std::uint64_t>(i))));
            slot.V = std::move(traj.lyapunov);
            slot.terminal_dist =
                coupled_distance_to_target(traj.states.back(), law.target);
            try {
                slot.exponent =
                    estimate_sample_exponent(traj.times, slot.V, w0, w1).slope;
            } catch (const estimation_error&) {
                // path hit the pole too early for a fit; leave NaN
            }
        } catch (const std::exception&) {
            slot.failed = true;
        }
    });

    EnsembleSummary out;
    out.n_traj = n_traj;
    // The recorded time grid is the same for every trajectory.
    SdeConfig grid = cfg;
    std::int64_t total = n_steps(grid);
    std::int64_t nrec = (total > 0 ? total / grid.record_stride : 0) + 1;
    out.times.reserve(static_cast<std::size_t>(nrec));
    for (std::int64_t k = 0; k < nrec; ++k)
        out.times.push_back(static_cast<double>(k * grid.record_stride) * grid.dt);

    int converged = 0;
    for (int i = 0; i < n_traj; ++i) {
        const Slot& slot = slots[static_cast<std::size_t>(i)];
        out.per_traj_exponents.push_back(slot.exponent);
        out.terminal_V.push_back(slot.failed ? kNaN : slot.V.back());
        if (slot.failed) {
            ++out.n_failed;
            out.failed_indices.push_back(i);
        } else if (slot.terminal_dist < opts.convergence_threshold) {
            ++converged;
        }
    }
    out.convergence_fraction = static_cast<double>(converged) / n_traj;

    const std::size_t nt = out.times.size();
    out.mean_V.assign(nt, kNaN);
    out.q10.assign(nt, kNaN);
    out.q50.assign(nt, kNaN);
    out.q90.assign(nt, kNaN);
    std::vector<double> column;
    for (std::size_t k = 0; k < nt; ++k) {
        column.clear();
        double sum = 0.0;
        for (int i = 0; i < n_traj; ++i) { // index order: bit-reproducible
            const Slot& slot = slots[static_cast<std::size_t>(i)];
            if (slot.failed) continue;
            sum += slot.V[k];
            column.push_back(slot.V[k]);
        }
        if (column.empty()) continue;
        out.mean_V[k] = sum / static_cast<double>(column.size());
        std::sort(column.begin(), column.end());
        out.q10[k] = quantile_sorted(column, 0.1);
        out.q50[k] = quantile_sorted(column, 0.5);
        out.q90[k] = quantile_sorted(column, 0.9);
    }
    return out;
}

BlochVector sample_ball(rng::Xoshiro256pp& gen) {
    for (;;) {
        BlochVector b{2.0 * rng::uniform01(gen) - 1.0, 2.0 * rng::uniform01(gen) - 1.0,
                      2.0 * rng::uniform01(gen) - 1.0};
        if (b.norm2() <= 1.0) return b;
    }
}

namespace {

// Uniform draw from {b in ball : z in [z_lo, z_hi]}: z with density (1-z^2),
// then (x,y) uniform on the disk of radius sqrt(1-z^2).
BlochVector sample_cap(rng::Xoshiro256pp& gen, double z_lo, double z_hi) {
    double peak = std::max(1.0 - z_lo * z_lo, 1.0 - z_hi * z_hi);
    double z;
    for (;;) {
        z = z_lo + (z_hi - z_lo) * rng::uniform01(gen);
        if (rng::uniform01(gen) * peak <= 1.0 - z * z) break;
    }
    double rmax = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (;;) {
        double x = rmax * (2.0 * rng::uniform01(gen) - 1.0);
        double y = rmax * (2.0 * rng::uniform01(gen) - 1.0);
        if (x * x + y * y <= rmax * rmax) return BlochVector{x, y, z};
    }
}

bool is_pole(const BlochVector& b) {
    return b.x == 0.0 && b.y == 0.0 && std::abs(b.z) == 1.0;
}

// z-range of the Bures ball of radius r around a pure pole: the distance to
// a pole depends on z alone, d^2 = 2 - 2 sqrt((1 + pole*z)/2).
std::pair<double, double> cap_range(double pole, double r) {
    double c = 1.0 - 0.5 * r * r;             // sqrt((1+pole*z)/2) > c
    double bound = 2.0 * c * c - 1.0;         // pole*z > bound
    bound = std::clamp(bound, -1.0, 1.0);
    return pole > 0 ? std::make_pair(bound, 1.0) : std::make_pair(-1.0, -bound);
}

} // namespace

std::vector<CoupledState> sample_coupled_ball(const CoupledState& center, double radius,
                                              int n, std::uint64_t seed) {
    if (!is_pole(center.actual) || !is_pole(center.estimate))
        throw config_error("sample_coupled_ball supports pole-pair centers only");
    if (!(radius > 0.0 && radius < std::numbers::sqrt2))
        throw config_error("sample radius must be in (0, sqrt(2))");

    auto [a_lo, a_hi] = cap_range(center.actual.z, radius);
    auto [e_lo, e_hi] = cap_range(center.estimate.z, radius);

    rng::Xoshiro256pp gen(seed);
    std::vector<CoupledState> out;
    out.reserve(static_cast<std::size_t>(n));
    while (static_cast<int>(out.size()) < n) {
        CoupledState s{sample_cap(gen, a_lo, a_hi), sample_cap(gen, e_lo, e_hi)};
        double d = coupled_distance(s, center);
        if (d > 0.0 && d < radius) out.push_back(s);
    }
    return out;
}

std::vector<CoupledState> sample_coupled_uniform(int n, std::uint64_t seed) {
    rng::Xoshiro256pp gen(seed);
    std::vector<CoupledState> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(CoupledState{sample_ball(gen), sample_ball(gen)});
    return out;
}

namespace {

struct HitResult {
    bool hit = false;
    double time = kNaN;
};

// First recorded time with pred(state) true.
template <typename Pred>
HitResult first_hit(const Trajectory& traj, Pred&& pred) {
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        if (pred(traj.states[k])) return {true, traj.times[k]};
    return {false, kNaN};
}

} // namespace

ExitTimeStudy exit_time_study(Target target, double radius, const PhysParams& p,
                              const EstParams& e, const FeedbackLaw& law,
                              const SdeConfig& cfg, int n_traj,
                              const EnsembleOptions& opts) {
    if (n_traj < 1) throw config_error("n_traj must be >= 1");
    validate(p);
    validate(e);
    validate(cfg);

    const CoupledState center{target_bloch(target == Target::Excited ? Target::Ground
                                                                     : Target::Excited),
                              target_bloch(target)};
    const auto ics =
        sample_coupled_ball(center, radius, n_traj, rng::derive_seed(cfg.seed, 1, 0));

    std::vector<HitResult> hits(static_cast<std::size_t>(n_traj));
    parallel_for(n_traj, resolve_threads(opts.threads, n_traj), [&](int i) {
        try {
            Trajectory traj =
                simulate(ics[static_cast<std::size_t>(i)], p, e, law,
                         with_seed(cfg, rng::derive_seed(cfg.seed, 0,
                                                         static_cast<std::uint64_t>(i))));
            hits[static_cast<std::size_t>(i)] = first_hit(traj, [&](const CoupledState& s) {
                return coupled_distance(s, center) >= radius;
            });
        } catch (const std::exception&) {
            // blowup counts as not exited
        }
    });

    ExitTimeStudy study;
    study.n_traj = n_traj;
    study.radius = radius;
    double sum = 0.0;
    for (const auto& h : hits)
        if (h.hit) {
            ++study.n_exit;
            sum += h.time;
        }
    study.exit_fraction = static_cast<double>(study.n_exit) / n_traj;
    study.mean_exit_time = study.n_exit > 0 ? sum / study.n_exit : kNaN;
    return study;
}

ReachTimeStudy reach_time_study(const std::vector<CoupledState>& ics, double radius,
                                const PhysParams& p, const EstParams& e,
                                const FeedbackLaw& law, const SdeConfig& cfg,
                                int n_traj, const EnsembleOptions& opts) {
    if (n_traj < 1) throw config_error("n_traj must be >= 1");
    if (ics.empty()) throw config_error("reach_time_study needs at least one ic");
    if (!(radius > 0.0)) throw config_error("reach radius must be > 0");
    validate(p);
    validate(e);
    validate(cfg);

    const Target target = law.target;
    std::vector<HitResult> hits(static_cast<std::size_t>(n_traj));
    parallel_for(n_traj, resolve_threads(opts.threads, n_traj), [&](int i) {
        try {
            Trajectory traj =
                simulate(ics[static_cast<std::size_t>(i) % ics.size()], p, e, law,
                         with_seed(cfg, rng::derive_seed(cfg.seed, 0,
                                                         static_cast<std::uint64_t>(i))));
            hits[static_cast<std::size_t>(i)] = first_hit(traj, [&](const CoupledState& s) {
                return coupled_distance_to_target(s, target) < radius;
            });
        } catch (const std::exception&) {
        }
    });

    ReachTimeStudy study;
    study.n_traj = n_traj;
    study.radius = radius;
    double sum = 0.0;
    for (const auto& h : hits)
        if (h.hit) {
            ++study.n_reach;
            sum += h.time;
        }
    study.reach_fraction = static_cast<double>(study.n_reach) / n_traj;
    study.mean_tau_r = study.n_reach > 0 ? sum / study.n_reach : kNaN;
    return study;
}

MartingaleStat martingale_check(const CoupledState& ic, const PhysParams& p,
                                const EstParams& e, const SdeConfig& cfg, int n_traj,
                                const EnsembleOptions& opts) {
    if (n_traj < 2) throw config_error("martingale check needs n_traj >= 2");
    validate(p);
    validate(e);
    validate(cfg);

    const FeedbackLaw law = FeedbackLaw::zero(Target::Excited);
    std::vector<double> zT(static_cast<std::size_t>(n_traj),
                           std::numeric_limits<double>::quiet_NaN());
    parallel_for(n_traj, resolve_threads(opts.threads, n_traj), [&](int i) {
        try {
            Trajectory traj = simulate(
                ic, p, e, law,
                with_seed(cfg, rng::derive_seed(cfg.seed, 0,
                                                static_cast<std::uint64_t>(i))));
            zT[static_cast<std::size_t>(i)] = traj.states.back().actual.z;
        } catch (const std::exception&) {
        }
    });

    MartingaleStat stat;
    stat.z0 = ic.actual.z;
    double sum = 0.0;
    int n = 0;
    for (double z : zT)
        if (std::isfinite(z)) {
            sum += z;
            ++n;
        }
    if (n < 2) throw estimation_error("martingale check: too few surviving paths");
    stat.n = n;
    stat.mean_zT = sum / n;
    double ss = 0.0;
    for (double z : zT)
        if (std::isfinite(z)) {
            double d = z - stat.mean_zT;
            ss += d * d;
        }
    stat.std_error = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    return stat;
}

} // namespace qsme
