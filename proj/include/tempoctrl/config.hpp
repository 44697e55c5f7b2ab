#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "tempoctrl/errors.hpp"
#include "tempoctrl/model.hpp"

namespace tempoctrl {

/// Knobs shared by every decider and oracle. Defaults are chosen so that a
/// plain call on a desk-scale network just works.
struct RunConfig {
    std::optional<Rat> gridStepOverride;
    std::optional<Rat> horizonOverride;
    std::uint64_t nodeCap = 10'000'000;
    unsigned parallelism = 1; // worker threads for parallel outer loops
    std::uint64_t seed = 1;
    bool machineOutput = false;

    // Dynamic-controllability search knobs.
    bool contractRigid = true; // merge rigid executable pairs before search
    bool memoize = false;      // transposition table (trades space for time)
    unsigned strategyDepth = 16;
};

/// Resolved enumeration lattice for one network.
struct Grid {
    Rat step;
    Rat horizon;

    /// Nature-side enumeration runs at half step: any real-valued violating
    /// realization of a difference system with bounds on the 1/D lattice can
    /// be moved onto the 1/(2D) lattice, so the finer grid makes hole
    /// detection complete while the scheduler side stays on the coarse
    /// lattice.
    Rat natureStep() const { return step / Rat(2); }
};

inline Grid resolveGrid(const Network& n, const RunConfig& config) {
    Grid g;
    g.step = config.gridStepOverride.value_or(gridStep(n));
    if (!g.step.isPositive())
        throw StepMismatchError("grid step must be positive");
    if (config.gridStepOverride) {
        auto check = [&](const Bound& b) {
            if (b.isFinite() && !b.finite().isMultipleOf(g.step))
                throw StepMismatchError("grid step " + g.step.str() +
                                        " does not divide bound " + b.finite().str());
        };
        for (const auto& req : n.requirements)
            for (const auto& atom : req.disjuncts) {
                check(atom.interval.lo);
                check(atom.interval.hi);
            }
        for (const auto& link : n.links)
            for (const auto& range : link.ranges) {
                check(range.lo);
                check(range.hi);
            }
    }
    g.horizon = config.horizonOverride.value_or(defaultHorizon(n));
    if (g.horizon.isNegative())
        throw HorizonExceededError("horizon must be nonnegative");
    return g;
}

namespace detail {

/// Parallel search for the lowest index accepted by `test` among
/// [0, count). Runs serially for jobs <= 1. The verdict is deterministic:
/// workers may race, but the smallest accepted index always wins.
template <typename Test>
inline std::optional<std::uint64_t> firstAccepted(std::uint64_t count, unsigned jobs,
                                                  Test&& test) {
    if (jobs <= 1 || count < 64) {
        for (std::uint64_t i = 0; i < count; ++i)
            if (test(i)) return i;
        return std::nullopt;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> best{count};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                std::uint64_t i = next.fetch_add(1);
                if (i >= count || i >= best.load()) return;
                if (test(i)) {
                    std::uint64_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    std::uint64_t found = best.load();
    if (found == count) return std::nullopt;
    return found;
}

} // namespace detail

} // namespace tempoctrl
