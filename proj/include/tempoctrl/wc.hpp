#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempoctrl/config.hpp"
#include "tempoctrl/distance_graph.hpp"
#include "tempoctrl/qls.hpp"
#include "tempoctrl/quantify.hpp"
#include "tempoctrl/sc.hpp"

namespace tempoctrl {

/// Nature play for which no schedule exists.
struct WcCounterexample {
    Scenario scenario;
    OmegaSelection selection;
    Realization realization;
};

struct WcVerdict {
    bool controllable = false;
    std::optional<WcCounterexample> counterexample;
    // Convex fast path only: witness schedule per checked projection.
    std::optional<std::map<std::string, Schedule>> perProjectionWitness;
    std::uint64_t nodesExpanded = 0;
};

/// Certificate check for "not weakly controllable": substitute the given
/// durations, keep the scenario-entailed constraints, and confirm that no
/// schedule satisfies them.
inline bool wcCounterexampleVerify(const Network& n, const Scenario& scenario,
                                   const OmegaSelection& selection,
                                   const Realization& realization) {
    requireValid(n);
    QlsSystem sys = encode(n);
    if (scenario.values.size() != sys.propositions.size() ||
        selection.size() != sys.natureCount() || realization.size() != sys.natureCount())
        throw WitnessMalformedError("counterexample shape does not match the network");
    for (std::size_t i = 0; i < sys.natureCount(); ++i) {
        const auto& dom = sys.variables[sys.natureVars[i]].domain;
        if (selection[i] >= dom.size() || !dom[selection[i]].contains(realization[i]))
            throw WitnessMalformedError("realization leaves its selected range");
    }
    auto proj = detail::projectForScheduler(sys, scenario, realization);
    if (proj.impossible) return true;
    return !dtnFeasible(proj.requirements, sys.schedulerCount()).has_value();
}

namespace detail {

inline std::string projectionKey(const Scenario& sc, const Realization& y) {
    std::string key = "s=";
    for (bool b : sc.values) key += b ? '1' : '0';
    key += ";y=";
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i) key += ',';
        key += y[i].str();
    }
    return key;
}

} // namespace detail

/// Weak controllability for the convex classes (no requirement disjunctions):
/// the schedulable region of nature plays is convex, so checking every
/// scenario against every corner of the duration box decides the network.
/// Counterexamples are re-verified before they are returned.
inline WcVerdict wcCstnu(const Network& n) {
    detail::requireClassAtMost(n, NetworkClass::CSTNU, "wcCstnu");
    QlsSystem sys = encode(n);

    WcVerdict out;
    out.perProjectionWitness.emplace();
    auto scen = enumerateScenarios(sys);
    while (auto sc = scen.next()) {
        // Convex classes carry one range per link; walk its two endpoints.
        std::vector<std::size_t> radices(sys.natureCount(), 2);
        OmegaCursor corners(radices);
        while (auto corner = corners.next()) {
            ++out.nodesExpanded;
            Realization y;
            for (std::size_t i = 0; i < sys.natureCount(); ++i) {
                const Interval& r = sys.variables[sys.natureVars[i]].domain.front();
                y.push_back((*corner)[i] == 0 ? r.lo.finite() : r.hi.finite());
            }
            auto proj = detail::projectForScheduler(sys, *sc, y);
            std::optional<Schedule> witness;
            if (!proj.impossible) {
                std::vector<Atom> atoms;
                for (const auto& req : proj.requirements)
                    atoms.push_back(req.disjuncts.front());
                witness = stnSchedule(toDistanceGraph(atoms, sys.schedulerCount()));
            }
            if (!witness) {
                WcCounterexample ce{*sc, OmegaSelection(sys.natureCount(), 0), y};
                if (!wcCounterexampleVerify(n, ce.scenario, ce.selection, ce.realization))
                    throw std::logic_error("unverifiable weak-controllability counterexample");
                out.counterexample = ce;
                out.perProjectionWitness.reset();
                return out;
            }
            (*out.perProjectionWitness)[detail::projectionKey(*sc, y)] = *witness;
        }
    }
    out.controllable = true;
    return out;
}

/// Weak controllability for the disjunctive classes: enumerate scenarios,
/// range selections and grid realizations; each projection must admit some
/// disjunct selection with a consistent schedule. Gaps between disjuncts mean
/// corner checks are not enough, hence the grid walk.
inline WcVerdict wcCdtnu(const Network& n, const RunConfig& config = {}) {
    requireValid(n);
    QlsSystem sys = encode(n);
    Grid grid = resolveGrid(n, config);

    WcVerdict out;
    std::uint64_t budget = config.nodeCap;
    auto scen = enumerateScenarios(sys);
    while (auto sc = scen.next()) {
        auto omegas = enumerateOmega(sys);
        while (auto omega = omegas.next()) {
            auto reals = enumerateRealizations(sys, *omega, grid.natureStep());
            while (auto y = reals.next()) {
                if (budget == 0)
                    throw HorizonExceededError("projection enumeration exceeded node cap");
                --budget;
                ++out.nodesExpanded;
                auto proj = detail::projectForScheduler(sys, *sc, *y);
                bool feasible = !proj.impossible &&
                                dtnFeasible(proj.requirements, sys.schedulerCount()).has_value();
                if (!feasible) {
                    WcCounterexample ce{*sc, *omega, *y};
                    if (!wcCounterexampleVerify(n, ce.scenario, ce.selection, ce.realization))
                        throw std::logic_error("unverifiable weak-controllability counterexample");
                    out.counterexample = ce;
                    return out;
                }
            }
        }
    }
    out.controllable = true;
    return out;
}

/// Ground truth by plain grids on both sides: nature plays from the cursors,
/// the inner schedule search over the anchored lattice through qls.evaluate.
/// No projection or selection machinery is involved.
inline WcVerdict wcOracle(const Network& n, const RunConfig& config = {}) {
    requireValid(n);
    QlsSystem sys = encode(n);
    Grid grid = resolveGrid(n, config);

    WcVerdict out;
    std::uint64_t budget = config.nodeCap;
    // The schedule answers a known play, so it must live on the fine lattice.
    Grid xGrid = grid;
    xGrid.step = grid.natureStep();
    std::optional<std::vector<Rat>> lastGood;

    auto scen = enumerateScenarios(sys);
    while (auto sc = scen.next()) {
        auto omegas = enumerateOmega(sys);
        while (auto omega = omegas.next()) {
            auto reals = enumerateRealizations(sys, *omega, grid.natureStep());
            while (auto y = reals.next()) {
                ++out.nodesExpanded;
                if (lastGood && evaluate(sys, *sc, *lastGood, *y).satisfied) continue;
                detail::CandidateEnumerator xs(sys, xGrid);
                auto found = xs.firstWhere(
                    [&](const std::vector<Rat>& x) {
                        return evaluate(sys, *sc, x, *y).satisfied;
                    },
                    &budget);
                if (!found) {
                    out.counterexample = WcCounterexample{*sc, *omega, *y};
                    return out;
                }
                lastGood = found;
            }
        }
    }
    out.controllable = true;
    return out;
}

} // namespace tempoctrl
