#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "tempoctrl/config.hpp"
#include "tempoctrl/distance_graph.hpp"
#include "tempoctrl/model.hpp"
#include "tempoctrl/qls.hpp"
#include "tempoctrl/quantify.hpp"

namespace tempoctrl {

/// A scheduler assignment together with the nature play that defeats it.
struct ScCounterexample {
    Schedule candidate;
    Scenario scenario;
    OmegaSelection selection;
    Realization realization;
    std::size_t violatedClause = 0;
};

struct ScVerdict {
    bool controllable = false;
    std::optional<Schedule> witness;
    std::optional<ScCounterexample> counterexample;
    std::uint64_t nodesExpanded = 0;
};

namespace detail {

inline void requireClassAtMost(const Network& n, NetworkClass limit, const char* who) {
    auto cls = classify(n);
    if (!classAtMost(cls, limit))
        throw ClassMismatchError(std::string(who) + " expects a network of class at most " +
                                 className(limit) + ", got " + className(cls));
}

inline OmegaSelection selectionContaining(const QlsSystem& sys, const Realization& y) {
    OmegaSelection sel(sys.natureCount(), 0);
    for (std::size_t i = 0; i < sys.natureCount(); ++i) {
        const auto& dom = sys.variables[sys.natureVars[i]].domain;
        bool found = false;
        for (std::size_t r = 0; r < dom.size() && !found; ++r)
            if (dom[r].contains(y[i])) {
                sel[i] = r;
                found = true;
            }
        if (!found) throw std::logic_error("duration outside every range");
    }
    return sel;
}

} // namespace detail

/// Strong controllability for STN and STNU inputs: substitute the worst-case
/// range endpoint into every inequality, then solve the remaining STN. The
/// earliest solution of the tightened system is the witness.
inline ScVerdict scStnu(const Network& n) {
    detail::requireClassAtMost(n, NetworkClass::STNU, "scStnu");
    QlsSystem sys = encode(n);
    std::vector<detail::XIneq> tight;
    for (const auto& clause : sys.clauses)
        for (const auto& d : clause.disjuncts)
            for (const auto& iq : d.inequalities)
                tight.push_back(detail::tightenUniversally(
                    sys, iq, [&](std::size_t v) { return detail::domainHull(sys, v); }));
    ScVerdict out;
    auto graph = detail::schedulerStn(sys, tight);
    if (!graph) return out;
    auto positionTimes = stnSchedule(*graph);
    if (!positionTimes) return out;
    out.controllable = true;
    Schedule witness;
    for (const auto& [pos, t] : *positionTimes)
        witness[sys.variables[sys.schedulerVars[pos]].timepoint] = t;
    out.witness = witness;
    return out;
}

/// Strong controllability of a conditional network equals strong
/// controllability of the same network with every condition removed, so the
/// conditional classes ride on the STNU decider.
inline ScVerdict scCstnu(const Network& n) {
    detail::requireClassAtMost(n, NetworkClass::CSTNU, "scCstnu");
    return scStnu(stripLabels(n));
}

/// Per-constraint robustness report for a fixed candidate schedule.
struct ScVerifyReport {
    bool robust = false;
    bool scheduleNonnegative = true;
    struct Item {
        std::size_t requirement = 0;
        bool ok = true;
        std::optional<Interval> failingAttained; // reachable difference window
        std::string note;
    };
    std::vector<Item> perConstraint;
};

/// Checks a candidate schedule for a (at most) TCSPU network: for every
/// constraint and every combination of its contingent ranges, the reachable
/// difference interval must land inside a single disjunct. A second route
/// tests the strict gap systems for positive slack; the two must agree.
inline ScVerifyReport scTcspuVerify(const Network& n, const Schedule& candidate) {
    detail::requireClassAtMost(n, NetworkClass::TCSPU, "scTcspuVerify");
    Network norm = normalize(n);
    QlsSystem sys = encode(norm);
    std::vector<Rat> x = detail::fromNetworkSchedule(sys, candidate);

    ScVerifyReport report;
    report.robust = true;
    for (const auto& v : x)
        if (v.isNegative()) {
            report.scheduleNonnegative = false;
            report.robust = false;
        }

    for (std::size_t c = 0; c < norm.requirements.size(); ++c) {
        const auto& req = norm.requirements[c];
        ScVerifyReport::Item item;
        item.requirement = c;

        auto terms = sys.differenceTerms(req.disjuncts[0].source, req.disjuncts[0].target);
        Rat xConst(0);
        std::vector<std::size_t> yVars;
        std::vector<int> yCoeff;
        for (const auto& t : terms) {
            if (sys.variables[t.var].kind == QlsVariable::Kind::Scheduler) {
                Rat v = x[sys.schedulerPos(sys.variables[t.var].timepoint)];
                xConst += t.coeff == 1 ? v : -v;
            } else {
                yVars.push_back(t.var);
                yCoeff.push_back(t.coeff);
            }
        }

        // Every combination of ranges for the involved duration variables.
        std::vector<std::size_t> radices;
        for (auto v : yVars) radices.push_back(sys.variables[v].domain.size());
        OmegaCursor combos(radices);
        while (auto combo = combos.next()) {
            Rat lo = xConst, hi = xConst;
            for (std::size_t i = 0; i < yVars.size(); ++i) {
                const Interval& r = sys.variables[yVars[i]].domain[(*combo)[i]];
                if (yCoeff[i] == 1) {
                    lo += r.lo.finite();
                    hi += r.hi.finite();
                } else {
                    lo -= r.hi.finite();
                    hi -= r.lo.finite();
                }
            }
            Interval attained(lo, hi);
            bool contained = false;
            for (const auto& atom : req.disjuncts)
                if (atom.interval.containsInterval(attained)) contained = true;

            // Alternate route: positive slack in some strict complement piece
            // means a real duration choice escapes the disjunct union.
            bool escapes = false;
            std::vector<Interval> box{attained};
            auto probe = [&](std::vector<StrictIneq> piece) {
                if (maxMinSlack(piece, box).strictlySatisfiable()) escapes = true;
            };
            const auto& first = req.disjuncts.front().interval;
            const auto& last = req.disjuncts.back().interval;
            if (first.lo.isFinite())
                probe({StrictIneq{{{0, -1}}, -first.lo.finite()}}); // s < l_1
            if (last.hi.isFinite())
                probe({StrictIneq{{{0, 1}}, last.hi.finite()}}); // s > u_k
            for (std::size_t d = 1; d < req.disjuncts.size(); ++d) {
                const auto& prev = req.disjuncts[d - 1].interval;
                const auto& cur = req.disjuncts[d].interval;
                probe({StrictIneq{{{0, 1}}, prev.hi.finite()},
                       StrictIneq{{{0, -1}}, -cur.lo.finite()}}); // inside a gap
            }
            if (contained == escapes)
                throw std::logic_error("containment and slack routes disagree");
            if (!contained) {
                item.ok = false;
                item.failingAttained = attained;
                item.note = "difference window " + attained.str() + " escapes the union";
                break;
            }
        }
        if (!item.ok) report.robust = false;
        report.perConstraint.push_back(std::move(item));
    }
    return report;
}

/// Complete strong-controllability search for TCSPU: pick one disjunct per
/// (constraint, range combination), tighten it universally, and test the
/// resulting STN; the first feasible pick is verified and returned.
inline ScVerdict scTcspu(const Network& n, const RunConfig& config = {}) {
    detail::requireClassAtMost(n, NetworkClass::TCSPU, "scTcspu");
    Network norm = normalize(n);
    QlsSystem sys = encode(norm);

    struct Slot {
        std::size_t clause;
        std::vector<std::size_t> yVars;
        std::vector<int> yCoeff;
        OmegaSelection combo; // range index per yVar
    };
    std::vector<Slot> slots;
    for (std::size_t c = 0; c < norm.requirements.size(); ++c) {
        const auto& req = norm.requirements[c];
        Slot base;
        base.clause = c;
        auto terms = sys.differenceTerms(req.disjuncts[0].source, req.disjuncts[0].target);
        for (const auto& t : terms)
            if (sys.variables[t.var].kind == QlsVariable::Kind::Nature) {
                base.yVars.push_back(t.var);
                base.yCoeff.push_back(t.coeff);
            }
        std::vector<std::size_t> radices;
        for (auto v : base.yVars) radices.push_back(sys.variables[v].domain.size());
        OmegaCursor combos(radices);
        while (auto combo = combos.next()) {
            Slot s = base;
            s.combo = *combo;
            slots.push_back(std::move(s));
        }
    }
    std::stable_sort(slots.begin(), slots.end(), [&](const Slot& a, const Slot& b) {
        return norm.requirements[a.clause].disjuncts.size() <
               norm.requirements[b.clause].disjuncts.size();
    });

    // Incrementally grown difference graph over scheduler positions.
    DistanceGraph g;
    g.nodeCount = sys.schedulerCount();
    for (std::uint32_t i = 0; i < g.nodeCount; ++i)
        g.edges.push_back({i, g.zeroNode(), Rat(0)});
    std::vector<std::uint32_t> posOf(sys.variables.size(), 0);
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
        posOf[sys.schedulerVars[i]] = static_cast<std::uint32_t>(i);

    ScVerdict out;
    std::uint64_t nodes = 0;

    std::function<bool(std::size_t)> dive = [&](std::size_t level) -> bool {
        if (++nodes > config.nodeCap)
            throw ResourceCapError("selection search exceeded node cap");
        if (level == slots.size()) return true;
        const Slot& slot = slots[level];
        const auto& req = norm.requirements[slot.clause];
        auto terms = sys.differenceTerms(req.disjuncts[0].source, req.disjuncts[0].target);

        for (const auto& atom : req.disjuncts) {
            // Reachable duration sum over the chosen ranges.
            Rat sLo(0), sHi(0);
            for (std::size_t i = 0; i < slot.yVars.size(); ++i) {
                const Interval& r = sys.variables[slot.yVars[i]].domain[slot.combo[i]];
                if (slot.yCoeff[i] == 1) {
                    sLo += r.lo.finite();
                    sHi += r.hi.finite();
                } else {
                    sLo -= r.hi.finite();
                    sHi -= r.lo.finite();
                }
            }
            Bound winLo = atom.interval.lo - sLo; // x-part >= l - sLo
            Bound winHi = atom.interval.hi - sHi; // x-part <= u - sHi
            if (!(winLo <= winHi)) continue;

            std::vector<CondIneq::Term> xs;
            for (const auto& t : terms)
                if (sys.variables[t.var].kind == QlsVariable::Kind::Scheduler)
                    xs.push_back(t);
            std::size_t added = 0;
            bool constantDead = false;
            if (xs.empty()) {
                if (winLo.isFinite() && Rat(0) < winLo.finite()) constantDead = true;
                if (winHi.isFinite() && Rat(0) > winHi.finite()) constantDead = true;
            } else {
                auto plus = xs[0].coeff == 1 ? xs[0].var : xs[1].var;
                auto minus = xs[0].coeff == -1 ? xs[0].var : xs[1].var;
                if (winHi.isFinite()) {
                    g.edges.push_back({posOf[minus], posOf[plus], winHi.finite()});
                    ++added;
                }
                if (winLo.isFinite()) {
                    g.edges.push_back({posOf[plus], posOf[minus], -winLo.finite()});
                    ++added;
                }
            }
            if (!constantDead && !detectNegativeCycle(g) && dive(level + 1))
                return true;
            g.edges.resize(g.edges.size() - added);
        }
        return false;
    };

    bool feasible = dive(0);
    out.nodesExpanded = nodes;
    if (!feasible) return out;

    auto positionTimes = stnSchedule(g);
    Schedule witness;
    for (const auto& [pos, t] : *positionTimes)
        witness[sys.variables[sys.schedulerVars[pos]].timepoint] = t;
    if (!scTcspuVerify(n, witness).robust)
        throw std::logic_error("tightened selection failed verification");
    out.controllable = true;
    out.witness = witness;
    return out;
}

namespace detail {

/// Earliest schedules of the scheduler-only clause selections, used to seed
/// the candidate search before the grid scan.
inline std::vector<std::vector<Rat>> seedSchedules(const QlsSystem& sys,
                                                   std::size_t cap) {
    std::vector<Requirement> xOnly;
    for (const auto& clause : sys.clauses) {
        Requirement req;
        bool usable = true;
        for (const auto& d : clause.disjuncts) {
            if (!d.label.empty()) {
                usable = false;
                break;
            }
            std::optional<std::pair<std::uint32_t, std::uint32_t>> pair;
            Interval iv = Interval::unbounded();
            bool xOnlyDisjunct = true;
            for (const auto& iq : d.inequalities) {
                std::vector<CondIneq::Term> xs;
                for (const auto& t : iq.terms) {
                    if (sys.variables[t.var].kind == QlsVariable::Kind::Nature)
                        xOnlyDisjunct = false;
                    else
                        xs.push_back(t);
                }
                if (!xOnlyDisjunct) break;
                if (xs.empty()) continue;
                auto plus = xs[0].coeff == 1 ? xs[0].var : xs[1].var;
                auto minus = xs[0].coeff == -1 ? xs[0].var : xs[1].var;
                std::uint32_t p = 0, m = 0;
                for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i) {
                    if (sys.schedulerVars[i] == plus) p = static_cast<std::uint32_t>(i);
                    if (sys.schedulerVars[i] == minus) m = static_cast<std::uint32_t>(i);
                }
                if (!pair) pair = {p, m};
                if (pair->first == p) {
                    if (Bound(iq.bound) < iv.hi) iv.hi = Bound(iq.bound);
                } else {
                    if (Bound(-iq.bound) > iv.lo) iv.lo = Bound(-iq.bound);
                }
            }
            if (!xOnlyDisjunct) {
                usable = false;
                break;
            }
            if (pair && iv.lo <= iv.hi)
                req.disjuncts.emplace_back(static_cast<TpIndex>(pair->second),
                                           static_cast<TpIndex>(pair->first), iv);
        }
        if (usable && !req.disjuncts.empty()) xOnly.push_back(std::move(req));
    }

    std::vector<std::vector<Rat>> seeds;
    seeds.emplace_back(sys.schedulerCount(), Rat(0));
    // Walk the selection tree, keeping each feasible leaf's earliest schedule.
    std::vector<Atom> chosen;
    std::function<void(std::size_t)> walk = [&](std::size_t level) {
        if (seeds.size() >= cap) return;
        if (level == xOnly.size()) {
            auto sched = stnSchedule(toDistanceGraph(chosen, sys.schedulerCount()));
            if (sched) {
                std::vector<Rat> x(sys.schedulerCount(), Rat(0));
                for (const auto& [pos, t] : *sched) x[pos] = t;
                seeds.push_back(std::move(x));
            }
            return;
        }
        for (const auto& atom : xOnly[level].disjuncts) {
            chosen.push_back(atom);
            if (!detectNegativeCycle(toDistanceGraph(chosen, sys.schedulerCount())))
                walk(level + 1);
            chosen.pop_back();
        }
    };
    walk(0);
    return seeds;
}

} // namespace detail

/// Two-level strong-controllability search for the full class hierarchy:
/// an outer pass over candidate schedules (seeds first, then the anchored
/// grid) and an inner search for a scenario and realization defeating the
/// candidate. Recent defeats are replayed first, which discards most
/// candidates with a single evaluation.
inline ScVerdict scCdtnu(const Network& n, const RunConfig& config = {}) {
    requireValid(n);
    QlsSystem sys = encode(n);
    Grid grid = resolveGrid(n, config);
    detail::ViolationSearch violation(sys, grid.natureStep());

    ScVerdict out;
    std::uint64_t candidateBudget = config.nodeCap;
    std::uint64_t violationBudget = config.nodeCap;

    std::deque<detail::NaturePlay> recent;
    std::optional<ScCounterexample> best;
    std::uint64_t bestEffort = 0;

    auto probe = [&](const std::vector<Rat>& x) -> bool {
        ++out.nodesExpanded;
        for (const auto& play : recent) {
            auto ev = evaluate(sys, play.scenario, x, play.realization);
            if (!ev.satisfied) return false;
        }
        std::uint64_t before = violationBudget;
        auto hit = violation.find(x, &violationBudget);
        if (!hit) return true;
        std::uint64_t effort = before - violationBudget;
        if (!best || effort > bestEffort) {
            bestEffort = effort;
            best = ScCounterexample{detail::toNetworkSchedule(sys, x), hit->scenario,
                                    detail::selectionContaining(sys, hit->realization),
                                    hit->realization, hit->clause};
        }
        recent.push_front(*hit);
        if (recent.size() > 8) recent.pop_back();
        return false;
    };

    for (const auto& seed : detail::seedSchedules(sys, 128)) {
        if (probe(seed)) {
            out.controllable = true;
            out.witness = detail::toNetworkSchedule(sys, seed);
            return out;
        }
    }

    detail::CandidateEnumerator enumerator(sys, grid);
    auto found = enumerator.firstWhere(probe, &candidateBudget);
    if (found) {
        out.controllable = true;
        out.witness = detail::toNetworkSchedule(sys, *found);
        return out;
    }
    out.counterexample = best;
    return out;
}

/// Brute-force ground truth: anchored grid over schedules, full cursor
/// enumeration over scenarios, range selections and realizations. Slow by
/// design and independent of the clever searches above.
inline ScVerdict scOracle(const Network& n, const RunConfig& config = {}) {
    requireValid(n);
    QlsSystem sys = encode(n);
    Grid grid = resolveGrid(n, config);

    ScVerdict out;
    std::uint64_t budget = config.nodeCap;
    std::optional<ScCounterexample> lastDefeat;
    std::optional<detail::NaturePlay> cached;

    auto defeatedBy = [&](const std::vector<Rat>& x) -> std::optional<detail::NaturePlay> {
        auto scen = enumerateScenarios(sys);
        while (auto sc = scen.next()) {
            auto omegas = enumerateOmega(sys);
            while (auto omega = omegas.next()) {
                auto reals = enumerateRealizations(sys, *omega, grid.natureStep());
                while (auto y = reals.next()) {
                    if (budget == 0)
                        throw HorizonExceededError("oracle enumeration exceeded node cap");
                    --budget;
                    auto ev = evaluate(sys, *sc, x, *y);
                    if (!ev.satisfied) {
                        detail::NaturePlay play;
                        play.scenario = *sc;
                        play.realization = *y;
                        play.clause = ev.violatedClauses.front();
                        return play;
                    }
                }
            }
        }
        return std::nullopt;
    };

    auto probe = [&](const std::vector<Rat>& x) -> bool {
        ++out.nodesExpanded;
        if (cached) {
            auto ev = evaluate(sys, cached->scenario, x, cached->realization);
            if (!ev.satisfied) return false;
        }
        auto hit = defeatedBy(x);
        if (!hit) return true;
        cached = hit;
        lastDefeat = ScCounterexample{detail::toNetworkSchedule(sys, x), hit->scenario,
                                      detail::selectionContaining(sys, hit->realization),
                                      hit->realization, hit->clause};
        return false;
    };

    detail::CandidateEnumerator enumerator(sys, grid);
    auto found = enumerator.firstWhere(probe, &budget);
    if (found) {
        out.controllable = true;
        out.witness = detail::toNetworkSchedule(sys, *found);
        return out;
    }
    out.counterexample = lastDefeat;
    return out;
}

} // namespace tempoctrl
