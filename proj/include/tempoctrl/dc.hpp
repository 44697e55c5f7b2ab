#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tempoctrl/config.hpp"
#include "tempoctrl/model.hpp"
#include "tempoctrl/qls.hpp"

namespace tempoctrl {

/// Snapshot of a partially executed network: assigned times, active links,
/// unexecuted executables, partially revealed propositions, current time.
struct ExecutionState {
    std::map<TpIndex, Rat> scheduled;
    std::vector<std::pair<std::size_t, Rat>> active; // (link index, start time)
    std::set<TpIndex> pending;                       // executables
    std::map<std::string, bool> scenario;            // revealed propositions only
    Rat now{0};
};

/// Bounded-depth decision tree. Each node commits the listed timepoints and
/// branches on what nature does first.
struct DcStrategyNode {
    std::vector<std::pair<std::string, Rat>> schedule; // (timepoint id, time)
    bool truncated = false;
    std::vector<std::pair<std::string, DcStrategyNode>> children; // outcome -> child
};

struct DcVerdict {
    bool controllable = false;
    std::optional<DcStrategyNode> strategyRoot;
    std::uint64_t nodesExpanded = 0;
};

/// Completed-execution check: every requirement whose label the scenario
/// entails needs one satisfied disjunct, and every contingent duration must
/// land inside one of its link's ranges.
inline bool finalConsistency(const Network& n, const std::map<TpIndex, Rat>& schedule,
                             const std::map<std::string, bool>& scenario) {
    for (const auto& req : n.requirements) {
        bool ok = false;
        for (const auto& atom : req.disjuncts) {
            bool entailed = true;
            for (const auto& lit : atom.label.literals())
                if (scenario.at(lit.prop) == lit.negated) entailed = false;
            if (!entailed) {
                ok = true;
                break;
            }
            Rat diff = schedule.at(atom.target) - schedule.at(atom.source);
            if (atom.interval.contains(diff)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    for (const auto& link : n.links) {
        Rat d = schedule.at(link.end) - schedule.at(link.start);
        bool inRange = false;
        for (const auto& r : link.ranges) inRange = inRange || r.contains(d);
        if (!inRange) return false;
    }
    return true;
}

/// Adversarial forks for every proposition observed at the given timepoint
/// and still unknown. The strategy must succeed in every child.
inline std::vector<ExecutionState> observationBranch(const Network& n,
                                                     const ExecutionState& state,
                                                     TpIndex timepoint) {
    std::vector<std::string> fresh;
    for (const auto& [prop, tp] : n.observations)
        if (tp == timepoint && !state.scenario.count(prop)) fresh.push_back(prop);
    std::vector<ExecutionState> out{state};
    for (const auto& prop : fresh) {
        std::vector<ExecutionState> next;
        for (const auto& st : out)
            for (bool v : {false, true}) {
                ExecutionState child = st;
                child.scenario[prop] = v;
                next.push_back(std::move(child));
            }
        out = std::move(next);
    }
    return out;
}

namespace detail {

inline std::vector<Rat> durationGrid(const std::vector<Interval>& ranges, const Rat& step) {
    std::vector<Rat> out;
    for (const auto& r : ranges)
        for (const auto& v : gridPoints(r, step, std::nullopt)) out.push_back(v);
    return out;
}

inline std::string outcomeKey(const std::optional<std::pair<std::string, Rat>>& fired,
                              const std::vector<std::pair<std::string, bool>>& observed) {
    std::string key = fired ? "fire " + fired->first + "@" + fired->second.str()
                            : "advance";
    for (const auto& [prop, v] : observed)
        key += " " + prop + "=" + (v ? "1" : "0");
    return key;
}

// ---------------------------------------------------------------------------
// Preprocessed search structure. Chains of exact-equality requirements over
// executables fold into rigid clusters: one action commits the whole chain.
// Observation timepoints stay unmerged so propositions are revealed at their
// own action, and contingent endpoints never merge.
//
// Both players move on the half-step lattice: nature so that gap interiors
// are reachable, the scheduler so that it can mirror nature's times.
// ---------------------------------------------------------------------------

struct DcSearchNet {
    const Network* net = nullptr;
    Rat lattice;  // time lattice for actions and realizations
    Rat tMax;

    struct Cluster {
        std::vector<std::pair<TpIndex, Rat>> members; // (timepoint, offset >= 0)
        Rat maxOffset{0};
    };
    std::vector<Cluster> clusters;
    std::vector<std::size_t> clusterOf; // executable tp -> cluster index
    struct Link {
        std::size_t index = 0; // into net->links
        TpIndex start = kNoTp;
        TpIndex end = kNoTp;
        std::vector<Rat> durations; // ascending lattice values
        Rat maxDuration{0};
    };
    std::vector<Link> links;
    std::vector<std::vector<std::string>> observersOf; // tp -> props observed there
    bool rigidContradiction = false;
};

inline DcSearchNet buildSearchNet(const Network& n, const RunConfig& config) {
    requireValid(n);
    Grid grid = resolveGrid(n, config);
    DcSearchNet sn;
    sn.net = &n;
    sn.lattice = grid.natureStep();
    sn.tMax = grid.horizon;

    const std::size_t tpCount = n.timepoints.size();
    sn.observersOf.assign(tpCount, {});
    for (const auto& [prop, tp] : n.observations) sn.observersOf[tp].push_back(prop);

    // Union-find with offsets: offset[v] is v's time minus its parent's time,
    // flattened to the root on find.
    std::vector<TpIndex> parent(tpCount);
    std::vector<Rat> offset(tpCount, Rat(0));
    for (TpIndex i = 0; i < tpCount; ++i) parent[i] = i;
    std::function<std::pair<TpIndex, Rat>(TpIndex)> find =
        [&](TpIndex v) -> std::pair<TpIndex, Rat> {
        if (parent[v] == v) return {v, Rat(0)};
        auto [root, rootDelta] = find(parent[v]);
        parent[v] = root;
        offset[v] += rootDelta;
        return {root, offset[v]};
    };

    if (config.contractRigid) {
        for (const auto& req : n.requirements) {
            if (req.disjuncts.size() != 1) continue;
            const Atom& atom = req.disjuncts[0];
            if (!atom.label.empty() || !atom.interval.isPoint()) continue;
            if (atom.source == atom.target) continue;
            if (!n.isExecutable(atom.source) || !n.isExecutable(atom.target)) continue;
            if (!sn.observersOf[atom.source].empty() || !sn.observersOf[atom.target].empty())
                continue;
            Rat delta = atom.interval.lo.finite(); // time(target) - time(source)
            auto [rs, ds] = find(atom.source);
            auto [rt, dt] = find(atom.target);
            if (rs == rt) {
                if (dt - ds != delta) sn.rigidContradiction = true;
                continue;
            }
            parent[rt] = rs;
            offset[rt] = ds + delta - dt; // so that target = source + delta
        }
    }

    std::map<TpIndex, std::size_t> clusterIdx;
    sn.clusterOf.assign(tpCount, 0);
    for (TpIndex i = 0; i < tpCount; ++i) {
        if (!n.isExecutable(i)) continue;
        auto [root, delta] = find(i);
        auto [it, fresh] = clusterIdx.try_emplace(root, sn.clusters.size());
        if (fresh) sn.clusters.push_back({});
        sn.clusters[it->second].members.push_back({i, delta});
        sn.clusterOf[i] = it->second;
    }
    // The cluster acts at its earliest member; other members trail at fixed
    // nonnegative offsets.
    for (auto& cluster : sn.clusters) {
        Rat least = cluster.members.front().second;
        for (const auto& [tp, d] : cluster.members) least = min(least, d);
        for (auto& [tp, d] : cluster.members) {
            d -= least;
            cluster.maxOffset = max(cluster.maxOffset, d);
        }
    }

    for (std::size_t l = 0; l < n.links.size(); ++l) {
        DcSearchNet::Link link;
        link.index = l;
        link.start = n.links[l].start;
        link.end = n.links[l].end;
        link.durations = durationGrid(n.links[l].ranges, sn.lattice);
        link.maxDuration = link.durations.back();
        sn.links.push_back(std::move(link));
    }
    return sn;
}

class DcSearch {
public:
    DcSearch(const DcSearchNet& sn, const RunConfig& config) : sn_(sn), config_(config) {}

    std::uint64_t nodes = 0;

    struct State {
        std::vector<std::optional<Rat>> time; // per timepoint
        std::vector<std::int8_t> prop;        // -1 unknown, else 0/1
        Rat now{0};
    };

    State initialState() const {
        State s;
        s.time.assign(sn_.net->timepoints.size(), std::nullopt);
        s.prop.assign(sn_.net->propositions.size(), -1);
        return s;
    }

    bool check(const State& state, bool isRoot) {
        bump();
        std::string key;
        if (config_.memoize) {
            key = canonicalKey(state);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        bool result = decide(state, isRoot, nullptr, 0);
        if (config_.memoize && memo_.size() < kMemoCap) memo_.emplace(std::move(key), result);
        return result;
    }

    DcStrategyNode extract(const State& state, bool isRoot, unsigned depth) {
        DcStrategyNode node;
        if (depth >= config_.strategyDepth) {
            node.truncated = true;
            return node;
        }
        decide(state, isRoot, &node, depth);
        return node;
    }

private:
    const DcSearchNet& sn_;
    const RunConfig& config_;
    std::unordered_map<std::string, bool> memo_;
    static constexpr std::size_t kMemoCap = std::size_t(1) << 22;

    void bump() {
        if (++nodes > config_.nodeCap)
            throw ResourceCapError("dynamic-controllability search exceeded node cap");
    }

    std::string canonicalKey(const State& s) const {
        std::string key;
        key.reserve(s.time.size() * 4 + 8);
        for (const auto& t : s.time) {
            key += t ? (*t - s.now).str() : "?";
            key += '|';
        }
        for (auto p : s.prop) key += static_cast<char>('0' + (p + 1));
        key += '|';
        key += (sn_.tMax - s.now).str();
        return key;
    }

    std::vector<std::size_t> activeLinks(const State& s) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < sn_.links.size(); ++i)
            if (s.time[sn_.links[i].start] && !s.time[sn_.links[i].end]) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> pendingClusters(const State& s) const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < sn_.clusters.size(); ++c)
            if (!s.time[sn_.clusters[c].members.front().first]) out.push_back(c);
        return out;
    }

    std::vector<Rat> possibleEnds(const State& s, std::size_t link, const Rat& floor) const {
        std::vector<Rat> out;
        Rat start = *s.time[sn_.links[link].start];
        for (const auto& d : sn_.links[link].durations)
            if (start + d >= floor) out.push_back(start + d);
        return out;
    }

    Rat maxEnd(const State& s, std::size_t link) const {
        return *s.time[sn_.links[link].start] + sn_.links[link].maxDuration;
    }

    // --- pruning ------------------------------------------------------------

    std::size_t propIndex(const std::string& prop) const {
        for (std::size_t i = 0; i < sn_.net->propositions.size(); ++i)
            if (sn_.net->propositions[i] == prop) return i;
        throw std::logic_error("unknown proposition");
    }

    Rat memberOffset(std::size_t cluster, TpIndex tp) const {
        for (const auto& [m, d] : sn_.clusters[cluster].members)
            if (m == tp) return d;
        throw std::logic_error("timepoint outside its cluster");
    }

    /// Superset of the reachable times of a timepoint.
    Interval window(const State& s, TpIndex tp) const {
        if (s.time[tp]) return Interval(Bound(*s.time[tp]), Bound(*s.time[tp]));
        if (sn_.net->isExecutable(tp)) {
            Rat delta = memberOffset(sn_.clusterOf[tp], tp);
            return Interval(Bound(s.now + delta), Bound(sn_.tMax + delta));
        }
        std::size_t li = *sn_.net->linkEndingAt(tp);
        const auto& link = sn_.links[li];
        if (s.time[link.start]) {
            Rat start = *s.time[link.start];
            return Interval(Bound(max(s.now, start + link.durations.front())),
                            Bound(start + link.maxDuration));
        }
        Rat delta = memberOffset(sn_.clusterOf[link.start], link.start);
        return Interval(Bound(s.now + delta + link.durations.front()),
                        Bound(sn_.tMax + delta + link.maxDuration));
    }

    /// True when some requirement can no longer be satisfied by any
    /// continuation: all labels pinned true, all intervals unreachable.
    bool doomed(const State& s) const {
        for (const auto& req : sn_.net->requirements) {
            bool alive = false;
            for (const auto& atom : req.disjuncts) {
                bool labelFixedTrue = true;
                for (const auto& lit : atom.label.literals()) {
                    std::int8_t v = s.prop[propIndex(lit.prop)];
                    if (v == -1 || (v == 1) == lit.negated) {
                        labelFixedTrue = false;
                        break;
                    }
                }
                if (!labelFixedTrue) {
                    alive = true;
                    break;
                }
                Interval ws = window(s, atom.source);
                Interval wt = window(s, atom.target);
                Interval diff(Bound(wt.lo.finite() - ws.hi.finite()),
                              Bound(wt.hi.finite() - ws.lo.finite()));
                if (diff.meets(atom.interval)) {
                    alive = true;
                    break;
                }
            }
            if (!alive) return true;
        }
        return false;
    }

    /// Lattice window for acting on a cluster, narrowed by unconditional
    /// constraints between its members and already scheduled timepoints.
    std::pair<Rat, Rat> actionWindow(const State& s, std::size_t cluster) const {
        Bound lo(s.now);
        Bound hi(sn_.tMax - sn_.clusters[cluster].maxOffset);
        auto offsetOf = [&](TpIndex tp) -> std::optional<Rat> {
            if (!sn_.net->isExecutable(tp) || s.time[tp]) return std::nullopt;
            if (sn_.clusterOf[tp] != cluster) return std::nullopt;
            return memberOffset(cluster, tp);
        };
        for (const auto& req : sn_.net->requirements) {
            bool usable = true;
            bool sawPiece = false;
            Bound unionLo = Bound::plusInf(), unionHi = Bound::minusInf();
            for (const auto& atom : req.disjuncts) {
                if (!atom.label.empty()) {
                    usable = false;
                    break;
                }
                auto dSrc = offsetOf(atom.source);
                auto dTgt = offsetOf(atom.target);
                Bound pLo = Bound::minusInf(), pHi = Bound::plusInf();
                if (dSrc && dTgt) {
                    if (!atom.interval.contains(*dTgt - *dSrc)) continue; // empty piece
                } else if (dTgt && s.time[atom.source]) {
                    Rat base = *s.time[atom.source] - *dTgt;
                    pLo = atom.interval.lo + base;
                    pHi = atom.interval.hi + base;
                } else if (dSrc && s.time[atom.target]) {
                    Rat base = *s.time[atom.target] - *dSrc;
                    pLo = -atom.interval.hi + base;
                    pHi = -atom.interval.lo + base;
                } else {
                    usable = false; // touches some other pending timepoint
                    break;
                }
                sawPiece = true;
                if (pLo < unionLo) unionLo = pLo;
                if (pHi > unionHi) unionHi = pHi;
            }
            if (!usable) continue;
            if (!sawPiece) return {Rat(1), Rat(0)}; // no disjunct can ever hold
            if (unionLo > lo) lo = unionLo;
            if (unionHi < hi) hi = unionHi;
            if (!(lo <= hi)) return {Rat(1), Rat(0)};
        }
        if (lo.isMinusInf()) lo = Bound(s.now);
        if (hi.isPlusInf()) hi = Bound(sn_.tMax);
        if (!(lo <= hi) || !lo.isFinite() || !hi.isFinite()) return {Rat(1), Rat(0)};
        return {lo.finite().ceilToMultiple(sn_.lattice),
                hi.finite().floorToMultiple(sn_.lattice)};
    }

    // --- outcomes of one agent choice ----------------------------------------

    struct Outcome {
        std::string key;
        State next;
    };

    /// Observation forks for freshly timed timepoints; the fired/advance key
    /// gets one suffix per revealed proposition.
    void forkObservations(const State& base,
                          const std::vector<TpIndex>& justScheduled,
                          const std::optional<std::pair<std::string, Rat>>& fired,
                          std::vector<Outcome>& out) const {
        std::vector<std::size_t> freshProps;
        for (TpIndex tp : justScheduled)
            for (const auto& prop : sn_.observersOf[tp]) {
                std::size_t p = propIndex(prop);
                if (base.prop[p] == -1) freshProps.push_back(p);
            }
        std::sort(freshProps.begin(), freshProps.end());
        freshProps.erase(std::unique(freshProps.begin(), freshProps.end()),
                         freshProps.end());
        const std::size_t combos = std::size_t(1) << freshProps.size();
        for (std::size_t mask = 0; mask < combos; ++mask) {
            Outcome o;
            o.next = base;
            std::vector<std::pair<std::string, bool>> observed;
            for (std::size_t i = 0; i < freshProps.size(); ++i) {
                bool v = (mask >> i) & 1;
                o.next.prop[freshProps[i]] = v ? 1 : 0;
                observed.push_back({sn_.net->propositions[freshProps[i]], v});
            }
            o.key = outcomeKey(fired, observed);
            out.push_back(std::move(o));
        }
    }

    /// Every nature response to "schedule cluster c at time tau": contingent
    /// ends firing first (at or before tau) and, when every active link can
    /// outlast tau, the action itself going through.
    std::vector<Outcome> buildOutcomes(const State& s, std::size_t cluster, const Rat& tau,
                                       const std::vector<std::size_t>& actives) const {
        std::vector<Outcome> out;
        for (std::size_t l : actives) {
            for (const auto& v : possibleEnds(s, l, s.now)) {
                if (v > tau) break;
                bool othersCanWait = true;
                for (std::size_t m : actives)
                    if (m != l && maxEnd(s, m) < v) othersCanWait = false;
                if (!othersCanWait) continue;
                State child = s;
                child.time[sn_.links[l].end] = v;
                child.now = v;
                forkObservations(child, {sn_.links[l].end},
                                 std::make_pair(sn_.net->timepoints[sn_.links[l].end].id, v),
                                 out);
            }
        }
        bool canAct = true;
        for (std::size_t l : actives)
            if (!(maxEnd(s, l) > tau)) canAct = false;
        if (canAct) {
            State child = s;
            std::vector<TpIndex> members;
            for (const auto& [tp, delta] : sn_.clusters[cluster].members) {
                child.time[tp] = tau + delta;
                members.push_back(tp);
            }
            child.now = tau;
            forkObservations(child, members, std::nullopt, out);
        }
        return out;
    }

    // --- recursion ------------------------------------------------------------

    bool decide(const State& state, bool isRoot, DcStrategyNode* record, unsigned depth) {
        auto pending = pendingClusters(state);
        if (pending.empty()) return baseCase(state);
        if (doomed(state)) return false;
        auto actives = activeLinks(state);

        for (std::size_t c : pending) {
            auto [lo, hi] = actionWindow(state, c);
            if (isRoot) hi = min(hi, Rat(0)); // anchor the first action at zero
            for (Rat tau = max(lo, state.now); tau <= hi; tau += sn_.lattice) {
                auto outcomes = buildOutcomes(state, c, tau, actives);
                bool ok = true;
                for (const auto& o : outcomes)
                    if (!check(o.next, false)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                if (record) {
                    for (const auto& [tp, delta] : sn_.clusters[c].members)
                        record->schedule.push_back(
                            {sn_.net->timepoints[tp].id, tau + delta});
                    for (const auto& o : outcomes)
                        record->children.push_back(
                            {o.key, extract(o.next, false, depth + 1)});
                }
                return true;
            }
        }
        return false;
    }

    /// Everything is scheduled except active contingent ends: every remaining
    /// realization and every completion of the scenario must be consistent.
    bool baseCase(const State& state) {
        auto actives = activeLinks(state);
        std::vector<std::vector<Rat>> ends;
        for (std::size_t l : actives) ends.push_back(possibleEnds(state, l, state.now));

        std::vector<std::size_t> at(ends.size(), 0);
        for (;;) {
            bump();
            // Current realization: fill the ends, then check all scenario
            // completions for the propositions it reveals (or never reveals).
            State filled = state;
            bool emptyCombo = false;
            for (std::size_t i = 0; i < ends.size(); ++i) {
                if (ends[i].empty()) {
                    emptyCombo = true;
                    break;
                }
                filled.time[sn_.links[actives[i]].end] = ends[i][at[i]];
            }
            if (emptyCombo) return true; // nature has no admissible realization

            std::map<TpIndex, Rat> schedule;
            for (TpIndex tp = 0; tp < filled.time.size(); ++tp)
                schedule[tp] = *filled.time[tp];
            std::vector<std::size_t> unknown;
            for (std::size_t p = 0; p < filled.prop.size(); ++p)
                if (filled.prop[p] == -1) unknown.push_back(p);
            const std::size_t combos = std::size_t(1) << unknown.size();
            for (std::size_t mask = 0; mask < combos; ++mask) {
                std::map<std::string, bool> scenario;
                for (std::size_t p = 0; p < filled.prop.size(); ++p)
                    scenario[sn_.net->propositions[p]] = filled.prop[p] == 1;
                for (std::size_t i = 0; i < unknown.size(); ++i)
                    scenario[sn_.net->propositions[unknown[i]]] = (mask >> i) & 1;
                if (!finalConsistency(*sn_.net, schedule, scenario)) return false;
            }

            // Odometer over realizations, last link fastest.
            std::size_t i = at.size();
            for (;;) {
                if (i == 0) return true;
                --i;
                if (++at[i] < ends[i].size()) break;
                at[i] = 0;
            }
        }
    }
};

} // namespace detail

/// Adversarial simulation of dynamic execution, on the half-step lattice,
/// with rigid executable chains contracted into single actions and
/// observation forks after every scheduling. The strategy summary is emitted
/// to the configured depth when the network is controllable.
inline DcVerdict dcCheck(const Network& n, const RunConfig& config = {}) {
    auto sn = detail::buildSearchNet(n, config);
    DcVerdict out;
    if (sn.rigidContradiction) return out;
    detail::DcSearch search(sn, config);
    out.controllable = search.check(search.initialState(), true);
    out.nodesExpanded = search.nodes;
    if (out.controllable && config.strategyDepth > 0)
        out.strategyRoot = search.extract(search.initialState(), true, 0);
    return out;
}

/// Literal transcription of the recursive simulation, one timepoint per
/// action, no contraction, no windows, no memoization. Exponentially slower
/// than dcCheck and used as its differential ground truth on tiny networks.
inline bool dcBruteForce(const Network& n, const RunConfig& config = {}) {
    requireValid(n);
    Grid grid = resolveGrid(n, config);
    const Rat lattice = grid.natureStep();
    const Rat tMax = grid.horizon;

    std::vector<std::vector<Rat>> durations;
    for (const auto& link : n.links)
        durations.push_back(detail::durationGrid(link.ranges, lattice));

    std::uint64_t nodes = 0;
    std::function<bool(const ExecutionState&)> walk =
        [&](const ExecutionState& state) -> bool {
        if (++nodes > config.nodeCap)
            throw ResourceCapError("brute-force simulation exceeded node cap");

        // All admissible realizations of the active links from state.now.
        std::vector<std::vector<Rat>> ends;
        for (const auto& [l, start] : state.active) {
            std::vector<Rat> es;
            for (const auto& d : durations[l])
                if (start + d >= state.now) es.push_back(start + d);
            ends.push_back(std::move(es));
        }
        auto eachRealization = [&](const std::function<bool(const std::vector<Rat>&)>& fn) {
            std::vector<Rat> tuple(ends.size());
            std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
                if (i == ends.size()) return fn(tuple);
                for (const auto& v : ends[i]) {
                    tuple[i] = v;
                    if (!rec(i + 1)) return false;
                }
                return true;
            };
            return rec(0);
        };

        if (state.pending.empty()) {
            return eachRealization([&](const std::vector<Rat>& tuple) {
                ExecutionState done = state;
                for (std::size_t i = 0; i < tuple.size(); ++i)
                    done.scheduled[n.links[state.active[i].first].end] = tuple[i];
                std::vector<std::string> unknown;
                for (const auto& p : n.propositions)
                    if (!done.scenario.count(p)) unknown.push_back(p);
                const std::size_t combos = std::size_t(1) << unknown.size();
                for (std::size_t mask = 0; mask < combos; ++mask) {
                    auto scenario = done.scenario;
                    for (std::size_t i = 0; i < unknown.size(); ++i)
                        scenario[unknown[i]] = (mask >> i) & 1;
                    if (!finalConsistency(n, done.scheduled, scenario)) return false;
                }
                return true;
            });
        }

        for (TpIndex t : state.pending) {
            for (Rat tau = state.now; tau <= tMax; tau += lattice) {
                bool all = eachRealization([&](const std::vector<Rat>& tuple) {
                    // Earliest contingent end, lowest link index on ties.
                    std::optional<std::size_t> earliest;
                    for (std::size_t i = 0; i < tuple.size(); ++i)
                        if (!earliest || tuple[i] < tuple[*earliest]) earliest = i;
                    ExecutionState child = state;
                    TpIndex committed = t;
                    if (earliest && tuple[*earliest] <= tau) {
                        std::size_t li = state.active[*earliest].first;
                        committed = n.links[li].end;
                        child.scheduled[committed] = tuple[*earliest];
                        child.now = tuple[*earliest];
                        child.active.erase(child.active.begin() +
                                           static_cast<std::ptrdiff_t>(*earliest));
                    } else {
                        committed = t;
                        child.scheduled[t] = tau;
                        child.now = tau;
                        child.pending.erase(t);
                        for (std::size_t l = 0; l < n.links.size(); ++l)
                            if (n.links[l].start == t) child.active.push_back({l, tau});
                    }
                    for (const auto& forked : observationBranch(n, child, committed))
                        if (!walk(forked)) return false;
                    return true;
                });
                if (all) return true;
            }
        }
        return false;
    };

    ExecutionState init;
    for (TpIndex i = 0; i < n.timepoints.size(); ++i)
        if (n.isExecutable(i)) init.pending.insert(i);
    return walk(init);
}

} // namespace tempoctrl
