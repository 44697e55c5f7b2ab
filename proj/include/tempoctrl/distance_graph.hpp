#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tempoctrl/model.hpp"
#include "tempoctrl/rational.hpp"

namespace tempoctrl {

/// Edge (from, to, w) encodes time(to) - time(from) <= w.
struct DGEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    Rat weight;
};

/// Weighted difference graph over timepoint nodes 0..nodeCount-1 plus a
/// zero-reference node (index nodeCount). Edges into the zero node encode
/// the nonnegativity of every time value.
struct DistanceGraph {
    std::size_t nodeCount = 0;
    std::vector<DGEdge> edges;

    std::uint32_t zeroNode() const { return static_cast<std::uint32_t>(nodeCount); }
    std::size_t totalNodes() const { return nodeCount + 1; }
};

using Schedule = std::map<TpIndex, Rat>;
using DisjunctSelection = std::map<std::size_t, std::size_t>;

/// Lowers unlabeled atoms to difference edges: l <= t - s <= u becomes
/// (s, t, u) and (t, s, -l); infinite sides produce no edge. Zero-reference
/// edges pin every node at or above time zero.
inline DistanceGraph toDistanceGraph(const std::vector<Atom>& atoms,
                                     std::size_t timepointCount) {
    DistanceGraph g;
    g.nodeCount = timepointCount;
    for (const auto& atom : atoms) {
        if (!atom.label.empty())
            throw std::invalid_argument("labeled atom in distance-graph lowering");
        if (atom.interval.hi.isFinite())
            g.edges.push_back({atom.source, atom.target, atom.interval.hi.finite()});
        if (atom.interval.lo.isFinite())
            g.edges.push_back({atom.target, atom.source, -atom.interval.lo.finite()});
    }
    for (std::uint32_t i = 0; i < timepointCount; ++i)
        g.edges.push_back({i, g.zeroNode(), Rat(0)});
    return g;
}

namespace detail {

struct BellmanFord {
    std::vector<Rat> dist;
    std::vector<std::size_t> predEdge; // index into edge list, or npos
    bool negativeCycle = false;
    std::size_t cycleSeed = 0; // node known to sit on / reach a cycle

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Super-source relaxation: all distances start at zero, so every node
    /// is reachable and a negative cycle anywhere is detected.
    void run(std::size_t nodes, const std::vector<DGEdge>& edges, bool reversed) {
        dist.assign(nodes, Rat(0));
        predEdge.assign(nodes, npos);
        negativeCycle = false;
        for (std::size_t round = 0; round <= nodes; ++round) {
            bool changed = false;
            for (std::size_t e = 0; e < edges.size(); ++e) {
                auto from = reversed ? edges[e].to : edges[e].from;
                auto to = reversed ? edges[e].from : edges[e].to;
                Rat cand = dist[from] + edges[e].weight;
                if (cand < dist[to]) {
                    dist[to] = cand;
                    predEdge[to] = e;
                    changed = true;
                    if (round == nodes) {
                        negativeCycle = true;
                        cycleSeed = to;
                        return;
                    }
                }
            }
            if (!changed) return;
        }
    }
};

} // namespace detail

/// Returns a cycle of edges whose weights sum below zero, or nullopt when the
/// graph has none. Deterministic for a fixed edge ordering.
inline std::optional<std::vector<DGEdge>> detectNegativeCycle(const DistanceGraph& g) {
    detail::BellmanFord bf;
    bf.run(g.totalNodes(), g.edges, /*reversed=*/false);
    if (!bf.negativeCycle) return std::nullopt;
    // Walk predecessors far enough to be inside the cycle, then collect it.
    std::size_t node = bf.cycleSeed;
    for (std::size_t i = 0; i <= g.totalNodes(); ++i)
        node = g.edges[bf.predEdge[node]].from;
    std::vector<DGEdge> cycle;
    std::size_t cur = node;
    do {
        const auto& e = g.edges[bf.predEdge[cur]];
        cycle.push_back(e);
        cur = e.from;
    } while (cur != node);
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

/// Earliest schedule: the pointwise-minimal nonnegative assignment meeting
/// every edge, or nullopt when a negative cycle makes the graph infeasible.
inline std::optional<Schedule> stnSchedule(const DistanceGraph& g) {
    detail::BellmanFord bf;
    bf.run(g.totalNodes(), g.edges, /*reversed=*/true);
    if (bf.negativeCycle) return std::nullopt;
    Schedule s;
    for (std::uint32_t i = 0; i < g.nodeCount; ++i)
        s[i] = -bf.dist[i];
    return s;
}

/// Backtracking search over one-disjunct-per-constraint selections (the
/// meta-CSP view of a DTN). Each partial selection is pruned by a negative-
/// cycle check, so full product enumeration never materializes.
inline std::optional<std::pair<DisjunctSelection, Schedule>> dtnFeasible(
    const std::vector<Requirement>& constraints, std::size_t timepointCount) {
    for (const auto& req : constraints) {
        if (req.disjuncts.empty()) return std::nullopt;
        for (const auto& atom : req.disjuncts)
            if (!atom.label.empty())
                throw std::invalid_argument("labeled constraint in DTN search");
    }

    // Most constrained first: fewer disjuncts means earlier pruning.
    std::vector<std::size_t> order(constraints.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return constraints[a].disjuncts.size() < constraints[b].disjuncts.size();
    });

    DistanceGraph g;
    g.nodeCount = timepointCount;
    for (std::uint32_t i = 0; i < timepointCount; ++i)
        g.edges.push_back({i, g.zeroNode(), Rat(0)});

    DisjunctSelection chosen;
    auto pushAtom = [&](const Atom& atom) {
        std::size_t added = 0;
        if (atom.interval.hi.isFinite()) {
            g.edges.push_back({atom.source, atom.target, atom.interval.hi.finite()});
            ++added;
        }
        if (atom.interval.lo.isFinite()) {
            g.edges.push_back({atom.target, atom.source, -atom.interval.lo.finite()});
            ++added;
        }
        return added;
    };

    std::function<bool(std::size_t)> dive = [&](std::size_t level) -> bool {
        if (level == order.size()) return true;
        const auto& req = constraints[order[level]];
        for (std::size_t j = 0; j < req.disjuncts.size(); ++j) {
            std::size_t added = pushAtom(req.disjuncts[j]);
            if (!detectNegativeCycle(g)) {
                chosen[order[level]] = j;
                if (dive(level + 1)) return true;
                chosen.erase(order[level]);
            }
            g.edges.resize(g.edges.size() - added);
        }
        return false;
    };

    if (!dive(0)) return std::nullopt;

    DistanceGraph full;
    full.nodeCount = timepointCount;
    std::vector<Atom> atoms;
    for (const auto& [c, j] : chosen) atoms.push_back(constraints[c].disjuncts[j]);
    full = toDistanceGraph(atoms, timepointCount);
    auto sched = stnSchedule(full);
    return std::make_pair(chosen, *sched);
}

/// A strict linear inequality sum(coeff * var) > bound with unit
/// coefficients; its margin at a point is sum - bound.
struct StrictIneq {
    struct Term {
        std::size_t var;
        int coeff; // -1 or +1
    };
    std::vector<Term> terms;
    Rat bound;
};

struct SlackResult {
    bool feasible = true;        // box itself non-contradictory
    bool unbounded = false;      // empty system: slack is +infinity
    Rat slack{0};                // max over box of min margin

    bool strictlySatisfiable() const { return feasible && (unbounded || slack.isPositive()); }
};

/// Maximum margin by which every inequality can hold simultaneously at some
/// point of the box: max over v in box of min_i (a_i . v - b_i). Solved
/// exactly by Fourier-Motzkin elimination, so two-sided systems (where the
/// optimum sits strictly inside the box) are handled correctly.
inline SlackResult maxMinSlack(const std::vector<StrictIneq>& system,
                               const std::vector<Interval>& box) {
    const std::size_t k = box.size();
    // Row layout: coefficients for v_0..v_{k-1}, then epsilon, then constant:
    // sum(c_j v_j) + c_eps * eps <= C.
    struct Row {
        std::vector<Rat> c;
        Rat ceps{0};
        Rat rhs{0};
    };
    std::vector<Row> rows;
    for (const auto& iq : system) {
        Row r;
        r.c.assign(k, Rat(0));
        for (const auto& t : iq.terms) {
            if (t.var >= k) throw std::invalid_argument("inequality variable outside box");
            r.c[t.var] += Rat(t.coeff == 1 ? -1 : 1);
        }
        r.ceps = Rat(1);
        r.rhs = -iq.bound;
        rows.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (box[j].hi.isFinite()) {
            Row r;
            r.c.assign(k, Rat(0));
            r.c[j] = Rat(1);
            r.rhs = box[j].hi.finite();
            rows.push_back(std::move(r));
        }
        if (box[j].lo.isFinite()) {
            Row r;
            r.c.assign(k, Rat(0));
            r.c[j] = Rat(-1);
            r.rhs = -box[j].lo.finite();
            rows.push_back(std::move(r));
        }
    }

    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Row> pos, neg, rest;
        for (auto& r : rows) {
            if (r.c[j].isPositive()) pos.push_back(std::move(r));
            else if (r.c[j].isNegative()) neg.push_back(std::move(r));
            else rest.push_back(std::move(r));
        }
        for (const auto& p : pos) {
            for (const auto& q : neg) {
                Row r;
                r.c.assign(k, Rat(0));
                Rat sp = Rat(1) / p.c[j];
                Rat sq = Rat(1) / (-q.c[j]);
                for (std::size_t t = 0; t < k; ++t)
                    r.c[t] = p.c[t] * sp + q.c[t] * sq;
                r.ceps = p.ceps * sp + q.ceps * sq;
                r.rhs = p.rhs * sp + q.rhs * sq;
                rest.push_back(std::move(r));
            }
        }
        rows = std::move(rest);
    }

    SlackResult out;
    bool haveUpper = false;
    for (const auto& r : rows) {
        if (r.ceps.isZero()) {
            if (r.rhs.isNegative()) {
                out.feasible = false;
                return out;
            }
            continue;
        }
        // eps coefficients are nonnegative by construction
        Rat bnd = r.rhs / r.ceps;
        if (!haveUpper || bnd < out.slack) out.slack = bnd;
        haveUpper = true;
    }
    if (!haveUpper) out.unbounded = true;
    return out;
}

} // namespace tempoctrl
