#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "tempoctrl/config.hpp"
#include "tempoctrl/distance_graph.hpp"
#include "tempoctrl/qls.hpp"

namespace tempoctrl {
namespace detail {

// ---------------------------------------------------------------------------
// Universal tightening: substitute each nature term by its worst-case range
// endpoint. With unit coefficients the extremes sit at the box corners, so
// "for all y in box: x-part + y-part <= b" collapses to one inequality.
// ---------------------------------------------------------------------------

struct XIneq {
    std::vector<CondIneq::Term> terms; // scheduler variables only
    Rat bound;
};

/// rangeOf maps a nature variable index to the interval its duration is
/// drawn from (full hull or one selected range).
inline XIneq tightenUniversally(
    const QlsSystem& sys, const CondIneq& iq,
    const std::function<Interval(std::size_t)>& rangeOf) {
    XIneq out;
    out.bound = iq.bound;
    for (const auto& t : iq.terms) {
        if (sys.variables[t.var].kind == QlsVariable::Kind::Scheduler) {
            out.terms.push_back(t);
            continue;
        }
        Interval r = rangeOf(t.var);
        // +y contributes at most hi, -y at most -lo; subtract the worst case.
        out.bound -= t.coeff == 1 ? r.hi.finite() : -r.lo.finite();
    }
    return out;
}

/// Hull of every range of a nature variable.
inline Interval domainHull(const QlsSystem& sys, std::size_t var) {
    const auto& d = sys.variables[var].domain;
    Interval hull = d.front();
    for (const auto& r : d) hull = hull.hullWith(r);
    return hull;
}

/// Builds a scheduler-variable STN from tightened inequalities. Returns
/// nullopt if some constant inequality is already violated.
inline std::optional<DistanceGraph> schedulerStn(const QlsSystem& sys,
                                                 const std::vector<XIneq>& ineqs) {
    DistanceGraph g;
    g.nodeCount = sys.schedulerCount();
    // Map variable index -> scheduler position once.
    std::vector<std::uint32_t> pos(sys.variables.size(), 0);
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
        pos[sys.schedulerVars[i]] = static_cast<std::uint32_t>(i);

    for (const auto& iq : ineqs) {
        if (iq.terms.empty()) {
            if (Rat(0) > iq.bound) return std::nullopt;
            continue;
        }
        if (iq.terms.size() == 1) {
            const auto& t = iq.terms[0];
            if (t.coeff == 1) // x <= b
                g.edges.push_back({g.zeroNode(), pos[t.var], iq.bound});
            else // -x <= b
                g.edges.push_back({pos[t.var], g.zeroNode(), iq.bound});
            continue;
        }
        if (iq.terms.size() != 2 || iq.terms[0].coeff + iq.terms[1].coeff != 0)
            throw std::logic_error("inequality is not a difference constraint");
        const auto& plus = iq.terms[0].coeff == 1 ? iq.terms[0] : iq.terms[1];
        const auto& minus = iq.terms[0].coeff == -1 ? iq.terms[0] : iq.terms[1];
        g.edges.push_back({pos[minus.var], pos[plus.var], iq.bound});
    }
    for (std::uint32_t i = 0; i < g.nodeCount; ++i)
        g.edges.push_back({i, g.zeroNode(), Rat(0)});
    return g;
}

/// Schedule keyed by network timepoint indices from scheduler-position times.
inline Schedule toNetworkSchedule(const QlsSystem& sys, const std::vector<Rat>& x) {
    Schedule s;
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
        s[sys.variables[sys.schedulerVars[i]].timepoint] = x[i];
    return s;
}

inline std::vector<Rat> fromNetworkSchedule(const QlsSystem& sys, const Schedule& s) {
    std::vector<Rat> x(sys.schedulerCount(), Rat(0));
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i) {
        TpIndex tp = sys.variables[sys.schedulerVars[i]].timepoint;
        auto it = s.find(tp);
        if (it == s.end())
            throw WitnessMalformedError("schedule misses an executable timepoint");
        x[i] = it->second;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Scheduler projection: fix scenario and nature values, keep the clauses that
// still depend on the scheduler. Used by the weak-controllability deciders.
// ---------------------------------------------------------------------------

struct SchedulerProjection {
    bool impossible = false;        // some clause is violated outright
    std::size_t impossibleClause = 0;
    std::vector<Requirement> requirements; // atoms over scheduler positions
    std::vector<std::size_t> clauseOf;     // projected constraint -> clause
};

inline SchedulerProjection projectForScheduler(const QlsSystem& sys,
                                               const Scenario& scenario,
                                               const Realization& y) {
    std::vector<Rat> yOf(sys.variables.size(), Rat(0));
    for (std::size_t i = 0; i < sys.natureVars.size(); ++i)
        yOf[sys.natureVars[i]] = y[i];
    std::vector<std::uint32_t> pos(sys.variables.size(), 0);
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
        pos[sys.schedulerVars[i]] = static_cast<std::uint32_t>(i);

    SchedulerProjection out;
    for (std::size_t c = 0; c < sys.clauses.size(); ++c) {
        bool clauseSat = false;
        std::vector<Atom> atoms;
        for (const auto& d : sys.clauses[c].disjuncts) {
            if (!sys.entails(scenario, d.label)) {
                clauseSat = true;
                break;
            }
            if (d.inequalities.empty()) {
                clauseSat = true;
                break;
            }
            // Collect the x-difference and the numeric interval.
            bool constantFalse = false;
            std::optional<std::pair<std::uint32_t, std::uint32_t>> pair; // (plus, minus)
            Interval iv = Interval::unbounded();
            for (const auto& iq : d.inequalities) {
                Rat residual = iq.bound;
                std::vector<CondIneq::Term> xs;
                for (const auto& t : iq.terms) {
                    if (sys.variables[t.var].kind == QlsVariable::Kind::Nature)
                        residual -= t.coeff == 1 ? yOf[t.var] : -yOf[t.var];
                    else
                        xs.push_back(t);
                }
                if (xs.empty()) {
                    if (Rat(0) > residual) constantFalse = true;
                    continue;
                }
                if (xs.size() != 2 || xs[0].coeff + xs[1].coeff != 0)
                    throw std::logic_error("projected inequality is not a difference");
                auto plus = xs[0].coeff == 1 ? xs[0].var : xs[1].var;
                auto minus = xs[0].coeff == -1 ? xs[0].var : xs[1].var;
                if (!pair) pair = {pos[plus], pos[minus]};
                if (pair->first == pos[plus]) {
                    // x_plus - x_minus <= residual
                    if (Bound(residual) < iv.hi) iv.hi = Bound(residual);
                } else {
                    // mirrored orientation: lower bound
                    if (Bound(-residual) > iv.lo) iv.lo = Bound(-residual);
                }
            }
            if (constantFalse) continue; // this disjunct can never fire
            if (!pair) {
                clauseSat = true; // constants only, and none false
                break;
            }
            if (!(iv.lo <= iv.hi)) continue; // empty window
            atoms.emplace_back(static_cast<TpIndex>(pair->second),
                               static_cast<TpIndex>(pair->first), iv);
        }
        if (clauseSat) continue;
        if (atoms.empty()) {
            out.impossible = true;
            out.impossibleClause = c;
            return out;
        }
        out.requirements.push_back({std::move(atoms)});
        out.clauseOf.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Violation search: given a fixed scheduler assignment, look for a scenario
// and in-range nature assignment that defeats some clause. Runs clause by
// clause as a small CSP over the clause's own nature variables.
// ---------------------------------------------------------------------------

struct NaturePlay {
    Scenario scenario;
    Realization realization;
    std::size_t clause = 0;
};

class ViolationSearch {
public:
    ViolationSearch(const QlsSystem& sys, Rat natureStep)
        : sys_(sys), step_(natureStep) {
        values_.resize(sys.natureCount());
        for (std::size_t i = 0; i < sys.natureCount(); ++i) {
            const auto& var = sys.variables[sys.natureVars[i]];
            for (const auto& range : var.domain)
                for (const auto& v : gridPoints(range, step_, std::nullopt))
                    values_[i].push_back(v);
        }
        posOfVar_.assign(sys.variables.size(), 0);
        for (std::size_t i = 0; i < sys.natureVars.size(); ++i)
            posOfVar_[sys.natureVars[i]] = i;
    }

    /// First nature play violating some clause under x, or nullopt if the
    /// scheduler assignment is robust. Deterministic order.
    std::optional<NaturePlay> find(const std::vector<Rat>& x, std::uint64_t* budget) {
        for (std::size_t c = 0; c < sys_.clauses.size(); ++c) {
            auto hit = violateClause(c, x, budget);
            if (hit) return hit;
        }
        return std::nullopt;
    }

private:
    struct IneqView {
        std::vector<std::pair<std::size_t, int>> yTerms; // (nature pos, coeff)
        Rat residual;
    };
    struct DisjunctView {
        std::vector<IneqView> ineqs;
    };

    const QlsSystem& sys_;
    Rat step_;
    std::vector<std::vector<Rat>> values_; // nature pos -> admissible grid values
    std::vector<std::size_t> posOfVar_;

    std::optional<NaturePlay> violateClause(std::size_t c, const std::vector<Rat>& x,
                                            std::uint64_t* budget) {
        const auto& clause = sys_.clauses[c];
        // Every disjunct's label must hold at once for a violation to exist.
        std::vector<PropLiteral> lits;
        for (const auto& d : clause.disjuncts)
            for (const auto& lit : d.label.literals()) lits.push_back(lit);
        Label merged(std::move(lits));
        if (merged.contradictory()) return std::nullopt;

        Scenario scenario;
        scenario.values.assign(sys_.propositions.size(), false);
        for (const auto& lit : merged.literals())
            scenario.values[sys_.propIndex.at(lit.prop)] = !lit.negated;

        std::vector<DisjunctView> views;
        std::vector<std::size_t> vars; // nature positions used by this clause
        for (const auto& d : clause.disjuncts) {
            if (d.inequalities.empty()) return std::nullopt; // always satisfiable
            DisjunctView dv;
            for (const auto& iq : d.inequalities) {
                IneqView iv;
                iv.residual = iq.bound;
                for (const auto& t : iq.terms) {
                    if (sys_.variables[t.var].kind == QlsVariable::Kind::Scheduler) {
                        Rat xv = x[schedulerPosOf(t.var)];
                        iv.residual -= t.coeff == 1 ? xv : -xv;
                    } else {
                        std::size_t p = posOfVar_[t.var];
                        iv.yTerms.push_back({p, t.coeff});
                        if (std::find(vars.begin(), vars.end(), p) == vars.end())
                            vars.push_back(p);
                    }
                }
                dv.ineqs.push_back(std::move(iv));
            }
            views.push_back(std::move(dv));
        }

        std::vector<std::optional<Rat>> assign(values_.size());
        std::optional<NaturePlay> found;
        std::function<bool(std::size_t)> dive = [&](std::size_t k) -> bool {
            if (budget) {
                if (*budget == 0) throw ResourceCapError("violation search budget exhausted");
                --*budget;
            }
            // A disjunct already satisfiable-for-sure kills the branch; all
            // disjuncts surely false means we found a violation.
            bool allDead = true;
            for (const auto& dv : views) {
                // State of "some inequality is false" for this disjunct.
                bool surelyFalse = false, possiblyFalse = false;
                for (const auto& iv : dv.ineqs) {
                    Rat lo(0), hi(0);
                    for (const auto& [p, coeff] : iv.yTerms) {
                        if (assign[p]) {
                            Rat v = coeff == 1 ? *assign[p] : -*assign[p];
                            lo += v;
                            hi += v;
                        } else {
                            lo += coeff == 1 ? values_[p].front() : -values_[p].back();
                            hi += coeff == 1 ? values_[p].back() : -values_[p].front();
                        }
                    }
                    if (lo > iv.residual) {
                        surelyFalse = true; // inequality fails for any completion
                        break;
                    }
                    if (hi > iv.residual) possiblyFalse = true;
                }
                if (surelyFalse) continue;
                if (!possiblyFalse) return false; // disjunct will hold: branch dead
                allDead = false;
            }
            if (allDead) {
                NaturePlay play;
                play.scenario = scenario;
                play.realization.reserve(values_.size());
                for (std::size_t i = 0; i < values_.size(); ++i)
                    play.realization.push_back(assign[i].value_or(values_[i].front()));
                play.clause = c;
                found = play;
                return true;
            }
            if (k == vars.size()) return false; // undetermined but nothing to assign
            std::size_t p = vars[k];
            for (const auto& v : values_[p]) {
                assign[p] = v;
                if (dive(k + 1)) return true;
            }
            assign[p] = std::nullopt;
            return false;
        };
        dive(0);
        return found;
    }

    std::size_t schedulerPosOf(std::size_t var) const {
        for (std::size_t i = 0; i < sys_.schedulerVars.size(); ++i)
            if (sys_.schedulerVars[i] == var) return i;
        throw std::logic_error("not a scheduler variable");
    }
};

// ---------------------------------------------------------------------------
// Scheduler candidate enumeration on the grid. Candidates are pruned through
// the unconditional scheduler-only clauses, and the earliest assignment is
// anchored at zero (shifting a witness down preserves every difference
// constraint, so only min-zero candidates need to be explored).
// ---------------------------------------------------------------------------

class CandidateEnumerator {
public:
    CandidateEnumerator(const QlsSystem& sys, const Grid& grid)
        : sys_(sys), step_(grid.step), horizon_(grid.horizon) {
        for (std::size_t c = 0; c < sys.clauses.size(); ++c) {
            bool usable = true;
            for (const auto& d : sys.clauses[c].disjuncts) {
                if (!d.label.empty()) usable = false;
                for (const auto& iq : d.inequalities)
                    for (const auto& t : iq.terms)
                        if (sys.variables[t.var].kind == QlsVariable::Kind::Nature)
                            usable = false;
            }
            if (usable) pruners_.push_back(c);
        }
        posOf_.assign(sys.variables.size(), 0);
        for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
            posOf_[sys.schedulerVars[i]] = i;
    }

    /// Calls fn for each surviving candidate until fn returns true; returns
    /// that candidate. Throws HorizonExceededError when the node budget runs
    /// out before the space is covered.
    std::optional<std::vector<Rat>> firstWhere(
        const std::function<bool(const std::vector<Rat>&)>& fn, std::uint64_t* budget,
        std::optional<Rat> fixedFirst = std::nullopt) {
        std::vector<Rat> x(sys_.schedulerCount(), Rat(0));
        if (sys_.schedulerCount() == 0)
            return fn(x) ? std::optional<std::vector<Rat>>(x) : std::nullopt;
        std::optional<std::vector<Rat>> out;
        dive(0, false, x, fn, budget, fixedFirst, out);
        return out;
    }

private:
    const QlsSystem& sys_;
    Rat step_;
    Rat horizon_;
    std::vector<std::size_t> pruners_;
    std::vector<std::size_t> posOf_;

    bool dive(std::size_t k, bool zeroSeen, std::vector<Rat>& x,
              const std::function<bool(const std::vector<Rat>&)>& fn,
              std::uint64_t* budget, const std::optional<Rat>& fixedFirst,
              std::optional<std::vector<Rat>>& out) {
        if (k == sys_.schedulerCount()) {
            if (budget) {
                if (*budget == 0)
                    throw HorizonExceededError("candidate lattice larger than node cap");
                --*budget;
            }
            if (fn(x)) {
                out = x;
                return true;
            }
            return false;
        }
        const bool last = k + 1 == sys_.schedulerCount();
        Rat lo(0), hi(horizon_);
        if (k == 0 && fixedFirst) lo = hi = *fixedFirst;
        if (last && !zeroSeen) { // someone must sit at zero
            if (lo.isPositive()) return false;
            hi = Rat(0);
        }
        for (Rat v = lo; v <= hi; v += step_) {
            x[k] = v;
            if (!prunedAt(k, x) &&
                dive(k + 1, zeroSeen || v.isZero(), x, fn, budget, fixedFirst, out))
                return true;
            if (step_.isZero()) break;
        }
        return false;
    }

    /// True when some unconditional scheduler-only clause is already dead
    /// given positions 0..k assigned and the rest ranging over [0, horizon].
    bool prunedAt(std::size_t k, const std::vector<Rat>& x) const {
        for (std::size_t c : pruners_) {
            bool clauseAlive = false;
            for (const auto& d : sys_.clauses[c].disjuncts) {
                bool dead = false;
                for (const auto& iq : d.inequalities) {
                    Rat least(0);
                    for (const auto& t : iq.terms) {
                        std::size_t p = posOf_[t.var];
                        if (p <= k)
                            least += t.coeff == 1 ? x[p] : -x[p];
                        else if (t.coeff == -1)
                            least -= horizon_;
                        // unassigned +x contributes at least 0
                    }
                    if (least > iq.bound) {
                        dead = true;
                        break;
                    }
                }
                if (!dead) {
                    clauseAlive = true;
                    break;
                }
            }
            if (!clauseAlive) return true;
        }
        return false;
    }
};

} // namespace detail
} // namespace tempoctrl
