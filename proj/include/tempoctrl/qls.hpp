#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempoctrl/errors.hpp"
#include "tempoctrl/model.hpp"

namespace tempoctrl {

/// Variable of the quantified system: scheduler variables time executable
/// timepoints, nature variables hold contingent durations and carry the
/// link's ranges as their domain.
struct QlsVariable {
    enum class Kind { Scheduler, Nature };
    Kind kind = Kind::Scheduler;
    TpIndex timepoint = kNoTp;     // executable for x, contingent end for y
    TpIndex linkStart = kNoTp;     // nature only: the link's starting timepoint
    std::vector<Interval> domain;  // nature only: contingent ranges
    std::string name;
};

/// Conditional inequality sum(coeff * var) <= bound; the guard lives on the
/// enclosing disjunct.
struct CondIneq {
    struct Term {
        std::size_t var;
        int coeff; // -1 or +1
    };
    std::vector<Term> terms;
    Rat bound;
};

/// One disjunct: label -> conjunction of inequalities. It is satisfied when
/// the label is false in the scenario or all inequalities hold.
struct QlsDisjunct {
    Label label;
    std::vector<CondIneq> inequalities;
};

struct QlsClause {
    std::vector<QlsDisjunct> disjuncts;
};

struct Scenario {
    std::vector<bool> values; // indexed by proposition position

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.values == b.values;
    }
};

using OmegaSelection = std::vector<std::size_t>; // nature var -> range index
using Realization = std::vector<Rat>;            // nature var -> duration

struct QlsSystem {
    std::vector<QlsVariable> variables;
    std::vector<std::size_t> schedulerVars; // positions into variables
    std::vector<std::size_t> natureVars;
    std::vector<std::size_t> varOfTimepoint; // tp index -> variable index
    std::vector<QlsClause> clauses;
    std::size_t networkClauseCount = 0; // prefix mapping 1:1 to requirements
    std::vector<std::string> propositions;
    std::map<std::string, std::size_t> propIndex;

    std::size_t schedulerCount() const { return schedulerVars.size(); }
    std::size_t natureCount() const { return natureVars.size(); }

    bool entails(const Scenario& sc, const Label& label) const {
        for (const auto& lit : label.literals()) {
            auto it = propIndex.find(lit.prop);
            if (it == propIndex.end()) throw std::invalid_argument("unknown proposition");
            if (sc.values[it->second] == lit.negated) return false;
        }
        return true;
    }

    /// Scheduler-position of an executable timepoint's variable.
    std::size_t schedulerPos(TpIndex tp) const {
        std::size_t v = varOfTimepoint[tp];
        for (std::size_t i = 0; i < schedulerVars.size(); ++i)
            if (schedulerVars[i] == v) return i;
        throw std::invalid_argument("not a scheduler timepoint");
    }

    /// Substituted difference expression for time(target) - time(source):
    /// executables contribute their x variable, contingents their duration
    /// variable plus the link start's x. Cancelling terms drop out.
    std::vector<CondIneq::Term> differenceTerms(TpIndex source, TpIndex target) const {
        std::map<std::size_t, int> coeff;
        auto addTp = [&](TpIndex tp, int sign) {
            std::size_t v = varOfTimepoint[tp];
            coeff[v] += sign;
            if (variables[v].kind == QlsVariable::Kind::Nature)
                coeff[varOfTimepoint[variables[v].linkStart]] += sign;
        };
        addTp(target, +1);
        addTp(source, -1);
        std::vector<CondIneq::Term> terms;
        for (const auto& [v, c] : coeff) {
            if (c == 0) continue;
            if (c != 1 && c != -1)
                throw std::logic_error("non-unit coefficient in encoding");
            terms.push_back({v, c});
        }
        return terms;
    }

    /// Absolute time of a timepoint under x (scheduler positions) and y
    /// (nature positions) assignments.
    Rat timeOf(TpIndex tp, const std::vector<Rat>& x, const Realization& y) const {
        std::size_t v = varOfTimepoint[tp];
        const auto& var = variables[v];
        if (var.kind == QlsVariable::Kind::Scheduler) {
            for (std::size_t i = 0; i < schedulerVars.size(); ++i)
                if (schedulerVars[i] == v) return x[i];
            throw std::logic_error("scheduler variable not indexed");
        }
        for (std::size_t i = 0; i < natureVars.size(); ++i)
            if (natureVars[i] == v)
                return y[i] + timeOf(var.linkStart, x, y);
        throw std::logic_error("nature variable not indexed");
    }
};

/// Lowers a network to its quantified system: executable timepoints become
/// scheduler variables, each contingent timepoint is replaced by duration
/// plus link start, and every requirement maps to exactly one clause. The
/// trailing clauses pin every scheduler variable at or above zero.
inline QlsSystem encode(const Network& n) {
    requireValid(n);
    QlsSystem sys;
    sys.propositions = n.propositions;
    for (std::size_t i = 0; i < n.propositions.size(); ++i)
        sys.propIndex[n.propositions[i]] = i;
    sys.varOfTimepoint.assign(n.timepoints.size(), static_cast<std::size_t>(-1));

    for (TpIndex i = 0; i < n.timepoints.size(); ++i) {
        if (!n.isExecutable(i)) continue;
        QlsVariable v;
        v.kind = QlsVariable::Kind::Scheduler;
        v.timepoint = i;
        v.name = "x_" + n.timepoints[i].id;
        sys.varOfTimepoint[i] = sys.variables.size();
        sys.schedulerVars.push_back(sys.variables.size());
        sys.variables.push_back(std::move(v));
    }
    for (const auto& link : n.links) {
        QlsVariable v;
        v.kind = QlsVariable::Kind::Nature;
        v.timepoint = link.end;
        v.linkStart = link.start;
        v.domain = link.ranges;
        v.name = "y_" + n.timepoints[link.end].id;
        sys.varOfTimepoint[link.end] = sys.variables.size();
        sys.natureVars.push_back(sys.variables.size());
        sys.variables.push_back(std::move(v));
    }

    for (const auto& req : n.requirements) {
        QlsClause clause;
        for (const auto& atom : req.disjuncts) {
            QlsDisjunct d;
            d.label = atom.label;
            auto terms = sys.differenceTerms(atom.source, atom.target);
            if (atom.interval.hi.isFinite())
                d.inequalities.push_back({terms, atom.interval.hi.finite()});
            if (atom.interval.lo.isFinite()) {
                auto negated = terms;
                for (auto& t : negated) t.coeff = -t.coeff;
                d.inequalities.push_back({negated, -atom.interval.lo.finite()});
            }
            clause.disjuncts.push_back(std::move(d));
        }
        sys.clauses.push_back(std::move(clause));
    }
    sys.networkClauseCount = sys.clauses.size();

    for (std::size_t v : sys.schedulerVars) {
        QlsDisjunct d;
        d.inequalities.push_back({{{v, -1}}, Rat(0)});
        sys.clauses.push_back({{std::move(d)}});
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Enumeration cursors. Each holds one counter and yields elements in a fixed
// canonical order without materializing the space.
// ---------------------------------------------------------------------------

class ScenarioCursor {
public:
    explicit ScenarioCursor(std::size_t propCount) : count_(propCount) {
        if (propCount >= 63) throw HorizonExceededError("too many propositions");
        total_ = std::uint64_t(1) << propCount;
    }

    std::uint64_t total() const { return total_; }

    std::optional<Scenario> next() {
        if (at_ >= total_) return std::nullopt;
        Scenario sc;
        sc.values.resize(count_);
        for (std::size_t j = 0; j < count_; ++j)
            sc.values[j] = (at_ >> (count_ - 1 - j)) & 1; // first prop most significant
        ++at_;
        return sc;
    }

private:
    std::size_t count_;
    std::uint64_t total_ = 1;
    std::uint64_t at_ = 0;
};

inline ScenarioCursor enumerateScenarios(const Network& n) {
    return ScenarioCursor(n.propositions.size());
}
inline ScenarioCursor enumerateScenarios(const QlsSystem& sys) {
    return ScenarioCursor(sys.propositions.size());
}

class OmegaCursor {
public:
    explicit OmegaCursor(std::vector<std::size_t> radices)
        : radices_(std::move(radices)), current_(radices_.size(), 0) {}

    std::uint64_t total() const {
        std::uint64_t t = 1;
        for (auto r : radices_) t *= r;
        return t;
    }

    std::optional<OmegaSelection> next() {
        if (done_) return std::nullopt;
        OmegaSelection out = current_;
        // Odometer increment, last variable fastest.
        std::size_t i = current_.size();
        while (i > 0) {
            --i;
            if (++current_[i] < radices_[i]) break;
            current_[i] = 0;
            if (i == 0) done_ = true;
        }
        if (current_.empty()) done_ = true;
        return out;
    }

private:
    std::vector<std::size_t> radices_;
    OmegaSelection current_;
    bool done_ = false;
};

inline OmegaCursor enumerateOmega(const QlsSystem& sys) {
    std::vector<std::size_t> radices;
    for (std::size_t v : sys.natureVars)
        radices.push_back(sys.variables[v].domain.size());
    return OmegaCursor(std::move(radices));
}

/// Restriction applied when realizations are drawn "from" a time floor: a
/// duration is admissible only if link start + duration >= floor.
struct RealizationFloor {
    Rat floor;
    std::vector<Rat> startTimes; // per nature var, absolute link start time
};

class RealizationCursor {
public:
    RealizationCursor(std::vector<std::vector<Rat>> values)
        : values_(std::move(values)), at_(values_.size(), 0) {
        for (const auto& v : values_)
            if (v.empty()) empty_ = true;
    }

    std::uint64_t total() const {
        if (empty_) return 0;
        std::uint64_t t = 1;
        for (const auto& v : values_) t *= v.size();
        return t;
    }

    std::optional<Realization> next() {
        if (empty_ || done_) return std::nullopt;
        Realization out;
        out.reserve(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i)
            out.push_back(values_[i][at_[i]]);
        std::size_t i = at_.size();
        while (i > 0) {
            --i;
            if (++at_[i] < values_[i].size()) break;
            at_[i] = 0;
            if (i == 0) done_ = true;
        }
        if (at_.empty()) done_ = true;
        return out;
    }

private:
    std::vector<std::vector<Rat>> values_;
    std::vector<std::size_t> at_;
    bool empty_ = false;
    bool done_ = false;
};

namespace detail {

inline std::vector<Rat> gridPoints(const Interval& range, const Rat& step,
                                   const std::optional<Rat>& minValue) {
    if (!range.isFinite())
        throw StepMismatchError("cannot grid an unbounded range");
    Rat lo = range.lo.finite();
    Rat hi = range.hi.finite();
    if (!lo.isMultipleOf(step) || !hi.isMultipleOf(step))
        throw StepMismatchError("step " + step.str() + " does not divide range " + range.str());
    if (minValue && *minValue > lo)
        lo = minValue->ceilToMultiple(step);
    std::vector<Rat> out;
    for (Rat v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

} // namespace detail

/// Grid points of the selected ranges, optionally filtered so implied end
/// times (link start + duration) stay at or above the floor.
inline RealizationCursor enumerateRealizations(
    const QlsSystem& sys, const OmegaSelection& selection, const Rat& step,
    const std::optional<RealizationFloor>& floor = std::nullopt) {
    std::vector<std::vector<Rat>> values;
    for (std::size_t i = 0; i < sys.natureVars.size(); ++i) {
        const auto& var = sys.variables[sys.natureVars[i]];
        if (selection.at(i) >= var.domain.size())
            throw std::invalid_argument("range index out of bounds");
        std::optional<Rat> minDur;
        if (floor) minDur = floor->floor - floor->startTimes[i];
        values.push_back(detail::gridPoints(var.domain[selection[i]], step, minDur));
    }
    return RealizationCursor(std::move(values));
}

struct EvalResult {
    bool satisfied = true;
    std::vector<std::size_t> violatedClauses;
};

/// Checks every clause under a total assignment: a clause holds when some
/// disjunct's label is false in the scenario or its inequalities all hold.
inline EvalResult evaluate(const QlsSystem& sys, const Scenario& scenario,
                           const std::vector<Rat>& x, const Realization& y) {
    if (x.size() != sys.schedulerCount() || y.size() != sys.natureCount())
        throw std::invalid_argument("assignment size mismatch");
    std::vector<Rat> value(sys.variables.size(), Rat(0));
    for (std::size_t i = 0; i < sys.schedulerVars.size(); ++i)
        value[sys.schedulerVars[i]] = x[i];
    for (std::size_t i = 0; i < sys.natureVars.size(); ++i)
        value[sys.natureVars[i]] = y[i];

    EvalResult out;
    for (std::size_t c = 0; c < sys.clauses.size(); ++c) {
        bool clauseSat = false;
        for (const auto& d : sys.clauses[c].disjuncts) {
            if (!sys.entails(scenario, d.label)) {
                clauseSat = true;
                break;
            }
            bool all = true;
            for (const auto& iq : d.inequalities) {
                Rat sum(0);
                for (const auto& t : iq.terms)
                    sum += t.coeff == 1 ? value[t.var] : -value[t.var];
                if (!(sum <= iq.bound)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                clauseSat = true;
                break;
            }
        }
        if (!clauseSat) {
            out.satisfied = false;
            out.violatedClauses.push_back(c);
        }
    }
    return out;
}

} // namespace tempoctrl
