#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tempoctrl/errors.hpp"
#include "tempoctrl/rational.hpp"

namespace tempoctrl {

using TpIndex = std::uint32_t;
constexpr TpIndex kNoTp = static_cast<TpIndex>(-1);

enum class TimepointKind { Executable, Contingent };

struct Timepoint {
    std::string id;
    TimepointKind kind = TimepointKind::Executable;
};

/// One proposition literal inside a label.
struct PropLiteral {
    std::string prop;
    bool negated = false;

    friend bool operator==(const PropLiteral& a, const PropLiteral& b) {
        return a.prop == b.prop && a.negated == b.negated;
    }
    friend bool operator<(const PropLiteral& a, const PropLiteral& b) {
        return a.prop != b.prop ? a.prop < b.prop : a.negated < b.negated;
    }
};

/// Conjunction of proposition literals; empty means "always enforced".
class Label {
public:
    Label() = default;
    explicit Label(std::vector<PropLiteral> lits) : lits_(std::move(lits)) {
        std::sort(lits_.begin(), lits_.end());
        lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
    }

    bool empty() const { return lits_.empty(); }
    const std::vector<PropLiteral>& literals() const { return lits_; }

    /// A label is self-contradictory when some proposition occurs both ways.
    bool contradictory() const {
        for (std::size_t i = 1; i < lits_.size(); ++i)
            if (lits_[i].prop == lits_[i - 1].prop) return true;
        return false;
    }

    friend bool operator==(const Label& a, const Label& b) { return a.lits_ == b.lits_; }
    friend bool operator!=(const Label& a, const Label& b) { return !(a == b); }
    friend bool operator<(const Label& a, const Label& b) { return a.lits_ < b.lits_; }

private:
    std::vector<PropLiteral> lits_;
};

/// One disjunct of a requirement constraint:
///   label -> time(target) - time(source) in interval.
struct Atom {
    TpIndex source = kNoTp;
    TpIndex target = kNoTp;
    Interval interval;
    Label label;

    Atom() = default;
    Atom(TpIndex s, TpIndex t, Interval iv, Label l = {})
        : source(s), target(t), interval(iv), label(std::move(l)) {}

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.source == b.source && a.target == b.target &&
               a.interval == b.interval && a.label == b.label;
    }
};

/// Disjunction of atoms; a single unlabeled atom is the plain STN case.
struct Requirement {
    std::vector<Atom> disjuncts;

    friend bool operator==(const Requirement& a, const Requirement& b) {
        return a.disjuncts == b.disjuncts;
    }
};

/// Contingent link: nature picks end - start from one of the ranges.
struct ContingentLink {
    TpIndex start = kNoTp; // executable
    TpIndex end = kNoTp;   // contingent
    std::vector<Interval> ranges;

    friend bool operator==(const ContingentLink& a, const ContingentLink& b) {
        return a.start == b.start && a.end == b.end && a.ranges == b.ranges;
    }
};

enum class NetworkClass { STN, TCSP, DTN, CSTN, STNU, TCSPU, DTNU, CSTNU, CDTNU };

inline const char* className(NetworkClass c) {
    switch (c) {
    case NetworkClass::STN: return "STN";
    case NetworkClass::TCSP: return "TCSP";
    case NetworkClass::DTN: return "DTN";
    case NetworkClass::CSTN: return "CSTN";
    case NetworkClass::STNU: return "STNU";
    case NetworkClass::TCSPU: return "TCSPU";
    case NetworkClass::DTNU: return "DTNU";
    case NetworkClass::CSTNU: return "CSTNU";
    case NetworkClass::CDTNU: return "CDTNU";
    }
    return "?";
}

inline std::ostream& operator<<(std::ostream& os, NetworkClass c) {
    return os << className(c);
}

inline std::optional<NetworkClass> networkClassFromString(const std::string& s) {
    for (auto c : {NetworkClass::STN, NetworkClass::TCSP, NetworkClass::DTN,
                   NetworkClass::CSTN, NetworkClass::STNU, NetworkClass::TCSPU,
                   NetworkClass::DTNU, NetworkClass::CSTNU, NetworkClass::CDTNU})
        if (s == className(c)) return c;
    return std::nullopt;
}

/// Unified container for every class in the hierarchy. Instances are treated
/// as immutable once built; all operations below are pure functions.
struct Network {
    std::vector<Timepoint> timepoints;
    std::vector<Requirement> requirements;
    std::vector<ContingentLink> links;
    std::vector<std::string> propositions;
    std::map<std::string, TpIndex> observations; // prop -> observing timepoint

    TpIndex indexOf(const std::string& id) const {
        for (TpIndex i = 0; i < timepoints.size(); ++i)
            if (timepoints[i].id == id) return i;
        return kNoTp;
    }
    bool isExecutable(TpIndex i) const {
        return timepoints[i].kind == TimepointKind::Executable;
    }
    bool isContingent(TpIndex i) const {
        return timepoints[i].kind == TimepointKind::Contingent;
    }
    std::vector<TpIndex> executables() const {
        std::vector<TpIndex> out;
        for (TpIndex i = 0; i < timepoints.size(); ++i)
            if (isExecutable(i)) out.push_back(i);
        return out;
    }
    std::vector<TpIndex> contingents() const {
        std::vector<TpIndex> out;
        for (TpIndex i = 0; i < timepoints.size(); ++i)
            if (isContingent(i)) out.push_back(i);
        return out;
    }
    /// Index into links of the link ending at tp, if any.
    std::optional<std::size_t> linkEndingAt(TpIndex tp) const {
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i].end == tp) return i;
        return std::nullopt;
    }

    // Builder-style helpers; used by generators, parsers and tests.
    TpIndex addExecutable(const std::string& id) {
        timepoints.push_back({id, TimepointKind::Executable});
        return static_cast<TpIndex>(timepoints.size() - 1);
    }
    TpIndex addContingent(const std::string& id) {
        timepoints.push_back({id, TimepointKind::Contingent});
        return static_cast<TpIndex>(timepoints.size() - 1);
    }
    void addRequirement(std::vector<Atom> disjuncts) {
        requirements.push_back({std::move(disjuncts)});
    }
    void addSimple(TpIndex source, TpIndex target, Interval iv, Label label = {}) {
        addRequirement({Atom{source, target, iv, std::move(label)}});
    }
    void addLink(TpIndex start, TpIndex end, std::vector<Interval> ranges) {
        links.push_back({start, end, std::move(ranges)});
    }
    void addProposition(const std::string& prop, TpIndex observedAt) {
        propositions.push_back(prop);
        observations[prop] = observedAt;
    }
};

enum class ViolationCode {
    DuplicateTimepointId,
    UnknownTimepoint,
    EmptyDisjunctList,
    BadInterval,
    SelfLoopOutsideZero,
    UnknownProposition,
    ContradictoryLabel,
    NegativeContingentLower,
    InfiniteContingentBound,
    EmptyRangeList,
    RangesNotOrdered,
    DuplicateContingentEnd,
    ContingentEndNotContingent,
    ContingentStartNotExecutable,
    ContingentWithoutLink,
    MissingObservation,
    ObservationUnknownProp,
    ObservationUnknownTimepoint,
    DuplicateProposition,
};

inline const char* violationName(ViolationCode c) {
    switch (c) {
    case ViolationCode::DuplicateTimepointId: return "DuplicateTimepointId";
    case ViolationCode::UnknownTimepoint: return "UnknownTimepoint";
    case ViolationCode::EmptyDisjunctList: return "EmptyDisjunctList";
    case ViolationCode::BadInterval: return "BadInterval";
    case ViolationCode::SelfLoopOutsideZero: return "SelfLoopOutsideZero";
    case ViolationCode::UnknownProposition: return "UnknownProposition";
    case ViolationCode::ContradictoryLabel: return "ContradictoryLabel";
    case ViolationCode::NegativeContingentLower: return "NegativeContingentLower";
    case ViolationCode::InfiniteContingentBound: return "InfiniteContingentBound";
    case ViolationCode::EmptyRangeList: return "EmptyRangeList";
    case ViolationCode::RangesNotOrdered: return "RangesNotOrdered";
    case ViolationCode::DuplicateContingentEnd: return "DuplicateContingentEnd";
    case ViolationCode::ContingentEndNotContingent: return "ContingentEndNotContingent";
    case ViolationCode::ContingentStartNotExecutable: return "ContingentStartNotExecutable";
    case ViolationCode::ContingentWithoutLink: return "ContingentWithoutLink";
    case ViolationCode::MissingObservation: return "MissingObservation";
    case ViolationCode::ObservationUnknownProp: return "ObservationUnknownProp";
    case ViolationCode::ObservationUnknownTimepoint: return "ObservationUnknownTimepoint";
    case ViolationCode::DuplicateProposition: return "DuplicateProposition";
    }
    return "?";
}

struct Violation {
    ViolationCode code;
    std::string detail;
};

/// Checks every structural invariant; an empty result means the network is
/// well formed. Violations are data, not exceptions.
inline std::vector<Violation> validate(const Network& n) {
    std::vector<Violation> out;
    auto flag = [&](ViolationCode c, std::string d) {
        out.push_back({c, std::move(d)});
    };

    std::set<std::string> ids;
    for (const auto& tp : n.timepoints)
        if (!ids.insert(tp.id).second)
            flag(ViolationCode::DuplicateTimepointId, tp.id);

    std::set<std::string> props(n.propositions.begin(), n.propositions.end());
    if (props.size() != n.propositions.size())
        flag(ViolationCode::DuplicateProposition, "");

    auto tpOk = [&](TpIndex i) { return i < n.timepoints.size(); };

    for (std::size_t r = 0; r < n.requirements.size(); ++r) {
        const auto& req = n.requirements[r];
        std::string where = "requirement " + std::to_string(r);
        if (req.disjuncts.empty()) {
            flag(ViolationCode::EmptyDisjunctList, where);
            continue;
        }
        for (const auto& atom : req.disjuncts) {
            if (!tpOk(atom.source) || !tpOk(atom.target)) {
                flag(ViolationCode::UnknownTimepoint, where);
                continue;
            }
            if (!atom.interval.wellFormed())
                flag(ViolationCode::BadInterval, where + ": " + atom.interval.str());
            else if (atom.source == atom.target && !atom.interval.contains(Rat(0)))
                flag(ViolationCode::SelfLoopOutsideZero, where);
            if (atom.label.contradictory())
                flag(ViolationCode::ContradictoryLabel, where);
            for (const auto& lit : atom.label.literals())
                if (!props.count(lit.prop))
                    flag(ViolationCode::UnknownProposition, where + ": " + lit.prop);
        }
    }

    std::set<TpIndex> linkEnds;
    for (std::size_t l = 0; l < n.links.size(); ++l) {
        const auto& link = n.links[l];
        std::string where = "link " + std::to_string(l);
        if (!tpOk(link.start) || !tpOk(link.end)) {
            flag(ViolationCode::UnknownTimepoint, where);
            continue;
        }
        if (!n.isExecutable(link.start))
            flag(ViolationCode::ContingentStartNotExecutable, where);
        if (!n.isContingent(link.end))
            flag(ViolationCode::ContingentEndNotContingent, where);
        if (!linkEnds.insert(link.end).second)
            flag(ViolationCode::DuplicateContingentEnd, n.timepoints[link.end].id);
        if (link.ranges.empty()) {
            flag(ViolationCode::EmptyRangeList, where);
            continue;
        }
        for (const auto& range : link.ranges) {
            if (!range.wellFormed()) {
                flag(ViolationCode::BadInterval, where + ": " + range.str());
                continue;
            }
            if (!range.isFinite())
                flag(ViolationCode::InfiniteContingentBound, where);
            else if (range.lo.finite().isNegative())
                flag(ViolationCode::NegativeContingentLower, where);
        }
        for (std::size_t k = 1; k < link.ranges.size(); ++k) {
            const auto& prev = link.ranges[k - 1];
            const auto& cur = link.ranges[k];
            if (prev.isFinite() && cur.isFinite() &&
                !(prev.hi.finite() < cur.lo.finite()))
                flag(ViolationCode::RangesNotOrdered, where);
        }
    }

    for (TpIndex i = 0; i < n.timepoints.size(); ++i)
        if (n.isContingent(i) && !linkEnds.count(i))
            flag(ViolationCode::ContingentWithoutLink, n.timepoints[i].id);

    for (const auto& [prop, tp] : n.observations) {
        if (!props.count(prop))
            flag(ViolationCode::ObservationUnknownProp, prop);
        if (!tpOk(tp))
            flag(ViolationCode::ObservationUnknownTimepoint, prop);
    }
    for (const auto& prop : props)
        if (!n.observations.count(prop))
            flag(ViolationCode::MissingObservation, prop);

    return out;
}

inline void requireValid(const Network& n) {
    auto v = validate(n);
    if (!v.empty()) {
        std::string msg = "invalid network:";
        for (const auto& x : v) {
            msg += " ";
            msg += violationName(x.code);
            if (!x.detail.empty()) msg += "(" + x.detail + ")";
        }
        throw InvalidNetworkError(msg);
    }
}

namespace detail {

inline bool hasConditions(const Network& n) {
    if (!n.propositions.empty() || !n.observations.empty()) return true;
    for (const auto& req : n.requirements)
        for (const auto& atom : req.disjuncts)
            if (!atom.label.empty()) return true;
    return false;
}

enum class DisjunctionLevel { None, Simple, Full };

inline DisjunctionLevel disjunctionLevel(const Network& n) {
    auto level = DisjunctionLevel::None;
    for (const auto& req : n.requirements) {
        if (req.disjuncts.size() <= 1) continue;
        bool samePair = true;
        for (const auto& atom : req.disjuncts)
            if (atom.source != req.disjuncts[0].source ||
                atom.target != req.disjuncts[0].target)
                samePair = false;
        if (!samePair) return DisjunctionLevel::Full;
        level = DisjunctionLevel::Simple;
    }
    if (level == DisjunctionLevel::None)
        for (const auto& link : n.links)
            if (link.ranges.size() > 1) level = DisjunctionLevel::Simple;
    return level;
}

} // namespace detail

/// Most specific class in the taxonomy that admits this network; CDTNU is
/// the fallback for combinations no narrower class supports (for instance
/// conditions plus disjunctions without uncertainty).
inline NetworkClass classify(const Network& n) {
    requireValid(n);
    const bool conditional = detail::hasConditions(n);
    const bool uncertain = !n.links.empty();
    const auto disj = detail::disjunctionLevel(n);

    if (!conditional) {
        switch (disj) {
        case detail::DisjunctionLevel::None:
            return uncertain ? NetworkClass::STNU : NetworkClass::STN;
        case detail::DisjunctionLevel::Simple:
            return uncertain ? NetworkClass::TCSPU : NetworkClass::TCSP;
        case detail::DisjunctionLevel::Full:
            return uncertain ? NetworkClass::DTNU : NetworkClass::DTN;
        }
    }
    if (disj == detail::DisjunctionLevel::None)
        return uncertain ? NetworkClass::CSTNU : NetworkClass::CSTN;
    return NetworkClass::CDTNU;
}

/// Partial order on classes along the taxonomy edges: a <= b when every
/// network of class a is also expressible in class b.
inline bool classAtMost(NetworkClass a, NetworkClass b) {
    auto bits = [](NetworkClass c) -> unsigned {
        // bit 0/1: disjunction level (0 none, 1 simple, 2 full via two bits)
        // bit 2: conditions, bit 3: uncertainty
        switch (c) {
        case NetworkClass::STN: return 0b0000;
        case NetworkClass::TCSP: return 0b0001;
        case NetworkClass::DTN: return 0b0011;
        case NetworkClass::CSTN: return 0b0100;
        case NetworkClass::STNU: return 0b1000;
        case NetworkClass::TCSPU: return 0b1001;
        case NetworkClass::DTNU: return 0b1011;
        case NetworkClass::CSTNU: return 0b1100;
        case NetworkClass::CDTNU: return 0b1111;
        }
        return 0b1111;
    };
    unsigned x = bits(a), y = bits(b);
    return (x & y) == x;
}

/// Merges overlapping or touching disjunct intervals per (source, target,
/// label) group and orders each group ascending. Groups keep their order of
/// first appearance, so constraints over distinct pairs are left alone.
inline Network normalize(const Network& n) {
    requireValid(n);
    Network out = n;
    for (auto& req : out.requirements) {
        struct Key {
            TpIndex s, t;
            Label label;
            bool operator<(const Key& o) const {
                if (s != o.s) return s < o.s;
                if (t != o.t) return t < o.t;
                return label < o.label;
            }
        };
        std::vector<Key> order;
        std::map<Key, std::vector<Interval>> groups;
        for (const auto& atom : req.disjuncts) {
            Key k{atom.source, atom.target, atom.label};
            auto [it, fresh] = groups.try_emplace(k);
            if (fresh) order.push_back(k);
            it->second.push_back(atom.interval);
        }
        std::vector<Atom> merged;
        for (const auto& key : order) {
            auto ivs = groups[key];
            std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
                if (a.lo != b.lo) return a.lo < b.lo;
                return a.hi < b.hi;
            });
            std::vector<Interval> fused;
            for (const auto& iv : ivs) {
                if (!fused.empty() && fused.back().meets(iv))
                    fused.back() = fused.back().hullWith(iv);
                else
                    fused.push_back(iv);
            }
            for (const auto& iv : fused)
                merged.push_back(Atom{key.s, key.t, iv, key.label});
        }
        req.disjuncts = std::move(merged);
    }
    return out;
}

/// 1/D where D is the least common multiple of every finite bound's
/// denominator; every bound in the network is an integer multiple of it.
inline Rat gridStep(const Network& n) {
    requireValid(n);
    std::int64_t lcm = 1;
    auto fold = [&](const Bound& b) {
        if (!b.isFinite()) return;
        __int128 g = std::gcd(lcm, b.finite().den());
        __int128 l = (__int128)lcm / g * b.finite().den();
        if (l > std::numeric_limits<std::int64_t>::max())
            throw std::overflow_error("grid denominator out of range");
        lcm = static_cast<std::int64_t>(l);
    };
    for (const auto& req : n.requirements)
        for (const auto& atom : req.disjuncts) {
            fold(atom.interval.lo);
            fold(atom.interval.hi);
        }
    for (const auto& link : n.links)
        for (const auto& range : link.ranges) {
            fold(range.lo);
            fold(range.hi);
        }
    return Rat(1, lcm);
}

/// Sum of max(|l|, |u|) over all atoms and contingent ranges, counting only
/// finite bounds. Any feasible difference system fits inside this span.
inline Rat defaultHorizon(const Network& n) {
    requireValid(n);
    Rat total(0);
    auto fold = [&](const Interval& iv) {
        Rat m(0);
        if (iv.lo.isFinite()) m = max(m, iv.lo.finite().abs());
        if (iv.hi.isFinite()) m = max(m, iv.hi.finite().abs());
        total += m;
    };
    for (const auto& req : n.requirements)
        for (const auto& atom : req.disjuncts) fold(atom.interval);
    for (const auto& link : n.links)
        for (const auto& range : link.ranges) fold(range);
    return total;
}

/// Drops every condition: labels emptied, propositions and observations
/// removed. Timepoints, bounds and links are untouched.
inline Network stripLabels(const Network& n) {
    requireValid(n);
    Network out = n;
    for (auto& req : out.requirements)
        for (auto& atom : req.disjuncts) atom.label = Label{};
    out.propositions.clear();
    out.observations.clear();
    return out;
}

} // namespace tempoctrl
