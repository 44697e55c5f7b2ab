#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tempoctrl/model.hpp"

namespace tempoctrl {

/// Size envelope for random instance generation. Kept small by default so
/// that brute-force oracles stay cheap.
struct RandomNetSpec {
    NetworkClass target = NetworkClass::STN;
    std::size_t maxTimepoints = 4;
    std::size_t maxConstraints = 5;
    std::size_t maxContingents = 2;
    std::size_t maxPropositions = 1;
    std::size_t maxDisjuncts = 2;
    std::size_t maxRangesPerLink = 2;
    std::int64_t boundMagnitude = 3;
};

/// Seeded, reproducible network of exactly the requested class. The same
/// seed always produces the same network, and the result always validates.
inline Network randomNetwork(std::uint64_t seed, const RandomNetSpec& spec) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    auto pick = [&](std::size_t lo, std::size_t hi) { // inclusive
        return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    };
    auto pickInt = [&](std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    const bool uncertain = classAtMost(NetworkClass::STNU, spec.target) ||
                           spec.target == NetworkClass::TCSPU ||
                           spec.target == NetworkClass::DTNU ||
                           spec.target == NetworkClass::CSTNU ||
                           spec.target == NetworkClass::CDTNU;
    const bool conditional = spec.target == NetworkClass::CSTN ||
                             spec.target == NetworkClass::CSTNU ||
                             spec.target == NetworkClass::CDTNU;
    const bool simpleDisjunctive = spec.target == NetworkClass::TCSP ||
                                   spec.target == NetworkClass::TCSPU;
    const bool fullDisjunctive = spec.target == NetworkClass::DTN ||
                                 spec.target == NetworkClass::DTNU ||
                                 spec.target == NetworkClass::CDTNU;
    const std::int64_t B = spec.boundMagnitude;

    Network n;
    std::size_t contingentCount = 0;
    if (uncertain)
        contingentCount = pick(1, std::max<std::size_t>(1, std::min(spec.maxContingents,
                                                                    spec.maxTimepoints - 1)));
    std::size_t least = std::max<std::size_t>(2, contingentCount + 1);
    std::size_t total = pick(least, std::max(least, spec.maxTimepoints));
    std::size_t executableCount = total - contingentCount;
    for (std::size_t i = 0; i < executableCount; ++i)
        n.addExecutable("T" + std::to_string(i));
    for (std::size_t i = 0; i < contingentCount; ++i)
        n.addContingent("C" + std::to_string(i));

    auto randomExecutable = [&] { return static_cast<TpIndex>(pick(0, executableCount - 1)); };
    auto randomTimepoint = [&] { return static_cast<TpIndex>(pick(0, total - 1)); };

    // Contingent links; ranges are strictly gapped ascending intervals.
    const bool multiRange = simpleDisjunctive || fullDisjunctive;
    for (std::size_t i = 0; i < contingentCount; ++i) {
        std::size_t rangeCount = multiRange ? pick(1, spec.maxRangesPerLink) : 1;
        std::vector<Interval> ranges;
        std::int64_t cursor = pickInt(0, 1);
        for (std::size_t r = 0; r < rangeCount; ++r) {
            std::int64_t lo = cursor;
            std::int64_t hi = std::min<std::int64_t>(B, lo + pickInt(0, 1));
            ranges.emplace_back(Rat(lo), Rat(hi));
            cursor = hi + 1 + pickInt(0, 1);
            if (cursor > B) {
                rangeCount = r + 1;
                break;
            }
        }
        n.addLink(randomExecutable(), static_cast<TpIndex>(executableCount + i),
                  std::move(ranges));
    }

    if (conditional) {
        std::size_t propCount = pick(1, std::max<std::size_t>(1, spec.maxPropositions));
        for (std::size_t p = 0; p < propCount; ++p)
            n.addProposition(std::string(1, static_cast<char>('p' + p)), randomTimepoint());
    }

    auto randomLabel = [&]() -> Label {
        if (!conditional || n.propositions.empty() || pick(0, 2) == 0) return Label{};
        std::vector<PropLiteral> lits;
        lits.push_back({n.propositions[pick(0, n.propositions.size() - 1)], pick(0, 1) == 1});
        return Label(std::move(lits));
    };
    auto randomInterval = [&] {
        std::int64_t lo = pickInt(-B, B);
        std::int64_t hi = pickInt(lo, B);
        return Interval(Rat(lo), Rat(hi));
    };
    auto distinctPair = [&](TpIndex& s, TpIndex& t) {
        s = randomTimepoint();
        do {
            t = randomTimepoint();
        } while (total > 1 && t == s);
    };

    std::size_t constraintCount = pick(1, spec.maxConstraints);
    for (std::size_t c = 0; c < constraintCount; ++c) {
        TpIndex s, t;
        distinctPair(s, t);
        std::vector<Atom> disjuncts;
        std::size_t want = 1;
        if (simpleDisjunctive || fullDisjunctive) want = pick(1, spec.maxDisjuncts);
        Label label = randomLabel();
        for (std::size_t d = 0; d < want; ++d) {
            TpIndex ds = s, dt = t;
            if (fullDisjunctive && d > 0 && pick(0, 1) == 1) distinctPair(ds, dt);
            disjuncts.push_back(Atom{ds, dt, randomInterval(), label});
        }
        n.addRequirement(std::move(disjuncts));
    }

    // Force the exact class when the random draws were too tame.
    auto ensureClass = [&] {
        if (simpleDisjunctive) {
            bool has = false;
            for (const auto& req : n.requirements) has |= req.disjuncts.size() > 1;
            for (const auto& link : n.links) has |= link.ranges.size() > 1;
            if (!has) {
                TpIndex s, t;
                distinctPair(s, t);
                std::int64_t lo = pickInt(-B, B - 2);
                n.addRequirement({Atom{s, t, Interval(Rat(lo), Rat(lo))},
                                  Atom{s, t, Interval(Rat(lo + 2), Rat(lo + 2))}});
            }
        }
        if (fullDisjunctive) {
            bool has = false;
            for (const auto& req : n.requirements) {
                if (req.disjuncts.size() <= 1) continue;
                for (const auto& atom : req.disjuncts)
                    has |= atom.source != req.disjuncts[0].source ||
                           atom.target != req.disjuncts[0].target;
            }
            if (!has) {
                TpIndex s1, t1, s2, t2;
                distinctPair(s1, t1);
                distinctPair(s2, t2);
                if (s2 == s1 && t2 == t1) std::swap(s2, t2);
                n.addRequirement({Atom{s1, t1, randomInterval()},
                                  Atom{s2, t2, randomInterval()}});
            }
        }
    };
    ensureClass();
    return n;
}

} // namespace tempoctrl
