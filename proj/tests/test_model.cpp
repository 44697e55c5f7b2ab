#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tempoctrl/model.hpp"
#include "tempoctrl/random_net.hpp"

using namespace tempoctrl;

namespace {

bool hasViolation(const std::vector<Violation>& vs, ViolationCode c) {
    for (const auto& v : vs)
        if (v.code == c) return true;
    return false;
}

// Direct constraint check, independent of the solver paths: a requirement
// holds when some disjunct is discharged by the scenario or numerically met.
bool directSatisfied(const Network& n, const std::map<TpIndex, Rat>& times,
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
            Rat diff = times.at(atom.target) - times.at(atom.source);
            if (atom.interval.contains(diff)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

} // namespace

TEST_CASE("validate: empty network is vacuously valid") {
    Network n;
    CHECK(validate(n).empty());
}

TEST_CASE("validate: negative contingent lower bound") {
    Network n;
    auto a = n.addExecutable("A");
    auto c = n.addContingent("C");
    n.addLink(a, c, {Interval(Rat(-1), Rat(2))});
    CHECK(hasViolation(validate(n), ViolationCode::NegativeContingentLower));
}

TEST_CASE("validate: two links sharing an end timepoint") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    auto c = n.addContingent("C");
    n.addLink(a, c, {Interval(Rat(0), Rat(1))});
    n.addLink(b, c, {Interval(Rat(0), Rat(2))});
    CHECK(hasViolation(validate(n), ViolationCode::DuplicateContingentEnd));
}

TEST_CASE("validate: assorted structural breakage") {
    Network n;
    auto a = n.addExecutable("A");
    auto c = n.addContingent("C");
    n.addSimple(a, 99, Interval(Rat(0), Rat(1)));
    n.addRequirement({});
    n.addSimple(a, a, Interval(Rat(1), Rat(2))); // self loop outside zero
    n.addSimple(a, c, Interval(Rat(2), Rat(1))); // reversed bounds
    auto vs = validate(n);
    CHECK(hasViolation(vs, ViolationCode::UnknownTimepoint));
    CHECK(hasViolation(vs, ViolationCode::EmptyDisjunctList));
    CHECK(hasViolation(vs, ViolationCode::SelfLoopOutsideZero));
    CHECK(hasViolation(vs, ViolationCode::BadInterval));
    CHECK(hasViolation(vs, ViolationCode::ContingentWithoutLink));
}

TEST_CASE("validate: contingent plumbing") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    auto c = n.addContingent("C");
    n.addLink(c, b, {Interval(Rat(0), Rat(1))}); // start contingent, end executable
    auto vs = validate(n);
    CHECK(hasViolation(vs, ViolationCode::ContingentStartNotExecutable));
    CHECK(hasViolation(vs, ViolationCode::ContingentEndNotContingent));
    (void)a;

    Network m;
    auto e = m.addExecutable("E");
    auto f = m.addContingent("F");
    m.addLink(e, f, {Interval(Rat(0), Rat(1)), Interval(Rat(1), Rat(2))}); // touching ranges
    CHECK(hasViolation(validate(m), ViolationCode::RangesNotOrdered));

    Network o;
    auto g = o.addExecutable("G");
    o.addSimple(g, g, Interval(Rat(0), Rat(0)));
    o.propositions.push_back("u"); // no observation
    CHECK(hasViolation(validate(o), ViolationCode::MissingObservation));
}

TEST_CASE("classify: nine-class conformance") {
    // STN: two timepoints, one binary constraint.
    Network stn;
    auto a = stn.addExecutable("A");
    auto b = stn.addExecutable("B");
    stn.addSimple(a, b, Interval(Rat(10), Rat(20)));
    CHECK(classify(stn) == NetworkClass::STN);

    // STNU: add a contingent link.
    Network stnu = stn;
    auto c = stnu.addContingent("C");
    stnu.addLink(a, c, {Interval(Rat(1), Rat(3))});
    CHECK(classify(stnu) == NetworkClass::STNU);

    // DTNU: a disjunct set spanning two different timepoint pairs.
    Network dtnu = stnu;
    dtnu.addRequirement({Atom{a, b, Interval(Rat(0), Rat(1))},
                         Atom{a, c, Interval(Rat(5), Rat(6))}});
    CHECK(classify(dtnu) == NetworkClass::DTNU);

    // TCSP: same-pair disjunction, no uncertainty.
    Network tcsp = stn;
    tcsp.addRequirement({Atom{a, b, Interval(Rat(0), Rat(0))},
                         Atom{a, b, Interval(Rat(2), Rat(2))}});
    CHECK(classify(tcsp) == NetworkClass::TCSP);

    // DTN: cross-pair disjunction, no uncertainty.
    Network dtn = stn;
    auto d = dtn.addExecutable("D");
    dtn.addRequirement({Atom{a, b, Interval(Rat(0), Rat(0))},
                        Atom{a, d, Interval(Rat(2), Rat(2))}});
    CHECK(classify(dtn) == NetworkClass::DTN);

    // CSTN: conditions without uncertainty.
    Network cstn = stn;
    cstn.addProposition("u", b);
    cstn.addSimple(a, b, Interval(Bound::minusInf(), Bound(Rat(1))),
                   Label({{"u", false}}));
    CHECK(classify(cstn) == NetworkClass::CSTN);

    // TCSPU: simple disjunctions plus uncertainty.
    Network tcspu = stnu;
    tcspu.addRequirement({Atom{a, b, Interval(Rat(0), Rat(0))},
                          Atom{a, b, Interval(Rat(2), Rat(2))}});
    CHECK(classify(tcspu) == NetworkClass::TCSPU);

    // Multi-range contingent link alone lifts STNU to TCSPU.
    Network tcspu2 = stn;
    auto c2 = tcspu2.addContingent("C2");
    tcspu2.addLink(a, c2, {Interval(Rat(0), Rat(0)), Interval(Rat(2), Rat(2))});
    CHECK(classify(tcspu2) == NetworkClass::TCSPU);

    // CSTNU: conditions plus uncertainty, no disjunctions.
    Network cstnu = stnu;
    cstnu.addProposition("u", b);
    CHECK(classify(cstnu) == NetworkClass::CSTNU);

    // CDTNU: everything at once.
    Network cdtnu = dtnu;
    cdtnu.addProposition("u", b);
    CHECK(classify(cdtnu) == NetworkClass::CDTNU);

    // Conditions plus disjunctions without uncertainty only fit the top.
    Network mix = tcsp;
    mix.addProposition("u", b);
    CHECK(classify(mix) == NetworkClass::CDTNU);
}

TEST_CASE("classify rejects invalid networks") {
    Network n;
    n.addRequirement({});
    CHECK_THROWS_AS(classify(n), InvalidNetworkError);
}

TEST_CASE("classAtMost follows the taxonomy") {
    CHECK(classAtMost(NetworkClass::STN, NetworkClass::CDTNU));
    CHECK(classAtMost(NetworkClass::STNU, NetworkClass::CSTNU));
    CHECK(classAtMost(NetworkClass::TCSP, NetworkClass::DTNU));
    CHECK(!classAtMost(NetworkClass::DTN, NetworkClass::TCSPU));
    CHECK(!classAtMost(NetworkClass::CSTN, NetworkClass::DTNU));
    CHECK(classAtMost(NetworkClass::CSTNU, NetworkClass::CSTNU));
}

TEST_CASE("normalize merges overlapping and touching same-pair disjuncts") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    n.addRequirement({Atom{a, b, Interval(Rat(0), Rat(2))},
                      Atom{a, b, Interval(Rat(1), Rat(3))}});
    auto out = normalize(n);
    REQUIRE(out.requirements[0].disjuncts.size() == 1);
    CHECK(out.requirements[0].disjuncts[0].interval == Interval(Rat(0), Rat(3)));
}

TEST_CASE("normalize keeps gapped point disjuncts, sorted") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    n.addRequirement({Atom{a, b, Interval(Rat(1), Rat(1))},
                      Atom{a, b, Interval(Rat(0), Rat(0))}});
    auto out = normalize(n);
    REQUIRE(out.requirements[0].disjuncts.size() == 2);
    CHECK(out.requirements[0].disjuncts[0].interval == Interval(Rat(0), Rat(0)));
    CHECK(out.requirements[0].disjuncts[1].interval == Interval(Rat(1), Rat(1)));
}

TEST_CASE("normalize leaves cross-pair disjuncts alone") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    auto c = n.addExecutable("C");
    n.addRequirement({Atom{a, b, Interval(Rat(0), Rat(2))},
                      Atom{a, c, Interval(Rat(1), Rat(3))}});
    auto out = normalize(n);
    CHECK(out.requirements[0].disjuncts.size() == 2);
    CHECK(out.requirements[0].disjuncts[0].target == b);
    CHECK(out.requirements[0].disjuncts[1].target == c);
}

TEST_CASE("normalize is idempotent and preserves satisfaction") {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        RandomNetSpec spec;
        spec.target = (seed % 3 == 0)   ? NetworkClass::TCSPU
                      : (seed % 3 == 1) ? NetworkClass::CDTNU
                                        : NetworkClass::DTN;
        spec.maxTimepoints = 5;
        Network n = randomNetwork(seed, spec);
        REQUIRE(validate(n).empty());
        Network once = normalize(n);
        Network twice = normalize(once);
        CHECK(once.requirements == twice.requirements);

        // Random assignments must agree before/after normalization.
        for (int trial = 0; trial < 20; ++trial) {
            std::map<TpIndex, Rat> times;
            for (TpIndex i = 0; i < n.timepoints.size(); ++i)
                times[i] = Rat(static_cast<std::int64_t>(rng() % 9) - 4,
                               1 + static_cast<std::int64_t>(rng() % 2));
            std::map<std::string, bool> scenario;
            for (const auto& p : n.propositions) scenario[p] = rng() % 2 == 0;
            CHECK(directSatisfied(n, times, scenario) ==
                  directSatisfied(once, times, scenario));
        }
    }
}

TEST_CASE("gridStep") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    n.addSimple(a, b, Interval(Rat(10), Rat(20)));
    CHECK(gridStep(n) == Rat(1));

    Network m;
    auto x = m.addExecutable("X");
    auto y = m.addExecutable("Y");
    m.addSimple(x, y, Interval(Rat(1, 2), Rat(1, 2)));
    m.addSimple(x, y, Interval(Rat(1, 3), Rat(2)));
    CHECK(gridStep(m) == Rat(1, 6));

    CHECK(gridStep(Network{}) == Rat(1));
}

TEST_CASE("gridStep divides every finite bound") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomNetSpec spec;
        spec.target = NetworkClass::CDTNU;
        Network n = randomNetwork(seed, spec);
        Rat step = gridStep(n);
        for (const auto& req : n.requirements)
            for (const auto& atom : req.disjuncts) {
                if (atom.interval.lo.isFinite())
                    CHECK(atom.interval.lo.finite().isMultipleOf(step));
                if (atom.interval.hi.isFinite())
                    CHECK(atom.interval.hi.finite().isMultipleOf(step));
            }
    }
}

TEST_CASE("defaultHorizon sums the dominant bound magnitudes") {
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    n.addSimple(a, b, Interval(Rat(10), Rat(20)));
    CHECK(defaultHorizon(n) == Rat(20));

    CHECK(defaultHorizon(Network{}) == Rat(0));

    Network m;
    auto x = m.addExecutable("X");
    auto y = m.addExecutable("Y");
    m.addSimple(x, y, Interval(Rat(0), Rat(1)));
    m.addSimple(x, y, Interval(Rat(-2), Rat(3)));
    CHECK(defaultHorizon(m) == Rat(4));

    // Infinite sides are skipped, not counted.
    Network o;
    auto p = o.addExecutable("P");
    auto q = o.addExecutable("Q");
    o.addSimple(p, q, Interval(Bound(Rat(1)), Bound::plusInf()));
    CHECK(defaultHorizon(o) == Rat(1));
}

TEST_CASE("stripLabels erases conditions and only conditions") {
    // Delivery-urgency network: B-A <= 1 under u, B-A <= 7 under not-u.
    Network n;
    auto a = n.addExecutable("A");
    auto b = n.addExecutable("B");
    auto c = n.addExecutable("C");
    n.addProposition("u", c);
    n.addSimple(a, b, Interval(Bound(Rat(0)), Bound(Rat(1))), Label({{"u", false}}));
    n.addSimple(a, b, Interval(Bound(Rat(0)), Bound(Rat(7))), Label({{"u", true}}));
    CHECK(classify(n) == NetworkClass::CSTN);

    Network s = stripLabels(n);
    CHECK(classify(s) == NetworkClass::STN);
    CHECK(s.propositions.empty());
    CHECK(s.observations.empty());
    for (const auto& req : s.requirements)
        for (const auto& atom : req.disjuncts) CHECK(atom.label.empty());
    CHECK(s.requirements.size() == n.requirements.size());
    CHECK(s.requirements[0].disjuncts[0].interval == n.requirements[0].disjuncts[0].interval);

    // Unlabeled networks come back identical.
    Network plain;
    auto x = plain.addExecutable("X");
    auto y = plain.addExecutable("Y");
    plain.addSimple(x, y, Interval(Rat(0), Rat(1)));
    Network stripped = stripLabels(plain);
    CHECK(stripped.requirements == plain.requirements);
}

TEST_CASE("stripLabels demotes every conditional class") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RandomNetSpec spec;
        spec.target = (seed % 3 == 0)   ? NetworkClass::CSTN
                      : (seed % 3 == 1) ? NetworkClass::CSTNU
                                        : NetworkClass::CDTNU;
        Network n = randomNetwork(seed, spec);
        auto cls = classify(stripLabels(n));
        CHECK(cls != NetworkClass::CSTN);
        CHECK(cls != NetworkClass::CSTNU);
        // CDTNU generator always carries propositions, so the stripped class
        // must drop out of the conditional column entirely.
        if (spec.target == NetworkClass::CDTNU) CHECK(cls != NetworkClass::CDTNU);
    }
}

TEST_CASE("random networks hit their requested class deterministically") {
    for (auto target : {NetworkClass::STN, NetworkClass::TCSP, NetworkClass::DTN,
                        NetworkClass::CSTN, NetworkClass::STNU, NetworkClass::TCSPU,
                        NetworkClass::DTNU, NetworkClass::CSTNU, NetworkClass::CDTNU}) {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            RandomNetSpec spec;
            spec.target = target;
            spec.maxTimepoints = 5;
            Network n = randomNetwork(seed, spec);
            CHECK(validate(n).empty());
            CHECK(classify(n) == target);
        }
    }
    RandomNetSpec spec;
    spec.target = NetworkClass::STNU;
    Network a = randomNetwork(42, spec);
    Network b = randomNetwork(42, spec);
    CHECK(a.timepoints.size() == b.timepoints.size());
    CHECK(a.requirements == b.requirements);
    CHECK(a.links == b.links);
}
