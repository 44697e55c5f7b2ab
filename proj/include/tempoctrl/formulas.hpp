#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempoctrl {

/// Literal over the split variable families: x variables belong to the
/// scheduler-like existential side, y variables to nature. Indices are
/// 1-based within their family.
struct FLit {
    enum class Family { X, Y };
    Family family = Family::X;
    std::size_t index = 1;
    bool negated = false;

    friend bool operator==(const FLit& a, const FLit& b) {
        return a.family == b.family && a.index == b.index && a.negated == b.negated;
    }
    friend bool operator<(const FLit& a, const FLit& b) {
        if (a.family != b.family) return a.family < b.family;
        if (a.index != b.index) return a.index < b.index;
        return a.negated < b.negated;
    }
};

/// Exactly three literals; 3-CNF clauses read as disjunctions, 3-DNF clauses
/// as conjunctions.
using Clause3 = std::array<FLit, 3>;

struct CnfFormula {
    std::size_t numX = 0;
    std::size_t numY = 0;
    std::vector<Clause3> clauses;
};

struct DnfFormula {
    std::size_t numX = 0;
    std::size_t numY = 0;
    std::vector<Clause3> clauses;
};

/// Alternating instance: exists x1 forall y1 ... exists xn forall yn over a
/// 3-CNF matrix with numX == numY == n.
struct QbfInstance {
    std::size_t n = 0;
    CnfFormula matrix;
};

namespace detail {

inline void checkIndices(std::size_t numX, std::size_t numY,
                         const std::vector<Clause3>& clauses) {
    if (numX >= 63 || numY >= 63)
        throw std::invalid_argument("formula too wide for brute force");
    for (const auto& cl : clauses)
        for (const auto& lit : cl) {
            std::size_t limit = lit.family == FLit::Family::X ? numX : numY;
            if (lit.index < 1 || lit.index > limit)
                throw std::invalid_argument("literal index out of range");
        }
}

inline bool litTrue(const FLit& lit, std::uint64_t xBits, std::uint64_t yBits) {
    std::uint64_t bits = lit.family == FLit::Family::X ? xBits : yBits;
    bool v = (bits >> (lit.index - 1)) & 1;
    return v != lit.negated;
}

inline bool cnfTrue(const std::vector<Clause3>& clauses, std::uint64_t x, std::uint64_t y) {
    for (const auto& cl : clauses) {
        bool sat = false;
        for (const auto& lit : cl) sat = sat || litTrue(lit, x, y);
        if (!sat) return false;
    }
    return true; // empty conjunction holds
}

inline bool dnfTrue(const std::vector<Clause3>& clauses, std::uint64_t x, std::uint64_t y) {
    for (const auto& cl : clauses) {
        bool all = true;
        for (const auto& lit : cl) all = all && litTrue(lit, x, y);
        if (all) return true;
    }
    return false; // empty disjunction fails
}

} // namespace detail

/// forall y exists x : phi(x, y), by brute force over both assignments.
inline bool evalForallExists3Sat(const CnfFormula& phi) {
    detail::checkIndices(phi.numX, phi.numY, phi.clauses);
    const std::uint64_t xTotal = std::uint64_t(1) << phi.numX;
    const std::uint64_t yTotal = std::uint64_t(1) << phi.numY;
    for (std::uint64_t y = 0; y < yTotal; ++y) {
        bool found = false;
        for (std::uint64_t x = 0; x < xTotal && !found; ++x)
            found = detail::cnfTrue(phi.clauses, x, y);
        if (!found) return false;
    }
    return true;
}

/// exists x1 forall y1 ... exists xn forall yn : phi(x, y).
inline bool evalTqbf(const QbfInstance& inst) {
    if (inst.matrix.numX != inst.n || inst.matrix.numY != inst.n)
        throw std::invalid_argument("alternating instance must have n x and n y variables");
    detail::checkIndices(inst.n, inst.n, inst.matrix.clauses);
    std::function<bool(std::size_t, std::uint64_t, std::uint64_t)> walk =
        [&](std::size_t depth, std::uint64_t x, std::uint64_t y) -> bool {
        if (depth == inst.n) return detail::cnfTrue(inst.matrix.clauses, x, y);
        std::uint64_t bit = std::uint64_t(1) << depth;
        for (std::uint64_t xv : {std::uint64_t(0), bit}) {
            bool holdsForAll = true;
            for (std::uint64_t yv : {std::uint64_t(0), bit})
                holdsForAll = holdsForAll && walk(depth + 1, x | xv, y | yv);
            if (holdsForAll) return true;
        }
        return false;
    };
    return walk(0, 0, 0);
}

/// exists x forall y : psi(x, y) for a 3-DNF psi.
inline bool evalExistsForall3Dnf(const DnfFormula& psi) {
    detail::checkIndices(psi.numX, psi.numY, psi.clauses);
    const std::uint64_t xTotal = std::uint64_t(1) << psi.numX;
    const std::uint64_t yTotal = std::uint64_t(1) << psi.numY;
    for (std::uint64_t x = 0; x < xTotal; ++x) {
        bool holdsForAll = true;
        for (std::uint64_t y = 0; y < yTotal && holdsForAll; ++y)
            holdsForAll = detail::dnfTrue(psi.clauses, x, y);
        if (holdsForAll) return true;
    }
    return false;
}

} // namespace tempoctrl
