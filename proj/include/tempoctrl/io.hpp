#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tempoctrl/errors.hpp"
#include "tempoctrl/formulas.hpp"
#include "tempoctrl/model.hpp"

namespace tempoctrl {

using Json = nlohmann::ordered_json;

inline constexpr const char* kNetworkFormat = "tempoctrl/1";

// ---------------------------------------------------------------------------
// Rational and bound encoding: integers stay JSON integers, everything else
// is a "p/q" string; infinities are "inf" / "-inf".
// ---------------------------------------------------------------------------

inline Json ratToJson(const Rat& r) {
    if (r.isInteger()) return Json(r.num());
    return Json(r.str());
}

inline Rat ratFromJson(const Json& j, const std::string& where) {
    try {
        if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
        if (j.is_string()) return Rat::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    if (j.is_number_float())
        throw ParseError(where + ": floating point numbers are not accepted; use \"p/q\"");
    throw ParseError(where + ": expected integer or \"p/q\" string");
}

inline Json boundToJson(const Bound& b) {
    if (b.isFinite()) return ratToJson(b.finite());
    return Json(b.str());
}

inline Bound boundFromJson(const Json& j, bool isLower, const std::string& where) {
    if (j.is_null()) return isLower ? Bound::minusInf() : Bound::plusInf();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return Bound::plusInf();
        if (s == "-inf") return Bound::minusInf();
    }
    return Bound(ratFromJson(j, where));
}

// ---------------------------------------------------------------------------
// Canonical network file format.
// ---------------------------------------------------------------------------

inline Json networkToJson(const Network& n) {
    Json j;
    j["format"] = kNetworkFormat;
    j["timepoints"] = Json::array();
    for (const auto& tp : n.timepoints)
        j["timepoints"].push_back(
            {{"id", tp.id},
             {"kind", tp.kind == TimepointKind::Executable ? "executable" : "contingent"}});
    j["requirements"] = Json::array();
    for (const auto& req : n.requirements) {
        Json disjuncts = Json::array();
        for (const auto& atom : req.disjuncts) {
            Json d;
            d["source"] = n.timepoints.at(atom.source).id;
            d["target"] = n.timepoints.at(atom.target).id;
            d["lower"] = boundToJson(atom.interval.lo);
            d["upper"] = boundToJson(atom.interval.hi);
            if (!atom.label.empty()) {
                Json label = Json::array();
                for (const auto& lit : atom.label.literals())
                    label.push_back({{"prop", lit.prop}, {"neg", lit.negated}});
                d["label"] = label;
            }
            disjuncts.push_back(std::move(d));
        }
        j["requirements"].push_back({{"disjuncts", std::move(disjuncts)}});
    }
    j["contingent_links"] = Json::array();
    for (const auto& link : n.links) {
        Json ranges = Json::array();
        for (const auto& r : link.ranges)
            ranges.push_back(Json::array({boundToJson(r.lo), boundToJson(r.hi)}));
        j["contingent_links"].push_back({{"start", n.timepoints.at(link.start).id},
                                         {"end", n.timepoints.at(link.end).id},
                                         {"ranges", std::move(ranges)}});
    }
    j["propositions"] = n.propositions;
    Json obs = Json::object();
    for (const auto& [prop, tp] : n.observations) obs[prop] = n.timepoints.at(tp).id;
    j["observations"] = std::move(obs);
    return j;
}

inline std::string writeNetwork(const Network& n) {
    return networkToJson(n).dump(2) + "\n";
}

inline Network networkFromJson(const Json& j) {
    if (!j.is_object()) throw ParseError("network file must be a JSON object");
    if (!j.contains("format") || j["format"] != kNetworkFormat)
        throw ParseError(std::string("expected format \"") + kNetworkFormat + "\"");
    Network n;
    if (!j.contains("timepoints") || !j["timepoints"].is_array())
        throw ParseError("missing timepoints array");
    for (const auto& tp : j["timepoints"]) {
        if (!tp.contains("id") || !tp["id"].is_string())
            throw ParseError("timepoint without id");
        std::string id = tp["id"];
        std::string kind = tp.value("kind", "executable");
        if (kind == "executable")
            n.addExecutable(id);
        else if (kind == "contingent")
            n.addContingent(id);
        else
            throw ParseError("unknown timepoint kind: " + kind);
    }
    auto tpIndex = [&](const Json& v, const std::string& where) -> TpIndex {
        if (!v.is_string()) throw ParseError(where + ": timepoint reference must be a string");
        TpIndex i = n.indexOf(v.get<std::string>());
        if (i == kNoTp) throw ParseError(where + ": unknown timepoint " + v.get<std::string>());
        return i;
    };
    for (const auto& req : j.value("requirements", Json::array())) {
        std::vector<Atom> disjuncts;
        if (!req.contains("disjuncts") || !req["disjuncts"].is_array())
            throw ParseError("requirement without disjuncts");
        for (const auto& d : req["disjuncts"]) {
            Atom atom;
            atom.source = tpIndex(d.at("source"), "disjunct source");
            atom.target = tpIndex(d.at("target"), "disjunct target");
            atom.interval.lo = d.contains("lower")
                                   ? boundFromJson(d["lower"], true, "lower bound")
                                   : Bound::minusInf();
            atom.interval.hi = d.contains("upper")
                                   ? boundFromJson(d["upper"], false, "upper bound")
                                   : Bound::plusInf();
            if (d.contains("label")) {
                std::vector<PropLiteral> lits;
                for (const auto& lit : d["label"])
                    lits.push_back({lit.at("prop").get<std::string>(),
                                    lit.value("neg", false)});
                atom.label = Label(std::move(lits));
            }
            disjuncts.push_back(std::move(atom));
        }
        n.addRequirement(std::move(disjuncts));
    }
    for (const auto& link : j.value("contingent_links", Json::array())) {
        std::vector<Interval> ranges;
        for (const auto& r : link.at("ranges")) {
            if (!r.is_array() || r.size() != 2)
                throw ParseError("contingent range must be a [lower, upper] pair");
            ranges.emplace_back(boundFromJson(r[0], true, "range lower"),
                                boundFromJson(r[1], false, "range upper"));
        }
        n.links.push_back({tpIndex(link.at("start"), "link start"),
                           tpIndex(link.at("end"), "link end"), std::move(ranges)});
    }
    for (const auto& p : j.value("propositions", Json::array())) {
        if (!p.is_string()) throw ParseError("proposition must be a string");
        n.propositions.push_back(p.get<std::string>());
    }
    if (j.contains("observations"))
        for (const auto& [prop, tp] : j["observations"].items())
            n.observations[prop] = tpIndex(tp, "observation of " + prop);
    return n;
}

inline Network readNetwork(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    return networkFromJson(j);
}

inline Network loadNetworkFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return readNetwork(buf.str());
}

// ---------------------------------------------------------------------------
// Formula file format. Header "p wff <type> <#x> <#y> <#clauses>" followed by
// one clause per line with exactly three literals. Variables 1..#x are the
// x family; #x+1..#x+#y address the y family; negative integers negate.
// ---------------------------------------------------------------------------

enum class FormulaType { CnfAe, DnfEa, QbfAlt };

inline const char* formulaTypeName(FormulaType t) {
    switch (t) {
    case FormulaType::CnfAe: return "cnf-ae";
    case FormulaType::DnfEa: return "dnf-ea";
    case FormulaType::QbfAlt: return "qbf-alt";
    }
    return "?";
}

struct FormulaDoc {
    FormulaType type = FormulaType::CnfAe;
    std::size_t numX = 0;
    std::size_t numY = 0;
    std::vector<Clause3> clauses;

    CnfFormula toCnf() const {
        if (type == FormulaType::DnfEa)
            throw FormulaTypeMismatchError("dnf-ea formula where a CNF is required");
        return CnfFormula{numX, numY, clauses};
    }
    DnfFormula toDnf() const {
        if (type != FormulaType::DnfEa)
            throw FormulaTypeMismatchError("expected a dnf-ea formula");
        return DnfFormula{numX, numY, clauses};
    }
    QbfInstance toQbf() const {
        if (type != FormulaType::QbfAlt)
            throw FormulaTypeMismatchError("expected a qbf-alt formula");
        if (numX != numY)
            throw ParseError("qbf-alt requires #x == #y");
        return QbfInstance{numX, CnfFormula{numX, numY, clauses}};
    }
};

inline std::string writeFormula(const FormulaDoc& doc) {
    std::ostringstream out;
    out << "p wff " << formulaTypeName(doc.type) << " " << doc.numX << " "
        << doc.numY << " " << doc.clauses.size() << "\n";
    for (const auto& cl : doc.clauses) {
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& lit = cl[i];
            std::int64_t v = static_cast<std::int64_t>(
                lit.family == FLit::Family::X ? lit.index : doc.numX + lit.index);
            out << (i ? " " : "") << (lit.negated ? -v : v);
        }
        out << "\n";
    }
    return out.str();
}

inline FormulaDoc readFormula(const std::string& text) {
    FormulaDoc doc;
    std::istringstream in(text);
    std::string line;
    bool haveHeader = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (!haveHeader) {
            std::string p, wff, type;
            std::size_t clauseCount = 0;
            if (!(ls >> p >> wff >> type >> doc.numX >> doc.numY >> clauseCount) ||
                p != "p" || wff != "wff")
                throw ParseError("bad formula header: " + line);
            if (type == "cnf-ae") doc.type = FormulaType::CnfAe;
            else if (type == "dnf-ea") doc.type = FormulaType::DnfEa;
            else if (type == "qbf-alt") doc.type = FormulaType::QbfAlt;
            else throw ParseError("unknown formula type: " + type);
            doc.clauses.reserve(clauseCount);
            haveHeader = true;
            continue;
        }
        Clause3 cl;
        std::int64_t v[3];
        if (!(ls >> v[0] >> v[1] >> v[2]))
            throw ParseError("clause must have exactly three literals: " + line);
        std::int64_t extra;
        if (ls >> extra)
            throw ParseError("clause must have exactly three literals: " + line);
        for (int i = 0; i < 3; ++i) {
            if (v[i] == 0) throw ParseError("zero literal");
            std::size_t idx = static_cast<std::size_t>(v[i] < 0 ? -v[i] : v[i]);
            FLit lit;
            lit.negated = v[i] < 0;
            if (idx <= doc.numX) {
                lit.family = FLit::Family::X;
                lit.index = idx;
            } else if (idx <= doc.numX + doc.numY) {
                lit.family = FLit::Family::Y;
                lit.index = idx - doc.numX;
            } else {
                throw ParseError("literal out of range: " + std::to_string(v[i]));
            }
            cl[i] = lit;
        }
        doc.clauses.push_back(cl);
    }
    if (!haveHeader) throw ParseError("formula file without header");
    return doc;
}

inline FormulaDoc loadFormulaFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return readFormula(buf.str());
}

} // namespace tempoctrl
