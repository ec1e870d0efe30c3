/**
 * @file json_io.hpp
 * @brief JSON serialization for specs, configs, and reports. Scalars travel
 *        as exact strings; objects serialize with sorted keys, so a report is
 *        byte-identical across reruns with the same inputs and seed.
 */
#pragma once

#include "tdlab/analysis.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace tdlab {

using json = nlohmann::json;

inline json to_json(const Scalar& s) { return s.str(); }

inline Scalar scalar_from_json(const json& j) {
    if (j.is_number_integer()) return Scalar(static_cast<long long>(j.get<long long>()));
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    throw field_error("scalar JSON must be a string or integer");
}

inline json to_json(const AlgebraKind& k) { return json::array({k.eps, k.eps_star}); }

inline AlgebraKind kind_from_json(const json& j) {
    AlgebraKind k;
    if (j.is_array() && j.size() == 2) {
        k.eps = j[0].get<int>();
        k.eps_star = j[1].get<int>();
    } else if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "1,1" || s == "(1,1)" || s == "11")
            k = {1, 1};
        else if (s == "1,0" || s == "(1,0)" || s == "10")
            k = {1, 0};
        else if (s == "0,0" || s == "(0,0)" || s == "00")
            k = {0, 0};
        else
            throw field_error("unrecognized kind '" + s + "'");
    } else {
        throw field_error("kind JSON must be [eps, eps*] or a string");
    }
    if (!k.valid()) throw field_error("kind must be one of (1,1), (1,0), (0,0)");
    return k;
}

inline json to_json(const FieldConfig& fc) {
    return json{{"q", rat_str(fc.q)}, {"D", fc.D}, {"i_max", fc.i_max}};
}

inline FieldConfig field_config_from_json(const json& j) {
    FieldConfig fc;
    if (j.contains("q")) {
        const auto& q = j.at("q");
        fc.q = q.is_string() ? parse_scalar(q.get<std::string>()).rat_part() : Rat(q.get<long long>());
    }
    if (j.contains("D")) fc.D = j.at("D").get<long long>();
    if (j.contains("i_max")) fc.i_max = j.at("i_max").get<int>();
    fc.validate();
    return fc;
}

inline json to_json(const ModuleSpec& spec) {
    json factors = json::array();
    for (const auto& f : spec.factors) factors.push_back(json{{"ell", f.ell}, {"a", to_json(f.a)}});
    json j{{"kind", to_json(spec.kind)}, {"factors", factors}};
    if (spec.leading_trivial_ell >= 0) j["leading_trivial_ell"] = spec.leading_trivial_ell;
    return j;
}

inline ModuleSpec module_spec_from_json(const json& j) {
    ModuleSpec spec;
    spec.kind = kind_from_json(j.at("kind"));
    if (j.contains("leading_trivial_ell")) spec.leading_trivial_ell = j.at("leading_trivial_ell").get<int>();
    if (j.contains("factors"))
        for (const auto& f : j.at("factors"))
            spec.factors.push_back({f.at("ell").get<int>(), scalar_from_json(f.at("a"))});
    spec.validate();
    return spec;
}

inline json to_json(const QStringMultiset& ms) {
    json arr = json::array();
    for (const auto& s : ms.strings) arr.push_back(json{{"ell", s.ell}, {"a", to_json(s.a)}});
    return arr;
}

inline QStringMultiset qstring_multiset_from_json(const json& j) {
    QStringMultiset ms;
    for (const auto& e : j) ms.strings.push_back({e.at("ell").get<int>(), scalar_from_json(e.at("a"))});
    return ms;
}

inline json to_json(const ScalarMultiset& om) {
    json arr = json::array();
    for (const auto& [v, m] : om.entries) arr.push_back(json{{"value", to_json(v)}, {"mult", m}});
    return arr;
}

inline ScalarMultiset scalar_multiset_from_json(const json& j) {
    ScalarMultiset om;
    for (const auto& e : j) {
        long mult = e.contains("mult") ? e.at("mult").get<long>() : 1;
        om.add(scalar_from_json(e.at("value")), mult);
    }
    return om;
}

inline json to_json(const Poly& p) {
    json arr = json::array();
    for (const auto& c : p.c) arr.push_back(to_json(c));
    return arr; // coefficients constant-first
}

inline json to_json(const RelationReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json je{{"relation", e.name}, {"zero", e.zero}};
        if (!e.zero) {
            je["nnz"] = e.nnz;
            je["sample"] = e.sample;
        }
        entries.push_back(je);
    }
    return json{{"pass", rep.pass}, {"residuals", entries}};
}

inline json to_json(const WeightData& wd) {
    return json{{"s", to_json(wd.s)}, {"d", wd.d}, {"dims", wd.dims}, {"blocks", wd.blocks}};
}

inline json to_json(const ThetaData& td) {
    json th = json::array(), ths = json::array();
    for (const auto& v : td.theta) th.push_back(to_json(v));
    for (const auto& v : td.theta_star) ths.push_back(to_json(v));
    return json{{"theta", th},
                {"theta_star", ths},
                {"b", to_json(td.b)},
                {"b_star", to_json(td.b_star)},
                {"d", td.d},
                {"theta_distinct", td.theta_distinct},
                {"theta_star_distinct", td.theta_star_distinct}};
}

inline json to_json(const ClassificationReport& cr) {
    json j{{"irreducible_as_T_module", cr.irreducible_as_T_module},
           {"failed_conditions", cr.failed_conditions},
           {"d", cr.d}};
    if (cr.has_t) {
        j["m_sdt_member"] = cr.m_sdt_member;
        j["b"] = to_json(cr.b);
        j["b_star"] = to_json(cr.b_star);
    }
    return j;
}

inline json to_json(const NortonResult& nr) {
    json j{{"irreducible", nr.irreducible},
           {"decided", nr.decided},
           {"method", nr.method},
           {"rounds_used", nr.rounds_used}};
    if (nr.flagged_extension) j["flagged"] = "irreducible over extension";
    if (nr.witness) j["witness_dim"] = nr.witness->dim();
    return j;
}

inline json to_json(const TDPairReport& rep) {
    json j{{"preconditions_met", rep.preconditions_met},
           {"theta", to_json(rep.theta_used)},
           {"shape", rep.shape},
           {"shape_symmetric", rep.shape_symmetric},
           {"shape_bound_ok", rep.shape_bound_ok},
           {"leonard", rep.leonard}};
    if (rep.preconditions_met) {
        j["diagonalizable_A"] = rep.diagonalizable_A;
        j["diagonalizable_Astar"] = rep.diagonalizable_Astar;
        j["eigenspace_dims_match"] = rep.eigenspace_dims_match;
        j["tridiagonal_A_on_Vstar"] = rep.tridiagonal_A_on_Vstar;
        j["tridiagonal_Astar_on_V"] = rep.tridiagonal_Astar_on_V;
        j["filtration_down_match"] = rep.filtration_down_match;
        j["filtration_up_match"] = rep.filtration_up_match;
        j["split_matches_weights"] = rep.split_matches_weights;
        j["split_blocks"] = rep.split_blocks;
        j["E0star_identity"] = rep.E0star_identity;
        j["P_at_t"] = to_json(rep.P_at_t);
        j["Theta_norm"] = to_json(rep.Theta_norm);
        j["irreducible"] = rep.irreducible;
        j["norton"] = to_json(rep.norton);
        j["axioms_hold"] = rep.axioms_hold;
        j["pass"] = rep.pass;
    }
    return j;
}

inline json to_json(const std::vector<RecursionWitness>& wits) {
    json arr = json::array();
    for (const auto& w : wits)
        arr.push_back(json{{"i", w.i},
                           {"c_i", to_json(w.c_i_m)},
                           {"c_star_i", to_json(w.c_star_i_m)},
                           {"lhs", to_json(w.lhs)},
                           {"rhs", to_json(w.rhs)},
                           {"pass", w.pass}});
    return arr;
}

} // namespace tdlab
