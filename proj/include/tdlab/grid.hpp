/**
 * @file grid.hpp
 * @brief Exhaustive desk-scale grid over module specs: enumeration,
 *        per-instance checks (relation suites, Drinfel'd consistency, sigma
 *        identities, criteria-vs-oracle agreement, shape, TD-pair
 *        verification, the sigma recursion), and a deterministic report.
 */
#pragma once

#include "tdlab/json_io.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tdlab {

class cap_error : public std::runtime_error {
public:
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

struct GridConfig {
    FieldConfig field;
    int max_total_diameter = 6;
    int dimension_cap = 64;
    std::vector<Scalar> parameters = {Scalar(2), Scalar(3), Scalar(Rat(1, 2)), Scalar(-1), Scalar(5)};
    std::vector<AlgebraKind> kinds = {{1, 1}, {1, 0}, {0, 0}};
    Scalar s = Scalar(1);
    std::vector<Scalar> t_candidates = {Scalar(3), Scalar(5), Scalar(7), Scalar(11), Scalar(13)};
    uint64_t seed = 0;
    int recursion_diameter_cap = 4;
    // which per-instance checks run
    bool check_relations = true;
    bool check_drinfeld = true;
    bool check_sigma = true;
    bool check_criteria = true;
    bool check_shape = true;
    bool check_tdpair = true;
    bool check_recursion = true;
};

struct InstanceResult {
    std::string id;
    ModuleSpec spec;
    int dim = 0;
    bool irreducible = false;
    bool relations_pass = true;
    bool drinfeld_match = true;
    bool sigma_ok = true;
    bool criteria_match = true;
    bool shape_ok = true;
    bool tdpair_ok = true;   // vacuous when no admissible t exists
    bool tdpair_ran = false;
    std::string t_used;
    bool recursion_ok = true;
    bool recursion_ran = false;
    bool pass = true;
    std::string note;
};

struct GridReport {
    GridConfig config;
    std::vector<InstanceResult> instances;
    int duplicates_skipped = 0;
    int failures = 0;
    std::string first_counterexample;
    double relation_seconds = 0; // spent inside the relation suites
    double total_seconds = 0;
    bool pass = true;
};

namespace detail {

inline std::string instance_id(const ModuleSpec& spec) {
    std::string id = "k" + std::to_string(spec.kind.eps) + std::to_string(spec.kind.eps_star);
    if (spec.leading_trivial_ell >= 0) id += "/V(" + std::to_string(spec.leading_trivial_ell) + ")";
    for (const auto& f : spec.factors) id += "/V(" + std::to_string(f.ell) + "," + f.a.str() + ")";
    return id;
}

/// Canonical key under tensor reordering (sorted (ell, parameter) pairs).
inline std::string canonical_key(const ModuleSpec& spec, const std::vector<int>& param_idx) {
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < spec.factors.size(); ++i) pairs.emplace_back(spec.factors[i].ell, param_idx[i]);
    std::sort(pairs.begin(), pairs.end());
    std::string key = std::to_string(spec.kind.eps) + std::to_string(spec.kind.eps_star) + ":" +
                      std::to_string(spec.leading_trivial_ell);
    for (const auto& [l, p] : pairs) key += ";" + std::to_string(l) + "," + std::to_string(p);
    return key;
}

inline void compositions_of(int m, std::vector<std::vector<int>>& out) {
    if (m == 0) {
        out.push_back({});
        return;
    }
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int first = 1; first <= rest; ++first) {
            cur.push_back(first);
            rec(rest - first);
            cur.pop_back();
        }
    };
    rec(m);
}

} // namespace detail

/// Enumerates specs in lexicographic order over (kind, factor count,
/// ell-composition, parameter indices), skipping duplicates that are tensor
/// reorderings of an earlier instance.
inline std::vector<ModuleSpec> enumerate_grid(const GridConfig& cfg, int* duplicates_skipped = nullptr) {
    std::vector<ModuleSpec> out;
    std::set<std::string> seen;
    int dup = 0;
    for (const auto& kind : cfg.kinds) {
        std::vector<int> leading_values = kind.is_second() ? std::vector<int>() : std::vector<int>{-1};
        if (kind.is_second())
            for (int l0 = 0; l0 <= cfg.max_total_diameter; ++l0) leading_values.push_back(l0);
        for (int leading : leading_values) {
            int base_d = leading > 0 ? leading : 0;
            for (int m = 0; base_d + m <= cfg.max_total_diameter; ++m) {
                if (base_d + m == 0) continue; // skip the fully trivial module
                std::vector<std::vector<int>> comps;
                detail::compositions_of(m, comps);
                // lexicographic: shorter compositions (fewer factors) first
                std::stable_sort(comps.begin(), comps.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); });
                for (const auto& comp : comps) {
                    long long dim = leading >= 0 ? leading + 1 : 1;
                    for (int l : comp) dim *= l + 1;
                    if (dim > cfg.dimension_cap)
                        throw cap_error("grid: instance dimension " + std::to_string(dim) +
                                        " exceeds cap " + std::to_string(cfg.dimension_cap));
                    std::vector<int> idx(comp.size(), 0);
                    while (true) {
                        ModuleSpec spec;
                        spec.kind = kind;
                        spec.leading_trivial_ell = leading;
                        for (size_t i = 0; i < comp.size(); ++i)
                            spec.factors.push_back({comp[i], cfg.parameters[idx[i]]});
                        std::string key = detail::canonical_key(spec, idx);
                        if (seen.insert(key).second)
                            out.push_back(spec);
                        else
                            ++dup;
                        // advance parameter indices
                        int pos = static_cast<int>(idx.size()) - 1;
                        while (pos >= 0 && ++idx[pos] == static_cast<int>(cfg.parameters.size())) {
                            idx[pos] = 0;
                            --pos;
                        }
                        if (pos < 0) break;
                    }
                    if (comp.empty()) break;
                }
            }
        }
    }
    if (duplicates_skipped) *duplicates_skipped = dup;
    return out;
}

inline InstanceResult run_instance(const GridConfig& cfg, const ModuleSpec& spec, double* relation_seconds) {
    using clock = std::chrono::steady_clock;
    const FieldConfig& fc = cfg.field;
    InstanceResult res;
    res.id = detail::instance_id(spec);
    res.spec = spec;
    res.dim = spec.dimension();

    Representation rep = build_module(fc, spec);
    TModule tm = phi_s(rep, cfg.s);

    ClassificationReport cls = classify_module(fc, spec, cfg.s, std::nullopt);
    res.irreducible = cls.irreducible_as_T_module;

    if (cfg.check_relations) {
        auto t0 = clock::now();
        bool ok = verify_loop_relations(rep).pass && verify_t_relations(tm).pass;
        if (!cfg.t_candidates.empty()) ok = ok && verify_a_relations(iota_t(tm, cfg.t_candidates[0])).pass;
        auto t1 = clock::now();
        if (relation_seconds) *relation_seconds += std::chrono::duration<double>(t1 - t0).count();
        res.relations_pass = ok;
        if (!ok) res.note += "relations;";
    }

    if (cfg.check_drinfeld || cfg.check_sigma) {
        SigmaSequence sig = sigma_sequence(tm);
        DrinfeldPolynomial p_def = drinfeld_from_sigma(fc, tm.kind, tm.type_s, sig.sigma);

        if (cfg.check_drinfeld) {
            DrinfeldPolynomial p_cf = drinfeld_closed_form(fc, spec);
            res.drinfeld_match = p_def == p_cf && p_def.is_monic() && p_def.degree() == spec.diameter();
            if (!res.drinfeld_match) res.note += "drinfeld;";
        }

        if (cfg.check_sigma) {
            Scalar s2 = cfg.s * cfg.s;
            Scalar lam = Scalar(spec.kind.eps) * s2.inverse() + Scalar(spec.kind.eps_star) * s2;
            bool ok = sig.sigma[0] == Scalar(1) &&
                      p_def.eval(lam) == q_d_norm(fc, tm.d).inverse() * sig.sigma.back();
            // sigma_d != 0 iff P does not vanish at the special point
            ok = ok && ((sig.sigma.back() != Scalar(0)) == (p_def.eval(lam) != Scalar(0)));
            res.sigma_ok = ok;
            if (!ok) res.note += "sigma;";
        }
    }

    if (cfg.check_criteria) {
        NortonResult nor = norton_irreducible(tm, cfg.seed);
        res.criteria_match = cls.irreducible_as_T_module == nor.irreducible && nor.decided &&
                             !nor.flagged_extension;
        if (!res.criteria_match) res.note += "criteria;";
    }

    if (cfg.check_shape) {
        WeightData wd = weight_decomposition(tm);
        auto binom = binomial_row(wd.d);
        bool ok = wd.s == cfg.s && wd.d == spec.diameter();
        for (int i = 0; i <= wd.d; ++i) ok = ok && wd.dims[i] <= binom[i];
        if (cls.irreducible_as_T_module) {
            for (int i = 0; i <= wd.d; ++i) ok = ok && wd.dims[i] == wd.dims[wd.d - i];
            ok = ok && shape_generating_function(tm) == shape_product_formula(spec);
        }
        res.shape_ok = ok;
        if (!ok) res.note += "shape;";
    }

    if (cfg.check_tdpair && cls.irreducible_as_T_module) {
        // first admissible t: conditions (17), (18) and P_V(t^2 + ee* t^{-2}) != 0
        for (const auto& t : cfg.t_candidates) {
            ClassificationReport with_t = classify_module(fc, spec, cfg.s, t);
            if (!with_t.m_sdt_member) continue;
            res.tdpair_ran = true;
            res.t_used = t.str();
            TDPairReport tdr = td_pair_verify(iota_t(tm, t), cfg.seed);
            res.tdpair_ok = tdr.pass;
            if (!tdr.pass) res.note += "tdpair;";
            break;
        }
    }

    if (cfg.check_recursion && tm.d <= cfg.recursion_diameter_cap) {
        res.recursion_ran = true;
        bool ok = true;
        for (const auto& a : cfg.parameters) {
            for (const auto& w : sigma_recursion_check(tm, a))
                if (!w.pass) ok = false;
        }
        res.recursion_ok = ok;
        if (!ok) res.note += "recursion;";
    }

    res.pass = res.relations_pass && res.drinfeld_match && res.sigma_ok && res.criteria_match &&
               res.shape_ok && res.tdpair_ok && res.recursion_ok;
    return res;
}

/// Runs every instance; instances are independent pure computations, so they
/// may run concurrently. Results are assembled in enumeration order, keeping
/// the report deterministic regardless of thread interleaving.
inline GridReport run_grid(const GridConfig& cfg, unsigned threads = 0) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    GridReport rep;
    rep.config = cfg;
    std::vector<ModuleSpec> specs = enumerate_grid(cfg, &rep.duplicates_skipped);
    rep.instances.resize(specs.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, specs.size() ? static_cast<unsigned>(specs.size()) : 1u);
    std::atomic<size_t> next{0};
    std::vector<double> rel_secs(threads, 0.0);
    auto worker = [&](unsigned tid) {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= specs.size()) break;
            rep.instances[i] = run_instance(cfg, specs[i], &rel_secs[tid]);
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
        for (auto& th : pool) th.join();
    }
    for (double s : rel_secs) rep.relation_seconds += s;

    for (const auto& res : rep.instances) {
        if (!res.pass) {
            ++rep.failures;
            if (rep.first_counterexample.empty()) rep.first_counterexample = res.id + " [" + res.note + "]";
        }
    }
    rep.pass = rep.failures == 0;
    rep.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return rep;
}

inline json to_json(const GridConfig& cfg) {
    json params = json::array(), ts = json::array(), kinds = json::array();
    for (const auto& p : cfg.parameters) params.push_back(p.str());
    for (const auto& t : cfg.t_candidates) ts.push_back(t.str());
    for (const auto& k : cfg.kinds) kinds.push_back(to_json(k));
    return json{{"field", to_json(cfg.field)},
                {"max_total_diameter", cfg.max_total_diameter},
                {"dimension_cap", cfg.dimension_cap},
                {"parameters", params},
                {"kinds", kinds},
                {"s", cfg.s.str()},
                {"t_candidates", ts},
                {"seed", cfg.seed},
                {"recursion_diameter_cap", cfg.recursion_diameter_cap}};
}

inline GridConfig grid_config_from_json(const json& j) {
    GridConfig cfg;
    if (j.contains("field")) cfg.field = field_config_from_json(j.at("field"));
    if (j.contains("max_total_diameter")) cfg.max_total_diameter = j.at("max_total_diameter").get<int>();
    if (j.contains("dimension_cap")) cfg.dimension_cap = j.at("dimension_cap").get<int>();
    if (j.contains("parameters")) {
        cfg.parameters.clear();
        for (const auto& p : j.at("parameters")) cfg.parameters.push_back(scalar_from_json(p));
    }
    if (j.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : j.at("kinds")) cfg.kinds.push_back(kind_from_json(k));
    }
    if (j.contains("s")) cfg.s = scalar_from_json(j.at("s"));
    if (j.contains("t_candidates")) {
        cfg.t_candidates.clear();
        for (const auto& t : j.at("t_candidates")) cfg.t_candidates.push_back(scalar_from_json(t));
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("recursion_diameter_cap"))
        cfg.recursion_diameter_cap = j.at("recursion_diameter_cap").get<int>();
    return cfg;
}

inline json to_json(const InstanceResult& r) {
    json j{{"id", r.id},
           {"dim", r.dim},
           {"irreducible", r.irreducible},
           {"pass", r.pass}};
    if (!r.pass) j["failed"] = r.note;
    if (r.tdpair_ran) j["t"] = r.t_used;
    return j;
}

inline json to_json(const GridReport& rep, bool with_instances = true) {
    json j{{"config", to_json(rep.config)},
           {"instances_run", static_cast<int>(rep.instances.size())},
           {"duplicates_skipped", rep.duplicates_skipped},
           {"failures", rep.failures},
           {"pass", rep.pass}};
    if (!rep.first_counterexample.empty()) j["first_counterexample"] = rep.first_counterexample;
    if (with_instances) {
        json arr = json::array();
        for (const auto& r : rep.instances) arr.push_back(to_json(r));
        j["instances"] = arr;
    }
    return j;
}

} // namespace tdlab
