#include "rankone/json_io.hpp"

#include <algorithm>

#include "rankone/construction.hpp"
#include "rankone/errors.hpp"

namespace rankone {

LabConfig default_config() {
    LabConfig c;
    c.C = {Rat(3, 2), Rat(5, 2)};
    c.D = {Rat(2), Rat(3)};
    return c;
}

json rat_to_json(const Rat& r) { return r.to_string(); }

Rat rat_from_json(const json& j) {
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
    throw ParseError("expected a rational as \"p/q\" string or integer, got " + j.dump());
}

json to_json(const IntervalSet& s) {
    json arr = json::array();
    for (const auto& iv : s.intervals()) arr.push_back({iv.lo.to_string(), iv.hi.to_string()});
    return arr;
}

IntervalSet interval_set_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("interval set must be an array");
    std::vector<Interval> parts;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw ParseError("interval must be a [lo, hi] pair");
        Interval iv{rat_from_json(e[0]), rat_from_json(e[1])};
        if (!(iv.lo < iv.hi)) throw ParseError("interval with lo >= hi: " + e.dump());
        parts.push_back(std::move(iv));
    }
    return IntervalSet::from_unsorted(std::move(parts));
}

namespace {

std::vector<Rat> rat_list(const json& j, const char* field) {
    if (!j.is_array()) throw ParseError(std::string(field) + " must be an array");
    std::vector<Rat> out;
    for (const auto& e : j) out.push_back(rat_from_json(e));
    return out;
}

json rat_list_json(const std::vector<Rat>& v) {
    json arr = json::array();
    for (const auto& r : v) arr.push_back(r.to_string());
    return arr;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field '") + key + "': " + e.what());
    }
}

Rat rat_or(const json& obj, const char* key, const Rat& fallback) {
    return obj.contains(key) ? rat_from_json(obj.at(key)) : fallback;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ParseError(msg);
}

json policy_json(const GrowthPolicy& p) {
    return {{"floor", p.gauge_floor.to_string()},
            {"base", p.gauge_base.to_string()},
            {"initial_multiplier", p.initial_multiplier.to_string()},
            {"escalation_factor", p.escalation_factor.to_string()},
            {"max_retries", p.max_retries},
            {"entry_offset", p.entry_offset}};
}

GrowthPolicy policy_from(const json& g) {
    require(g.is_object(), "gauge must be an object");
    GrowthPolicy p;
    p.gauge_floor = rat_or(g, "floor", p.gauge_floor);
    p.gauge_base = rat_or(g, "base", p.gauge_base);
    p.initial_multiplier = rat_or(g, "initial_multiplier", p.initial_multiplier);
    p.escalation_factor = rat_or(g, "escalation_factor", p.escalation_factor);
    p.max_retries = get_or<int>(g, "max_retries", p.max_retries);
    p.entry_offset = get_or<int>(g, "entry_offset", p.entry_offset);
    require(p.gauge_floor.sign() > 0, "gauge.floor must be positive");
    require(p.gauge_base >= Rat(1), "gauge.base must be >= 1");
    require(p.initial_multiplier >= Rat(1), "gauge.initial_multiplier must be >= 1");
    require(p.escalation_factor > Rat(1), "gauge.escalation_factor must exceed 1");
    require(p.max_retries >= 0, "gauge.max_retries must be >= 0");
    require(p.entry_offset >= 0, "gauge.entry_offset must be >= 0");
    return p;
}

json perturbation_json(const PerturbationConfig& p) {
    return {{"mode", p.enabled ? "dyadic" : "none"}, {"net_depth", p.net_depth}};
}

PerturbationConfig perturbation_from(const json& j) {
    require(j.is_object(), "perturbation must be an object");
    PerturbationConfig p;
    const std::string mode = get_or<std::string>(j, "mode", "none");
    require(mode == "none" || mode == "dyadic", "perturbation.mode must be 'none' or 'dyadic'");
    p.enabled = mode == "dyadic";
    p.net_depth = get_or<int>(j, "net_depth", 1);
    require(p.net_depth >= 1 && p.net_depth <= 20, "perturbation.net_depth must be in 1..20");
    return p;
}

std::vector<int> positive_ints(const json& obj, const char* key, std::vector<int> fallback) {
    auto v = get_or<std::vector<int>>(obj, key, std::move(fallback));
    for (int x : v) require(x >= 1, std::string("verify.") + key + " entries must be >= 1");
    require(!v.empty(), std::string("verify.") + key + " must be non-empty");
    return v;
}

}  // namespace

LabConfig config_from_json(const json& j) {
    require(j.is_object(), "config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"w1", "h1", "C", "D", "J_max", "gauge", "perturbation", "verify"};
        require(std::find(std::begin(known), std::end(known), it.key()) != std::end(known),
                "unknown config field '" + it.key() + "'");
    }
    LabConfig c = default_config();
    c.w1 = rat_or(j, "w1", c.w1);
    c.h1 = rat_or(j, "h1", c.h1);
    require(c.w1.sign() > 0 && c.h1.sign() > 0, "w1 and h1 must be positive");
    if (j.contains("C")) c.C = rat_list(j.at("C"), "C");
    if (j.contains("D")) c.D = rat_list(j.at("D"), "D");
    if (c.C.empty()) throw EmptyTargets("C must be non-empty");
    TargetSets check(c.C, c.D);  // validates disjointness
    c.j_max = get_or<int>(j, "J_max", c.j_max);
    require(c.j_max >= 2 && c.j_max <= 64, "J_max must be in 2..64");
    if (j.contains("gauge")) c.policy = policy_from(j.at("gauge"));
    if (j.contains("perturbation")) c.perturbation = perturbation_from(j.at("perturbation"));
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        require(v.is_object(), "verify must be an object");
        auto& d = c.verify;
        d.family_stages = positive_ints(v, "family_stages", d.family_stages);
        d.family_splits = positive_ints(v, "family_splits", d.family_splits);
        d.perturbed_stages = positive_ints(v, "perturbed_stages", d.perturbed_stages);
        d.perturbed_splits = positive_ints(v, "perturbed_splits", d.perturbed_splits);
        d.oracle_samples = get_or<long>(v, "oracle_samples", d.oracle_samples);
        d.oracle_triples = get_or<int>(v, "oracle_triples", d.oracle_triples);
        d.density.s_max = get_or<double>(v, "density_s_max", d.density.s_max);
        d.density.step = get_or<double>(v, "density_step", d.density.step);
        require(d.oracle_samples >= 1 && d.oracle_triples >= 0,
                "verify sample counts must be non-negative");
        require(d.density.s_max > 0 && d.density.step > 0, "density grid must be positive");
    }
    return c;
}

json to_json(const LabConfig& c) {
    const auto& v = c.verify;
    return {{"w1", c.w1.to_string()},
            {"h1", c.h1.to_string()},
            {"C", rat_list_json(c.C)},
            {"D", rat_list_json(c.D)},
            {"J_max", c.j_max},
            {"gauge", policy_json(c.policy)},
            {"perturbation", perturbation_json(c.perturbation)},
            {"verify",
             {{"family_stages", v.family_stages},
              {"family_splits", v.family_splits},
              {"perturbed_stages", v.perturbed_stages},
              {"perturbed_splits", v.perturbed_splits},
              {"oracle_samples", v.oracle_samples},
              {"oracle_triples", v.oracle_triples},
              {"density_s_max", v.density.s_max},
              {"density_step", v.density.step}}}};
}

json to_json(const Schedule& s) {
    json stages = json::array();
    for (const auto& st : s.stages) {
        json e = {{"j", st.j}, {"c", st.c.to_string()}, {"h", st.h.to_string()}, {"w", st.w.to_string()},
                  {"has_cut", st.has_cut}};
        if (st.has_cut) {
            e["M"] = st.multiplier.to_string();
            e["delta1"] = st.delta1.to_string();
            e["delta3"] = st.delta3.to_string();
            e["s"] = rat_list_json({st.s.begin(), st.s.end()});
            e["offsets"] = rat_list_json({st.offsets.begin(), st.offsets.end()});
        }
        stages.push_back(std::move(e));
    }
    json esc = json::array();
    for (const auto& e : s.escalations)
        esc.push_back({{"window", e.window},
                       {"d", e.d.to_string()},
                       {"witness", to_json(e.witness)},
                       {"escalated_stage", e.escalated_stage},
                       {"new_multiplier", e.new_multiplier.to_string()}});
    return {{"format", "rankone-schedule/1"},
            {"w1", s.w1.to_string()},
            {"h1", s.h1.to_string()},
            {"C", rat_list_json(s.targets.C())},
            {"D", rat_list_json(s.targets.D())},
            {"gauge", policy_json(s.policy)},
            {"perturbation", perturbation_json(s.perturbation)},
            {"stages", stages},
            {"escalations", esc}};
}

Schedule schedule_from_json(const json& j) {
    try {
        require(j.is_object() && j.value("format", "") == "rankone-schedule/1", "not a rankone-schedule/1 document");
        Schedule s;
        s.w1 = rat_from_json(j.at("w1"));
        s.h1 = rat_from_json(j.at("h1"));
        s.targets = TargetSets(rat_list(j.at("C"), "C"), rat_list(j.at("D"), "D"));
        s.policy = policy_from(j.at("gauge"));
        s.perturbation = perturbation_from(j.at("perturbation"));
        for (const auto& e : j.at("stages")) {
            StageParams st;
            st.j = e.at("j").get<int>();
            st.c = rat_from_json(e.at("c"));
            st.h = rat_from_json(e.at("h"));
            st.w = rat_from_json(e.at("w"));
            st.has_cut = e.at("has_cut").get<bool>();
            if (st.has_cut) {
                st.multiplier = rat_from_json(e.at("M"));
                st.delta1 = rat_from_json(e.at("delta1"));
                st.delta3 = rat_from_json(e.at("delta3"));
                const auto sp = rat_list(e.at("s"), "s");
                const auto of = rat_list(e.at("offsets"), "offsets");
                require(sp.size() == 4 && of.size() == 4, "stage needs four spacers and four offsets");
                std::copy(sp.begin(), sp.end(), st.s.begin());
                std::copy(of.begin(), of.end(), st.offsets.begin());
            }
            s.stages.push_back(std::move(st));
        }
        if (j.contains("escalations")) {
            for (const auto& e : j.at("escalations"))
                s.escalations.push_back({e.at("window").get<int>(), rat_from_json(e.at("d")),
                                         interval_set_from_json(e.at("witness")), e.at("escalated_stage").get<int>(),
                                         rat_from_json(e.at("new_multiplier"))});
        }
        const std::string problem = check_consistency(s);
        if (!problem.empty()) throw ParseError("inconsistent schedule: " + problem);
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed schedule: ") + e.what());
    }
}

json to_json(const SlabSet& s) { return {{"stage", s.stage}, {"levels", to_json(s.levels)}}; }

json to_json(const PiecewiseLinear& p) {
    json pts = json::array();
    for (std::size_t i = 0; i < p.breakpoints().size(); ++i)
        pts.push_back({p.breakpoints()[i].to_string(), p.values()[i].to_string()});
    return {{"breakpoints", pts}};
}

json to_json(const WeakLimitReport& r) {
    json rows = json::array();
    for (const auto& x : r.rows)
        rows.push_back({{"j", x.j},
                        {"h", x.h.to_string()},
                        {"corr_h", x.corr_h.to_string()},
                        {"corr_ch", x.corr_ch.to_string()},
                        {"match_h", x.match_h},
                        {"match_ch", x.match_ch},
                        {"product", x.product.to_string()},
                        {"product_match", x.product_match}});
    json out = {{"c", r.c.to_string()},
                {"A", r.a_name},
                {"B", r.b_name},
                {"overlap", r.overlap.to_string()},
                {"target", r.target.to_string()},
                {"product_target", r.product_target.to_string()},
                {"rows", rows},
                {"pass", r.pass}};
    out["j0"] = r.j0 ? json(*r.j0) : json(nullptr);
    return out;
}

json to_json(const DissipativityCertificate& c, const Schedule& sched) {
    json windows = json::array();
    for (const auto& w : c.windows) {
        json e = {{"j", w.j}, {"lo", w.lo.to_string()}, {"hi", w.hi.to_string()}, {"empty", w.empty}};
        if (!w.empty) {
            e["witness"] = to_json(w.witness);
            const Rat& t = w.witness.intervals().front().lo;
            e["witness_landmark"] = nearest_landmark(t, sched.stage(w.j));
        }
        windows.push_back(std::move(e));
    }
    return {{"d", c.d.to_string()},
            {"entry_stage", c.entry_stage},
            {"threshold", c.threshold.to_string()},
            {"windows", windows},
            {"pass", c.pass}};
}

json to_json(const PerturbedLimitReport& r) {
    json rows = json::array();
    for (const auto& x : r.rows)
        rows.push_back({{"j", x.j},
                        {"delta1", x.delta1.to_string()},
                        {"delta3", x.delta3.to_string()},
                        {"corr_h", x.corr_h.to_string()},
                        {"limit_h", x.limit_h.to_string()},
                        {"e1", x.e1.to_string()},
                        {"corr_ch", x.corr_ch.to_string()},
                        {"limit_ch", x.limit_ch.to_string()},
                        {"e2", x.e2.to_string()},
                        {"tau", x.tau.to_string()},
                        {"within", x.within}});
    return {{"c", r.c.to_string()}, {"a", r.a.to_string()}, {"b", r.b.to_string()}, {"A", r.a_name},
            {"B", r.b_name},        {"rows", rows},           {"pass", r.pass}};
}

json to_json(const SingularityEvidence& e) {
    json entries = json::array();
    for (const auto& x : e.entries) {
        json seq = json::array();
        for (const auto& v : x.sequence) seq.push_back(v.to_string());
        entries.push_back({{"A", x.a_name},
                           {"B", x.b_name},
                           {"constant", x.constant.to_string()},
                           {"stages", x.stages},
                           {"sequence", seq},
                           {"vacuous", x.vacuous},
                           {"consistent", x.consistent}});
    }
    return {{"c", e.c.to_string()},
            {"factor_constant", e.factor_constant.to_string()},
            {"product_constant", e.product_constant.to_string()},
            {"entries", entries},
            {"summary", e.summary}};
}

json to_json(const oracle::Estimate& e) {
    return {{"value", e.value.to_string()}, {"bound", e.bound.to_string()}, {"samples", e.samples}, {"depth", e.depth}};
}

}  // namespace rankone
