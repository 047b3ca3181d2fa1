#include "rankone/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "rankone/construction.hpp"
#include "rankone/errors.hpp"
#include "rankone/json_io.hpp"
#include "rankone/sampling.hpp"

namespace fs = std::filesystem;

namespace rankone::cli {
namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string schedule_path;
    int jobs = 1;
    std::uint64_t seed = 1;

    // build
    std::string collision_d;
    int collision_stage = 0;

    // verify
    std::string which = "all";
    std::string c;
    std::string d;

    // profile
    std::string lo;
    std::string hi;
    int samples = 1001;

    // density
    std::optional<double> s_max;
    std::optional<double> step;

    // oracle
    std::optional<long> oracle_n;
    std::optional<int> triples;
    std::string t_max;
    std::optional<int> membership;
};

class UsageError : public Error {
public:
    using Error::Error;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

LabConfig load_config(const Options& o) {
    if (o.config_path.empty()) return default_config();
    return config_from_json(read_json(o.config_path));
}

Schedule load_schedule(const Options& o) {
    const std::string path = o.schedule_path.empty() ? (fs::path(o.out_dir) / "schedule.json").string() : o.schedule_path;
    if (!fs::exists(path)) throw UsageError("schedule file '" + path + "' not found; run `build` first");
    return schedule_from_json(read_json(path));
}

std::string fixed(double v, int digits = 12) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

int cmd_build(const Options& o, std::ostream& out) {
    const LabConfig cfg = load_config(o);
    const TargetSets targets(cfg.C, cfg.D);
    Schedule s = build_schedule(cfg.w1, cfg.h1, targets, cfg.j_max, cfg.policy, cfg.perturbation);
    std::ostringstream log;
    log << "stages: " << s.j_max() << "\n";
    if (s.last_certified_window() < 1)
        log << "no certified windows (certifying window j needs stage j+2)\n";
    else
        log << "certified windows: 1.." << s.last_certified_window() << "\n";
    log << "escalations: " << s.escalations.size() << "\n";
    for (const auto& e : s.escalations)
        log << "  window " << e.window << " d=" << e.d << " -> M_" << e.escalated_stage << " = " << e.new_multiplier
            << " (witness " << e.witness << ")\n";
    log << "multipliers:";
    for (const auto& st : s.stages)
        if (st.has_cut) log << " M_" << st.j << "=" << st.multiplier;
    log << "\n";
    if (!o.collision_d.empty()) {
        const Rat d = Rat::parse(o.collision_d);
        if (!s.targets.in_D(d)) throw UsageError("--collision-d must be an element of D");
        if (o.collision_stage < 1 || o.collision_stage >= s.j_max())
            throw UsageError("--collision-stage must be a cut stage");
        s = make_collision_schedule(s, d, o.collision_stage);
        log << "negative control: s_" << o.collision_stage << "(4) := " << s.stage(o.collision_stage).s[3]
            << " so that h + s(4) = " << d << " (h + s(2))\n";
    }
    fs::create_directories(o.out_dir);
    write_json(fs::path(o.out_dir) / "schedule.json", to_json(s));
    write_text(fs::path(o.out_dir) / "build_log.txt", log.str());
    out << log.str();
    return kPass;
}

std::vector<Rat> select(const std::vector<Rat>& all, const std::string& flag, const char* name) {
    if (flag.empty()) return all;
    const Rat v = Rat::parse(flag);
    if (std::find(all.begin(), all.end(), v) == all.end())
        throw UsageError(std::string("--") + name + " " + flag + " is not an element of " + (name[0] == 'c' ? "C" : "D"));
    return {v};
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

bool verify_singular(const Options& o, const LabConfig& cfg, const Schedule& s, json& report, std::ostream& text) {
    const auto family = slab_family(s, cfg.verify.family_stages, cfg.verify.family_splits);
    const auto pairs = all_pairs(family);
    bool all_pass = true;
    json section = json::array();
    for (const Rat& c : select(s.targets.C(), o.c, "c")) {
        std::vector<json> rows(pairs.size());
        std::vector<char> ok(pairs.size(), 0);
        parallel_for(pairs.size(), o.jobs, [&](std::size_t i) {
            try {
                const auto r = check_weak_limit(pairs[i].a, pairs[i].b, c, s);
                rows[i] = to_json(r);
                ok[i] = r.pass;
            } catch (const NoMatchingStages& e) {
                rows[i] = {{"A", pairs[i].a.name}, {"B", pairs[i].b.name}, {"pass", false}, {"error", e.what()}};
            }
        });
        const long passed = std::count(ok.begin(), ok.end(), 1);
        const bool pass = passed == static_cast<long>(pairs.size());
        json entry = {{"c", c.to_string()}, {"pairs", rows}, {"pass", pass}};
        text << "singular c=" << c << ": " << passed << "/" << pairs.size() << " pairs exact  " << verdict(pass) << "\n";
        if (pass) {
            const auto ev = singularity_evidence(c, s, pairs);
            entry["evidence"] = to_json(ev);
            text << "  " << ev.summary << "\n";
        }
        section.push_back(std::move(entry));
        all_pass = all_pass && pass;
    }
    report["singular"] = section;
    return all_pass;
}

bool verify_dissipative(const Options& o, const Schedule& s, json& report, std::ostream& text) {
    bool all_pass = true;
    json section = json::array();
    for (const Rat& d : select(s.targets.D(), o.d, "d")) {
        const auto cert = check_dissipativity(d, s);
        section.push_back(to_json(cert, s));
        text << "dissipative d=" << d << " (N(d) = h_" << cert.entry_stage << "): " << cert.windows.size()
             << " windows  " << verdict(cert.pass) << "\n";
        for (const auto& w : cert.windows) {
            if (w.empty) continue;
            text << "  window " << w.j << " [" << w.lo << ", " << w.hi << "): witness " << w.witness << " near "
                 << nearest_landmark(w.witness.intervals().front().lo, s.stage(w.j)) << "\n";
        }
        all_pass = all_pass && cert.pass;
    }
    report["dissipative"] = section;
    return all_pass;
}

bool verify_perturbed(const Options& o, const LabConfig& cfg, const Schedule& s, json& report, std::ostream& text) {
    if (!s.perturbation.enabled) {
        report["perturbed"] = {{"skipped", "schedule was built without perturbations"}};
        text << "perturbed: skipped (schedule was built without perturbations)\n";
        return true;
    }
    const auto family = slab_family(s, cfg.verify.perturbed_stages, cfg.verify.perturbed_splits);
    const auto pairs = all_pairs(family);
    const long side = 1L << s.perturbation.net_depth;
    bool all_pass = true;
    json section = json::array();
    for (const Rat& c : select(s.targets.C(), o.c, "c")) {
        struct Job {
            Rat a, b;
            std::size_t pair;
        };
        std::vector<Job> jobs;
        for (long i = 0; i <= side; ++i)
            for (long k = 0; k <= side; ++k)
                for (std::size_t p = 0; p < pairs.size(); ++p) jobs.push_back({Rat(i, side), Rat(k, side), p});
        std::vector<json> rows(jobs.size());
        std::vector<int> state(jobs.size(), 0);  // 1 pass, 0 fail, -1 too few stages
        parallel_for(jobs.size(), o.jobs, [&](std::size_t i) {
            const auto& jb = jobs[i];
            try {
                const auto r = check_perturbed_limit(c, jb.a, jb.b, pairs[jb.pair].a, pairs[jb.pair].b, s);
                rows[i] = to_json(r);
                state[i] = r.rows.size() < 2 ? -1 : (r.pass ? 1 : 0);
            } catch (const NoMatchingStages&) {
                rows[i] = {{"a", jb.a.to_string()}, {"b", jb.b.to_string()}, {"A", pairs[jb.pair].a.name},
                           {"B", pairs[jb.pair].b.name}, {"rows", json::array()}, {"pass", false}};
                state[i] = -1;
            }
        });
        const long passed = std::count(state.begin(), state.end(), 1);
        const long failed = std::count(state.begin(), state.end(), 0);
        const long sparse = std::count(state.begin(), state.end(), -1);
        const bool pass = failed == 0 && passed > 0;
        text << "perturbed c=" << c << ": " << passed << " passed, " << failed << " failed, " << sparse
             << " with fewer than two matching stages  " << verdict(pass) << "\n";
        section.push_back({{"c", c.to_string()},
                           {"checks", rows},
                           {"passed", passed},
                           {"failed", failed},
                           {"insufficient_stages", sparse},
                           {"pass", pass}});
        all_pass = all_pass && pass;
    }
    report["perturbed"] = section;
    return all_pass;
}

int cmd_verify(const Options& o, std::ostream& out) {
    static const char* kinds[] = {"singular", "dissipative", "perturbed", "all"};
    if (std::find(std::begin(kinds), std::end(kinds), o.which) == std::end(kinds))
        throw UsageError("--which must be singular|dissipative|perturbed|all");
    const LabConfig cfg = load_config(o);
    const Schedule s = load_schedule(o);
    const bool all = o.which == "all";
    if (!o.c.empty()) select(s.targets.C(), o.c, "c");
    if (!o.d.empty()) select(s.targets.D(), o.d, "d");
    json report = {{"which", o.which}};
    std::ostringstream text;
    bool pass = true;
    if (all || o.which == "singular") pass = verify_singular(o, cfg, s, report, text) && pass;
    if (all || o.which == "dissipative") pass = verify_dissipative(o, s, report, text) && pass;
    if (all || o.which == "perturbed") pass = verify_perturbed(o, cfg, s, report, text) && pass;
    report["pass"] = pass;
    text << "overall: " << verdict(pass) << "\n";
    fs::create_directories(o.out_dir);
    write_json(fs::path(o.out_dir) / ("verify_" + o.which + ".json"), report);
    write_text(fs::path(o.out_dir) / ("verify_" + o.which + ".txt"), text.str());
    out << text.str();
    return pass ? kPass : kCertificateFail;
}

int cmd_profile(const Options& o, std::ostream& out) {
    const Schedule s = load_schedule(o);
    const SlabSet y = base_tower(s);
    const Rat lo = o.lo.empty() ? Rat(0) : Rat::parse(o.lo);
    const Rat hi = o.hi.empty() ? s.height(std::min(2, s.j_max())) : Rat::parse(o.hi);
    if (lo.sign() < 0 || !(lo < hi)) throw UsageError("profile needs 0 <= lo < hi");
    if (o.samples < 2) throw UsageError("--samples must be at least 2");
    const PiecewiseLinear p = correlation_profile(y, y, lo, hi, s);
    std::ostringstream csv;
    csv << "t,value,t_exact,value_exact\n";
    for (int i = 0; i < o.samples; ++i) {
        const Rat t = lo + (hi - lo) * Rat(i, o.samples - 1);
        const Rat v = p(t);
        csv << fixed(t.to_double()) << "," << fixed(v.to_double()) << "," << t << "," << v << "\n";
    }
    const IntervalSet hits = hitting_set(y, y, lo, hi, s);
    json annotated = json::array();
    for (const auto& iv : hits.intervals()) {
        int j = 1;
        while (j + 1 < s.j_max() && s.height(j + 1) <= iv.lo) ++j;
        const std::string near = s.stage(j).has_cut && s.height(j) <= iv.lo ? nearest_landmark(iv.lo, s.stage(j)) : "none";
        annotated.push_back({{"lo", iv.lo.to_string()}, {"hi", iv.hi.to_string()}, {"window", j}, {"near", near}});
    }
    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "profile.csv", csv.str());
    write_json(fs::path(o.out_dir) / "profile.json",
               {{"lo", lo.to_string()}, {"hi", hi.to_string()}, {"profile", to_json(p)}, {"hitting_set", annotated}});
    out << "profile of mu(T_t Y ∩ Y) on [" << lo << ", " << hi << "]: " << p.breakpoints().size() << " breakpoints, "
        << hits.size() << " positivity intervals; value at t=" << lo << " is " << p(lo) << "\n";
    return kPass;
}

int cmd_density(const Options& o, std::ostream& out) {
    const LabConfig cfg = load_config(o);
    const Schedule s = load_schedule(o);
    const Rat d = o.d.empty() ? s.targets.D().front() : select(s.targets.D(), o.d, "d").front();
    DensityGrid grid = cfg.verify.density;
    if (o.s_max) grid.s_max = *o.s_max;
    if (o.step) grid.step = *o.step;
    if (!(grid.s_max > 0 && grid.step > 0)) throw UsageError("density grid must be positive");
    const auto r = spectral_density(d, s, grid);
    double min_density = r.density.front();
    double asym = 0.0;
    std::ostringstream csv;
    csv << "s,density\n" << std::scientific << std::setprecision(12);
    for (std::size_t i = 0; i < r.s.size(); ++i) {
        min_density = std::min(min_density, r.density[i]);
        asym = std::max(asym, std::abs(density_at(r.pieces, -r.s[i]) - r.density[i]));
        csv << r.s[i] << "," << r.density[i] << "\n";
    }
    const double mass_error = std::abs(r.mass - r.phi0) / r.phi0;
    const bool nonneg = min_density >= -1e-6;
    const bool symmetric = asym <= 1e-12;
    const bool mass_ok = mass_error <= 0.01;
    const bool pass = nonneg && symmetric && mass_ok;
    json pieces = json::array();
    for (const auto& pc : r.pieces)
        pieces.push_back({{"start", pc.start.to_string()},
                          {"length", pc.length.to_string()},
                          {"c0", pc.c0.to_string()},
                          {"c1", pc.c1.to_string()},
                          {"c2", pc.c2.to_string()}});
    json summary = {{"d", d.to_string()},
                    {"support_end", r.support_end.to_string()},
                    {"phi_pieces", pieces},
                    {"s_max", grid.s_max},
                    {"step", grid.step},
                    {"phi0", fixed(r.phi0)},
                    {"mass", fixed(r.mass)},
                    {"mass_relative_error", fixed(mass_error)},
                    {"min_density", fixed(min_density, 15)},
                    {"max_asymmetry", fixed(asym, 15)},
                    {"nonnegative", nonneg},
                    {"symmetric", symmetric},
                    {"mass_within_1pct", mass_ok},
                    {"pass", pass}};
    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "density.csv", csv.str());
    write_json(fs::path(o.out_dir) / "density.json", summary);
    out << "density d=" << d << ": " << r.s.size() << " grid points, phi(0)=" << fixed(r.phi0, 6)
        << ", mass=" << fixed(r.mass, 6) << ", min=" << min_density << "  " << verdict(pass) << "\n";
    return pass ? kPass : kCertificateFail;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const LabConfig cfg = load_config(o);
    const Schedule s = load_schedule(o);
    const auto family = slab_family(s, cfg.verify.family_stages, cfg.verify.family_splits);
    const long n = o.oracle_n.value_or(cfg.verify.oracle_samples);
    const int count = o.triples.value_or(cfg.verify.oracle_triples);
    const int members = o.membership.value_or(static_cast<int>(cfg.verify.oracle_samples));
    if (n < 1 || count < 0 || members < 0) throw UsageError("oracle sample counts must be non-negative");
    const Rat t_max = o.t_max.empty() ? s.height(std::min(3, s.j_max())) : Rat::parse(o.t_max);
    if (t_max.sign() <= 0) throw UsageError("--t-max must be positive");

    Rng rng(o.seed);
    const auto triples = random_triples(rng, family, count, t_max, s);
    struct Row {
        Rat exact;
        oracle::Estimate est;
    };
    std::vector<Row> rows(triples.size());
    parallel_for(triples.size(), o.jobs, [&](std::size_t i) {
        const auto& tr = triples[i];
        rows[i].exact = correlation(family[tr.a].set, family[tr.b].set, tr.t, s);
        rows[i].est = oracle::oracle_correlation(family[tr.a].set, family[tr.b].set, tr.t, n, s);
    });

    std::ostringstream csv;
    csv << "A,B,t,exact,estimate,bound,abs_error,within\n";
    long within = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& tr = triples[i];
        const Rat err = abs(rows[i].est.value - rows[i].exact);
        const bool ok = err <= rows[i].est.bound;
        within += ok;
        csv << family[tr.a].name << "," << family[tr.b].name << "," << tr.t << "," << fixed(rows[i].exact.to_double())
            << "," << fixed(rows[i].est.value.to_double()) << "," << fixed(rows[i].est.bound.to_double()) << ","
            << fixed(err.to_double()) << "," << (ok ? 1 : 0) << "\n";
    }

    struct Probe {
        oracle::PointState p;
        Rat t;
        std::size_t b;
    };
    std::vector<Probe> probes;
    std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
    for (int i = 0; i < members; ++i) {
        auto p = random_point(rng, s);
        auto t = random_rational(rng, Rat(0), t_max);
        probes.push_back({std::move(p), std::move(t), pick(rng)});
    }
    std::vector<char> agree(probes.size(), 0);
    parallel_for(probes.size(), o.jobs, [&](std::size_t i) {
        agree[i] = membership_check(probes[i].p, probes[i].t, family[probes[i].b].set, s).agree;
    });
    const long agreed = std::count(agree.begin(), agree.end(), 1);
    const bool pass = within == static_cast<long>(rows.size()) && agreed == static_cast<long>(probes.size());

    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "oracle.csv", csv.str());
    write_json(fs::path(o.out_dir) / "oracle.json", {{"samples_per_estimate", n},
                                                      {"seed", o.seed},
                                                      {"t_max", t_max.to_string()},
                                                      {"triples", rows.size()},
                                                      {"within_bound", within},
                                                      {"membership_checks", probes.size()},
                                                      {"membership_agree", agreed},
                                                      {"pass", pass}});
    out << "oracle: " << within << "/" << rows.size() << " estimates within bound, " << agreed << "/" << probes.size()
        << " membership checks agree  " << verdict(pass) << "\n";
    return pass ? kPass : kCertificateFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact finite-prefix laboratory for a rank-one flow built by cutting and stacking"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config (defaults apply when omitted)");
        sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
        sub->add_option("--seed", o.seed, "Seed for randomized checks")->capture_default_str();
    };
    auto* build = app.add_subcommand("build", "Build and certify a schedule, write schedule.json");
    common(build);
    build->add_option("--collision-d", o.collision_d, "Write a negative-control schedule colliding for this d");
    build->add_option("--collision-stage", o.collision_stage, "Stage whose s(4) is overridden")->default_val(3);

    auto* verify = app.add_subcommand("verify", "Run certificates on a schedule");
    common(verify);
    verify->add_option("--schedule", o.schedule_path, "Schedule file (default <out>/schedule.json)");
    verify->add_option("--which", o.which, "singular|dissipative|perturbed|all")->capture_default_str();
    verify->add_option("--c", o.c, "Restrict to one c in C");
    verify->add_option("--d", o.d, "Restrict to one d in D");

    auto* profile = app.add_subcommand("profile", "Correlation profile of the base tower as CSV");
    common(profile);
    profile->add_option("--schedule", o.schedule_path, "Schedule file (default <out>/schedule.json)");
    profile->add_option("--lo", o.lo, "Window start (default 0)");
    profile->add_option("--hi", o.hi, "Window end (default h_2)");
    profile->add_option("--samples", o.samples, "Sample count")->capture_default_str();

    auto* density = app.add_subcommand("density", "Spectral density of the product correlation as CSV");
    common(density);
    density->add_option("--schedule", o.schedule_path, "Schedule file (default <out>/schedule.json)");
    density->add_option("--d", o.d, "Element of D (default first)");
    density->add_option("--s-max", o.s_max, "Grid end");
    density->add_option("--step", o.step, "Grid step");

    auto* orc = app.add_subcommand("oracle", "Cross-check the exact engine against point simulation");
    common(orc);
    orc->add_option("--schedule", o.schedule_path, "Schedule file (default <out>/schedule.json)");
    orc->add_option("--n", o.oracle_n, "Grid points per estimate");
    orc->add_option("--triples", o.triples, "Random (A, B, t) triples");
    orc->add_option("--membership", o.membership, "Random membership checks");
    orc->add_option("--t-max", o.t_max, "Upper end of random t (default h_3)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (build->parsed()) return cmd_build(o, out);
        if (verify->parsed()) return cmd_verify(o, out);
        if (profile->parsed()) return cmd_profile(o, out);
        if (density->parsed()) return cmd_density(o, out);
        return cmd_oracle(o, out);
    } catch (const EscalationExhausted& e) {
        err << "error: " << e.what() << "\nwitness: " << e.witness() << "\n";
        return kUsage;
    } catch (const HorizonExceeded& e) {
        err << "horizon exceeded: " << e.what() << "\n";
        return kHorizon;
    } catch (const UncertifiedWindow& e) {
        err << "horizon exceeded: " << e.what() << "\n";
        return kHorizon;
    } catch (const NotDissipative& e) {
        err << "certificate failed: " << e.what() << "\n";
        return kCertificateFail;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace rankone::cli
