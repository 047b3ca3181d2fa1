// Acceptance run on the desk configuration: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "rankone/construction.hpp"
#include "rankone/oracle.hpp"
#include "rankone/sampling.hpp"
#include "rankone/verify.hpp"
#include "test_support.hpp"

using namespace rankone;
using rankone::testing::random_set;
using rankone::testing::random_slab;

namespace {

// Pinned tolerances.
const Rat kExact(0);                      // criteria 1-4, 7: exact equality
constexpr long kRandomTimesPerWindow = 1000;
constexpr long kDirectCrossChecks = 20;   // per window, through the refine/translate route
constexpr int kOracleTriples = 50;
constexpr long kOracleSamples = 10000;
constexpr int kMembershipChecks = 10000;
constexpr int kPropertyCases = 100;
constexpr double kDensityFloor = -1e-6;
constexpr double kDensitySymmetry = 1e-12;
constexpr double kMassTolerance = 0.01;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << o.detail << " ("
              << std::fixed << std::setprecision(1) << secs << "s)" << std::endl;
}

Schedule desk() {
    return build_schedule(Rat(1), Rat(1), TargetSets({Rat(3, 2), Rat(5, 2)}, {Rat(2), Rat(3)}), 8, GrowthPolicy{});
}

}  // namespace

int main() {
    const Schedule s = desk();
    const SlabSet y = base_tower(s);
    const auto family = slab_family(s, {1, 2}, {1, 2, 4});
    const auto pairs = all_pairs(family);
    std::cout << "desk schedule: J_max=" << s.j_max() << ", h_2=" << s.height(2) << ", escalations="
              << s.escalations.size() << ", family " << family.size() << " slabs / " << pairs.size() << " pairs"
              << std::endl;

    std::map<std::string, WeakLimitReport> weak;
    report(1, "Weak-limit exactness", [&] {
        long rows = 0, pass = 0;
        int j0 = 0;
        for (const Rat& c : s.targets.C())
            for (const auto& p : pairs) {
                auto r = check_weak_limit(p.a, p.b, c, s);
                pass += r.pass;
                j0 = std::max(j0, r.j0.value_or(99));
                for (const auto& row : r.rows) rows += row.j >= r.j0.value_or(99);
                weak.emplace(c.to_string() + "|" + p.a.name + "|" + p.b.name, std::move(r));
            }
        const long total = static_cast<long>(pairs.size() * s.targets.C().size());
        std::ostringstream d;
        d << pass << "/" << total << " (c, A, B) exact at h_j and c h_j, " << rows << " stage rows, j0 <= " << j0
          << ", tolerance " << kExact;
        return Outcome{pass == total, d.str()};
    });

    report(2, "Product constant 1/16", [&] {
        long rows = 0, ok = 0;
        for (const auto& [key, r] : weak) {
            if (!r.j0) continue;
            for (const auto& row : r.rows) {
                if (row.j < *r.j0) continue;
                ++rows;
                ok += row.product == r.overlap * r.overlap / Rat(16) && row.product_match;
            }
        }
        const NamedSlab yy{"Y", y};
        const auto ev = singularity_evidence(Rat(3, 2), s, {{yy, yy}});
        const bool y_ok = ev.entries.at(0).constant == Rat(1, 16) && ev.product_constant == Rat(1, 16);
        std::ostringstream d;
        d << ok << "/" << rows << " products equal mu(A∩B)^2/16; Y x Y constant " << ev.entries.at(0).constant
          << "; per-factor constant 1/4 so the product limit is (I⊗I)/16, not the (I⊗I)/4 of the single-operator statement";
        return Outcome{rows > 0 && ok == rows && y_ok, d.str()};
    });

    report(3, "Dissipativity d=2,3", [&] {
        Rng rng(kSeed);
        std::map<int, IntervalSet> hits;
        long windows = 0, samples = 0, positive = 0, violations = 0, direct = 0, direct_mismatch = 0;
        bool certs = true;
        std::ostringstream d;
        for (const Rat& dd : s.targets.D()) {
            const auto cert = check_dissipativity(dd, s);
            certs = certs && cert.pass;
            d << "d=" << dd << " " << cert.windows.size() << " windows " << (cert.pass ? "empty" : "NONEMPTY") << "; ";
            for (const auto& w : cert.windows) {
                ++windows;
                auto it = hits.find(w.j);
                if (it == hits.end()) it = hits.emplace(w.j, hitting_set(y, y, s.height(w.j), s.height(w.j + 1), s)).first;
                const auto& hs = it->second.intervals();
                std::uniform_int_distribution<std::size_t> pick(0, hs.empty() ? 0 : hs.size() - 1);
                for (long i = 0; i < kRandomTimesPerWindow; ++i) {
                    // half uniform on the window, half inside the support of rho
                    Rat t = (i % 2 == 0 || hs.empty()) ? random_rational(rng, w.lo, w.hi, 1024) : [&] {
                        const auto& iv = hs[pick(rng)];
                        return random_rational(rng, max(iv.lo, w.lo), max(iv.hi, w.lo + Rat(1, 1024)), 1024);
                    }();
                    if (t < w.lo) t = w.lo;
                    ++samples;
                    const Rat a = correlation(y, y, t, s);
                    const Rat b = correlation(y, y, dd * t, s);
                    positive += a.sign() > 0;
                    violations += min(a, b) != kExact;
                    if (i < kDirectCrossChecks) {
                        ++direct;
                        direct_mismatch += a != correlation_direct(y, y, t, s) || b != correlation_direct(y, y, dd * t, s);
                    }
                }
            }
        }
        d << samples << " random t over " << windows << " windows (" << positive << " with rho(t)>0): " << violations
          << " with min(rho(t), rho(dt)) != 0; " << direct << " direct-route cross-checks, " << direct_mismatch
          << " mismatches";
        return Outcome{certs && violations == 0 && direct_mismatch == 0 && positive > 0, d.str()};
    });

    report(4, "Negative control", [&] {
        std::ostringstream d;
        bool ok = true;
        for (const Rat& dd : s.targets.D()) {
            const Schedule broken = make_collision_schedule(s, dd, 3);
            const auto cert = check_dissipativity(dd, broken);
            const WindowVerdict* bad = nullptr;
            for (const auto& w : cert.windows)
                if (!w.empty && !bad) bad = &w;
            bool genuine = false;
            if (bad) {
                const auto& iv = bad->witness.intervals().front();
                const Rat t = (iv.lo + iv.hi) / Rat(2);
                const SlabSet yb = base_tower(broken);
                genuine = correlation(yb, yb, t, broken).sign() > 0 && correlation(yb, yb, dd * t, broken).sign() > 0;
                d << "d=" << dd << ": window " << bad->j << " witness " << bad->witness.size() << " interval(s) from "
                  << iv.lo << " (near " << nearest_landmark(iv.lo, broken.stage(bad->j)) << ")"
                  << (genuine ? " confirmed; " : " NOT confirmed; ");
            } else {
                d << "d=" << dd << ": no witness; ";
            }
            ok = ok && !cert.pass && bad && genuine;
        }
        d << "schedules use s_3(4) = d s_3(2) + (d-1) h_3";
        return Outcome{ok, d.str()};
    });

    report(5, "Perturbed weak limits", [&] {
        const Schedule p = build_schedule(Rat(1), Rat(1), s.targets, 36, GrowthPolicy{}, PerturbationConfig{true, 1});
        const auto fam = slab_family(p, {1}, {1, 2});
        const auto pp = all_pairs(fam);
        long checks = 0, pass = 0;
        Rat worst(0);
        for (long a = 0; a <= 2; ++a)
            for (long b = 0; b <= 2; ++b)
                for (const auto& pr : pp) {
                    const auto r = check_perturbed_limit(Rat(3, 2), Rat(a, 2), Rat(b, 2), pr.a, pr.b, p);
                    ++checks;
                    pass += r.pass;
                    for (std::size_t i = r.rows.size() >= 2 ? r.rows.size() - 2 : 0; i < r.rows.size(); ++i)
                        worst = max(worst, max(r.rows[i].e1, r.rows[i].e2) / r.rows[i].tau);
                }
        std::ostringstream d;
        d << pass << "/" << checks << " (a, b, A, B) with a, b in {0, 1/2, 1}, c=3/2, J_max=36; worst e/tau on the final two stages "
          << std::setprecision(3) << worst.to_double();
        return Outcome{pass == checks, d.str()};
    });

    report(6, "Oracle equivalence", [&] {
        Rng rng(kSeed + 6);
        const auto triples = random_triples(rng, family, kOracleTriples, s.height(3), s);
        long within = 0;
        double worst = 0.0;
        for (const auto& tr : triples) {
            const auto e = oracle::oracle_correlation(family[tr.a].set, family[tr.b].set, tr.t, kOracleSamples, s);
            const Rat err = abs(e.value - correlation(family[tr.a].set, family[tr.b].set, tr.t, s));
            within += err <= e.bound;
            if (e.bound.sign() > 0) worst = std::max(worst, (err / e.bound).to_double());
        }
        std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
        long agree = 0;
        for (int i = 0; i < kMembershipChecks; ++i) {
            const auto p = random_point(rng, s);
            const Rat t = random_rational(rng, Rat(0), s.height(3));
            agree += membership_check(p, t, family[pick(rng)].set, s).agree;
        }
        std::ostringstream d;
        d << within << "/" << kOracleTriples << " estimates (n=" << kOracleSamples << ") within the grid bound, worst err/bound "
          << std::setprecision(3) << worst << "; " << agree << "/" << kMembershipChecks << " membership checks agree";
        return Outcome{within == kOracleTriples && agree == kMembershipChecks, d.str()};
    });

    report(7, "Structural invariants", [&] {
        std::mt19937_64 rng(kSeed + 7);
        Rng rr(kSeed + 70);
        std::map<std::string, long> bad;
        for (int i = 0; i < kPropertyCases; ++i) {
            const int k = 1 + static_cast<int>(rng() % 2);
            const SlabSet a = random_slab(rng, k, s);
            const SlabSet b = random_slab(rng, 1 + static_cast<int>(rng() % 2), s);
            const int j = k + static_cast<int>(rng() % 3);
            bad["refine measure"] += refine(a, j, s).measure(s) != a.measure(s);
            const Rat t = random_rational(rr, Rat(0), s.height(3), 64);
            bad["translate measure"] += translate_exact(a, t, s).measure(s) != a.measure(s);
            bad["symmetry"] += correlation(a, b, t, s) != correlation(b, a, -t, s);
            const auto u = random_set(rng, 0, 20, 8), v = random_set(rng, 0, 20, 8);
            bad["measure additivity"] += set_union(u, v).total_length() + intersect(u, v).total_length() !=
                                         u.total_length() + v.total_length();
            Rat sum(0);
            bool each = true;
            for (int col = 1; col <= 4; ++col) {
                const Rat m = column_trace(a, j, col, s).total_length() * s.width(j + 1);
                each = each && m == a.measure(s) / Rat(4);
                sum += m;
            }
            bad["column trace"] += !each || sum != a.measure(s);
        }
        for (int w = 1; w <= 3; ++w) {
            const SlabSet a = random_slab(rng, 1, s);
            const SlabSet b = random_slab(rng, 2, s);
            const Rat lo = w == 1 ? Rat(0) : s.height(w), hi = s.height(w + 1);
            const PiecewiseLinear p = correlation_profile(a, b, lo, hi, s);
            for (int i = 0; i < kPropertyCases; ++i) {
                const Rat t = random_rational(rr, lo, hi, 64);
                bad["profile/pointwise"] += p(t) != correlation_direct(a, b, t, s);
            }
        }
        long total = 0;
        std::ostringstream d;
        for (const auto& [name, n] : bad) {
            total += n;
            d << name << " " << n << ", ";
        }
        d << "violations over " << kPropertyCases << " cases each (profile: " << 3 * kPropertyCases << " t)";
        return Outcome{total == 0, d.str()};
    });

    report(8, "Spectral density d=2", [&] {
        const auto r = spectral_density(Rat(2), s);
        double lo = r.density.front(), asym = 0.0;
        for (std::size_t i = 0; i < r.s.size(); ++i) {
            lo = std::min(lo, r.density[i]);
            asym = std::max(asym, std::abs(density_at(r.pieces, -r.s[i]) - r.density[i]));
        }
        const double rel = std::abs(r.mass - r.phi0) / r.phi0;
        std::ostringstream d;
        d << std::setprecision(6) << r.s.size() << " grid points on [-" << DensityGrid{}.s_max << ", " << DensityGrid{}.s_max << "], min density " << lo
          << " (floor " << kDensityFloor << "), max asymmetry " << asym << ", mass " << r.mass << " vs phi(0)=" << r.phi0
          << " (rel. error " << rel << ", tol " << kMassTolerance << ")";
        return Outcome{lo >= kDensityFloor && asym <= kDensitySymmetry && rel <= kMassTolerance, d.str()};
    });

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
