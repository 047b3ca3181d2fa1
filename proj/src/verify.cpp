#include "rankone/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rankone/construction.hpp"
#include "rankone/errors.hpp"

namespace rankone {

std::vector<NamedSlab> slab_family(const Schedule& sched, const std::vector<int>& stages,
                                   const std::vector<int>& splits) {
    std::vector<NamedSlab> out;
    for (int k : stages) {
        const Rat& h = sched.height(k);
        for (int n : splits) {
            if (n < 1) throw Error("split count must be positive");
            for (int i = 0; i < n; ++i) {
                const Rat lo = h * Rat(i, n);
                const Rat hi = h * Rat(i + 1, n);
                std::string name = "X" + std::to_string(k);
                if (n > 1) name += "[" + std::to_string(i) + "/" + std::to_string(n) + "]";
                out.push_back({name, make_slab(sched, k, IntervalSet{{lo, hi}})});
            }
        }
    }
    return out;
}

std::vector<TestPair> all_pairs(const std::vector<NamedSlab>& family) {
    std::vector<TestPair> out;
    out.reserve(family.size() * family.size());
    for (const auto& a : family)
        for (const auto& b : family) out.push_back({a, b});
    return out;
}

Rat intersection_measure(const SlabSet& a, const SlabSet& b, const Schedule& sched) {
    const int k = std::max(a.stage, b.stage);
    return sched.width(k) * overlap_length(refine(a, k, sched).levels, refine(b, k, sched).levels);
}

// ---------------------------------------------------------------------------
// Weak limits along h_j and c h_j

WeakLimitReport check_weak_limit(const NamedSlab& a, const NamedSlab& b, const Rat& c, const Schedule& sched) {
    WeakLimitReport r;
    r.c = c;
    r.a_name = a.name;
    r.b_name = b.name;
    r.overlap = intersection_measure(a.set, b.set, sched);
    r.target = r.overlap / Rat(4);
    r.product_target = r.target * r.target;

    const CorrelationKernel kernel(a.set, b.set, sched);
    const int first = std::max(a.set.stage, b.set.stage);
    for (int j = first; j <= sched.last_certified_window(); ++j) {
        const auto& st = sched.stage(j);
        if (st.c != c) continue;
        WeakLimitRow row;
        row.j = j;
        row.h = st.h;
        const Rat ch = c * st.h;
        row.corr_h = kernel.evaluate(std::max(min_valid_stage(a.set, st.h, sched), b.set.stage), st.h);
        row.corr_ch = kernel.evaluate(std::max(min_valid_stage(a.set, ch, sched), b.set.stage), ch);
        row.match_h = row.corr_h == r.target;
        row.match_ch = row.corr_ch == r.target;
        row.product = row.corr_h * row.corr_ch;
        row.product_match = row.product == r.product_target;
        r.rows.push_back(std::move(row));
    }
    if (r.rows.empty())
        throw NoMatchingStages("no certified stage with c_j = " + c.to_string() + " above stage " +
                               std::to_string(first));

    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const bool tail_ok = std::all_of(r.rows.begin() + static_cast<long>(i), r.rows.end(),
                                         [](const WeakLimitRow& x) { return x.match_h && x.match_ch; });
        if (r.rows[i].match_h && r.rows[i].match_ch) {
            r.j0 = r.rows[i].j;
            r.pass = tail_ok;
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Dissipativity

DissipativityCertificate check_dissipativity(const Rat& d, const Schedule& sched) {
    const int k = sched.targets.d_index(d);
    if (k == 0) throw InvalidTargets(d.to_string() + " is not an element of D");
    DissipativityCertificate cert;
    cert.d = d;
    cert.entry_stage = sched.entry_stage(k);
    if (cert.entry_stage > sched.last_certified_window())
        throw UncertifiedWindow("schedule too short: d=" + d.to_string() + " enters at window " +
                                std::to_string(cert.entry_stage) + " but the last certified window is " +
                                std::to_string(sched.last_certified_window()));
    cert.threshold = sched.height(cert.entry_stage);
    cert.pass = true;
    for (int j = cert.entry_stage; j <= sched.last_certified_window(); ++j) {
        WindowVerdict v;
        v.j = j;
        v.lo = sched.height(j);
        v.hi = sched.height(j + 1);
        v.witness = dissipativity_witness(sched, d, j, cert.threshold);
        v.empty = v.witness.empty();
        cert.pass = cert.pass && v.empty;
        cert.windows.push_back(std::move(v));
    }
    return cert;
}

Schedule make_collision_schedule(const Schedule& sched, const Rat& d, int j) {
    const auto& st = sched.stage(j);
    if (!st.has_cut) throw StageOutOfRange("collision stage must have a cut");
    return with_spacer_override(sched, j, 4, d * st.s[1] + (d - Rat(1)) * st.h);
}

// ---------------------------------------------------------------------------
// Perturbed limits

Rat sliver_bound(const SlabSet& a, const SlabSet& b, int j, const Schedule& sched) {
    const Rat edges = Rat(2 * static_cast<long>(a.levels.size() + b.levels.size()));
    return Rat(2) * sched.width(j + 1) * (Rat(1) + edges);
}

PerturbedLimitReport check_perturbed_limit(const Rat& c, const Rat& a, const Rat& b, const NamedSlab& sa,
                                           const NamedSlab& sb, const Schedule& sched) {
    PerturbedLimitReport r;
    r.c = c;
    r.a = a;
    r.b = b;
    r.a_name = sa.name;
    r.b_name = sb.name;
    const Rat limit_h = correlation(sa.set, sb.set, -a, sched) / Rat(4);
    const Rat limit_ch = correlation(sa.set, sb.set, -b, sched) / Rat(4);
    const CorrelationKernel kernel(sa.set, sb.set, sched);
    const int first = std::max(sa.set.stage, sb.set.stage);
    for (int j = first; j <= sched.last_certified_window(); ++j) {
        const auto& st = sched.stage(j);
        if (st.c != c || st.delta1 != a || st.delta3 != b) continue;
        PerturbedRow row;
        row.j = j;
        row.delta1 = st.delta1;
        row.delta3 = st.delta3;
        const Rat ch = c * st.h;
        row.corr_h = kernel.evaluate(std::max(min_valid_stage(sa.set, st.h, sched), sb.set.stage), st.h);
        row.corr_ch = kernel.evaluate(std::max(min_valid_stage(sa.set, ch, sched), sb.set.stage), ch);
        row.limit_h = limit_h;
        row.limit_ch = limit_ch;
        row.e1 = abs(row.corr_h - limit_h);
        row.e2 = abs(row.corr_ch - limit_ch);
        row.tau = sliver_bound(sa.set, sb.set, j, sched);
        row.within = row.e1 <= row.tau && row.e2 <= row.tau;
        r.rows.push_back(std::move(row));
    }
    if (r.rows.empty())
        throw NoMatchingStages("no certified stage with c_j = " + c.to_string() + " and perturbation (" +
                               a.to_string() + ", " + b.to_string() + ")");
    const std::size_t n = r.rows.size();
    r.pass = n >= 2 && r.rows[n - 1].within && r.rows[n - 2].within &&
             Rat(2) * r.rows[n - 1].tau <= r.rows.front().tau;
    return r;
}

// ---------------------------------------------------------------------------
// Singularity evidence

SingularityEvidence singularity_evidence(const Rat& c, const Schedule& sched, const std::vector<TestPair>& pairs) {
    SingularityEvidence ev;
    ev.c = c;
    std::size_t informative = 0;
    for (const auto& p : pairs) {
        const WeakLimitReport rep = check_weak_limit(p.a, p.b, c, sched);
        EvidenceEntry e;
        e.a_name = p.a.name;
        e.b_name = p.b.name;
        e.constant = rep.product_target;
        e.vacuous = rep.overlap.is_zero();
        if (rep.pass) {
            for (const auto& row : rep.rows) {
                if (row.j < *rep.j0) continue;
                e.stages.push_back(row.j);
                e.sequence.push_back(row.product);
            }
        }
        e.consistent = rep.pass && e.constant == rep.target * rep.target &&
                       std::all_of(e.sequence.begin(), e.sequence.end(), [&](const Rat& v) { return v == e.constant; });
        if (!e.vacuous && e.consistent) ++informative;
        ev.entries.push_back(std::move(e));
    }
    std::ostringstream os;
    os << "c=" << c << ": " << informative << " of " << pairs.size()
       << " pairs give a non-vanishing constant product correlation mu(A∩B)^2/16 along t=h_j; "
       << "a correlation that does not tend to zero rules out an absolutely continuous spectral measure "
       << "for those vectors. Per-factor constant 1/4, product constant 1/16 (the single-operator limit "
       << "(I⊗I)/4 stated for T_t⊗T_ct differs from the computed product constant 1/16).";
    ev.summary = os.str();
    return ev;
}

// ---------------------------------------------------------------------------
// Spectral density

std::vector<PolyPiece> product_correlation(const Rat& d, const Rat& t0, const Schedule& sched) {
    const SlabSet y = base_tower(sched);
    const PiecewiseLinear rho = correlation_profile(y, y, Rat(0), d * t0, sched);
    std::vector<Rat> cuts{Rat(0), t0};
    for (const auto& t : rho.breakpoints()) {
        if (t < t0) cuts.push_back(t);
        const Rat td = t / d;
        if (td < t0) cuts.push_back(td);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<PolyPiece> pieces;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const Rat& a = cuts[i - 1];
        const Rat len = cuts[i] - a;
        const Rat p = rho(a);
        const Rat q = (rho(cuts[i]) - p) / len;
        const Rat r = rho(d * a);
        const Rat s = (rho(d * cuts[i]) - r) / len;
        PolyPiece piece{a, len, p * r, p * s + q * r, q * s};
        if (piece.c0.is_zero() && piece.c1.is_zero() && piece.c2.is_zero()) continue;
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

namespace {

// ∫_0^L u^n cos(su) du and ∫_0^L u^n sin(su) du for n = 0, 1, 2.
struct Moments {
    double c[3];
    double s[3];
};

Moments moments(double s, double L) {
    Moments m{};
    const double x = s * L;
    if (std::abs(x) < 0.5) {
        for (int n = 0; n < 3; ++n) {
            double cs = 0.0, sn = 0.0;
            double term = 1.0;  // s^k / k!
            for (int k = 0; k < 24; ++k) {
                const double lp = std::pow(L, n + k + 1) / (n + k + 1);
                const int r = k % 4;
                if (r == 0) cs += term * lp;
                if (r == 1) sn += term * lp;
                if (r == 2) cs -= term * lp;
                if (r == 3) sn -= term * lp;
                term *= s / (k + 1);
            }
            m.c[n] = cs;
            m.s[n] = sn;
        }
        return m;
    }
    const double sx = std::sin(x), cx = std::cos(x);
    const double s2 = s * s, s3 = s2 * s;
    m.c[0] = sx / s;
    m.s[0] = (1.0 - cx) / s;
    m.c[1] = L * sx / s + (cx - 1.0) / s2;
    m.s[1] = -L * cx / s + sx / s2;
    m.c[2] = L * L * sx / s + 2.0 * L * cx / s2 - 2.0 * sx / s3;
    m.s[2] = -L * L * cx / s + 2.0 * L * sx / s2 + 2.0 * (cx - 1.0) / s3;
    return m;
}

}  // namespace

double density_at(const std::vector<PolyPiece>& pieces, double s) {
    double total = 0.0;
    for (const auto& p : pieces) {
        const double a = p.start.to_double();
        const Moments m = moments(s, p.length.to_double());
        const double c0 = p.c0.to_double(), c1 = p.c1.to_double(), c2 = p.c2.to_double();
        const double ic = c0 * m.c[0] + c1 * m.c[1] + c2 * m.c[2];
        const double is = c0 * m.s[0] + c1 * m.s[1] + c2 * m.s[2];
        total += std::cos(s * a) * ic - std::sin(s * a) * is;
    }
    return total / std::numbers::pi;
}

SpectralDensitySamples spectral_density(const Rat& d, const Schedule& sched, const DensityGrid& grid) {
    const DissipativityCertificate cert = check_dissipativity(d, sched);
    if (!cert.pass) throw NotDissipative("d=" + d.to_string() + " fails its dissipativity certificate");
    if (!(grid.step > 0.0) || !(grid.s_max > 0.0)) throw Error("density grid needs positive step and range");

    SpectralDensitySamples out;
    out.d = d;
    out.support_end = cert.threshold;
    out.pieces = product_correlation(d, cert.threshold, sched);
    const SlabSet y = base_tower(sched);
    const Rat rho0 = y.measure(sched);
    out.phi0 = (rho0 * rho0).to_double();

    const long n = std::lround(grid.s_max / grid.step);
    out.s.reserve(static_cast<std::size_t>(2 * n + 1));
    out.density.reserve(static_cast<std::size_t>(2 * n + 1));
    for (long i = -n; i <= n; ++i) {
        const double s = static_cast<double>(i) * grid.step;
        out.s.push_back(s);
        out.density.push_back(density_at(out.pieces, s));
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < out.s.size(); ++i)
        mass += 0.5 * (out.density[i] + out.density[i - 1]) * (out.s[i] - out.s[i - 1]);
    out.mass = mass;
    return out;
}

std::string nearest_landmark(const Rat& t, const StageParams& st) {
    if (!st.has_cut || t.sign() <= 0) return "none";
    const std::pair<const char*, Rat> marks[] = {
        {"h_j", st.h}, {"c_j*h_j", st.c * st.h}, {"s_j(2)", st.s[1]}, {"s_j(4)", st.s[3]}};
    std::string best = "none";
    Rat best_ratio;
    for (const auto& [name, value] : marks) {
        if (value.sign() <= 0) continue;
        const Rat r = max(t / value, value / t);
        if (r > Rat(2)) continue;
        if (best == "none" || r < best_ratio) {
            best = name;
            best_ratio = r;
        }
    }
    return best;
}

}  // namespace rankone
