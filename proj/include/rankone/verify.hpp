#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankone/levelset.hpp"
#include "rankone/schedule.hpp"

namespace rankone {

/// A slab set with a printable label, e.g. "X2[1/2,1)".
struct NamedSlab {
    std::string name;
    SlabSet set;
};

struct TestPair {
    NamedSlab a;
    NamedSlab b;
};

/// For every stage in `stages` and every split count in `splits`, the
/// pieces [i h/n, (i+1) h/n) of the tower X_stage.
std::vector<NamedSlab> slab_family(const Schedule& sched, const std::vector<int>& stages,
                                   const std::vector<int>& splits);
/// All ordered pairs drawn from `family`.
std::vector<TestPair> all_pairs(const std::vector<NamedSlab>& family);

/// μ(A ∩ B) for slab sets living at possibly different stages.
Rat intersection_measure(const SlabSet& a, const SlabSet& b, const Schedule& sched);

struct WeakLimitRow {
    int j = 0;
    Rat h;
    Rat corr_h;   // μ(T_{h_j} A ∩ B)
    Rat corr_ch;  // μ(T_{c h_j} A ∩ B)
    bool match_h = false;
    bool match_ch = false;
    Rat product;  // corr_h * corr_ch
    bool product_match = false;
};

struct WeakLimitReport {
    Rat c;
    std::string a_name;
    std::string b_name;
    Rat overlap;         // μ(A ∩ B)
    Rat target;          // μ(A ∩ B) / 4
    Rat product_target;  // μ(A ∩ B)^2 / 16
    std::vector<WeakLimitRow> rows;
    std::optional<int> j0;
    bool pass = false;
};

/// Checks μ(T_{h_j}A ∩ B) = μ(T_{c h_j}A ∩ B) = μ(A ∩ B)/4 with exact
/// equality on every certified stage j >= max(A.stage, B.stage) with c_j = c.
/// PASS iff both equalities hold from the first stage j0 where they hold
/// onwards. Throws NoMatchingStages.
WeakLimitReport check_weak_limit(const NamedSlab& a, const NamedSlab& b, const Rat& c, const Schedule& sched);

struct WindowVerdict {
    int j = 0;
    Rat lo;
    Rat hi;
    bool empty = true;
    IntervalSet witness;
};

struct DissipativityCertificate {
    Rat d;
    int entry_stage = 0;
    Rat threshold;  // N(d)
    std::vector<WindowVerdict> windows;
    bool pass = false;
};

/// Certifies that no t > N(d) in any certified window has both
/// μ(T_t Y ∩ Y) > 0 and μ(T_{dt} Y ∩ Y) > 0. Throws UncertifiedWindow
/// when the schedule has no certified window for d.
DissipativityCertificate check_dissipativity(const Rat& d, const Schedule& sched);

/// Copy of `sched` whose spacer s_j(4) is set to d s_j(2) + (d-1) h_j, so
/// that the landmark h_j + s_j(4) equals d (h_j + s_j(2)) and the
/// d-certificate must fail on window j. Used as a negative control.
Schedule make_collision_schedule(const Schedule& sched, const Rat& d, int j);

struct PerturbedRow {
    int j = 0;
    Rat delta1;
    Rat delta3;
    Rat corr_h;
    Rat limit_h;  // ¼ μ(T_{-a} A ∩ B)
    Rat e1;
    Rat corr_ch;
    Rat limit_ch;  // ¼ μ(T_{-b} A ∩ B)
    Rat e2;
    Rat tau;
    bool within = false;
};

struct PerturbedLimitReport {
    Rat c;
    Rat a;
    Rat b;
    std::string a_name;
    std::string b_name;
    std::vector<PerturbedRow> rows;
    bool pass = false;
};

/// Boundary-sliver bound used as the finite-stage tolerance:
/// 2 * w_{j+1} * (1 + edges(A) + edges(B)), edges counted at each set's own stage.
Rat sliver_bound(const SlabSet& a, const SlabSet& b, int j, const Schedule& sched);

/// Along stages j' with c_{j'} = c and (Δ_{j'}(1), Δ_{j'}(3)) = (a, b),
/// compares μ(T_{h_{j'}} A ∩ B) with ¼ μ(T_{-a} A ∩ B) and μ(T_{c h_{j'}} A ∩ B)
/// with ¼ μ(T_{-b} A ∩ B). PASS iff at least two such stages exist, the
/// errors on the last two are within the sliver bound, and the bound falls
/// by at least 2x from the first to the last stage. Throws NoMatchingStages.
PerturbedLimitReport check_perturbed_limit(const Rat& c, const Rat& a, const Rat& b, const NamedSlab& sa,
                                           const NamedSlab& sb, const Schedule& sched);

struct EvidenceEntry {
    std::string a_name;
    std::string b_name;
    Rat constant;             // μ(A ∩ B)^2 / 16
    std::vector<int> stages;  // matching stages j >= j0
    std::vector<Rat> sequence;
    bool vacuous = false;
    bool consistent = false;  // constant == (weak value)^2
};

struct SingularityEvidence {
    Rat c;
    Rat factor_constant{1, 4};
    Rat product_constant{1, 16};
    std::vector<EvidenceEntry> entries;
    std::string summary;
};

/// Non-vanishing product correlations ⟨(T_{h_j} ⊗ T_{c h_j}) 1_A⊗1_A, 1_B⊗1_B⟩
/// along matching stages; requires check_weak_limit to pass for every pair.
SingularityEvidence singularity_evidence(const Rat& c, const Schedule& sched, const std::vector<TestPair>& pairs);

struct DensityGrid {
    double s_max = 2000.0;
    double step = 1.0 / 64.0;
};

/// Piece of φ(t) = ρ(t) ρ(dt) on [start, start + length], written in the
/// local variable u = t - start as c0 + c1 u + c2 u^2.
struct PolyPiece {
    Rat start;
    Rat length;
    Rat c0, c1, c2;
};

struct SpectralDensitySamples {
    Rat d;
    Rat support_end;  // T0
    std::vector<PolyPiece> pieces;
    std::vector<double> s;
    std::vector<double> density;
    double phi0 = 0.0;
    double mass = 0.0;  // trapezoid integral of density over the grid
};

/// Exact piecewise-quadratic φ(t) = ρ(t) ρ(dt) on [0, T0], ρ(t) = μ(T_t Y ∩ Y).
std::vector<PolyPiece> product_correlation(const Rat& d, const Rat& t0, const Schedule& sched);
/// (1/π) ∫_0^{T0} φ(t) cos(st) dt, integrating each polynomial piece in closed form.
double density_at(const std::vector<PolyPiece>& pieces, double s);

/// Spectral density of 1_Y ⊗ 1_Y under T_t ⊗ T_{dt}. Throws NotDissipative
/// unless check_dissipativity(d) passes.
SpectralDensitySamples spectral_density(const Rat& d, const Schedule& sched, const DensityGrid& grid = {});

/// Closest of h_j, c_j h_j, s_j(2), s_j(4) to t by ratio, if the ratio lies
/// in [1/2, 2]; otherwise "none".
std::string nearest_landmark(const Rat& t, const StageParams& st);

}  // namespace rankone
