#pragma once

#include <utility>
#include <vector>

#include "rankone/interval_set.hpp"
#include "rankone/schedule.hpp"

namespace rankone {

/// Full-width region {(x, y) : y ∈ levels} of tower X_stage.
struct SlabSet {
    int stage = 1;
    IntervalSet levels;

    /// w_stage * total length of levels.
    Rat measure(const Schedule& sched) const;
    friend bool operator==(const SlabSet&, const SlabSet&) = default;
};

/// Builds a slab set and checks that its levels lie in [0, h_stage).
SlabSet make_slab(const Schedule& sched, int stage, IntervalSet levels);
/// The base tower X_1 as a slab set.
SlabSet base_tower(const Schedule& sched);

/// Continuous piecewise-linear function given by its breakpoints; constant
/// outside [front, back].
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<Rat> breakpoints, std::vector<Rat> values);

    const std::vector<Rat>& breakpoints() const { return t_; }
    const std::vector<Rat>& values() const { return v_; }
    Rat operator()(const Rat& t) const;
    /// Positivity set, as a canonical half-open interval set.
    IntervalSet support() const;
    /// Exact integral over [front, back].
    Rat integral() const;

private:
    std::vector<Rat> t_;
    std::vector<Rat> v_;
};

/// The same set expressed in tower X_target. Throws StageOutOfRange.
SlabSet refine(const SlabSet& s, int target, const Schedule& sched);

/// Largest level reached by s once expressed in X_stage, without
/// materializing the refinement. Precondition: s non-empty.
Rat max_level_at(const SlabSet& s, int stage, const Schedule& sched);

/// Smallest built J >= s.stage such that every copy of s in X_J stays inside
/// the tower after moving up by t >= 0. Throws HorizonExceeded.
int min_valid_stage(const SlabSet& s, const Rat& t, const Schedule& sched);

/// T_t s for t >= 0, expressed at min_valid_stage(s, t).
SlabSet translate_exact(const SlabSet& s, const Rat& t, const Schedule& sched);

/// μ(T_t A ∩ B) by refining both sets, translating and intersecting.
/// Cost is linear in the number of copies, i.e. 4^(J - stage).
Rat correlation_direct(const SlabSet& a, const SlabSet& b, const Rat& t, const Schedule& sched);

/// Evaluates the in-tower correlation P_J(t) = w_J |(L_A^J + t) ∩ L_B^J|
/// through the column recursion
///     P_{m+1}(t) = 1/4 Σ_{i,k} P_m(t + o_i - o_k),
/// pruning every branch whose argument leaves the support hull of P_m.
/// Only the base stage is ever materialized.
class CorrelationKernel {
public:
    CorrelationKernel(const SlabSet& a, const SlabSet& b, const Schedule& sched);

    int base_stage() const { return base_; }
    /// P_J(t). Equal to μ(T_t A ∩ B) whenever J is valid for t.
    Rat evaluate(int stage, const Rat& t) const;
    /// Exact P_J on [lo, hi].
    PiecewiseLinear profile(int stage, const Rat& lo, const Rat& hi) const;
    /// {t ∈ [lo, hi) : P_J(t) > 0}.
    IntervalSet support(int stage, const Rat& lo, const Rat& hi) const;
    /// Hull (lo, hi) outside of which P_m vanishes.
    std::pair<Rat, Rat> hull(int stage) const;

    /// {t ∈ [lo, hi) : P_J(t) > 0 and P_{J'}(d t) > 0}, computed by a
    /// dual descent over the two recursion trees. At most `cap` intervals
    /// are collected.
    IntervalSet joint_support(int stage, int dilated_stage, const Rat& d, const Rat& lo, const Rat& hi,
                              std::size_t cap = 4096) const;

private:
    struct Shift {
        Rat delta;  // o_i - o_k
        int multiplicity;
    };
    struct Event {
        Rat t;
        Rat slope_change;
    };

    void check_stage(int stage) const;
    Rat eval_rec(int stage, const Rat& u) const;
    void collect_events(int stage, const Rat& shift, const Rat& weight, const Rat& lo, const Rat& hi,
                        std::vector<Event>& out) const;
    void collect_support(int stage, const Rat& shift, const Rat& lo, const Rat& hi,
                         std::vector<Interval>& out) const;
    void joint_rec(int sa, const Rat& ua, int sb, const Rat& ub, const Rat& d, const Rat& lo, const Rat& hi,
                   std::vector<Interval>& out, std::size_t cap) const;

    const Schedule* sched_;
    int base_;
    IntervalSet base_a_;
    IntervalSet base_b_;
    IntervalSet base_support_;              // open supports of pair overlaps, half-open form
    std::vector<std::vector<Shift>> shifts_;  // shifts_[m]: transition m -> m+1
    std::vector<Rat> hull_lo_;                // indexed by stage
    std::vector<Rat> hull_hi_;
    bool empty_ = false;
};

/// Exact μ(T_t A ∩ B) for any rational t (negative t by symmetry).
Rat correlation(const SlabSet& a, const SlabSet& b, const Rat& t, const Schedule& sched);

/// Exact t -> μ(T_t A ∩ B) on [lo, hi], lo >= 0.
PiecewiseLinear correlation_profile(const SlabSet& a, const SlabSet& b, const Rat& lo, const Rat& hi,
                                    const Schedule& sched);

/// {t ∈ [lo, hi) : μ(T_t A ∩ B) > 0}, lo >= 0.
IntervalSet hitting_set(const SlabSet& a, const SlabSet& b, const Rat& lo, const Rat& hi,
                        const Schedule& sched);

/// Levels of the refined set s inside column `column` (1..4) of the cut of
/// stage j, i.e. refine(s, j+1) ∩ [o_column, o_column + h_j).
IntervalSet column_trace(const SlabSet& s, int j, int column, const Schedule& sched);

/// Times t ∈ [max(h_j, threshold), h_{j+1}) with μ(T_t Y ∩ Y) > 0 and
/// μ(T_{dt} Y ∩ Y) > 0, where Y = X_1. Empty means the window is certified
/// for d. Throws UncertifiedWindow when the schedule cannot absorb d h_{j+1}.
IntervalSet dissipativity_witness(const Schedule& sched, const Rat& d, int window, const Rat& threshold);

}  // namespace rankone
