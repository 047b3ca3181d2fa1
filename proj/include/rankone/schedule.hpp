#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankone/interval_set.hpp"
#include "rankone/rat.hpp"

namespace rankone {

/// The two disjoint parameter sets. C drives the cutting (singular
/// directions), D the dissipativity constraints (Lebesgue directions).
class TargetSets {
public:
    TargetSets() = default;
    /// Validates: every entry > 1, no duplicates inside a list, C ∩ D = ∅.
    /// Throws InvalidTargets. An empty C is allowed here; construction
    /// rejects it with EmptyTargets.
    TargetSets(std::vector<Rat> c, std::vector<Rat> d);

    const std::vector<Rat>& C() const { return c_; }
    const std::vector<Rat>& D() const { return d_; }
    bool in_C(const Rat& x) const;
    bool in_D(const Rat& x) const;
    /// 1-based position of x in D, or 0.
    int d_index(const Rat& x) const;

    friend bool operator==(const TargetSets&, const TargetSets&) = default;

private:
    std::vector<Rat> c_;
    std::vector<Rat> d_;
};

/// Growth policy turning "s_j(4) >> s_j(2) >> h_j" into numbers:
/// M_j starts at initial_multiplier * g(j) with g(j) = max(gauge_floor, gauge_base^j).
struct GrowthPolicy {
    Rat gauge_floor{16};
    Rat gauge_base{2};
    Rat initial_multiplier{1};
    Rat escalation_factor{2};
    int max_retries = 40;
    /// d_k is constrained on windows [h_j, h_{j+1}] with j >= k + entry_offset.
    int entry_offset = 1;

    Rat gauge(int j) const;
    friend bool operator==(const GrowthPolicy&, const GrowthPolicy&) = default;
};

struct PerturbationConfig {
    bool enabled = false;
    int net_depth = 1;
    friend bool operator==(const PerturbationConfig&, const PerturbationConfig&) = default;
};

/// One stage of the cutting-and-stacking record. Stage j describes the
/// tower X_j (height h, width w) and, when `has_cut`, how X_j is cut into
/// four columns, topped with spacers s[0..3] and glued into X_{j+1}.
/// offsets[i] is the base height of column i inside X_{j+1}.
struct StageParams {
    int j = 0;
    Rat c;
    Rat h;
    Rat w;
    bool has_cut = false;
    Rat multiplier;  // M_j
    Rat delta1;
    Rat delta3;
    std::array<Rat, 4> s{};
    std::array<Rat, 4> offsets{};

    friend bool operator==(const StageParams&, const StageParams&) = default;
};

/// Record of one failed certificate and the resulting escalation.
struct EscalationEvent {
    int window = 0;
    Rat d;
    IntervalSet witness;
    int escalated_stage = 0;
    Rat new_multiplier;
    friend bool operator==(const EscalationEvent&, const EscalationEvent&) = default;
};

/// Finite prefix of the construction: towers X_1..X_{J_max}. Stages
/// 1..J_max-1 carry cut data; the top tower does not.
class Schedule {
public:
    Rat w1;
    Rat h1;
    TargetSets targets;
    GrowthPolicy policy;
    PerturbationConfig perturbation;
    std::vector<StageParams> stages;
    std::vector<EscalationEvent> escalations;

    int j_max() const { return static_cast<int>(stages.size()); }
    /// 1-based access. Throws StageOutOfRange.
    const StageParams& stage(int j) const;
    const Rat& height(int j) const { return stage(j).h; }
    const Rat& width(int j) const { return stage(j).w; }
    /// Largest j whose window [h_j, h_{j+1}] can be certified (needs X_{j+2}).
    int last_certified_window() const { return j_max() - 2; }
    /// First window on which d (1-based index k in D) is constrained.
    int entry_stage(int d_index) const { return d_index + policy.entry_offset; }
    /// Measure of the tower X_j.
    Rat tower_measure(int j) const { return width(j) * height(j); }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

}  // namespace rankone
