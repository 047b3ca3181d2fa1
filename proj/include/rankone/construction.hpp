#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rankone/errors.hpp"
#include "rankone/schedule.hpp"

namespace rankone {

/// Certificate still failing after the policy's retry budget.
class EscalationExhausted : public Error {
public:
    EscalationExhausted(int window, Rat d, IntervalSet witness);
    int window() const { return window_; }
    const Rat& d() const { return d_; }
    const IntervalSet& witness() const { return witness_; }

private:
    int window_;
    Rat d_;
    IntervalSet witness_;
};

/// Diagonal sweep C[1]; C[1],C[2]; C[1],C[2],C[3]; ... truncated to j_max
/// entries. Throws EmptyTargets.
std::vector<Rat> enumerate_c(std::span<const Rat> c, int j_max);

/// (Δ_j(1), Δ_j(3)) for every stage. For each distinct value of the
/// c-sequence, its stages walk the dyadic net {0, 2^-n, ..., 1}^2 in
/// row-major order, cyclically.
std::vector<std::pair<Rat, Rat>> perturbation_schedule(std::span<const Rat> c_sequence, int net_depth);

/// Assembles the derived quantities (spacers, heights, widths, offsets)
/// from per-stage multipliers and perturbations; no certification.
/// `multipliers` and `deltas` need j_max - 1 entries (one per cut).
Schedule assemble_schedule(const Rat& w1, const Rat& h1, const TargetSets& targets,
                           const GrowthPolicy& policy, const PerturbationConfig& perturbation,
                           std::span<const Rat> c_sequence, std::span<const Rat> multipliers,
                           std::span<const std::pair<Rat, Rat>> deltas);

/// Builds and certifies a schedule with towers X_1..X_{j_max}.
///
/// Every window [h_j, h_{j+1}] with j <= j_max - 2 is checked for each d_k
/// entered by stage j. A failing window multiplies M_{j-1} and M_j by the
/// escalation factor and rebuilds; after policy.max_retries failures on
/// one window, EscalationExhausted carries the witness.
Schedule build_schedule(const Rat& w1, const Rat& h1, const TargetSets& targets, int j_max,
                        const GrowthPolicy& policy, const PerturbationConfig& perturbation = {});

/// Copy of `sched` with spacer `slot` (1..4) of stage j forced to `value`;
/// heights and offsets of stages > j are recomputed with their original
/// multipliers. The result is not certified.
Schedule with_spacer_override(const Schedule& sched, int j, int slot, const Rat& value);

/// Checks the recurrences linking stored stage data. Returns an empty
/// string when consistent, otherwise a description of the first violation.
std::string check_consistency(const Schedule& sched);

}  // namespace rankone
