#pragma once

#include <vector>

#include "rankone/levelset.hpp"
#include "rankone/schedule.hpp"

namespace rankone::oracle {

/// A single point of the phase space, tracked through the towers.
///
/// `x` is the horizontal coordinate inside X_stage (0 <= x < w_stage),
/// `height` the vertical one. `column_path` lists the columns (1..4) the
/// point was embedded through, one per stage climbed.
struct PointState {
    int stage = 1;
    Rat x;
    Rat height;
    std::vector<int> column_path;

    friend bool operator==(const PointState&, const PointState&) = default;
};

/// Moves the point up by flow time t >= 0, climbing into X_{stage+1} through
/// its column whenever it would leave the current tower. Throws
/// HorizonExceeded when it would leave the top built tower.
PointState orbit_advance(const PointState& p, const Rat& t, const Schedule& sched);

/// Same point written in X_stage for stage >= p.stage (no flow time elapses).
PointState lift(const PointState& p, int stage, const Schedule& sched);

/// Whether the point lies in the slab set, descending through the column
/// structure when the point lives in a higher tower than the set.
bool contains(const SlabSet& s, const PointState& p, const Schedule& sched);

struct Estimate {
    Rat value;
    Rat bound;  // |value - μ(T_t A ∩ B)| <= bound
    long samples = 0;
    int depth = 0;  // number of column digits resolved by the grid
};

/// Midpoint-grid estimate of μ(T_t A ∩ B), t >= 0. The grid has 4^depth
/// lateral cells (one per column path) times ceil(n / 4^depth) height
/// cells spread over the levels of A by arc length.
Estimate oracle_correlation(const SlabSet& a, const SlabSet& b, const Rat& t, long n, const Schedule& sched);

}  // namespace rankone::oracle
