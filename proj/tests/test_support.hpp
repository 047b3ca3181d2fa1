#pragma once

#include <random>

#include "rankone/construction.hpp"
#include "rankone/levelset.hpp"

namespace rankone::testing {

inline const Schedule& desk_schedule() {
    static const Schedule s = [] {
        TargetSets t({Rat(3, 2), Rat(5, 2)}, {Rat(2), Rat(3)});
        return build_schedule(Rat(1), Rat(1), t, 8, GrowthPolicy{});
    }();
    return s;
}

// Stage-1 parameters s = (0, 10, 1/2, 100), h_2 = 229/2.
inline const Schedule& small_schedule() {
    static const Schedule s = [] {
        GrowthPolicy p;
        p.gauge_floor = Rat(10);
        return build_schedule(Rat(1), Rat(1), TargetSets({Rat(3, 2)}, {}), 2, p);
    }();
    return s;
}

inline Rat grid_rat(std::mt19937_64& rng, long lo, long hi, long den) {
    std::uniform_int_distribution<long> d(lo * den, hi * den);
    return Rat(d(rng), den);
}

// Random canonical set inside [lo, hi) on the grid (1/den)Z.
inline IntervalSet random_set(std::mt19937_64& rng, long lo, long hi, long den, int max_parts = 5) {
    std::uniform_int_distribution<int> parts(0, max_parts);
    std::vector<Interval> v;
    const int n = parts(rng);
    for (int i = 0; i < n; ++i) {
        Rat a = grid_rat(rng, lo, hi, den);
        Rat b = grid_rat(rng, lo, hi, den);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        v.push_back({a, b});
    }
    return IntervalSet::from_unsorted(std::move(v));
}

// Random non-empty slab set at `stage`, levels on a grid of h_stage / den.
inline SlabSet random_slab(std::mt19937_64& rng, int stage, const Schedule& s, long den = 8) {
    const Rat h = s.height(stage);
    std::uniform_int_distribution<long> cell(0, den - 1);
    std::vector<Interval> v;
    std::uniform_int_distribution<int> parts(1, 3);
    const int n = parts(rng);
    for (int i = 0; i < n; ++i) {
        long a = cell(rng), b = cell(rng);
        if (b < a) std::swap(a, b);
        v.push_back({h * Rat(a, den), h * Rat(b + 1, den)});
    }
    return make_slab(s, stage, IntervalSet::from_unsorted(std::move(v)));
}

}  // namespace rankone::testing
