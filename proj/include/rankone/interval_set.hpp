#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

#include "rankone/rat.hpp"

namespace rankone {

/// Half-open rational interval [lo, hi).
struct Interval {
    Rat lo;
    Rat hi;

    Rat length() const { return hi - lo; }
    bool contains(const Rat& x) const { return lo <= x && x < hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite disjoint union of half-open rational intervals.
///
/// The stored sequence is always sorted, pairwise disjoint and
/// non-adjacent (touching intervals are merged), and never contains an
/// empty interval. Two sets are equal iff their representations are.
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(std::initializer_list<Interval> parts);

    /// Canonicalizes an arbitrary list (unsorted, overlapping, empty parts allowed).
    static IntervalSet from_unsorted(std::vector<Interval> parts);
    /// Adopts a list that the caller guarantees is sorted with non-decreasing
    /// starts; overlaps and adjacency are still merged.
    static IntervalSet from_sorted(std::span<const Interval> parts);

    const std::vector<Interval>& intervals() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }

    Rat total_length() const;
    bool contains(const Rat& x) const;
    /// Smallest lo / largest hi. Precondition: non-empty.
    const Rat& min_lo() const { return parts_.front().lo; }
    const Rat& max_hi() const { return parts_.back().hi; }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> parts_;
};

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
/// Length of a ∩ b without materializing the intersection.
Rat overlap_length(const IntervalSet& a, const IntervalSet& b);
IntervalSet translate(const IntervalSet& a, const Rat& t);
/// Image under x -> r*x. Throws NonPositiveScale if r <= 0.
IntervalSet scale(const IntervalSet& a, const Rat& r);
/// a ∩ [lo, hi)
IntervalSet clip(const IntervalSet& a, const Rat& lo, const Rat& hi);

std::ostream& operator<<(std::ostream& os, const IntervalSet& s);

}  // namespace rankone
