#include "rankone/interval_set.hpp"

#include <algorithm>
#include <ostream>

#include "rankone/errors.hpp"

namespace rankone {

namespace {

// Appends `iv` to a sorted canonical list, merging with the tail if they touch.
void push_merged(std::vector<Interval>& out, const Interval& iv) {
    if (!(iv.lo < iv.hi)) return;
    if (!out.empty() && iv.lo <= out.back().hi) {
        if (out.back().hi < iv.hi) out.back().hi = iv.hi;
        return;
    }
    out.push_back(iv);
}

}  // namespace

IntervalSet::IntervalSet(std::initializer_list<Interval> parts)
    : IntervalSet(from_unsorted(std::vector<Interval>(parts))) {}

IntervalSet IntervalSet::from_unsorted(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return from_sorted(parts);
}

IntervalSet IntervalSet::from_sorted(std::span<const Interval> parts) {
    IntervalSet s;
    s.parts_.reserve(parts.size());
    for (const auto& iv : parts) push_merged(s.parts_, iv);
    return s;
}

Rat IntervalSet::total_length() const {
    Rat sum;
    for (const auto& iv : parts_) sum += iv.length();
    return sum;
}

bool IntervalSet::contains(const Rat& x) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](const Rat& v, const Interval& iv) { return v < iv.lo; });
    if (it == parts_.begin()) return false;
    return std::prev(it)->contains(x);
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.intervals().begin(), a.intervals().end(), b.intervals().begin(),
               b.intervals().end(), std::back_inserter(merged),
               [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    return IntervalSet::from_sorted(merged);
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    const auto& x = a.intervals();
    const auto& y = b.intervals();
    std::size_t i = 0, k = 0;
    while (i < x.size() && k < y.size()) {
        const Rat& lo = max(x[i].lo, y[k].lo);
        const Rat& hi = min(x[i].hi, y[k].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (x[i].hi < y[k].hi)
            ++i;
        else
            ++k;
    }
    // Pieces come out sorted and disjoint; adjacency cannot occur because
    // each input is already non-adjacent.
    return IntervalSet::from_sorted(out);
}

Rat overlap_length(const IntervalSet& a, const IntervalSet& b) {
    const auto& x = a.intervals();
    const auto& y = b.intervals();
    Rat total;
    std::size_t i = 0, k = 0;
    while (i < x.size() && k < y.size()) {
        const Rat& lo = x[i].lo < y[k].lo ? y[k].lo : x[i].lo;
        const Rat& hi = x[i].hi < y[k].hi ? x[i].hi : y[k].hi;
        if (lo < hi) total += hi - lo;
        if (x[i].hi < y[k].hi)
            ++i;
        else
            ++k;
    }
    return total;
}

IntervalSet translate(const IntervalSet& a, const Rat& t) {
    std::vector<Interval> out;
    out.reserve(a.size());
    for (const auto& iv : a.intervals()) out.push_back({iv.lo + t, iv.hi + t});
    return IntervalSet::from_sorted(out);
}

IntervalSet scale(const IntervalSet& a, const Rat& r) {
    if (r.sign() <= 0) throw NonPositiveScale("scale factor must be positive, got " + r.to_string());
    std::vector<Interval> out;
    out.reserve(a.size());
    for (const auto& iv : a.intervals()) out.push_back({iv.lo * r, iv.hi * r});
    return IntervalSet::from_sorted(out);
}

IntervalSet clip(const IntervalSet& a, const Rat& lo, const Rat& hi) {
    if (!(lo < hi)) return {};
    return intersect(a, IntervalSet{{lo, hi}});
}

std::ostream& operator<<(std::ostream& os, const IntervalSet& s) {
    os << '{';
    bool first = true;
    for (const auto& iv : s.intervals()) {
        if (!first) os << ", ";
        first = false;
        os << '[' << iv.lo << ", " << iv.hi << ')';
    }
    return os << '}';
}

}  // namespace rankone
