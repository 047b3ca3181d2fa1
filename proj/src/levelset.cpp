#include "rankone/levelset.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone {

Rat SlabSet::measure(const Schedule& sched) const { return sched.width(stage) * levels.total_length(); }

SlabSet make_slab(const Schedule& sched, int stage, IntervalSet levels) {
    const Rat& h = sched.height(stage);
    if (!levels.empty() && (levels.min_lo().sign() < 0 || h < levels.max_hi()))
        throw Error("slab levels must lie in [0, h_" + std::to_string(stage) + ")");
    return SlabSet{stage, std::move(levels)};
}

SlabSet base_tower(const Schedule& sched) { return SlabSet{1, IntervalSet{{Rat(0), sched.h1}}}; }

// ---------------------------------------------------------------------------
// PiecewiseLinear

PiecewiseLinear::PiecewiseLinear(std::vector<Rat> breakpoints, std::vector<Rat> values)
    : t_(std::move(breakpoints)), v_(std::move(values)) {
    if (t_.size() != v_.size()) throw Error("PiecewiseLinear: size mismatch");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i - 1] < t_[i])) throw Error("PiecewiseLinear: breakpoints must increase strictly");
}

Rat PiecewiseLinear::operator()(const Rat& t) const {
    if (t_.empty()) return Rat(0);
    if (t <= t_.front()) return v_.front();
    if (t_.back() <= t) return v_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - t_.begin());
    const Rat& t0 = t_[k - 1];
    const Rat& t1 = t_[k];
    return v_[k - 1] + (v_[k] - v_[k - 1]) * (t - t0) / (t1 - t0);
}

IntervalSet PiecewiseLinear::support() const {
    std::vector<Interval> parts;
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (v_[i - 1].sign() > 0 || v_[i].sign() > 0) parts.push_back({t_[i - 1], t_[i]});
    return IntervalSet::from_sorted(parts);
}

Rat PiecewiseLinear::integral() const {
    Rat sum;
    for (std::size_t i = 1; i < t_.size(); ++i) sum += (t_[i] - t_[i - 1]) * (v_[i] + v_[i - 1]) / Rat(2);
    return sum;
}

// ---------------------------------------------------------------------------
// Refinement and translation

SlabSet refine(const SlabSet& s, int target, const Schedule& sched) {
    if (target < s.stage || target > sched.j_max())
        throw StageOutOfRange("cannot refine stage " + std::to_string(s.stage) + " set to stage " +
                              std::to_string(target));
    IntervalSet levels = s.levels;
    for (int m = s.stage; m < target; ++m) {
        const auto& st = sched.stage(m);
        std::vector<Interval> parts;
        parts.reserve(levels.size() * 4);
        for (const auto& o : st.offsets)
            for (const auto& iv : levels.intervals()) parts.push_back({iv.lo + o, iv.hi + o});
        levels = IntervalSet::from_sorted(parts);
    }
    return SlabSet{target, std::move(levels)};
}

Rat max_level_at(const SlabSet& s, int stage, const Schedule& sched) {
    if (stage < s.stage || stage > sched.j_max()) throw StageOutOfRange("max_level_at: bad stage");
    Rat top = s.levels.max_hi();
    for (int m = s.stage; m < stage; ++m) top += sched.stage(m).offsets[3];
    return top;
}

int min_valid_stage(const SlabSet& s, const Rat& t, const Schedule& sched) {
    if (t.sign() < 0) throw Error("min_valid_stage: t must be non-negative");
    if (s.levels.empty() || t.is_zero()) return s.stage;
    Rat top = s.levels.max_hi();
    for (int J = s.stage; J <= sched.j_max(); ++J) {
        if (top + t <= sched.height(J)) return J;
        if (J < sched.j_max()) top += sched.stage(J).offsets[3];
    }
    throw HorizonExceeded("time " + t.to_string() + " exceeds the built horizon of " +
                          std::to_string(sched.j_max()) + " stages");
}

SlabSet translate_exact(const SlabSet& s, const Rat& t, const Schedule& sched) {
    const int J = min_valid_stage(s, t, sched);
    SlabSet r = refine(s, J, sched);
    r.levels = translate(r.levels, t);
    return r;
}

Rat correlation_direct(const SlabSet& a, const SlabSet& b, const Rat& t, const Schedule& sched) {
    if (t.sign() < 0) return correlation_direct(b, a, -t, sched);
    const int J = std::max(min_valid_stage(a, t, sched), b.stage);
    const IntervalSet moved = translate(refine(a, J, sched).levels, t);
    return sched.width(J) * overlap_length(moved, refine(b, J, sched).levels);
}

// ---------------------------------------------------------------------------
// CorrelationKernel

CorrelationKernel::CorrelationKernel(const SlabSet& a, const SlabSet& b, const Schedule& sched)
    : sched_(&sched), base_(std::max(a.stage, b.stage)) {
    base_a_ = refine(a, base_, sched).levels;
    base_b_ = refine(b, base_, sched).levels;
    empty_ = base_a_.empty() || base_b_.empty();
    const int top = sched.j_max();
    hull_lo_.resize(static_cast<std::size_t>(top + 1));
    hull_hi_.resize(static_cast<std::size_t>(top + 1));
    shifts_.resize(static_cast<std::size_t>(top + 1));
    if (empty_) return;

    std::vector<Interval> supp;
    supp.reserve(base_a_.size() * base_b_.size());
    for (const auto& ia : base_a_.intervals())
        for (const auto& ib : base_b_.intervals()) supp.push_back({ib.lo - ia.hi, ib.hi - ia.lo});
    base_support_ = IntervalSet::from_unsorted(std::move(supp));

    Rat max_a = base_a_.max_hi();
    Rat max_b = base_b_.max_hi();
    const Rat& min_a = base_a_.min_lo();
    const Rat& min_b = base_b_.min_lo();
    for (int m = base_; m <= top; ++m) {
        hull_lo_[static_cast<std::size_t>(m)] = min_b - max_a;
        hull_hi_[static_cast<std::size_t>(m)] = max_b - min_a;
        if (m == top) break;
        const auto& st = sched.stage(m);
        auto& sh = shifts_[static_cast<std::size_t>(m)];
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 4; ++k) {
                const Rat delta = st.offsets[i] - st.offsets[k];
                auto it = std::find_if(sh.begin(), sh.end(), [&](const Shift& x) { return x.delta == delta; });
                if (it == sh.end())
                    sh.push_back({delta, 1});
                else
                    ++it->multiplicity;
            }
        }
        max_a += st.offsets[3];
        max_b += st.offsets[3];
    }
}

void CorrelationKernel::check_stage(int stage) const {
    if (stage < base_ || stage > sched_->j_max())
        throw StageOutOfRange("kernel stage " + std::to_string(stage) + " outside " + std::to_string(base_) +
                              ".." + std::to_string(sched_->j_max()));
}

std::pair<Rat, Rat> CorrelationKernel::hull(int stage) const {
    check_stage(stage);
    if (empty_) return {Rat(0), Rat(0)};
    return {hull_lo_[static_cast<std::size_t>(stage)], hull_hi_[static_cast<std::size_t>(stage)]};
}

Rat CorrelationKernel::eval_rec(int m, const Rat& u) const {
    if (m == base_) return sched_->width(base_) * overlap_length(translate(base_a_, u), base_b_);
    const auto& lo = hull_lo_[static_cast<std::size_t>(m - 1)];
    const auto& hi = hull_hi_[static_cast<std::size_t>(m - 1)];
    Rat sum;
    for (const auto& sh : shifts_[static_cast<std::size_t>(m - 1)]) {
        const Rat v = u + sh.delta;
        if (lo < v && v < hi) sum += Rat(sh.multiplicity) * eval_rec(m - 1, v);
    }
    return sum / Rat(4);
}

Rat CorrelationKernel::evaluate(int stage, const Rat& t) const {
    check_stage(stage);
    if (empty_) return Rat(0);
    const auto& lo = hull_lo_[static_cast<std::size_t>(stage)];
    const auto& hi = hull_hi_[static_cast<std::size_t>(stage)];
    if (!(lo < t && t < hi)) return Rat(0);
    return eval_rec(stage, t);
}

void CorrelationKernel::collect_events(int m, const Rat& shift, const Rat& weight, const Rat& lo, const Rat& hi,
                                       std::vector<Event>& out) const {
    const auto& hl = hull_lo_[static_cast<std::size_t>(m)];
    const auto& hh = hull_hi_[static_cast<std::size_t>(m)];
    if (hi + shift <= hl || hh <= lo + shift) return;
    if (m == base_) {
        const Rat ww = weight * sched_->width(base_);
        for (const auto& ia : base_a_.intervals()) {
            for (const auto& ib : base_b_.intervals()) {
                const Rat first = ib.lo - ia.hi - shift;
                const Rat last = ib.hi - ia.lo - shift;
                if (last <= lo || hi <= first) continue;
                const Rat k1 = ib.lo - ia.lo - shift;
                const Rat k2 = ib.hi - ia.hi - shift;
                out.push_back({first, ww});
                out.push_back({min(k1, k2), -ww});
                out.push_back({max(k1, k2), -ww});
                out.push_back({last, ww});
            }
        }
        return;
    }
    for (const auto& sh : shifts_[static_cast<std::size_t>(m - 1)])
        collect_events(m - 1, shift + sh.delta, weight * Rat(sh.multiplicity) / Rat(4), lo, hi, out);
}

PiecewiseLinear CorrelationKernel::profile(int stage, const Rat& lo, const Rat& hi) const {
    check_stage(stage);
    if (hi < lo) throw Error("profile: empty window");
    if (empty_ || lo == hi) {
        return PiecewiseLinear({lo}, {empty_ ? Rat(0) : evaluate(stage, lo)});
    }
    std::vector<Event> events;
    collect_events(stage, Rat(0), Rat(1), lo, hi, events);
    std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.t < y.t; });

    Rat value, slope;
    std::size_t i = 0;
    for (; i < events.size() && events[i].t <= lo; ++i) {
        value += events[i].slope_change * (lo - events[i].t);
        slope += events[i].slope_change;
    }
    std::vector<Rat> ts{lo};
    std::vector<Rat> vs{value};
    Rat prev = lo;
    while (i < events.size() && events[i].t < hi) {
        const Rat t = events[i].t;
        value += slope * (t - prev);
        prev = t;
        for (; i < events.size() && events[i].t == t; ++i) slope += events[i].slope_change;
        ts.push_back(t);
        vs.push_back(value);
    }
    value += slope * (hi - prev);
    ts.push_back(hi);
    vs.push_back(value);

    // Drop interior breakpoints where the slope does not change.
    std::vector<Rat> ct{ts.front()};
    std::vector<Rat> cv{vs.front()};
    for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
        const Rat s_in = (vs[k] - cv.back()) / (ts[k] - ct.back());
        const Rat s_out = (vs[k + 1] - vs[k]) / (ts[k + 1] - ts[k]);
        if (s_in == s_out) continue;
        ct.push_back(ts[k]);
        cv.push_back(vs[k]);
    }
    ct.push_back(ts.back());
    cv.push_back(vs.back());
    return PiecewiseLinear(std::move(ct), std::move(cv));
}

void CorrelationKernel::collect_support(int m, const Rat& shift, const Rat& lo, const Rat& hi,
                                        std::vector<Interval>& out) const {
    const auto& hl = hull_lo_[static_cast<std::size_t>(m)];
    const auto& hh = hull_hi_[static_cast<std::size_t>(m)];
    if (hi + shift <= hl || hh <= lo + shift) return;
    if (m == base_) {
        for (const auto& iv : base_support_.intervals()) {
            const Rat a = max(iv.lo - shift, lo);
            const Rat b = min(iv.hi - shift, hi);
            if (a < b) out.push_back({a, b});
        }
        return;
    }
    for (const auto& sh : shifts_[static_cast<std::size_t>(m - 1)]) collect_support(m - 1, shift + sh.delta, lo, hi, out);
}

IntervalSet CorrelationKernel::support(int stage, const Rat& lo, const Rat& hi) const {
    check_stage(stage);
    if (empty_ || !(lo < hi)) return {};
    std::vector<Interval> parts;
    collect_support(stage, Rat(0), lo, hi, parts);
    return IntervalSet::from_unsorted(std::move(parts));
}

void CorrelationKernel::joint_rec(int sa, const Rat& ua, int sb, const Rat& ub, const Rat& d, const Rat& lo,
                                  const Rat& hi, std::vector<Interval>& out, std::size_t cap) const {
    if (out.size() >= cap) return;
    const Rat a_lo = hull_lo_[static_cast<std::size_t>(sa)] - ua;
    const Rat a_hi = hull_hi_[static_cast<std::size_t>(sa)] - ua;
    const Rat b_lo = (hull_lo_[static_cast<std::size_t>(sb)] - ub) / d;
    const Rat b_hi = (hull_hi_[static_cast<std::size_t>(sb)] - ub) / d;
    if (!(max(max(a_lo, b_lo), lo) < min(min(a_hi, b_hi), hi))) return;

    const bool a_leaf = sa == base_;
    const bool b_leaf = sb == base_;
    if (a_leaf && b_leaf) {
        const IntervalSet x = translate(base_support_, -ua);
        const IntervalSet y = scale(translate(base_support_, -ub), Rat(1) / d);
        const IntervalSet hit = clip(intersect(x, y), lo, hi);
        out.insert(out.end(), hit.intervals().begin(), hit.intervals().end());
        return;
    }
    const bool split_a = b_leaf || (!a_leaf && (b_hi - b_lo) < (a_hi - a_lo));
    if (split_a) {
        for (const auto& sh : shifts_[static_cast<std::size_t>(sa - 1)])
            joint_rec(sa - 1, ua + sh.delta, sb, ub, d, lo, hi, out, cap);
    } else {
        for (const auto& sh : shifts_[static_cast<std::size_t>(sb - 1)])
            joint_rec(sa, ua, sb - 1, ub + sh.delta, d, lo, hi, out, cap);
    }
}

IntervalSet CorrelationKernel::joint_support(int stage, int dilated_stage, const Rat& d, const Rat& lo,
                                             const Rat& hi, std::size_t cap) const {
    check_stage(stage);
    check_stage(dilated_stage);
    if (d.sign() <= 0) throw NonPositiveScale("dilation must be positive");
    if (empty_ || !(lo < hi)) return {};
    std::vector<Interval> parts;
    joint_rec(stage, Rat(0), dilated_stage, Rat(0), d, lo, hi, parts, cap);
    return IntervalSet::from_unsorted(std::move(parts));
}

// ---------------------------------------------------------------------------
// Free functions

Rat correlation(const SlabSet& a, const SlabSet& b, const Rat& t, const Schedule& sched) {
    if (t.sign() < 0) return correlation(b, a, -t, sched);
    const int J = std::max(min_valid_stage(a, t, sched), b.stage);
    return CorrelationKernel(a, b, sched).evaluate(J, t);
}

PiecewiseLinear correlation_profile(const SlabSet& a, const SlabSet& b, const Rat& lo, const Rat& hi,
                                    const Schedule& sched) {
    if (lo.sign() < 0) throw Error("correlation_profile: window must start at t >= 0");
    const int J = std::max(min_valid_stage(a, hi, sched), b.stage);
    return CorrelationKernel(a, b, sched).profile(J, lo, hi);
}

IntervalSet hitting_set(const SlabSet& a, const SlabSet& b, const Rat& lo, const Rat& hi, const Schedule& sched) {
    if (lo.sign() < 0) throw Error("hitting_set: window must start at t >= 0");
    const int J = std::max(min_valid_stage(a, hi, sched), b.stage);
    return CorrelationKernel(a, b, sched).support(J, lo, hi);
}

IntervalSet column_trace(const SlabSet& s, int j, int column, const Schedule& sched) {
    if (column < 1 || column > 4) throw Error("column must be 1..4");
    if (j < s.stage || j >= sched.j_max()) throw StageOutOfRange("column_trace: stage has no cut");
    const auto& st = sched.stage(j);
    const Rat& o = st.offsets[static_cast<std::size_t>(column - 1)];
    return clip(refine(s, j + 1, sched).levels, o, o + st.h);
}

IntervalSet dissipativity_witness(const Schedule& sched, const Rat& d, int window, const Rat& threshold) {
    if (window < 1 || window + 1 > sched.j_max())
        throw UncertifiedWindow("window " + std::to_string(window) + " is not inside the built schedule");
    const SlabSet y = base_tower(sched);
    const Rat& h_lo = sched.height(window);
    const Rat& h_hi = sched.height(window + 1);
    int stage = 0;
    int dilated = 0;
    try {
        stage = min_valid_stage(y, h_hi, sched);
        dilated = min_valid_stage(y, d * h_hi, sched);
    } catch (const HorizonExceeded&) {
        throw UncertifiedWindow("window " + std::to_string(window) + " needs more stages for d=" + d.to_string());
    }
    const CorrelationKernel kernel(y, y, sched);
    return kernel.joint_support(stage, dilated, d, max(h_lo, threshold), h_hi);
}

}  // namespace rankone
