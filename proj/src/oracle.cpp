#include "rankone/oracle.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone::oracle {

namespace {

long floor_to_long(const Rat& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    return q.get_si();
}

void climb(PointState& p, const Schedule& sched) {
    if (p.stage >= sched.j_max())
        throw HorizonExceeded("orbit leaves the top tower X_" + std::to_string(sched.j_max()));
    const auto& st = sched.stage(p.stage);
    const Rat& col_width = sched.width(p.stage + 1);
    const long i = std::clamp(floor_to_long(p.x / col_width), 0L, 3L);
    p.x -= Rat(i) * col_width;
    p.height += st.offsets[static_cast<std::size_t>(i)];
    p.column_path.push_back(static_cast<int>(i) + 1);
    ++p.stage;
}

}  // namespace

PointState orbit_advance(const PointState& p, const Rat& t, const Schedule& sched) {
    if (t.sign() < 0) throw Error("orbit_advance: t must be non-negative");
    PointState q = p;
    while (!(q.height + t < sched.height(q.stage))) climb(q, sched);
    q.height += t;
    return q;
}

PointState lift(const PointState& p, int stage, const Schedule& sched) {
    PointState q = p;
    while (q.stage < stage) climb(q, sched);
    return q;
}

bool contains(const SlabSet& s, const PointState& p, const Schedule& sched) {
    PointState q = lift(p, s.stage, sched);
    Rat y = q.height;
    for (int m = q.stage; m > s.stage; --m) {
        const auto& st = sched.stage(m - 1);
        bool found = false;
        for (const auto& o : st.offsets) {
            if (o <= y && y < o + st.h) {
                y -= o;
                found = true;
                break;
            }
        }
        if (!found) return false;  // spacer above a column
    }
    return s.levels.contains(y);
}

Estimate oracle_correlation(const SlabSet& a, const SlabSet& b, const Rat& t, long n, const Schedule& sched) {
    if (n < 1) throw Error("oracle_correlation: n must be positive");
    if (t.sign() < 0) throw Error("oracle_correlation: t must be non-negative");
    Estimate est;
    const Rat length = a.levels.total_length();
    if (length.is_zero() || b.levels.empty()) return est;

    // Deepest stage any orbit from X_a.stage can need: the topmost copy of
    // X_a climbs by the last offset at every cut.
    const int k = a.stage;
    int stage = k;
    Rat top = sched.height(k);
    while (top + t > sched.height(stage)) {
        if (stage >= sched.j_max()) throw HorizonExceeded("oracle: time " + t.to_string() + " beyond horizon");
        top += sched.stage(stage).offsets[3];
        ++stage;
    }
    est.depth = std::max(stage, b.stage) - k;
    if (est.depth > 10) throw Error("oracle: grid depth too large");
    const long lateral = 1L << (2 * est.depth);
    const long vertical = std::max(1L, (n + lateral - 1) / lateral);
    est.samples = lateral * vertical;

    const auto& parts = a.levels.intervals();
    const Rat width = sched.width(k);
    long hits = 0;
    for (long v = 0; v < vertical; ++v) {
        // Arc-length midpoint of cell v mapped back onto the levels of A.
        Rat u = length * Rat(2 * v + 1, 2 * vertical);
        std::size_t idx = 0;
        while (!(u < parts[idx].length())) {
            u -= parts[idx].length();
            ++idx;
        }
        const Rat y = parts[idx].lo + u;
        for (long c = 0; c < lateral; ++c) {
            PointState p{k, width * Rat(2 * c + 1, 2 * lateral), y, {}};
            if (contains(b, orbit_advance(p, t, sched), sched)) ++hits;
        }
    }
    const Rat measure = width * length;
    est.value = measure * Rat(hits) / Rat(est.samples);

    // Per lateral cell the hit indicator along arc length switches at most
    // at the gaps of A and at the edges of the copies of X_{kb} met by a
    // range of length h_k: two when kb >= k, else two copies of X_k worth.
    const long copies = b.stage >= k ? 2L : 2L << (2 * (k - b.stage));
    const long edges = 2 * static_cast<long>(b.levels.size()) * copies + static_cast<long>(parts.size());
    est.bound = measure * Rat(edges) / Rat(vertical);
    return est;
}

}  // namespace rankone::oracle
