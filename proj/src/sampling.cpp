#include "rankone/sampling.hpp"

namespace rankone {

Rat random_rational(Rng& rng, const Rat& lo, const Rat& hi, long max_den) {
    std::uniform_int_distribution<long> den_dist(1, max_den);
    const long q = den_dist(rng);
    // p/q uniform on the grid (1/q)Z ∩ [lo, hi)
    const Rat span = (hi - lo) * Rat(q);
    const mpz_class cells = span.raw().get_num() / span.raw().get_den();
    if (cells <= 0) return lo;
    mpz_class k;
    if (cells.fits_ulong_p()) {
        std::uniform_int_distribution<unsigned long> cell(0, cells.get_ui() - 1);
        k = cell(rng);
    } else {
        // 64 spare bits keep the modulo bias below 2^-64
        const std::size_t chunks = mpz_sizeinbase(cells.get_mpz_t(), 2) / 64 + 2;
        for (std::size_t i = 0; i < chunks; ++i) {
            k <<= 64;
            k += mpz_class(std::to_string(rng()));
        }
        k %= cells;
    }
    return lo + Rat(mpq_class(k, 1)) / Rat(q);
}

std::vector<OracleTriple> random_triples(Rng& rng, const std::vector<NamedSlab>& family, int count,
                                         const Rat& t_max, const Schedule& sched) {
    std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
    std::vector<OracleTriple> out;
    for (int i = 0; i < count; ++i) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        Rat t = random_rational(rng, Rat(0), t_max);
        if (i % 2 == 1) {
            const IntervalSet hits = hitting_set(family[a].set, family[b].set, Rat(0), t_max, sched);
            if (!hits.empty()) {
                std::uniform_int_distribution<std::size_t> iv(0, hits.size() - 1);
                const Interval& h = hits.intervals()[iv(rng)];
                t = random_rational(rng, h.lo, h.hi, 1024);
            }
        }
        out.push_back({a, b, std::move(t)});
    }
    return out;
}

oracle::PointState random_point(Rng& rng, const Schedule& sched) {
    oracle::PointState p;
    p.stage = 1;
    p.x = random_rational(rng, Rat(0), sched.width(1), 1000003);
    p.height = random_rational(rng, Rat(0), sched.height(1), 1000033);
    return p;
}

MembershipCheck membership_check(const oracle::PointState& p, const Rat& t, const SlabSet& b,
                                 const Schedule& sched) {
    const oracle::PointState q = oracle::orbit_advance(p, t, sched);
    const oracle::PointState base = oracle::lift(p, q.stage, sched);
    MembershipCheck out;
    out.stage = q.stage;
    const bool same_fibre = base.x == q.x && base.height + t == q.height;
    const oracle::PointState top = oracle::lift(q, std::max(q.stage, b.stage), sched);
    const bool by_descent = oracle::contains(b, q, sched);
    const bool by_refine = refine(b, top.stage, sched).levels.contains(top.height);
    out.agree = same_fibre && by_descent == by_refine;
    return out;
}

}  // namespace rankone
