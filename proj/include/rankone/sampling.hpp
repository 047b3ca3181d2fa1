#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rankone/oracle.hpp"
#include "rankone/verify.hpp"

namespace rankone {

using Rng = std::mt19937_64;

/// Uniform rational p/q in [lo, hi) with q drawn from 1..max_den.
Rat random_rational(Rng& rng, const Rat& lo, const Rat& hi, long max_den = 64);

struct OracleTriple {
    std::size_t a;  // indices into the family
    std::size_t b;
    Rat t;
};

/// Random (A, B, t) with t in [0, t_max). Odd-numbered triples draw t from
/// the positivity set of μ(T_t A ∩ B) when it is non-empty, so that the
/// comparison also covers times where the correlation does not vanish.
std::vector<OracleTriple> random_triples(Rng& rng, const std::vector<NamedSlab>& family, int count,
                                         const Rat& t_max, const Schedule& sched);

/// Random point of X_1 with dyadic-free rational coordinates.
oracle::PointState random_point(Rng& rng, const Schedule& sched);

struct MembershipCheck {
    bool agree = false;
    int stage = 0;
};

/// Advances p by t with the oracle and checks, at the stage it lands in,
/// that the height equals lift(p).height + t and that the descent test
/// `oracle::contains(b, .)` agrees with refine(b, stage).
MembershipCheck membership_check(const oracle::PointState& p, const Rat& t, const SlabSet& b,
                                 const Schedule& sched);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must only write
/// to slot i of caller-owned storage.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn);

}  // namespace rankone

#include <thread>

namespace rankone {

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, jobs < 1 ? 1 : jobs));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace rankone
