#include "rankone/construction.hpp"

#include <algorithm>
#include <map>

#include "rankone/levelset.hpp"

namespace rankone {

EscalationExhausted::EscalationExhausted(int window, Rat d, IntervalSet witness)
    : Error("dissipativity certificate for d=" + d.to_string() + " still fails on window " +
            std::to_string(window) + " after the retry budget"),
      window_(window),
      d_(std::move(d)),
      witness_(std::move(witness)) {}

std::vector<Rat> enumerate_c(std::span<const Rat> c, int j_max) {
    if (c.empty()) throw EmptyTargets("C must be non-empty");
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(std::max(j_max, 0)));
    for (std::size_t block = 1; static_cast<int>(out.size()) < j_max; ++block) {
        const std::size_t len = std::min(block, c.size());
        for (std::size_t i = 0; i < len && static_cast<int>(out.size()) < j_max; ++i) out.push_back(c[i]);
    }
    return out;
}

std::vector<std::pair<Rat, Rat>> perturbation_schedule(std::span<const Rat> c_sequence, int net_depth) {
    if (net_depth < 1) throw Error("net_depth must be >= 1");
    const long cells = 1L << net_depth;
    const long side = cells + 1;
    std::vector<std::pair<Rat, Rat>> out;
    out.reserve(c_sequence.size());
    std::map<std::string, long> visits;
    for (const auto& c : c_sequence) {
        const long n = visits[c.to_string()]++ % (side * side);
        out.emplace_back(Rat(n / side, cells), Rat(n % side, cells));
    }
    return out;
}

namespace {

// Fills spacers/offsets of stage `st` (which must have h, c, multiplier and
// deltas set) and returns h of the next tower.
Rat cut_stage(StageParams& st) {
    st.has_cut = true;
    st.s[0] = st.delta1;
    st.s[1] = st.multiplier * st.h;
    st.s[2] = (st.c - Rat(1)) * st.h + st.delta3;
    st.s[3] = st.multiplier * st.s[1];
    st.offsets[0] = Rat(0);
    for (int i = 1; i < 4; ++i) st.offsets[i] = st.offsets[i - 1] + st.h + st.s[i - 1];
    return st.offsets[3] + st.h + st.s[3];
}

Rat next_height(const StageParams& st) { return st.offsets[3] + st.h + st.s[3]; }

void recompute_offsets(StageParams& st) {
    st.offsets[0] = Rat(0);
    for (int i = 1; i < 4; ++i) st.offsets[i] = st.offsets[i - 1] + st.h + st.s[i - 1];
}

}  // namespace

Schedule assemble_schedule(const Rat& w1, const Rat& h1, const TargetSets& targets,
                           const GrowthPolicy& policy, const PerturbationConfig& perturbation,
                           std::span<const Rat> c_sequence, std::span<const Rat> multipliers,
                           std::span<const std::pair<Rat, Rat>> deltas) {
    const int j_max = static_cast<int>(c_sequence.size());
    if (w1.sign() <= 0 || h1.sign() <= 0) throw Error("w1 and h1 must be positive");
    if (j_max < 1 || static_cast<int>(multipliers.size()) < j_max - 1 ||
        static_cast<int>(deltas.size()) < j_max - 1)
        throw Error("assemble_schedule: parameter sequences too short");

    Schedule s;
    s.w1 = w1;
    s.h1 = h1;
    s.targets = targets;
    s.policy = policy;
    s.perturbation = perturbation;
    s.stages.resize(static_cast<std::size_t>(j_max));
    Rat h = h1;
    Rat w = w1;
    for (int j = 1; j <= j_max; ++j) {
        auto& st = s.stages[static_cast<std::size_t>(j - 1)];
        st.j = j;
        st.c = c_sequence[static_cast<std::size_t>(j - 1)];
        st.h = h;
        st.w = w;
        if (j == j_max) break;
        st.multiplier = multipliers[static_cast<std::size_t>(j - 1)];
        st.delta1 = deltas[static_cast<std::size_t>(j - 1)].first;
        st.delta3 = deltas[static_cast<std::size_t>(j - 1)].second;
        h = cut_stage(st);
        w = w / Rat(4);
    }
    return s;
}

Schedule build_schedule(const Rat& w1, const Rat& h1, const TargetSets& targets, int j_max,
                        const GrowthPolicy& policy, const PerturbationConfig& perturbation) {
    if (targets.C().empty()) throw EmptyTargets("C must be non-empty");
    if (j_max < 2) throw Error("j_max must be at least 2");
    if (policy.escalation_factor <= Rat(1)) throw Error("escalation factor must exceed 1");

    const auto c_seq = enumerate_c(targets.C(), j_max);
    const std::size_t cuts = static_cast<std::size_t>(j_max - 1);
    std::vector<std::pair<Rat, Rat>> deltas(cuts, {Rat(0), Rat(0)});
    if (perturbation.enabled) {
        auto p = perturbation_schedule(c_seq, perturbation.net_depth);
        std::copy_n(p.begin(), cuts, deltas.begin());
    }
    std::vector<Rat> mult(cuts);
    for (std::size_t i = 0; i < cuts; ++i) mult[i] = policy.initial_multiplier * policy.gauge(static_cast<int>(i) + 1);

    std::vector<EscalationEvent> events;
    std::map<int, int> retries;
    const auto& D = targets.D();
    int start_window = 1;
    for (;;) {
        Schedule s = assemble_schedule(w1, h1, targets, policy, perturbation, c_seq, mult, deltas);
        bool failed = false;
        for (int j = start_window; j <= s.last_certified_window() && !failed; ++j) {
            for (int k = 1; k <= static_cast<int>(D.size()) && !failed; ++k) {
                if (s.entry_stage(k) > j) continue;
                const Rat& d = D[static_cast<std::size_t>(k - 1)];
                IntervalSet witness = dissipativity_witness(s, d, j, s.height(s.entry_stage(k)));
                if (witness.empty()) continue;
                failed = true;
                if (++retries[j] > policy.max_retries) throw EscalationExhausted(j, d, witness);
                const int first = std::max(1, j - 1);
                for (int e = first; e <= j; ++e) mult[static_cast<std::size_t>(e - 1)] *= policy.escalation_factor;
                events.push_back({j, d, std::move(witness), first, mult[static_cast<std::size_t>(first - 1)]});
                start_window = std::max(1, first - 1);
            }
        }
        if (!failed) {
            s.escalations = std::move(events);
            return s;
        }
    }
}

Schedule with_spacer_override(const Schedule& sched, int j, int slot, const Rat& value) {
    if (j < 1 || j >= sched.j_max()) throw StageOutOfRange("stage " + std::to_string(j) + " has no cut");
    if (slot < 1 || slot > 4) throw Error("spacer slot must be 1..4");
    if (value.sign() < 0) throw Error("spacer heights must be non-negative");
    Schedule out = sched;
    out.escalations.clear();
    auto& st = out.stages[static_cast<std::size_t>(j - 1)];
    st.s[static_cast<std::size_t>(slot - 1)] = value;
    recompute_offsets(st);
    Rat h = next_height(st);
    for (int k = j + 1; k <= out.j_max(); ++k) {
        auto& nx = out.stages[static_cast<std::size_t>(k - 1)];
        nx.h = h;
        if (!nx.has_cut) break;
        h = cut_stage(nx);
    }
    return out;
}

std::string check_consistency(const Schedule& s) {
    if (s.stages.empty()) return "no stages";
    if (s.stages[0].h != s.h1 || s.stages[0].w != s.w1) return "stage 1 does not match w1/h1";
    for (int j = 1; j <= s.j_max(); ++j) {
        const auto& st = s.stage(j);
        const std::string at = " at stage " + std::to_string(j);
        if (st.j != j) return "stage index mismatch" + at;
        if (st.has_cut != (j < s.j_max())) return "cut flag mismatch" + at;
        if (!st.has_cut) continue;
        const auto& nx = s.stage(j + 1);
        Rat sum;
        for (const auto& x : st.s) {
            if (x.sign() < 0) return "negative spacer" + at;
            sum += x;
        }
        if (nx.h != Rat(4) * st.h + sum) return "height recurrence violated" + at;
        if (nx.w * Rat(4) != st.w) return "width recurrence violated" + at;
        if (st.offsets[0] != Rat(0)) return "first offset not zero" + at;
        for (int i = 1; i < 4; ++i)
            if (st.offsets[i] != st.offsets[i - 1] + st.h + st.s[i - 1]) return "offset recurrence violated" + at;
        if (st.offsets[3] + st.h + st.s[3] != nx.h) return "top offset inconsistent" + at;
    }
    return {};
}

}  // namespace rankone
