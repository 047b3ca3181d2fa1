#include "rankone/schedule.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone {

namespace {

void check_list(const std::vector<Rat>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= Rat(1))
            throw InvalidTargets(std::string(name) + " entries must exceed 1, got " + v[i].to_string());
        for (std::size_t k = 0; k < i; ++k)
            if (v[k] == v[i])
                throw InvalidTargets(std::string("duplicate entry in ") + name + ": " + v[i].to_string());
    }
}

}  // namespace

TargetSets::TargetSets(std::vector<Rat> c, std::vector<Rat> d) : c_(std::move(c)), d_(std::move(d)) {
    check_list(c_, "C");
    check_list(d_, "D");
    for (const auto& x : c_)
        if (in_D(x)) throw InvalidTargets("C and D intersect at " + x.to_string());
}

bool TargetSets::in_C(const Rat& x) const { return std::find(c_.begin(), c_.end(), x) != c_.end(); }
bool TargetSets::in_D(const Rat& x) const { return d_index(x) != 0; }

int TargetSets::d_index(const Rat& x) const {
    auto it = std::find(d_.begin(), d_.end(), x);
    return it == d_.end() ? 0 : static_cast<int>(it - d_.begin()) + 1;
}

Rat GrowthPolicy::gauge(int j) const { return max(gauge_floor, pow(gauge_base, static_cast<unsigned>(j))); }

const StageParams& Schedule::stage(int j) const {
    if (j < 1 || j > j_max())
        throw StageOutOfRange("stage " + std::to_string(j) + " outside built range 1.." +
                              std::to_string(j_max()));
    return stages[static_cast<std::size_t>(j - 1)];
}

}  // namespace rankone
