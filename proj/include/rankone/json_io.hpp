#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "rankone/levelset.hpp"
#include "rankone/oracle.hpp"
#include "rankone/schedule.hpp"
#include "rankone/verify.hpp"

namespace rankone {

using json = nlohmann::json;

/// Defaults consumed by the verification commands.
struct VerifyDefaults {
    std::vector<int> family_stages{1, 2};
    std::vector<int> family_splits{1, 2, 4};
    std::vector<int> perturbed_stages{1};
    std::vector<int> perturbed_splits{1, 2};
    long oracle_samples = 10000;
    int oracle_triples = 50;
    DensityGrid density;
};

/// Everything `build` and `verify` read from the JSON config.
struct LabConfig {
    Rat w1{1};
    Rat h1{1};
    std::vector<Rat> C;
    std::vector<Rat> D;
    int j_max = 8;
    GrowthPolicy policy;
    PerturbationConfig perturbation;
    VerifyDefaults verify;
};

/// Desk configuration: w1 = h1 = 1, C = (3/2, 5/2), D = (2, 3), J_max = 8.
LabConfig default_config();

json rat_to_json(const Rat& r);
/// Accepts "p/q" strings and JSON integers. Throws ParseError.
Rat rat_from_json(const json& j);

json to_json(const IntervalSet& s);
IntervalSet interval_set_from_json(const json& j);

/// Validates every field (types, ranges, C ∩ D = ∅). Throws ParseError or
/// InvalidTargets; missing optional fields take the defaults.
LabConfig config_from_json(const json& j);
json to_json(const LabConfig& c);

json to_json(const Schedule& s);
/// Parses and checks the stored recurrences. Throws ParseError.
Schedule schedule_from_json(const json& j);

json to_json(const SlabSet& s);
json to_json(const PiecewiseLinear& p);
json to_json(const WeakLimitReport& r);
json to_json(const DissipativityCertificate& c, const Schedule& sched);
json to_json(const PerturbedLimitReport& r);
json to_json(const SingularityEvidence& e);
json to_json(const oracle::Estimate& e);

}  // namespace rankone
