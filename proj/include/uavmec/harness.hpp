#ifndef UAVMEC_HARNESS_HPP_
#define UAVMEC_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "uavmec/baselines.hpp"
#include "uavmec/orchestrator.hpp"

namespace uavmec {
namespace harness {

struct ExperimentSpec {
    std::string id = "default";
    std::string scenario_file;  // when set, overrides the generator for the trace runs
    int num_uavs = 10;
    int default_users = 50;
    double region_side_m = 400.0;
    std::vector<int> user_sweep = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    std::vector<double> rho_sweep = {1.0, 5.0, 10.0, 15.0};
    std::vector<std::string> schemes = {"proposed", "centralized", "exhaustive", "greedy",
                                        "non_collaboration"};
    int repeats = 10;
    std::uint64_t seed_base = 1;
    std::string out_dir = "results";
    std::uint64_t exhaustive_guard = 10'000'000;
    orchestrator::Options solver;

    void validate() const;
};

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

/// FNV-1a hash of the canonical spec serialization; stamped into every CSV.
std::uint64_t config_hash(const ExperimentSpec& spec);

/// Runs every experiment family and writes the CSVs plus summary.json under
/// spec.out_dir. Per-point solver infeasibilities are recorded in the
/// summary without aborting the sweep. Returns the output directory.
std::string run(const ExperimentSpec& spec);

struct SchemeStats {
    std::string scheme;
    double mean_latency_ms = 0.0;
    double gap_vs_proposed_pct = 0.0;
    int samples = 0;
};

struct Comparison {
    std::vector<SchemeStats> stats;
    bool ordering_ok = false;       // proposed <= exhaustive <= greedy <= non_collaboration
    bool centralized_close = false; // proposed within 1% of centralized
    std::string text;
};

/// Reads fixed_instance.csv from a results directory and emits the scheme
/// comparison (text plus comparison.csv).
Comparison compare(const std::string& results_dir);

}  // namespace harness
}  // namespace uavmec

#endif  // UAVMEC_HARNESS_HPP_
