#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decorr/config.hpp"
#include "decorr/metrics.hpp"

namespace decorr {

struct SeedRunResult {
    std::uint64_t seed = 0;
    bool diverged = false;
    long diverged_at_step = -1;
    std::string error;
    std::string csv_path;
    std::string checkpoint_path;
    std::vector<MetricsRecord> records;
};

struct RunArtifact {
    std::string dir;
    std::string spec_hash;
    std::string env_id;
    std::string name;
    std::vector<SeedRunResult> seeds;
    std::string aggregate_csv_path;
    std::string manifest_path;
};

// Trains every seed (in parallel when hardware allows), writing
// <output_dir>/<name>/seed_<seed>.csv incrementally (flushed per checkpoint),
// a final checkpoint per seed, an aggregate CSV (mean and std across seeds
// per checkpoint, rows only for checkpoints present in all seeds), and a
// manifest. A diverging seed is recorded and the rest continue.
RunArtifact run_experiment(const ExperimentSpec& spec);

// Reads a previously written artifact directory (manifest + CSVs).
RunArtifact load_artifact(const std::string& dir);

}  // namespace decorr
