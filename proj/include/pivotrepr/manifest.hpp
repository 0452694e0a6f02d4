#pragma once

#include <optional>
#include <string>

#include "pivotrepr/config.hpp"
#include "pivotrepr/evalharness.hpp"
#include "pivotrepr/synthgen.hpp"

namespace pivotrepr {

ExperimentConfig experiment_config_from(const Config& cfg, Method method, std::uint64_t seed);
GeneratorConfig generator_config_from(const Config& cfg, std::uint64_t seed);

// Full `experiment` subcommand body: resolve corpora (loaded or synthetic),
// run every configured method, write <out_dir>/results.tsv and
// <out_dir>/summary.json.
void run_experiment_manifest(const Config& cfg, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override,
                             bool exact_mcnemar = false);

}  // namespace pivotrepr
