#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "parley/corpus.hpp"
#include "parley/issues_latent.hpp"
#include "parley/issues_query.hpp"
#include "parley/positions.hpp"
#include "parley/synth.hpp"

namespace parley {

// Everything a run needs, with the published defaults filled in. Paths are
// validated by the subcommand that needs them, values here.
struct RunConfig {
    std::string notes_dir;
    std::string embedding_table;
    std::optional<std::string> doc_vectors;
    std::string output_dir;
    std::optional<std::string> stopwords_path;

    NormalizationConfig normalization;
    IssueCatalog issues;
    QueryParams query;

    struct NmfConfig {
        NMFParams params;
        int max_features = 10000;
        double max_df = 0.9;
        int keywords = 10;
        int representatives = 10;
        bool sweep = false;  // also fit every k in [sweep_min, sweep_max]
        int sweep_min = 5;
        int sweep_max = 30;
    } nmf;

    std::vector<std::string> parties;
    std::optional<std::string> baseline_party;
    UncertaintyParams uncertainty;
    GroupBy group_by = GroupBy::year;

    bool exclude_multi_party = true;
    bool emit_svg = false;
    // reference shared across issues instead of one per issue
    bool global_reference = false;
    // diagnostics keep stopwords unless asked otherwise
    bool diagnostics_remove_stopwords = false;
    // write every running-mean component, not just the extrema
    bool diagnostics_full_components = false;
    // extra per-seed tagging breakdown for debugging expansion behaviour
    bool debug_per_seed_tags = false;

    struct FilterConfig {
        FilterCriteria criteria;
        std::string output = "filtered.csv";
    };
    std::optional<FilterConfig> filter;

    std::optional<SynthSpec> synth;
    std::optional<std::string> diag_stream1;
    std::optional<std::string> diag_stream2;
};

// Parses and validates; unknown values and out-of-range parameters raise
// ConfigError naming the dotted field.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

// Canonical snapshot of every effective parameter (defaults included), used
// for the manifest and its hash.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace parley
