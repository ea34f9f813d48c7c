#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "parley/corpus.hpp"
#include "parley/embed.hpp"
#include "parley/warnings.hpp"

namespace parley {

using TagMap = std::map<long long, std::set<std::string>>;

// Mean-pool words through a static table, or read per-comment vectors that
// some external encoder produced. The precomputed path applies no stopword
// filtering; whatever produced the vectors already made that choice.
struct StaticPoolingBackend {
    const EmbeddingTable* table = nullptr;
    PoolingOptions options;
};

struct PrecomputedBackend {
    const DocVectorStore* store = nullptr;
};

using EmbeddingBackend = std::variant<StaticPoolingBackend, PrecomputedBackend>;

struct PartyPosition {
    std::string party;
    std::string issue;
    std::string period;
    std::optional<Eigen::VectorXd> vec;
    long long word_count = 0;  // tokens that contributed to the vector
    long long comment_count = 0;
};

// Token-count-weighted mean over the party's issue-tagged comments in the
// period (equal to pooling their concatenation). An empty period means no
// period restriction. NoData (vec empty) when nothing qualifies. Precomputed
// gaps throw MissingVector.
PartyPosition party_position(const std::vector<Comment>& corpus, const TagMap& tags,
                             const EmbeddingBackend& backend, const std::string& party,
                             const std::string& issue, const std::string& period,
                             GroupBy group_by);

enum class ReferenceMode { average, baseline };

// average: unweighted mean of the positions that have data (NoData parties
// warned and skipped). baseline: that party's vector verbatim. Throws
// NoReference when nothing usable remains.
Eigen::VectorXd reference_position(const std::vector<PartyPosition>& positions,
                                   ReferenceMode mode,
                                   const std::string& baseline_party = {},
                                   Warnings* warnings = nullptr);

struct ProfileEntry {
    std::string party;
    std::string issue;
    std::string period;
    std::optional<double> similarity;  // distance = 1 - similarity
};

struct DistanceProfile {
    std::string reference_kind;  // "average" or "baseline:<party>"
    std::vector<ProfileEntry> entries;
};

DistanceProfile distance_profile(const std::vector<PartyPosition>& positions,
                                 const Eigen::VectorXd& reference,
                                 const std::string& reference_kind);

struct HeatmapReport {
    std::string issue;
    std::vector<std::string> parties;
    Eigen::MatrixXd similarity;  // NaN where a side has no data
    Eigen::MatrixXi levels;      // 1 closest .. 4 farthest, 0 missing
    // levels bin similarity into 4 equal widths over [bin_low, 1]
    double bin_low = 1.0;
    double bin_width = 0.0;
};

// Pairwise cosine over the given positions (one issue). Throws
// InsufficientParties when fewer than two have data.
HeatmapReport pairwise_heatmap(const std::vector<PartyPosition>& positions,
                               const std::string& issue);

struct PartyActivityRow {
    std::string party;
    long long words = 0;
};

// Words per party for one issue and period; shared statements count toward
// each organisation involved. Rows sorted by party, zero rows absent.
std::vector<PartyActivityRow> party_activity(const std::vector<Comment>& corpus,
                                             const TagMap& tags,
                                             const std::string& issue,
                                             const std::string& period,
                                             GroupBy group_by);

struct UncertaintyParams {
    double fraction = 0.10;
    int reps = 20;
    std::uint64_t seed = 0;
};

struct UncertaintyMargin {
    std::string party;
    std::string issue;
    std::string period;
    std::optional<double> margin;  // max over reps of 1 - cosine
    int reps = 0;
    double fraction = 0.0;
};

// Per rep: drop whole comments, chosen by seeded shuffle, until at least
// fraction of the party's contributing tokens (and at least one comment) is
// gone, then re-pool and record the cosine shift. Margin is the worst rep.
// Parties with fewer than two comments get NoData with a warning.
UncertaintyMargin estimate_uncertainty(const std::vector<Comment>& corpus,
                                       const TagMap& tags,
                                       const EmbeddingBackend& backend,
                                       const std::string& party,
                                       const std::string& issue,
                                       const std::string& period, GroupBy group_by,
                                       const UncertaintyParams& params,
                                       Warnings* warnings = nullptr);

}  // namespace parley
