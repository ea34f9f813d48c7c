#include "parley/positions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parley/errors.hpp"
#include "parley/rng.hpp"

namespace parley {

namespace {

bool qualifies(const Comment& c, const TagMap& tags, const std::string& party,
               const std::string& issue, const std::string& period, GroupBy group_by) {
    if (!comment_belongs_to(c, party)) return false;
    if (!period.empty() && period_key(c.meta, group_by) != period) return false;
    auto it = tags.find(c.id);
    return it != tags.end() && it->second.count(issue) > 0;
}

// (vector sum, contributing token count) of one comment under the backend
std::pair<Eigen::VectorXd, long long> comment_contribution(
    const Comment& c, const EmbeddingBackend& backend) {
    if (const auto* pooling = std::get_if<StaticPoolingBackend>(&backend)) {
        const auto& table = *pooling->table;
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dimension());
        long long count = 0;
        for (const auto& tok : tokenize(c.text)) {
            if (pooling->options.remove_stopwords &&
                pooling->options.stopword_list.count(tok))
                continue;
            if (!table.contains(tok)) continue;
            sum += table.vector_of(tok);
            ++count;
        }
        return {std::move(sum), count};
    }
    const auto& store = *std::get<PrecomputedBackend>(backend).store;
    const auto count = static_cast<long long>(token_count(c.text));
    if (count == 0) return {Eigen::VectorXd::Zero(store.dimension()), 0};
    return {static_cast<double>(count) * store.vector_of(c.id), count};
}

}  // namespace

PartyPosition party_position(const std::vector<Comment>& corpus, const TagMap& tags,
                             const EmbeddingBackend& backend, const std::string& party,
                             const std::string& issue, const std::string& period,
                             GroupBy group_by) {
    PartyPosition pos;
    pos.party = party;
    pos.issue = issue;
    pos.period = period;
    Eigen::VectorXd sum;
    for (const auto& c : corpus) {
        if (!qualifies(c, tags, party, issue, period, group_by)) continue;
        ++pos.comment_count;
        auto [vec, count] = comment_contribution(c, backend);
        if (count == 0) continue;
        if (sum.size() == 0) sum = Eigen::VectorXd::Zero(vec.size());
        sum += vec;
        pos.word_count += count;
    }
    if (pos.word_count > 0) pos.vec = sum / static_cast<double>(pos.word_count);
    return pos;
}

Eigen::VectorXd reference_position(const std::vector<PartyPosition>& positions,
                                   ReferenceMode mode,
                                   const std::string& baseline_party,
                                   Warnings* warnings) {
    if (mode == ReferenceMode::baseline) {
        for (const auto& p : positions) {
            if (p.party != baseline_party) continue;
            if (p.vec) return *p.vec;
            throw NoReference("baseline party " + baseline_party + " has no data");
        }
        throw NoReference("baseline party " + baseline_party + " not among positions");
    }
    Eigen::VectorXd sum;
    long n = 0;
    for (const auto& p : positions) {
        if (!p.vec) {
            warn(warnings, "party " + p.party + " has no data on " + p.issue +
                               " in " + p.period + ", excluded from the average");
            continue;
        }
        if (sum.size() == 0) sum = Eigen::VectorXd::Zero(p.vec->size());
        sum += *p.vec;
        ++n;
    }
    if (n == 0) throw NoReference("no party has data");
    if (n == 1) warn(warnings, "average reference built from a single party");
    return sum / static_cast<double>(n);
}

DistanceProfile distance_profile(const std::vector<PartyPosition>& positions,
                                 const Eigen::VectorXd& reference,
                                 const std::string& reference_kind) {
    DistanceProfile profile;
    profile.reference_kind = reference_kind;
    for (const auto& p : positions) {
        ProfileEntry e{p.party, p.issue, p.period, std::nullopt};
        if (p.vec) {
            try {
                e.similarity = cosine(*p.vec, reference);
            } catch (const ZeroVector&) {
            }
        }
        profile.entries.push_back(std::move(e));
    }
    return profile;
}

HeatmapReport pairwise_heatmap(const std::vector<PartyPosition>& positions,
                               const std::string& issue) {
    HeatmapReport report;
    report.issue = issue;
    const long n = static_cast<long>(positions.size());
    long with_data = 0;
    for (const auto& p : positions) {
        report.parties.push_back(p.party);
        if (p.vec) ++with_data;
    }
    if (with_data < 2)
        throw InsufficientParties("pairwise heatmap for " + issue + " needs 2 parties with data, have " +
                                  std::to_string(with_data));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.similarity = Eigen::MatrixXd::Constant(n, n, nan);
    report.levels = Eigen::MatrixXi::Zero(n, n);
    double min_off = 1.0;
    for (long i = 0; i < n; ++i) {
        if (!positions[i].vec) continue;
        report.similarity(i, i) = 1.0;
        for (long j = i + 1; j < n; ++j) {
            if (!positions[j].vec) continue;
            double s;
            try {
                s = cosine(*positions[i].vec, *positions[j].vec);
            } catch (const ZeroVector&) {
                continue;
            }
            report.similarity(i, j) = s;
            report.similarity(j, i) = s;
            min_off = std::min(min_off, s);
        }
    }
    report.bin_low = min_off;
    report.bin_width = (1.0 - min_off) / 4.0;
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            const double s = report.similarity(i, j);
            if (std::isnan(s)) continue;
            int level = 1;
            // a range at rounding-noise scale is flat, not four bands
            if (report.bin_width > 1e-12) {
                level = 4 - static_cast<int>(std::floor((s - min_off) / report.bin_width));
                level = std::clamp(level, 1, 4);
            }
            report.levels(i, j) = level;
        }
    }
    return report;
}

std::vector<PartyActivityRow> party_activity(const std::vector<Comment>& corpus,
                                             const TagMap& tags,
                                             const std::string& issue,
                                             const std::string& period,
                                             GroupBy group_by) {
    std::map<std::string, long long> words;
    for (const auto& c : corpus) {
        if (period_key(c.meta, group_by) != period) continue;
        auto it = tags.find(c.id);
        if (it == tags.end() || !it->second.count(issue)) continue;
        const auto count = static_cast<long long>(token_count(c.text));
        if (count == 0) continue;
        words[c.organisation] += count;
        for (const auto& org : c.multi_organisations)
            if (org != c.organisation) words[org] += count;
    }
    std::vector<PartyActivityRow> rows;
    for (const auto& [party, count] : words) rows.push_back({party, count});
    return rows;
}

UncertaintyMargin estimate_uncertainty(const std::vector<Comment>& corpus,
                                       const TagMap& tags,
                                       const EmbeddingBackend& backend,
                                       const std::string& party,
                                       const std::string& issue,
                                       const std::string& period, GroupBy group_by,
                                       const UncertaintyParams& params,
                                       Warnings* warnings) {
    if (params.reps < 1) throw InvalidParams("reps must be >= 1");
    if (!(params.fraction > 0.0 && params.fraction < 1.0))
        throw InvalidParams("fraction must lie in (0, 1)");

    UncertaintyMargin result;
    result.party = party;
    result.issue = issue;
    result.period = period;
    result.reps = params.reps;
    result.fraction = params.fraction;

    struct Part {
        Eigen::VectorXd sum;
        long long count;
    };
    std::vector<Part> parts;
    for (const auto& c : corpus) {
        if (!qualifies(c, tags, party, issue, period, group_by)) continue;
        auto [vec, count] = comment_contribution(c, backend);
        if (count == 0) continue;
        parts.push_back({std::move(vec), count});
    }
    if (parts.size() < 2) {
        warn(warnings, "party " + party + " on " + issue + " in " + period + " has " +
                           std::to_string(parts.size()) +
                           " usable comments, too few to resample");
        return result;
    }

    Eigen::VectorXd total_sum = Eigen::VectorXd::Zero(parts.front().sum.size());
    long long total_count = 0;
    for (const auto& p : parts) {
        total_sum += p.sum;
        total_count += p.count;
    }
    const Eigen::VectorXd original = total_sum / static_cast<double>(total_count);
    const double target = params.fraction * static_cast<double>(total_count);

    double worst = -1.0;
    for (int rep = 0; rep < params.reps; ++rep) {
        Rng rng(Rng::mix(params.seed, static_cast<std::uint64_t>(rep)));
        std::vector<std::size_t> order(parts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);

        Eigen::VectorXd sum = total_sum;
        long long count = total_count;
        double removed = 0.0;
        for (std::size_t i = 0; i < order.size() && removed < target; ++i) {
            const auto& p = parts[order[i]];
            sum -= p.sum;
            count -= p.count;
            removed += static_cast<double>(p.count);
        }
        if (count <= 0) continue;  // everything fell out; rep carries no signal
        const Eigen::VectorXd perturbed = sum / static_cast<double>(count);
        try {
            worst = std::max(worst, 1.0 - cosine(original, perturbed));
        } catch (const ZeroVector&) {
        }
    }
    if (worst >= 0.0)
        result.margin = std::max(worst, 0.0);
    else
        warn(warnings, "party " + party + " on " + issue + " in " + period +
                           ": no rep produced a comparable position");
    return result;
}

}  // namespace parley
