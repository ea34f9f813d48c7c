#include "parley/issues_query.hpp"

#include <algorithm>

#include "parley/errors.hpp"

namespace parley {

std::set<std::string> ExpandedIssue::match_terms() const {
    std::set<std::string> terms(seeds.begin(), seeds.end());
    for (const auto& e : expanded) terms.insert(e.term);
    return terms;
}

ExpandedCatalog expand_catalog(const IssueCatalog& catalog, const EmbeddingTable& table,
                               const QueryParams& params,
                               const std::set<std::string>* corpus_vocab,
                               Warnings* warnings) {
    if (catalog.issues.empty()) throw EmptyCatalog();
    if (!(params.min_sim > 0.0 && params.min_sim <= 1.0) ||
        !(params.raise_to > 0.0 && params.raise_to <= 1.0))
        throw InvalidParams("similarity thresholds must lie in (0, 1]");
    if (params.min_sim > params.raise_to)
        throw InvalidParams("min_sim must not exceed raise_to");
    if (params.cap < 0) throw InvalidParams("cap must be nonnegative");

    std::set<std::string> names;
    for (const auto& issue : catalog.issues) {
        if (!names.insert(issue.name).second)
            throw InvalidSpec("duplicate issue name: " + issue.name);
        if (issue.seeds.empty())
            throw InvalidSpec("issue " + issue.name + " has no seed keywords");
        for (const auto& seed : issue.seeds) {
            const auto toks = tokenize(seed);
            if (toks.size() != 1 || toks.front() != seed)
                throw InvalidSpec("seed '" + seed + "' of issue " + issue.name +
                                  " is not a single lowercase token");
        }
    }

    ExpandedCatalog out;
    for (const auto& issue : catalog.issues) {
        ExpandedIssue expanded;
        expanded.name = issue.name;
        expanded.seeds = issue.seeds;
        const std::set<std::string> seed_set(issue.seeds.begin(), issue.seeds.end());
        for (const auto& seed : issue.seeds) {
            if (!table.contains(seed)) {
                warn(warnings, "issue " + issue.name + ": seed '" + seed +
                                   "' not in embedding table, literal matching only");
                continue;
            }
            for (const auto& n :
                 neighbors(table, seed, params.min_sim, params.raise_to, params.cap)) {
                if (seed_set.count(n.term)) continue;
                if (corpus_vocab && !corpus_vocab->count(n.term)) continue;
                expanded.expanded.push_back({n.term, n.similarity, seed});
            }
        }
        out.issues.push_back(std::move(expanded));
    }
    return out;
}

TaggedCorpus tag_corpus(const std::vector<Comment>& corpus,
                        const ExpandedCatalog& expanded) {
    TaggedCorpus tagged;
    tagged.corpus = corpus;
    std::vector<std::set<std::string>> match_sets;
    for (const auto& issue : expanded.issues) {
        tagged.issues.push_back(issue.name);
        match_sets.push_back(issue.match_terms());
    }
    for (const auto& c : corpus) {
        const auto tokens = tokenize(c.text);
        const std::set<std::string> token_set(tokens.begin(), tokens.end());
        auto& tag_set = tagged.tags[c.id];
        for (std::size_t i = 0; i < match_sets.size(); ++i) {
            std::vector<std::string> hits;
            std::set_intersection(token_set.begin(), token_set.end(),
                                  match_sets[i].begin(), match_sets[i].end(),
                                  std::back_inserter(hits));
            if (hits.empty()) continue;
            tag_set.insert(tagged.issues[i]);
            tagged.evidence[c.id][tagged.issues[i]] = std::move(hits);
        }
    }
    return tagged;
}

std::vector<ActivityRow> issue_activity(const TaggedCorpus& tagged, GroupBy group_by) {
    // issue -> period -> words, then flattened in catalog order
    std::map<std::string, std::map<std::string, long long>> cells;
    for (const auto& c : tagged.corpus) {
        auto it = tagged.tags.find(c.id);
        if (it == tagged.tags.end() || it->second.empty()) continue;
        const auto words = static_cast<long long>(token_count(c.text));
        const std::string period = period_key(c.meta, group_by);
        for (const auto& issue : it->second) cells[issue][period] += words;
    }
    std::vector<ActivityRow> rows;
    for (const auto& issue : tagged.issues) {
        auto it = cells.find(issue);
        if (it == cells.end()) continue;
        for (const auto& [period, words] : it->second)
            rows.push_back({issue, period, words});
    }
    return rows;
}

std::set<std::string> corpus_vocabulary(const std::vector<Comment>& corpus) {
    std::set<std::string> vocab;
    for (const auto& c : corpus)
        for (auto& tok : tokenize(c.text)) vocab.insert(std::move(tok));
    return vocab;
}

}  // namespace parley
