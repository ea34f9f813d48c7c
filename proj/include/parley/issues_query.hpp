#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "parley/corpus.hpp"
#include "parley/embed.hpp"
#include "parley/warnings.hpp"

namespace parley {

struct Issue {
    std::string name;
    std::vector<std::string> seeds;  // single lowercase tokens
};

struct IssueCatalog {
    std::vector<Issue> issues;
};

struct ExpandedTerm {
    std::string term;
    double similarity;
    std::string source_seed;
};

struct ExpandedIssue {
    std::string name;
    std::vector<std::string> seeds;
    std::vector<ExpandedTerm> expanded;

    // seeds plus expanded terms; what tagging matches against
    std::set<std::string> match_terms() const;
};

struct ExpandedCatalog {
    std::vector<ExpandedIssue> issues;
};

struct QueryParams {
    double min_sim = 0.4;
    double raise_to = 0.6;
    int cap = 1000;
};

// Runs neighbors() for every seed with the dynamic threshold raise. When
// corpus_vocab is given, expansions are restricted to terms the corpus
// actually uses. Seeds missing from the table are kept for literal matching
// and warned about once each.
ExpandedCatalog expand_catalog(const IssueCatalog& catalog, const EmbeddingTable& table,
                               const QueryParams& params = {},
                               const std::set<std::string>* corpus_vocab = nullptr,
                               Warnings* warnings = nullptr);

struct TaggedCorpus {
    std::vector<Comment> corpus;
    std::vector<std::string> issues;  // catalog order
    std::map<long long, std::set<std::string>> tags;
    // comment -> issue -> matched terms, sorted
    std::map<long long, std::map<std::string, std::vector<std::string>>> evidence;
};

// A comment is tagged with an issue iff its tokens intersect the issue's
// match set. Multi-label; every comment gets a (possibly empty) tag set.
TaggedCorpus tag_corpus(const std::vector<Comment>& corpus,
                        const ExpandedCatalog& expanded);

struct ActivityRow {
    std::string issue;  // or topic label
    std::string period;
    long long words = 0;
};

// Word counts per (issue, period); a multi-tagged comment counts fully toward
// each of its issues; empty cells yield no row. Issues in catalog order,
// periods ascending.
std::vector<ActivityRow> issue_activity(const TaggedCorpus& tagged, GroupBy group_by);

// Unique tokens across the corpus, for restricting expansion.
std::set<std::string> corpus_vocabulary(const std::vector<Comment>& corpus);

}  // namespace parley
