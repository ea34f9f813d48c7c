#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "parley/corpus.hpp"
#include "parley/issues_query.hpp"
#include "parley/svd.hpp"
#include "parley/warnings.hpp"

namespace parley {

struct VocabConfig {
    int max_features = 10000;
    double max_df = 0.9;
    std::set<std::string> stopword_list;
    std::optional<std::set<std::string>> allow_list;  // e.g. a noun lexicon
    std::optional<std::set<std::string>> deny_list;
};

struct DocTermMatrix {
    std::vector<long long> docs;     // comment ids, corpus order
    std::vector<std::string> vocab;  // lexicographic
    SparseRowMatrix weights;         // docs x vocab, rows L2-normalized or zero
};

// vocab = terms surviving stopword/deny/allow filters with document frequency
// <= max_df * n_docs, truncated to max_features by total corpus frequency
// (ties lexicographic); weight = tf * (ln((1+n)/(1+df)) + 1), rows then
// L2-normalized. All-zero rows are kept and warned about.
DocTermMatrix build_tfidf(const std::vector<Comment>& corpus, const VocabConfig& cfg,
                          Warnings* warnings = nullptr);

struct NMFParams {
    int k = 10;
    double alpha = 0.1;
    double l1_ratio = 0.5;
    double tol = 1e-4;
    int max_iter = 200;
    double membership_threshold = 0.1;
};

// Plain NNDSVD: truncated SVD, leading pair taken absolute, later pairs keep
// whichever sign section has the larger norm product, zeros stay zero.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> nndsvd_init(const SparseRowMatrix& X,
                                                        int k,
                                                        Warnings* warnings = nullptr);

struct TopicModel {
    std::vector<long long> docs;
    std::vector<std::string> vocab;
    Eigen::MatrixXd doc_topic;   // W, docs x k
    Eigen::MatrixXd topic_term;  // H, k x terms
    std::vector<double> objective_trace;  // entry 0 = after init, then per sweep
    NMFParams params;
    bool converged = false;
};

// Minimizes 0.5*|X-WH|_F^2 + alpha*ratio*(|W|_1+|H|_1)
//         + 0.5*alpha*(1-ratio)*(|W|_F^2+|H|_F^2)
// by cyclic HALS over columns of W and rows of H, starting from nndsvd_init.
// Stops when the per-sweep objective decrease, relative to the initial
// objective, drops below tol.
TopicModel fit_nmf(const DocTermMatrix& X, const NMFParams& params,
                   Warnings* warnings = nullptr);

// Top-n terms per topic by weight, ties lexicographic.
std::vector<std::vector<std::pair<std::string, double>>> topic_keywords(
    const TopicModel& model, int n = 10);

// Doc d carries topic k iff W[d,k] / sum_j W[d,j] >= threshold; all-zero rows
// get empty sets. Defaults to the model's membership_threshold.
std::map<long long, std::set<int>> assign_topics(
    const TopicModel& model, std::optional<double> threshold = std::nullopt);

// Ranked by purity W[d,k]/sum_j W[d,j], then W[d,k], then id; zero rows are
// excluded.
std::vector<long long> representative_comments(const TopicModel& model, int topic,
                                               int n = 10);

// Jaccard overlap of assigned document sets; 0/0 is 0.
Eigen::MatrixXd topic_overlap(const std::map<long long, std::set<int>>& assignments,
                              int k);

// Same contract as issue_activity, topics labelled by their index.
std::vector<ActivityRow> latent_activity(
    const std::map<long long, std::set<int>>& assignments,
    const std::vector<Comment>& corpus, GroupBy group_by);

}  // namespace parley
