#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "parley/warnings.hpp"

namespace parley {

// Static word vectors (GloVe text format). Immutable after construction.
class EmbeddingTable {
public:
    EmbeddingTable(std::vector<std::string> terms, Eigen::MatrixXd vectors);

    // Lines `term v1 v2 ... vd`; d inferred from the first line; duplicate
    // terms keep the last occurrence (warned).
    static EmbeddingTable load(const std::string& path, Warnings* warnings = nullptr);

    int dimension() const { return static_cast<int>(vectors_.cols()); }
    int size() const { return static_cast<int>(vectors_.rows()); }
    bool contains(const std::string& term) const { return index_.count(term) > 0; }
    Eigen::VectorXd vector_of(const std::string& term) const;
    const std::vector<std::string>& terms() const { return terms_; }
    const Eigen::MatrixXd& matrix() const { return vectors_; }
    const Eigen::VectorXd& norms() const { return norms_; }

    void save(const std::string& path, int decimals = 6) const;

private:
    std::vector<std::string> terms_;
    Eigen::MatrixXd vectors_;  // one row per term
    Eigen::VectorXd norms_;
    std::unordered_map<std::string, int> index_;
};

// Throws ZeroVector when either argument has zero norm, DimensionMismatch on
// unequal sizes.
double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct Neighbor {
    std::string term;
    double similarity;
};

// All terms t != term with cosine >= min_sim, sorted by similarity descending
// (ties lexicographic). When more than cap terms qualify, the scan is redone
// once at raise_to.
std::vector<Neighbor> neighbors(const EmbeddingTable& table, const std::string& term,
                                double min_sim = 0.4, double raise_to = 0.6,
                                int cap = 1000);

struct PoolingOptions {
    bool remove_stopwords = true;
    std::set<std::string> stopword_list;
};

// Mean of the vectors of in-vocabulary, non-stopword tokens, every occurrence
// counted. nullopt when nothing survives.
std::optional<Eigen::VectorXd> pool_text(const EmbeddingTable& table,
                                         const std::vector<std::string>& tokens,
                                         const PoolingOptions& opts);

// Precomputed per-comment vectors, `id,v1,...,vd` CSV.
class DocVectorStore {
public:
    DocVectorStore() = default;
    static DocVectorStore load(const std::string& path, Warnings* warnings = nullptr);

    int dimension() const { return static_cast<int>(vectors_.cols()); }
    int size() const { return static_cast<int>(vectors_.rows()); }
    bool contains(long long id) const { return index_.count(id) > 0; }
    Eigen::VectorXd vector_of(long long id) const;
    std::vector<long long> ids() const;

private:
    Eigen::MatrixXd vectors_;
    std::unordered_map<long long, int> index_;
    std::vector<long long> ids_;
};

}  // namespace parley
