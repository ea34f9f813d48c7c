#include "parley/diag.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "parley/errors.hpp"

namespace parley {

AnisotropyHistogram anisotropy(const EmbeddingTable& table) {
    AnisotropyHistogram hist;
    hist.dimension = table.dimension();
    hist.counts.assign(hist.dimension, 0);
    const auto& m = table.matrix();
    for (int r = 0; r < table.size(); ++r) {
        int best = 0;
        for (int c = 1; c < hist.dimension; ++c)
            if (m(r, c) > m(r, best)) best = c;
        ++hist.counts[best];
    }
    return hist;
}

namespace {

Eigen::MatrixXd prefix_means(const EmbeddingTable& table,
                             const std::vector<std::string>& tokens,
                             long long* skipped) {
    std::vector<int> rows;
    const auto& terms = table.terms();
    std::unordered_map<std::string, int> index;
    index.reserve(terms.size());
    for (int i = 0; i < table.size(); ++i) index.emplace(terms[i], i);
    for (const auto& tok : tokens) {
        auto it = index.find(tok);
        if (it == index.end()) {
            if (skipped) ++*skipped;
            continue;
        }
        rows.push_back(it->second);
    }
    if (rows.empty()) throw EmptyStream("no in-vocabulary tokens in stream");
    Eigen::MatrixXd means(rows.size(), table.dimension());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dimension());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        sum += table.matrix().row(rows[n]).transpose();
        means.row(n) = sum.transpose() / static_cast<double>(n + 1);
    }
    return means;
}

}  // namespace

RunningMeanSeries running_mean_extrema(const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens) {
    RunningMeanSeries series;
    series.means = prefix_means(table, tokens, &series.skipped_oov);
    const long n = series.means.rows();
    series.max_component.resize(n);
    series.min_component.resize(n);
    for (long i = 0; i < n; ++i) {
        series.max_component[i] = series.means.row(i).maxCoeff();
        series.min_component[i] = series.means.row(i).minCoeff();
    }
    return series;
}

std::vector<double> running_mean_similarity(const EmbeddingTable& table,
                                            const std::vector<std::string>& stream1,
                                            const std::vector<std::string>& stream2) {
    const Eigen::MatrixXd m1 = prefix_means(table, stream1, nullptr);
    const Eigen::MatrixXd m2 = prefix_means(table, stream2, nullptr);
    const long n = std::min(m1.rows(), m2.rows());
    std::vector<double> sims(n);
    for (long i = 0; i < n; ++i) {
        const double norm = m1.row(i).norm() * m2.row(i).norm();
        sims[i] = norm == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                              : m1.row(i).dot(m2.row(i)) / norm;
    }
    return sims;
}

}  // namespace parley
