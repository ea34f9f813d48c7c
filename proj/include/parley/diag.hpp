#pragma once

#include <string>
#include <vector>

#include "parley/embed.hpp"

namespace parley {

struct AnisotropyHistogram {
    int dimension = 0;
    std::vector<long long> counts;  // vectors whose largest component is each dim
};

// Argmax per vocabulary vector, ties to the lowest index. Counts sum to the
// table size.
AnisotropyHistogram anisotropy(const EmbeddingTable& table);

struct RunningMeanSeries {
    // row n-1 = mean of the first n in-vocabulary token vectors
    Eigen::MatrixXd means;
    std::vector<double> max_component;
    std::vector<double> min_component;
    long long skipped_oov = 0;
};

// Prefix means over the stream; OOV tokens are skipped. Throws EmptyStream
// when nothing survives.
RunningMeanSeries running_mean_extrema(const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens);

// cosine(prefix mean of stream1, prefix mean of stream2) for each n up to the
// shorter stream (after OOV filtering).
std::vector<double> running_mean_similarity(const EmbeddingTable& table,
                                            const std::vector<std::string>& stream1,
                                            const std::vector<std::string>& stream2);

}  // namespace parley
