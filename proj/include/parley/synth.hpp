#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "parley/corpus.hpp"
#include "parley/embed.hpp"

namespace parley {

struct SynthParty {
    std::string name;          // speaker
    std::string organisation;  // negotiating party
};

struct SynthSession {
    int year = 0;
    int month = 0;
    int n_comments = 0;
};

struct SynthTopic {
    std::string label;
    std::vector<std::string> word_pool;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    std::vector<SynthParty> parties;
    std::vector<SynthSession> sessions;
    std::vector<SynthTopic> topics;
    // organisation -> topic label -> weight; rows are normalized internally,
    // organisations without a row speak uniformly.
    std::map<std::string, std::map<std::string, double>> party_topic_bias;
    std::pair<int, int> comment_length_range{40, 80};
};

struct SynthResult {
    std::vector<Comment> corpus;
    std::vector<int> true_topic;  // drawn topic per comment, aligned with corpus
    std::vector<std::string> topic_labels;
};

// Throws InvalidSpec when the spec cannot produce a corpus (fewer than two
// organisations or topics, empty pools, bad weights, bad lengths).
void validate_spec(const SynthSpec& spec);

// Deterministic in spec.seed. Per comment: speaker uniform over the roster,
// topic from the speaker organisation's bias row, tokens uniform over the
// topic's pool. Sessions are emitted in chronological order.
SynthResult generate(const SynthSpec& spec);

// Sidecar `id,true_topic_weights`; weights are |-joined, one-hot in topic
// order.
void write_ground_truth(const SynthResult& result, const std::string& path);

// One note file per session, named `YYYY-MM-sessionNNN.txt`, in the turn
// grammar that parse_notes reads back.
void write_note_files(const std::vector<Comment>& corpus, const std::string& dir);

// Companion word vectors with one cluster per topic, so query expansion and
// position analyses have planted structure. Words shared by several pools get
// the first pool's cluster.
EmbeddingTable synthetic_embeddings(const SynthSpec& spec, int dimension = 32,
                                    double noise_norm = 0.4);

}  // namespace parley
