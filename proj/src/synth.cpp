#include "parley/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "parley/errors.hpp"
#include "parley/rng.hpp"

namespace parley {

namespace {

bool single_token(const std::string& word) {
    const auto toks = tokenize(word);
    return toks.size() == 1 && toks.front() == word;
}

std::string session_filename(const SynthSession& s, std::size_t index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-session%03zu.txt", s.year, s.month,
                  index + 1);
    return buf;
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
    if (spec.parties.size() < 2) throw InvalidSpec("need at least 2 parties");
    std::set<std::string> orgs;
    for (const auto& p : spec.parties) {
        if (p.name.empty() || p.organisation.empty())
            throw InvalidSpec("party name and organisation must be nonempty");
        orgs.insert(p.organisation);
    }
    if (orgs.size() < 2) throw InvalidSpec("need at least 2 distinct organisations");
    if (spec.topics.size() < 2) throw InvalidSpec("need at least 2 topics");
    std::set<std::string> labels;
    for (const auto& t : spec.topics) {
        if (!labels.insert(t.label).second)
            throw InvalidSpec("duplicate topic label: " + t.label);
        if (t.word_pool.empty())
            throw InvalidSpec("topic " + t.label + " has an empty word pool");
        for (const auto& w : t.word_pool)
            if (!single_token(w))
                throw InvalidSpec("pool word '" + w + "' is not a single lowercase token");
    }
    for (const auto& [org, row] : spec.party_topic_bias) {
        if (!orgs.count(org)) throw InvalidSpec("bias row for unknown party: " + org);
        double sum = 0.0;
        for (const auto& [label, w] : row) {
            if (!labels.count(label))
                throw InvalidSpec("bias for unknown topic: " + label);
            if (w < 0.0) throw InvalidSpec("negative bias weight for " + org);
            sum += w;
        }
        if (sum <= 0.0) throw InvalidSpec("bias row for " + org + " sums to zero");
    }
    const auto [lo, hi] = spec.comment_length_range;
    if (lo < 1 || hi < lo) throw InvalidSpec("bad comment length range");
    for (const auto& s : spec.sessions) {
        if (s.month < 1 || s.month > 12)
            throw InvalidSpec("session month out of range");
        if (s.n_comments < 0) throw InvalidSpec("negative comment count");
    }
}

SynthResult generate(const SynthSpec& spec) {
    validate_spec(spec);

    std::vector<SynthSession> sessions = spec.sessions;
    std::stable_sort(sessions.begin(), sessions.end(),
                     [](const SynthSession& a, const SynthSession& b) {
                         if (a.year != b.year) return a.year < b.year;
                         return a.month < b.month;
                     });

    // One normalized weight vector per organisation, topic order = spec order.
    std::map<std::string, std::vector<double>> bias;
    for (const auto& p : spec.parties) {
        if (bias.count(p.organisation)) continue;
        std::vector<double> row(spec.topics.size(),
                                1.0 / static_cast<double>(spec.topics.size()));
        auto it = spec.party_topic_bias.find(p.organisation);
        if (it != spec.party_topic_bias.end()) {
            double sum = 0.0;
            for (const auto& [label, w] : it->second) sum += w;
            for (std::size_t t = 0; t < spec.topics.size(); ++t) {
                auto wt = it->second.find(spec.topics[t].label);
                row[t] = wt == it->second.end() ? 0.0 : wt->second / sum;
            }
        }
        bias.emplace(p.organisation, std::move(row));
    }

    Rng rng(spec.seed);
    SynthResult result;
    for (const auto& t : spec.topics) result.topic_labels.push_back(t.label);

    long long id = 0;
    const auto [lo, hi] = spec.comment_length_range;
    for (std::size_t si = 0; si < sessions.size(); ++si) {
        const auto& session = sessions[si];
        SessionMeta meta{session_filename(session, si), session.year, session.month};
        for (int c = 0; c < session.n_comments; ++c) {
            const auto& party = spec.parties[rng.below(spec.parties.size())];
            const std::size_t topic = rng.weighted(bias.at(party.organisation));
            const auto& pool = spec.topics[topic].word_pool;
            const int len = lo + static_cast<int>(rng.below(hi - lo + 1));
            std::string text;
            for (int k = 0; k < len; ++k) {
                if (k) text += ' ';
                text += pool[rng.below(pool.size())];
            }
            Comment comment;
            comment.id = id++;
            comment.text = std::move(text);
            comment.meta = meta;
            comment.participant = party.name;
            comment.organisation = party.organisation;
            result.corpus.push_back(std::move(comment));
            result.true_topic.push_back(static_cast<int>(topic));
        }
    }
    return result;
}

void write_ground_truth(const SynthResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "id,true_topic_weights\n";
    for (std::size_t i = 0; i < result.corpus.size(); ++i) {
        out << result.corpus[i].id << ',';
        for (std::size_t t = 0; t < result.topic_labels.size(); ++t) {
            if (t) out << '|';
            out << (static_cast<int>(t) == result.true_topic[i] ? 1 : 0);
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

void write_note_files(const std::vector<Comment>& corpus, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::map<std::string, std::ofstream> files;
    for (const auto& c : corpus) {
        auto it = files.find(c.meta.source_file);
        if (it == files.end()) {
            const auto path = std::filesystem::path(dir) / c.meta.source_file;
            auto [pos, inserted] =
                files.emplace(c.meta.source_file, std::ofstream(path, std::ios::binary));
            if (!pos->second) throw IoError(path.string(), "cannot open for writing");
            it = pos;
        }
        it->second << c.participant << " (" << c.organisation << "): " << c.text
                   << '\n';
    }
    for (auto& [name, out] : files) {
        out.flush();
        if (!out) throw IoError(name, "write failed");
    }
}

EmbeddingTable synthetic_embeddings(const SynthSpec& spec, int dimension,
                                    double noise_norm) {
    validate_spec(spec);
    const int k = static_cast<int>(spec.topics.size());
    const int d = std::max(dimension, k);
    const double sigma = noise_norm / std::sqrt(static_cast<double>(d));

    std::vector<std::string> terms;
    std::vector<int> cluster;
    std::set<std::string> seen;
    for (int t = 0; t < k; ++t) {
        for (const auto& w : spec.topics[t].word_pool) {
            if (!seen.insert(w).second) continue;
            terms.push_back(w);
            cluster.push_back(t);
        }
    }

    Rng rng(Rng::mix(spec.seed, 0x766563ULL));
    Eigen::MatrixXd m(terms.size(), d);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v(cluster[i]) = 1.0;
        for (int c = 0; c < d; ++c) v(c) += sigma * rng.normal();
        m.row(i) = v.transpose();
    }
    return EmbeddingTable(std::move(terms), std::move(m));
}

}  // namespace parley
