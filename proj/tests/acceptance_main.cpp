// End-to-end acceptance gate. Each criterion prints one PASS line; any
// failure prints [FAIL] with its location and exits nonzero.
//
// Usage: parley_acceptance <parley-binary> <embedding-fixture>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "parley/config.hpp"
#include "parley/corpus.hpp"
#include "parley/diag.hpp"
#include "parley/embed.hpp"
#include "parley/issues_latent.hpp"
#include "parley/issues_query.hpp"
#include "parley/positions.hpp"
#include "parley/rng.hpp"
#include "parley/synth.hpp"

namespace fs = std::filesystem;
using namespace parley;

#define REQUIRE(cond)                                                         \
    do {                                                                      \
        if (!(cond)) {                                                        \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << "  "     \
                      << #cond << "\n";                                       \
            std::exit(1);                                                     \
        }                                                                     \
    } while (0)

#define REQUIRE_NEAR(a, b, eps)                                               \
    do {                                                                      \
        const double a_ = (a), b_ = (b), eps_ = (eps);                        \
        if (!(std::abs(a_ - b_) <= eps_)) {                                   \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << "  "     \
                      << #a << " = " << a_ << " vs " << #b << " = " << b_     \
                      << " (eps " << eps_ << ")\n";                           \
            std::exit(1);                                                     \
        }                                                                     \
    } while (0)

namespace {

std::string g_parley_bin;
std::string g_embedding_fixture;

void pass(int n, const std::string& what) {
    std::printf("[PASS] %2d/10  %s\n", n, what.c_str());
    std::fflush(stdout);
}

Comment make_comment(long long id, const std::string& text, const std::string& who,
                     const std::string& org, int year = 2018, int month = 1) {
    Comment c;
    c.id = id;
    c.text = text;
    c.meta = {"notes.txt", year, month};
    c.participant = who;
    c.organisation = org;
    return c;
}

EmbeddingTable table_from(const std::vector<std::string>& terms,
                          const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<int>(rows.size()),
                      static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return EmbeddingTable(terms, m);
}

SparseRowMatrix to_sparse(const Eigen::MatrixXd& dense) {
    SparseRowMatrix s(dense.rows(), dense.cols());
    for (int i = 0; i < dense.rows(); ++i)
        for (int j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0) s.insert(i, j) = dense(i, j);
    s.makeCompressed();
    return s;
}

DocTermMatrix matrix_from(const Eigen::MatrixXd& dense) {
    DocTermMatrix x;
    for (int i = 0; i < dense.rows(); ++i) x.docs.push_back(i);
    for (int j = 0; j < dense.cols(); ++j)
        x.vocab.push_back("t" + std::to_string(j));
    x.weights = to_sparse(dense);
    return x;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// 1. Default configuration constants, asserted on the serialized snapshot.

void criterion_1() {
    const RunConfig cfg = parse_config(nlohmann::json::object());
    const nlohmann::json snap = config_to_json(cfg);

    REQUIRE(snap["query"]["min_sim"].get<double>() == 0.4);
    REQUIRE(snap["query"]["raise_to"].get<double>() == 0.6);
    REQUIRE(snap["query"]["cap"].get<int>() == 1000);

    REQUIRE(snap["nmf"]["alpha"].get<double>() == 0.1);
    REQUIRE(snap["nmf"]["l1_ratio"].get<double>() == 0.5);
    REQUIRE(snap["nmf"]["tol"].get<double>() == 1e-4);
    REQUIRE(snap["nmf"]["max_features"].get<int>() == 10000);
    REQUIRE(snap["nmf"]["max_df"].get<double>() == 0.9);
    REQUIRE(snap["nmf"]["membership_threshold"].get<double>() == 0.1);
    REQUIRE(snap["nmf"]["keywords"].get<int>() == 10);
    REQUIRE(snap["nmf"]["representatives"].get<int>() == 10);

    REQUIRE(snap["uncertainty"]["fraction"].get<double>() == 0.10);

    // and the snapshot round-trips
    const RunConfig again = parse_config(snap);
    REQUIRE(config_to_json(again) == snap);

    pass(1, "default configuration constants");
}

// ---------------------------------------------------------------------------
// 2. TF-IDF against the hand-computed three-document example.

void criterion_2() {
    const std::vector<Comment> corpus = {
        make_comment(1, "peace peace war", "A", "OrgA"),
        make_comment(2, "war talks", "B", "OrgB"),
        make_comment(3, "talks", "A", "OrgA"),
    };
    const DocTermMatrix x = build_tfidf(corpus, VocabConfig{});

    REQUIRE(x.vocab == (std::vector<std::string>{"peace", "talks", "war"}));
    const Eigen::MatrixXd d = Eigen::MatrixXd(x.weights);

    // idf: peace ln(4/2)+1, talks/war ln(4/3)+1; rows L2-normalized by hand
    REQUIRE_NEAR(d(0, 0), 0.93470196, 1e-5);
    REQUIRE_NEAR(d(0, 1), 0.0, 1e-5);
    REQUIRE_NEAR(d(0, 2), 0.35543247, 1e-5);
    REQUIRE_NEAR(d(1, 0), 0.0, 1e-5);
    REQUIRE_NEAR(d(1, 1), 1.0 / std::sqrt(2.0), 1e-5);
    REQUIRE_NEAR(d(1, 2), 1.0 / std::sqrt(2.0), 1e-5);
    REQUIRE_NEAR(d(2, 0), 0.0, 1e-5);
    REQUIRE_NEAR(d(2, 1), 1.0, 1e-5);
    REQUIRE_NEAR(d(2, 2), 0.0, 1e-5);

    pass(2, "tf-idf matches the three-document hand example to 1e-5");
}

// ---------------------------------------------------------------------------
// 3. NMF: nonnegativity, monotone objective, exact planted recovery, NNDSVD.

void criterion_3() {
    // (a) + (b): 50 random instances, factors nonnegative, trace nonincreasing
    for (int inst = 0; inst < 50; ++inst) {
        Rng rng(1000 + static_cast<std::uint64_t>(inst));
        const int m = 6 + static_cast<int>(rng.below(10));
        const int n = 5 + static_cast<int>(rng.below(8));
        const int k = 2 + static_cast<int>(rng.below(3));

        Eigen::MatrixXd dense(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                dense(i, j) = rng.real01() < 0.3 ? 0.0 : rng.real01();

        NMFParams params;
        params.k = std::min({k, m, n});
        params.tol = 1e-8;
        params.max_iter = 80;
        const TopicModel model = fit_nmf(matrix_from(dense), params);

        REQUIRE(model.doc_topic.minCoeff() >= 0.0);
        REQUIRE(model.topic_term.minCoeff() >= 0.0);
        REQUIRE(model.objective_trace.size() >= 2);
        for (std::size_t t = 1; t < model.objective_trace.size(); ++t)
            REQUIRE(model.objective_trace[t] <=
                    model.objective_trace[t - 1] + 1e-10);
    }

    // (c) planted rank-3 block product recovered exactly with alpha = 0
    {
        Rng rng(7);
        const int docs_per_block = 8, terms_per_block = 5, k = 3;
        Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(docs_per_block * k, k);
        Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(k, terms_per_block * k);
        for (int b = 0; b < k; ++b) {
            for (int i = 0; i < docs_per_block; ++i)
                w0(b * docs_per_block + i, b) = 0.2 + rng.real01();
            for (int j = 0; j < terms_per_block; ++j)
                h0(b, b * terms_per_block + j) = 0.2 + rng.real01();
        }
        const Eigen::MatrixXd x = w0 * h0;

        NMFParams params;
        params.k = k;
        params.alpha = 0.0;
        params.tol = 1e-14;
        params.max_iter = 5000;
        const TopicModel model = fit_nmf(matrix_from(x), params);

        const double rel =
            (x - model.doc_topic * model.topic_term).norm() / x.norm();
        REQUIRE(rel <= 1e-6);
    }

    // (d) NNDSVD reconstructs a rank-1 nonnegative matrix exactly
    {
        Eigen::MatrixXd x(2, 2);
        x << 2, 4, 1, 2;
        const auto [w, h] = nndsvd_init(to_sparse(x), 1);
        REQUIRE((w * h - x).norm() <= 1e-8);
        REQUIRE(w.minCoeff() >= 0.0);
        REQUIRE(h.minCoeff() >= 0.0);
    }

    pass(3, "nmf nonnegative, objective monotone, planted recovery, nndsvd");
}

// ---------------------------------------------------------------------------
// 4. Planted-topic recovery on a generated corpus.

void criterion_4() {
    SynthSpec spec;
    spec.seed = 404;
    spec.parties = {{"Ann", "OrgA"}, {"Ben", "OrgB"}};
    spec.sessions = {{2018, 3, 400}};
    spec.topics = {
        {"fruit",
         {"apple", "banana", "cherry", "plum", "grape", "mango", "peach",
          "pear", "melon", "kiwi", "fig", "lime", "lemon", "apricot", "papaya",
          "guava", "quince", "currant", "olive", "damson"}},
        {"metal",
         {"iron", "copper", "zinc", "tin", "nickel", "cobalt", "silver",
          "gold", "chrome", "brass", "steel", "bronze", "pewter", "mercury",
          "titanium", "sodium", "lithium", "barium", "tungsten", "platinum"}},
    };
    spec.comment_length_range = {8, 16};
    const SynthResult result = generate(spec);
    REQUIRE(result.corpus.size() == 400);

    const DocTermMatrix x = build_tfidf(result.corpus, VocabConfig{});
    NMFParams params;
    params.k = 2;
    const TopicModel model = fit_nmf(x, params);
    const auto keywords = topic_keywords(model, 10);
    REQUIRE(keywords.size() == 2);

    const auto overlap_with = [&](int topic, int pool) {
        const auto& words = spec.topics[static_cast<std::size_t>(pool)].word_pool;
        const std::set<std::string> pool_set(words.begin(), words.end());
        int hits = 0;
        for (const auto& [term, weight] : keywords[static_cast<std::size_t>(topic)])
            if (pool_set.count(term)) ++hits;
        return hits;
    };

    // best matching of the two topics onto the two pools
    const int straight = overlap_with(0, 0) + overlap_with(1, 1);
    const int swapped = overlap_with(0, 1) + overlap_with(1, 0);
    const bool swap = swapped > straight;
    const int topic_of_pool0 = swap ? 1 : 0;
    const int topic_of_pool1 = swap ? 0 : 1;
    REQUIRE(overlap_with(topic_of_pool0, 0) >= 8);
    REQUIRE(overlap_with(topic_of_pool1, 1) >= 8);

    // every comment is pure by construction; check assignment at 0.1
    const auto assignments = assign_topics(model);
    int correct = 0;
    for (std::size_t i = 0; i < result.corpus.size(); ++i) {
        const int wanted = result.true_topic[i] == 0 ? topic_of_pool0 : topic_of_pool1;
        const auto it = assignments.find(result.corpus[i].id);
        if (it != assignments.end() && it->second.count(wanted)) ++correct;
    }
    REQUIRE(correct >= 380);  // 95% of 400

    pass(4, "planted topics recovered: keyword overlap >= 80%, assignment >= 95%");
}

// ---------------------------------------------------------------------------
// 5. Query expansion: toy cosines, raise rule boundary, tagging properties.

void criterion_5() {
    // hand-computed neighbor cosine
    {
        const auto table = table_from({"king", "queen", "car"},
                                      {{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}});
        const auto near = neighbors(table, "king", 0.4, 0.6, 1000);
        REQUIRE(near.size() == 1);
        REQUIRE(near[0].term == "queen");
        REQUIRE_NEAR(near[0].similarity, 0.9 / std::sqrt(0.82), 1e-8);
    }

    // raise fires exactly when the 0.4-count exceeds the cap
    {
        const auto table = table_from(
            {"hub", "close", "middle", "edge"},
            {{1.0, 0.0}, {0.95, std::sqrt(1 - 0.95 * 0.95)},
             {0.58, std::sqrt(1 - 0.58 * 0.58)}, {0.45, std::sqrt(1 - 0.45 * 0.45)}});

        IssueCatalog catalog;
        catalog.issues = {{"hubs", {"hub"}}};

        QueryParams at_cap{0.4, 0.6, 3};  // three neighbors, cap three: no raise
        const auto kept = expand_catalog(catalog, table, at_cap);
        REQUIRE(kept.issues[0].expanded.size() == 3);

        QueryParams over_cap{0.4, 0.6, 2};  // three neighbors, cap two: raise
        const auto raised = expand_catalog(catalog, table, over_cap);
        REQUIRE(raised.issues[0].expanded.size() == 1);
        REQUIRE(raised.issues[0].expanded[0].term == "close");
    }

    // tagging is exact-token, multi-label, monotone under expansion growth
    {
        const std::vector<Comment> corpus = {
            make_comment(1, "warfare talks", "A", "OrgA"),
            make_comment(2, "war and trade", "B", "OrgB"),
            make_comment(3, "conflict talks", "A", "OrgA"),
        };

        ExpandedCatalog small;
        small.issues = {{"security", {"war"}, {}}, {"economy", {"trade"}, {}}};
        const TaggedCorpus before = tag_corpus(corpus, small);
        REQUIRE(before.tags.at(1).empty());  // "warfare" is not the token "war"
        REQUIRE(before.tags.at(2) ==
                (std::set<std::string>{"security", "economy"}));
        REQUIRE(before.tags.at(3).empty());

        ExpandedCatalog big = small;
        big.issues[0].expanded.push_back({"conflict", 0.8, "war"});
        const TaggedCorpus after = tag_corpus(corpus, big);
        for (const auto& [id, tags] : before.tags) {
            const auto& grown = after.tags.at(id);
            for (const auto& t : tags) REQUIRE(grown.count(t) == 1);
        }
        REQUIRE(after.tags.at(3) == (std::set<std::string>{"security"}));
    }

    pass(5, "query expansion cosines, raise boundary, tagging properties");
}

// ---------------------------------------------------------------------------
// 6. Distance suite.

void criterion_6() {
    const auto table = table_from({"north", "east", "mixed"},
                                  {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    const StaticPoolingBackend backend{&table, PoolingOptions{false, {}}};

    const auto position_of = [&](const std::vector<Comment>& corpus,
                                 const std::string& party) {
        TagMap tags;
        for (const auto& c : corpus) tags[c.id] = {"axis"};
        return party_position(corpus, tags, backend, party, "axis", "",
                              GroupBy::year);
    };

    // baseline self-similarity
    {
        const std::vector<Comment> corpus = {
            make_comment(1, "north mixed east", "A", "OrgA"),
            make_comment(2, "east east north", "B", "OrgB"),
        };
        const std::vector<PartyPosition> positions = {
            position_of(corpus, "OrgA"), position_of(corpus, "OrgB")};
        const Eigen::VectorXd ref =
            reference_position(positions, ReferenceMode::baseline, "OrgA");
        const DistanceProfile profile =
            distance_profile(positions, ref, "baseline:OrgA");
        REQUIRE(profile.entries[0].party == "OrgA");
        REQUIRE(profile.entries[0].similarity.has_value());
        REQUIRE(*profile.entries[0].similarity == 1.0);
    }

    // heatmap symmetry, unit diagonal, two orthogonal clusters -> levels 1/4
    {
        const std::vector<Comment> corpus = {
            make_comment(1, "north north", "A", "OrgA"),
            make_comment(2, "north", "B", "OrgB"),
            make_comment(3, "east", "C", "OrgC"),
            make_comment(4, "east east east", "D", "OrgD"),
        };
        std::vector<PartyPosition> positions;
        for (const auto& org : {"OrgA", "OrgB", "OrgC", "OrgD"})
            positions.push_back(position_of(corpus, org));
        const HeatmapReport heat = pairwise_heatmap(positions, "axis");

        const int n = static_cast<int>(heat.parties.size());
        for (int i = 0; i < n; ++i) {
            REQUIRE(heat.similarity(i, i) == 1.0);
            REQUIRE(heat.levels(i, i) == 1);
            for (int j = 0; j < n; ++j) {
                REQUIRE(heat.similarity(i, j) == heat.similarity(j, i));
                REQUIRE(heat.levels(i, j) == heat.levels(j, i));
            }
        }
        REQUIRE(heat.levels(0, 1) == 1);  // within the north cluster
        REQUIRE(heat.levels(2, 3) == 1);  // within the east cluster
        REQUIRE(heat.levels(0, 2) == 4);
        REQUIRE(heat.levels(0, 3) == 4);
        REQUIRE(heat.levels(1, 2) == 4);
        REQUIRE(heat.levels(1, 3) == 4);
    }

    // scale invariance of every pairwise similarity under table rescaling
    {
        const std::vector<Comment> corpus = {
            make_comment(1, "north mixed", "A", "OrgA"),
            make_comment(2, "east mixed north", "B", "OrgB"),
            make_comment(3, "mixed mixed east", "C", "OrgC"),
        };
        const auto scaled = table_from({"north", "east", "mixed"},
                                       {{3.7, 0.0}, {0.0, 3.7}, {3.7, 3.7}});
        const StaticPoolingBackend scaled_backend{&scaled,
                                                  PoolingOptions{false, {}}};

        TagMap tags;
        for (const auto& c : corpus) tags[c.id] = {"axis"};
        std::vector<PartyPosition> base, resc;
        for (const auto& org : {"OrgA", "OrgB", "OrgC"}) {
            base.push_back(party_position(corpus, tags, backend, org, "axis",
                                          "", GroupBy::year));
            resc.push_back(party_position(corpus, tags, scaled_backend, org,
                                          "axis", "", GroupBy::year));
        }
        const HeatmapReport h1 = pairwise_heatmap(base, "axis");
        const HeatmapReport h2 = pairwise_heatmap(resc, "axis");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE_NEAR(h1.similarity(i, j), h2.similarity(i, j), 1e-12);
    }

    // yearly position is the token-weighted mean of the monthly positions
    {
        const std::vector<Comment> corpus = {
            make_comment(1, "north north north", "A", "OrgA", 2018, 1),
            make_comment(2, "east mixed", "A", "OrgA", 2018, 2),
        };
        TagMap tags{{1, {"axis"}}, {2, {"axis"}}};
        const PartyPosition yearly = party_position(
            corpus, tags, backend, "OrgA", "axis", "2018", GroupBy::year);
        const PartyPosition jan = party_position(
            corpus, tags, backend, "OrgA", "axis", "2018-01", GroupBy::year_month);
        const PartyPosition feb = party_position(
            corpus, tags, backend, "OrgA", "axis", "2018-02", GroupBy::year_month);
        REQUIRE(yearly.vec && jan.vec && feb.vec);

        const double w1 = static_cast<double>(jan.word_count);
        const double w2 = static_cast<double>(feb.word_count);
        const Eigen::VectorXd blended = (w1 * *jan.vec + w2 * *feb.vec) / (w1 + w2);
        REQUIRE((*yearly.vec - blended).cwiseAbs().maxCoeff() <= 1e-10);
    }

    pass(6, "distance suite: baseline, heatmap, scale invariance, yearly pooling");
}

// ---------------------------------------------------------------------------
// 7. Uncertainty margins.

void criterion_7() {
    const auto table = table_from({"north", "east"}, {{1.0, 0.0}, {0.0, 1.0}});
    const StaticPoolingBackend backend{&table, PoolingOptions{false, {}}};

    const auto margin_for = [&](const std::vector<Comment>& corpus,
                                const UncertaintyParams& params) {
        TagMap tags;
        for (const auto& c : corpus) tags[c.id] = {"axis"};
        return estimate_uncertainty(corpus, tags, backend, "OrgA", "axis", "",
                                    GroupBy::year, params);
    };

    // single-token vocabulary: removing comments cannot move the position
    {
        std::vector<Comment> corpus;
        for (long long i = 0; i < 6; ++i)
            corpus.push_back(make_comment(i, "north north north", "A", "OrgA"));
        const UncertaintyMargin m = margin_for(corpus, {0.10, 20, 7});
        REQUIRE(m.margin.has_value());
        REQUIRE(*m.margin == 0.0);
    }

    // seeded determinism
    {
        std::vector<Comment> corpus;
        for (long long i = 0; i < 12; ++i)
            corpus.push_back(make_comment(
                i, i % 3 == 0 ? "east north" : "north north", "A", "OrgA"));
        const UncertaintyMargin a = margin_for(corpus, {0.10, 20, 11});
        const UncertaintyMargin b = margin_for(corpus, {0.10, 20, 11});
        REQUIRE(a.margin.has_value() && b.margin.has_value());
        REQUIRE(*a.margin == *b.margin);
    }

    // margin shrinks as the party's data grows tenfold per step
    {
        std::vector<double> margins;
        for (const long long size : {4, 40, 400}) {
            std::vector<Comment> corpus;
            for (long long i = 0; i < size; ++i)
                corpus.push_back(make_comment(
                    i, i % 3 == 0 ? "east north" : "north north", "A", "OrgA"));
            const UncertaintyMargin m = margin_for(corpus, {0.10, 20, 11});
            REQUIRE(m.margin.has_value());
            margins.push_back(*m.margin);
        }
        REQUIRE(margins[0] > margins[1]);
        REQUIRE(margins[1] > margins[2]);
        REQUIRE(margins[2] >= 0.0);
    }

    pass(7, "uncertainty: zero margin, determinism, shrinks with tenfold data");
}

// ---------------------------------------------------------------------------
// 8. Embedding-space diagnostics on the real 1,000-term fixture.

void criterion_8() {
    const EmbeddingTable table = EmbeddingTable::load(g_embedding_fixture);
    REQUIRE(table.size() == 1000);

    // argmax histogram conserves the vocabulary and rejects uniformity
    const AnisotropyHistogram hist = anisotropy(table);
    long long total = 0;
    for (const long long c : hist.counts) total += c;
    REQUIRE(total == table.size());
    REQUIRE(hist.dimension == table.dimension());

    const double expected =
        static_cast<double>(table.size()) / table.dimension();
    double statistic = 0.0;
    for (const long long c : hist.counts) {
        const double diff = static_cast<double>(c) - expected;
        statistic += diff * diff / expected;
    }
    boost::math::chi_squared dist(table.dimension() - 1);
    const double p_value = 1.0 - boost::math::cdf(dist, statistic);
    REQUIRE(p_value < 0.01);

    // running means of two same-distribution streams converge together
    Rng rng1(77), rng2(78);
    std::vector<std::string> stream1, stream2;
    for (int i = 0; i < 5000; ++i) {
        stream1.push_back(table.terms()[rng1.below(table.terms().size())]);
        stream2.push_back(table.terms()[rng2.below(table.terms().size())]);
    }
    const std::vector<double> sims =
        running_mean_similarity(table, stream1, stream2);
    REQUIRE(sims.size() == 5000);
    REQUIRE(sims.back() > 0.95);

    // nondecreasing trend after n = 500: window means may only move up
    const std::size_t window = 500;
    double previous = -1.0;
    for (std::size_t start = window; start + window <= sims.size();
         start += window) {
        double mean = 0.0;
        for (std::size_t i = start; i < start + window; ++i) mean += sims[i];
        mean /= static_cast<double>(window);
        REQUIRE(mean >= previous - 1e-3);
        previous = mean;
    }

    pass(8, "diagnostics: anisotropy conserved and non-uniform, means converge");
}

// ---------------------------------------------------------------------------
// 9. Pipeline determinism through the installed binary.

nlohmann::json chain_config(const fs::path& dir) {
    nlohmann::json j;
    j["paths"]["notes_dir"] = (dir / "notes").string();
    j["paths"]["embedding_table"] = (dir / "embeddings_synth.txt").string();
    j["issues"] = nlohmann::json::array(
        {{{"name", "fruit"}, {"seeds", {"apple"}}},
         {{"name", "metal"}, {"seeds", {"iron"}}}});
    j["nmf"]["k"] = 2;
    j["parties"] = {"OrgA", "OrgB"};
    j["uncertainty"] = {{"fraction", 0.2}, {"reps", 5}, {"seed", 3}};
    j["synth"] = {
        {"seed", 21},
        {"parties", nlohmann::json::array({{{"name", "Ann"}, {"organisation", "OrgA"}},
                                           {{"name", "Ben"}, {"organisation", "OrgB"}}})},
        {"sessions", nlohmann::json::array({{{"year", 2018}, {"month", 2}, {"comments", 30}},
                                            {{"year", 2019}, {"month", 6}, {"comments", 30}}})},
        {"topics", nlohmann::json::array(
                       {{{"label", "fruit"}, {"pool", {"apple", "banana", "cherry", "plum"}}},
                        {{"label", "metal"}, {"pool", {"iron", "copper", "zinc", "tin"}}}})},
        {"party_topic_bias",
         {{"OrgA", {{"fruit", 0.8}, {"metal", 0.2}}},
          {"OrgB", {{"fruit", 0.2}, {"metal", 0.8}}}}},
        {"comment_length_range", {3, 6}},
    };
    return j;
}

int run_parley(const std::string& sub, const fs::path& cfg, const fs::path& out) {
    const std::string cmd = g_parley_bin + " " + sub + " --config " +
                            cfg.string() + " --out " + out.string() +
                            " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

void run_chain(const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << chain_config(dir).dump(2);
    for (const std::string sub :
         {"synth", "prepare", "tag", "topics", "distances", "diagnose"})
        REQUIRE(run_parley(sub, cfg, dir) == 0);
}

void collect_csvs(const fs::path& root, std::vector<fs::path>& out) {
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            out.push_back(fs::relative(entry.path(), root));
    std::sort(out.begin(), out.end());
}

void criterion_9() {
    const fs::path base =
        fs::temp_directory_path() / ("parley_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);
    const fs::path dir1 = base / "run1", dir2 = base / "run2";
    run_chain(dir1);
    run_chain(dir2);

    std::vector<fs::path> csvs1, csvs2;
    collect_csvs(dir1, csvs1);
    collect_csvs(dir2, csvs2);
    REQUIRE(!csvs1.empty());
    REQUIRE(csvs1 == csvs2);
    for (const auto& rel : csvs1) REQUIRE(slurp(dir1 / rel) == slurp(dir2 / rel));

    // the master table reloads and re-serializes to the same bytes
    const fs::path master = dir1 / "corpus.csv";
    const std::vector<Comment> corpus = import_csv(master.string());
    std::ostringstream out;
    export_csv(corpus, out);
    REQUIRE(out.str() == slurp(master));

    fs::remove_all(base);
    pass(9, "pipeline rerun is byte-identical; master csv round-trips");
}

// ---------------------------------------------------------------------------
// 10. Corpus-shape sanity: 14 sessions of roughly 12,000 words.

void criterion_10() {
    SynthSpec spec;
    spec.seed = 2026;
    spec.parties = {{"Ann", "OrgA"}, {"Ben", "OrgB"}, {"Eva", "OrgC"}};
    for (int month = 1; month <= 6; ++month) spec.sessions.push_back({2018, month, 200});
    for (int month = 1; month <= 8; ++month) spec.sessions.push_back({2019, month, 200});
    spec.topics = {
        {"fruit", {"apple", "banana", "cherry", "plum", "grape", "mango"}},
        {"metal", {"iron", "copper", "zinc", "tin", "nickel", "cobalt"}},
    };
    spec.comment_length_range = {40, 80};  // mean 60 x 200 comments = 12,000

    const SynthResult result = generate(spec);
    long long words = 0;
    for (const auto& c : result.corpus) words += static_cast<long long>(token_count(c.text));

    const double target = 14.0 * 12000.0;
    REQUIRE(std::abs(static_cast<double>(words) - target) <= 0.05 * target);

    pass(10, "fourteen generated sessions land within 5% of 168,000 words");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: " << argv[0]
                  << " <parley-binary> <embedding-fixture>\n";
        return 2;
    }
    g_parley_bin = argv[1];
    g_embedding_fixture = argv[2];

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    std::printf("all acceptance checks passed\n");
    return 0;
}
