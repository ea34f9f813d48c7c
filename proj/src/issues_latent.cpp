#include "parley/issues_latent.hpp"

#include <algorithm>
#include <cmath>

#include "parley/errors.hpp"

namespace parley {

DocTermMatrix build_tfidf(const std::vector<Comment>& corpus, const VocabConfig& cfg,
                          Warnings* warnings) {
    if (corpus.empty()) throw InvalidParams("corpus is empty");
    if (cfg.max_features < 1) throw InvalidParams("max_features must be >= 1");
    if (!(cfg.max_df > 0.0 && cfg.max_df <= 1.0))
        throw InvalidParams("max_df must lie in (0, 1]");

    const long n_docs = static_cast<long>(corpus.size());
    std::vector<std::map<std::string, double>> tf(corpus.size());
    std::map<std::string, long> df;
    std::map<std::string, long long> total;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for (auto& tok : tokenize(corpus[d].text)) {
            if (cfg.stopword_list.count(tok)) continue;
            if (cfg.deny_list && cfg.deny_list->count(tok)) continue;
            if (cfg.allow_list && !cfg.allow_list->count(tok)) continue;
            total[tok] += 1;
            tf[d][tok] += 1.0;
        }
        for (const auto& [tok, cnt] : tf[d]) ++df[tok];
    }

    const double df_cap = cfg.max_df * static_cast<double>(n_docs);
    std::vector<std::pair<long long, std::string>> candidates;
    for (const auto& [term, freq] : total) {
        if (static_cast<double>(df[term]) > df_cap) continue;
        candidates.emplace_back(freq, term);
    }
    if (candidates.empty()) throw EmptyVocabulary();
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (static_cast<long>(candidates.size()) > cfg.max_features)
        candidates.resize(cfg.max_features);

    DocTermMatrix out;
    for (const auto& [freq, term] : candidates) out.vocab.push_back(term);
    std::sort(out.vocab.begin(), out.vocab.end());
    std::map<std::string, long> col;
    for (std::size_t c = 0; c < out.vocab.size(); ++c)
        col[out.vocab[c]] = static_cast<long>(c);

    out.weights.resize(n_docs, static_cast<long>(out.vocab.size()));
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        out.docs.push_back(corpus[d].id);
        double norm2 = 0.0;
        std::vector<std::pair<long, double>> row;
        for (const auto& [term, count] : tf[d]) {
            auto it = col.find(term);
            if (it == col.end()) continue;
            const double idf =
                std::log((1.0 + n_docs) / (1.0 + df[term])) + 1.0;
            const double w = count * idf;
            row.emplace_back(it->second, w);
            norm2 += w * w;
        }
        if (row.empty()) {
            warn(warnings, "comment " + std::to_string(corpus[d].id) +
                               " has no vocabulary terms, zero row kept");
            continue;
        }
        const double norm = std::sqrt(norm2);
        for (const auto& [c, w] : row)
            triplets.emplace_back(static_cast<long>(d), c, w / norm);
    }
    out.weights.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> nndsvd_init(const SparseRowMatrix& X,
                                                        int k, Warnings* warnings) {
    const long n = X.rows(), m = X.cols();
    if (k < 1) throw InvalidParams("k must be positive");
    if (k > std::min(n, m)) throw InvalidParams("k exceeds min(docs, terms)");

    const TruncatedSvd svd = truncated_svd(X, k);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, k);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, m);

    W.col(0) = std::sqrt(svd.S(0)) * svd.U.col(0).cwiseAbs();
    H.row(0) = std::sqrt(svd.S(0)) * svd.V.col(0).cwiseAbs().transpose();

    bool deficient = false;
    for (int j = 1; j < k; ++j) {
        if (svd.S(j) <= svd.S(0) * 1e-12) {
            deficient = true;
            continue;
        }
        const Eigen::VectorXd x = svd.U.col(j), y = svd.V.col(j);
        const Eigen::VectorXd xp = x.cwiseMax(0.0), yp = y.cwiseMax(0.0);
        const Eigen::VectorXd xn = (-x).cwiseMax(0.0), yn = (-y).cwiseMax(0.0);
        const double mp = xp.norm() * yp.norm();
        const double mn = xn.norm() * yn.norm();
        if (mp == 0.0 && mn == 0.0) {
            deficient = true;
            continue;
        }
        const Eigen::VectorXd& u = mp >= mn ? xp : xn;
        const Eigen::VectorXd& v = mp >= mn ? yp : yn;
        const double sigma = mp >= mn ? mp : mn;
        const double scale = std::sqrt(svd.S(j) * sigma);
        W.col(j) = scale / u.norm() * u;
        H.row(j) = scale / v.norm() * v.transpose();
    }
    if (deficient)
        warn(warnings, "rank-deficient input: some init columns left at zero");
    return {std::move(W), std::move(H)};
}

namespace {

double objective(const SparseRowMatrix& X, double norm_x2, const Eigen::MatrixXd& W,
                 const Eigen::MatrixXd& H, double l1, double l2) {
    const Eigen::MatrixXd XHt = X * H.transpose();
    const double cross = (XHt.array() * W.array()).sum();
    const Eigen::MatrixXd WtW = W.transpose() * W;
    const Eigen::MatrixXd HHt = H * H.transpose();
    const double wh2 = (WtW.array() * HHt.array()).sum();
    double f = 0.5 * (norm_x2 - 2.0 * cross + wh2);
    if (l1 > 0.0) f += l1 * (W.sum() + H.sum());
    if (l2 > 0.0) f += 0.5 * l2 * (W.squaredNorm() + H.squaredNorm());
    return f;
}

}  // namespace

TopicModel fit_nmf(const DocTermMatrix& X, const NMFParams& params, Warnings* warnings) {
    if (params.k < 2) throw InvalidParams("k must be >= 2");
    if (params.alpha < 0.0) throw InvalidParams("alpha must be >= 0");
    if (!(params.l1_ratio >= 0.0 && params.l1_ratio <= 1.0))
        throw InvalidParams("l1_ratio must lie in [0, 1]");
    if (!(params.tol > 0.0)) throw InvalidParams("tol must be > 0");
    if (params.max_iter < 1) throw InvalidParams("max_iter must be >= 1");

    const auto& A = X.weights;
    const double l1 = params.alpha * params.l1_ratio;
    const double l2 = params.alpha * (1.0 - params.l1_ratio);
    const double norm_x2 = A.squaredNorm();

    auto [W, H] = nndsvd_init(A, params.k, warnings);
    const SparseRowMatrix At = A.transpose();

    TopicModel model;
    model.docs = X.docs;
    model.vocab = X.vocab;
    model.params = params;
    model.objective_trace.push_back(objective(A, norm_x2, W, H, l1, l2));
    const double initial = std::max(model.objective_trace.front(), 1e-300);

    for (int sweep = 0; sweep < params.max_iter; ++sweep) {
        {
            const Eigen::MatrixXd XHt = A * H.transpose();   // n x k
            const Eigen::MatrixXd HHt = H * H.transpose();   // k x k
            for (int j = 0; j < params.k; ++j) {
                const double denom = HHt(j, j) + l2;
                if (denom <= 0.0) {
                    W.col(j).setZero();
                    continue;
                }
                Eigen::VectorXd numer =
                    XHt.col(j) - W * HHt.col(j) + HHt(j, j) * W.col(j);
                if (l1 > 0.0) numer.array() -= l1;
                W.col(j) = (numer / denom).cwiseMax(0.0);
            }
        }
        {
            const Eigen::MatrixXd XtW = At * W;              // m x k
            const Eigen::MatrixXd WtW = W.transpose() * W;   // k x k
            for (int j = 0; j < params.k; ++j) {
                const double denom = WtW(j, j) + l2;
                if (denom <= 0.0) {
                    H.row(j).setZero();
                    continue;
                }
                Eigen::RowVectorXd numer = XtW.col(j).transpose() -
                                           WtW.row(j) * H + WtW(j, j) * H.row(j);
                if (l1 > 0.0) numer.array() -= l1;
                H.row(j) = (numer / denom).cwiseMax(0.0);
            }
        }
        const double prev = model.objective_trace.back();
        const double cur = objective(A, norm_x2, W, H, l1, l2);
        model.objective_trace.push_back(cur);
        if ((prev - cur) / initial < params.tol) {
            model.converged = true;
            break;
        }
    }
    if (!model.converged)
        warn(warnings, "nmf stopped at max_iter without meeting tol");
    model.doc_topic = std::move(W);
    model.topic_term = std::move(H);
    return model;
}

std::vector<std::vector<std::pair<std::string, double>>> topic_keywords(
    const TopicModel& model, int n) {
    if (n < 0) throw InvalidParams("keyword count must be >= 0");
    std::vector<std::vector<std::pair<std::string, double>>> out;
    const long m = model.topic_term.cols();
    for (int t = 0; t < model.topic_term.rows(); ++t) {
        std::vector<long> order(m);
        for (long c = 0; c < m; ++c) order[c] = c;
        std::sort(order.begin(), order.end(), [&](long a, long b) {
            const double wa = model.topic_term(t, a), wb = model.topic_term(t, b);
            if (wa != wb) return wa > wb;
            return model.vocab[a] < model.vocab[b];
        });
        std::vector<std::pair<std::string, double>> top;
        for (long i = 0; i < std::min<long>(n, m); ++i)
            top.emplace_back(model.vocab[order[i]], model.topic_term(t, order[i]));
        out.push_back(std::move(top));
    }
    return out;
}

std::map<long long, std::set<int>> assign_topics(const TopicModel& model,
                                                 std::optional<double> threshold) {
    const double thr = threshold.value_or(model.params.membership_threshold);
    std::map<long long, std::set<int>> out;
    for (long d = 0; d < model.doc_topic.rows(); ++d) {
        auto& topics = out[model.docs[d]];
        const double row_sum = model.doc_topic.row(d).sum();
        if (row_sum <= 0.0) continue;
        for (int t = 0; t < model.doc_topic.cols(); ++t)
            if (model.doc_topic(d, t) / row_sum >= thr) topics.insert(t);
    }
    return out;
}

std::vector<long long> representative_comments(const TopicModel& model, int topic,
                                               int n) {
    if (topic < 0 || topic >= model.doc_topic.cols())
        throw InvalidParams("topic index out of range");
    struct Entry {
        double purity;
        double weight;
        long long id;
    };
    std::vector<Entry> entries;
    for (long d = 0; d < model.doc_topic.rows(); ++d) {
        const double row_sum = model.doc_topic.row(d).sum();
        if (row_sum <= 0.0) continue;
        entries.push_back({model.doc_topic(d, topic) / row_sum,
                           model.doc_topic(d, topic), model.docs[d]});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.purity != b.purity) return a.purity > b.purity;
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.id < b.id;
    });
    std::vector<long long> out;
    for (std::size_t i = 0; i < entries.size() && i < static_cast<std::size_t>(n); ++i)
        out.push_back(entries[i].id);
    return out;
}

Eigen::MatrixXd topic_overlap(const std::map<long long, std::set<int>>& assignments,
                              int k) {
    std::vector<std::set<long long>> docs(k);
    for (const auto& [id, topics] : assignments)
        for (int t : topics)
            if (t >= 0 && t < k) docs[t].insert(id);
    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            std::vector<long long> inter;
            std::set_intersection(docs[i].begin(), docs[i].end(), docs[j].begin(),
                                  docs[j].end(), std::back_inserter(inter));
            const std::size_t uni = docs[i].size() + docs[j].size() - inter.size();
            overlap(i, j) = uni == 0 ? 0.0
                                     : static_cast<double>(inter.size()) /
                                           static_cast<double>(uni);
        }
    }
    return overlap;
}

std::vector<ActivityRow> latent_activity(
    const std::map<long long, std::set<int>>& assignments,
    const std::vector<Comment>& corpus, GroupBy group_by) {
    std::map<int, std::map<std::string, long long>> cells;
    for (const auto& c : corpus) {
        auto it = assignments.find(c.id);
        if (it == assignments.end() || it->second.empty()) continue;
        const auto words = static_cast<long long>(token_count(c.text));
        const std::string period = period_key(c.meta, group_by);
        for (int t : it->second) cells[t][period] += words;
    }
    std::vector<ActivityRow> rows;
    for (const auto& [topic, periods] : cells)
        for (const auto& [period, words] : periods)
            rows.push_back({std::to_string(topic), period, words});
    return rows;
}

}  // namespace parley
