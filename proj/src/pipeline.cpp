#include "parley/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "parley/config.hpp"
#include "parley/corpus.hpp"
#include "parley/csv.hpp"
#include "parley/diag.hpp"
#include "parley/embed.hpp"
#include "parley/errors.hpp"
#include "parley/issues_latent.hpp"
#include "parley/issues_query.hpp"
#include "parley/positions.hpp"
#include "parley/stopwords.hpp"
#include "parley/svg.hpp"
#include "parley/synth.hpp"
#include "parley/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace parley {
namespace {

// A prerequisite artifact that an earlier subcommand should have produced.
class MissingArtifact : public Error {
public:
    MissingArtifact(const std::string& path, const std::string& producer)
        : Error("missing " + path + "; run `parley " + producer + "` first") {}
};

struct RunContext {
    RunConfig cfg;
    fs::path out;
    bool emit_svg = false;
    Warnings& warnings;
    std::vector<std::string> files;  // written this run, relative to out
    json extra = json::object();     // merged into the manifest entry
};

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

void emit(RunContext& ctx, const std::string& rel, const std::string& content) {
    write_text_file(ctx.out / rel, content);
    ctx.files.push_back(rel);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Marker file held for the duration of a run so two runs cannot interleave
// writes into the same output directory.
class RunLock {
public:
    explicit RunLock(const fs::path& out_dir) : path_(out_dir / ".parley.lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw IoError(path_.string(),
                          "already exists; another run is using this output "
                          "directory (delete the file if that run crashed)");
        const std::string pid = std::to_string(::getpid()) + "\n";
        if (::write(fd_, pid.data(), pid.size()) < 0) {
            // lock still works; pid is informational
        }
    }
    ~RunLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

void append_manifest(RunContext& ctx, const std::string& subcommand, bool fixtures) {
    const fs::path mpath = ctx.out / "manifest.json";
    json m = json::object();
    if (fs::exists(mpath)) {
        try {
            m = json::parse(read_text_file(mpath));
        } catch (const json::exception&) {
            ctx.warnings.add("manifest.json was unreadable and has been reset");
            m = json::object();
        }
    }
    if (!m.contains("runs") || !m["runs"].is_array()) m["runs"] = json::array();
    json entry = {
        {"subcommand", subcommand},
        {"timestamp", utc_now()},
        {"tool", std::string("parley ") + kVersion},
        {"config_hash", hex64(fnv1a(config_to_json(ctx.cfg).dump()))},
    };
    entry[fixtures ? "fixtures" : "outputs"] = ctx.files;
    for (const auto& [k, v] : ctx.extra.items()) entry[k] = v;
    m["runs"].push_back(std::move(entry));
    write_text_file(mpath, m.dump(2) + "\n");
}

fs::path require_file(const RunContext& ctx, const std::string& rel,
                      const std::string& producer) {
    fs::path p = ctx.out / rel;
    if (!fs::exists(p)) throw MissingArtifact(p.string(), producer);
    return p;
}

std::set<std::string> stopwords_for(const RunConfig& cfg) {
    if (cfg.stopwords_path) return load_stopwords(*cfg.stopwords_path);
    return default_stopwords();
}

EmbeddingTable load_table(const RunConfig& cfg, const std::string& sub,
                          Warnings* warnings) {
    if (cfg.embedding_table.empty())
        throw ConfigError("embedding_table", "must be set for " + sub);
    if (!fs::exists(cfg.embedding_table))
        throw ConfigError("embedding_table", cfg.embedding_table + " does not exist");
    return EmbeddingTable::load(cfg.embedding_table, warnings);
}

std::string slug(const std::string& name) {
    std::string s;
    bool last_sep = true;
    for (char ch : name) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            s += static_cast<char>(std::tolower(c));
            last_sep = false;
        } else if (!last_sep) {
            s += '_';
            last_sep = true;
        }
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s.empty() ? "issue" : s;
}

std::string opt_num(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

// ---------------------------------------------------------------- prepare --

void cmd_prepare(RunContext& ctx) {
    if (ctx.cfg.notes_dir.empty())
        throw ConfigError("notes_dir", "must be set for prepare");
    const fs::path dir(ctx.cfg.notes_dir);
    if (!fs::is_directory(dir))
        throw ConfigError("notes_dir", ctx.cfg.notes_dir + " is not a directory");

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".txt")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<Comment> corpus;
    long long next_id = 0;
    for (const auto& f : files) {
        const auto meta = meta_from_filename(f.filename().string());
        if (!meta) {
            ctx.warnings.add("skipping " + f.filename().string() +
                             ": name does not start with YYYY-MM");
            continue;
        }
        const auto comments = parse_notes(read_text_file(f), *meta,
                                          ctx.cfg.normalization, next_id,
                                          &ctx.warnings);
        next_id += static_cast<long long>(comments.size());
        corpus.insert(corpus.end(), comments.begin(), comments.end());
    }
    if (corpus.empty())
        ctx.warnings.add("no comments found under " + ctx.cfg.notes_dir);

    std::ostringstream out;
    export_csv(corpus, out);
    emit(ctx, "corpus.csv", out.str());
}

// -------------------------------------------------------------------- tag --

std::vector<std::string> sorted_periods(const std::vector<Comment>& corpus,
                                        GroupBy group_by) {
    std::set<std::string> keys;
    for (const auto& c : corpus) keys.insert(period_key(c.meta, group_by));
    return {keys.begin(), keys.end()};
}

std::string activity_csv(const std::vector<ActivityRow>& rows, const char* label) {
    std::ostringstream out;
    write_csv_row(out, {label, "period", "words"});
    for (const auto& r : rows)
        write_csv_row(out, {r.issue, r.period, std::to_string(r.words)});
    return out.str();
}

std::string activity_svg(const std::vector<ActivityRow>& rows,
                         const std::string& title) {
    std::set<std::string> period_set;
    std::vector<std::string> order;  // first-appearance = catalog order
    std::map<std::string, std::map<std::string, double>> by_label;
    for (const auto& r : rows) {
        period_set.insert(r.period);
        if (!by_label.count(r.issue)) order.push_back(r.issue);
        by_label[r.issue][r.period] = static_cast<double>(r.words);
    }
    const std::vector<std::string> periods(period_set.begin(), period_set.end());
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const auto& label : order) {
        std::vector<double> vals;
        for (const auto& p : periods) {
            auto it = by_label[label].find(p);
            vals.push_back(it == by_label[label].end()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : it->second);
        }
        series.emplace_back(label, std::move(vals));
    }
    return svg_line_chart(title, periods, series);
}

void cmd_tag(RunContext& ctx) {
    const auto corpus =
        import_csv(require_file(ctx, "corpus.csv", "prepare").string());
    const auto table = load_table(ctx.cfg, "tag", &ctx.warnings);
    const auto vocab = corpus_vocabulary(corpus);
    const auto expanded =
        expand_catalog(ctx.cfg.issues, table, ctx.cfg.query, &vocab, &ctx.warnings);
    const auto tagged = tag_corpus(corpus, expanded);

    {
        std::ostringstream out;
        write_csv_row(out, {"issue", "seed", "term", "similarity"});
        for (const auto& iss : expanded.issues)
            for (const auto& t : iss.expanded)
                write_csv_row(out,
                              {iss.name, t.source_seed, t.term,
                               format_number(t.similarity)});
        emit(ctx, "expansion.csv", out.str());
    }
    {
        std::ostringstream out;
        std::vector<std::string> head = {"id",          "text",
                                         "source_file", "year",
                                         "month",       "participant",
                                         "organisation", "multi_organisation"};
        for (const auto& iss : tagged.issues) head.push_back(iss);
        head.push_back("evidence");
        write_csv_row(out, head);
        for (const auto& c : tagged.corpus) {
            auto fields = comment_csv_fields(c);
            const auto& tags = tagged.tags.at(c.id);
            for (const auto& iss : tagged.issues)
                fields.push_back(tags.count(iss) ? "1" : "0");
            std::string evidence;
            const auto ev = tagged.evidence.find(c.id);
            if (ev != tagged.evidence.end()) {
                for (const auto& iss : tagged.issues) {
                    const auto terms = ev->second.find(iss);
                    if (terms == ev->second.end()) continue;
                    if (!evidence.empty()) evidence += ';';
                    evidence += iss + ':';
                    for (std::size_t i = 0; i < terms->second.size(); ++i) {
                        if (i) evidence += '|';
                        evidence += terms->second[i];
                    }
                }
            }
            fields.push_back(evidence);
            write_csv_row(out, fields);
        }
        emit(ctx, "tagged.csv", out.str());
    }
    const auto rows = issue_activity(tagged, ctx.cfg.group_by);
    emit(ctx, "activity.csv", activity_csv(rows, "issue"));

    if (ctx.cfg.debug_per_seed_tags) {
        std::ostringstream out;
        write_csv_row(out, {"issue", "seed", "comment_id"});
        for (const auto& iss : expanded.issues) {
            for (const auto& seed : iss.seeds) {
                std::set<std::string> match = {seed};
                for (const auto& t : iss.expanded)
                    if (t.source_seed == seed) match.insert(t.term);
                for (const auto& c : tagged.corpus) {
                    const auto toks = tokenize(c.text);
                    const bool hit = std::any_of(
                        toks.begin(), toks.end(),
                        [&](const std::string& t) { return match.count(t) > 0; });
                    if (hit)
                        write_csv_row(out,
                                      {iss.name, seed, std::to_string(c.id)});
                }
            }
        }
        emit(ctx, "tags_by_seed.csv", out.str());
    }

    if (ctx.emit_svg)
        emit(ctx, "activity.svg", activity_svg(rows, "Issue activity"));
}

// ----------------------------------------------------------------- topics --

void cmd_topics(RunContext& ctx) {
    const auto corpus =
        import_csv(require_file(ctx, "corpus.csv", "prepare").string());
    std::vector<Comment> model_corpus = corpus;
    if (ctx.cfg.exclude_multi_party) {
        FilterCriteria crit;
        crit.exclude_multi_party = true;
        model_corpus = filter_comments(corpus, crit);
    }

    VocabConfig vc;
    vc.max_features = ctx.cfg.nmf.max_features;
    vc.max_df = ctx.cfg.nmf.max_df;
    vc.stopword_list = stopwords_for(ctx.cfg);
    const auto dtm = build_tfidf(model_corpus, vc, &ctx.warnings);
    const auto model = fit_nmf(dtm, ctx.cfg.nmf.params, &ctx.warnings);
    const auto keywords = topic_keywords(model, ctx.cfg.nmf.keywords);
    const auto assignments = assign_topics(model);

    {
        std::ostringstream out;
        write_csv_row(out, {"topic", "rank", "term", "weight"});
        for (std::size_t t = 0; t < keywords.size(); ++t)
            for (std::size_t r = 0; r < keywords[t].size(); ++r)
                write_csv_row(out, {std::to_string(t), std::to_string(r + 1),
                                    keywords[t][r].first,
                                    format_number(keywords[t][r].second)});
        emit(ctx, "topics_keywords.csv", out.str());
    }
    {
        std::ostringstream out;
        std::vector<std::string> head = {"id",          "text",
                                         "source_file", "year",
                                         "month",       "participant",
                                         "organisation", "multi_organisation",
                                         "topics"};
        write_csv_row(out, head);
        std::vector<const Comment*> rows;
        for (const auto& c : corpus) rows.push_back(&c);
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Comment* a, const Comment* b) {
                             return a->id < b->id;
                         });
        for (const Comment* c : rows) {
            auto fields = comment_csv_fields(*c);
            std::string topics;
            const auto it = assignments.find(c->id);
            if (it != assignments.end()) {
                for (int t : it->second) {
                    if (!topics.empty()) topics += '|';
                    topics += std::to_string(t);
                }
            }
            fields.push_back(topics);
            write_csv_row(out, fields);
        }
        emit(ctx, "topic_assignments.csv", out.str());
    }
    {
        std::ostringstream out;
        write_csv_row(out, {"topic", "rank", "id", "purity"});
        std::map<long long, int> row_of;
        for (std::size_t i = 0; i < model.docs.size(); ++i)
            row_of[model.docs[i]] = static_cast<int>(i);
        for (int t = 0; t < model.params.k; ++t) {
            const auto reps =
                representative_comments(model, t, ctx.cfg.nmf.representatives);
            for (std::size_t r = 0; r < reps.size(); ++r) {
                const int d = row_of.at(reps[r]);
                const double total = model.doc_topic.row(d).sum();
                const double purity =
                    total > 0 ? model.doc_topic(d, t) / total : 0.0;
                write_csv_row(out, {std::to_string(t), std::to_string(r + 1),
                                    std::to_string(reps[r]),
                                    format_number(purity)});
            }
        }
        emit(ctx, "representatives.csv", out.str());
    }
    {
        const auto overlap = topic_overlap(assignments, model.params.k);
        std::ostringstream out;
        std::vector<std::string> head = {"topic"};
        for (int j = 0; j < model.params.k; ++j) head.push_back(std::to_string(j));
        write_csv_row(out, head);
        for (int i = 0; i < model.params.k; ++i) {
            std::vector<std::string> row = {std::to_string(i)};
            for (int j = 0; j < model.params.k; ++j)
                row.push_back(format_number(overlap(i, j)));
            write_csv_row(out, row);
        }
        emit(ctx, "overlap.csv", out.str());
    }
    const auto rows = latent_activity(assignments, model_corpus, ctx.cfg.group_by);
    emit(ctx, "latent_activity.csv", activity_csv(rows, "topic"));

    if (ctx.cfg.nmf.sweep) {
        const int max_k = static_cast<int>(
            std::min(dtm.docs.size(), dtm.vocab.size()));
        std::ostringstream out;
        write_csv_row(out, {"k", "objective", "sweeps", "converged"});
        for (int k = ctx.cfg.nmf.sweep_min;
             k <= std::min(ctx.cfg.nmf.sweep_max, max_k); ++k) {
            NMFParams p = ctx.cfg.nmf.params;
            p.k = k;
            const auto m = fit_nmf(dtm, p, &ctx.warnings);
            write_csv_row(out,
                          {std::to_string(k),
                           format_number(m.objective_trace.back()),
                           std::to_string(m.objective_trace.size() - 1),
                           m.converged ? "1" : "0"});
        }
        if (ctx.cfg.nmf.sweep_min > max_k)
            ctx.warnings.add("sweep skipped: matrix supports at most k=" +
                             std::to_string(max_k));
        emit(ctx, "sweep_objectives.csv", out.str());
    }

    if (ctx.emit_svg)
        emit(ctx, "latent_activity.svg", activity_svg(rows, "Topic activity"));
}

// -------------------------------------------------------------- distances --

struct LoadedTags {
    std::vector<std::string> issues;
    TagMap tags;
};

LoadedTags load_query_tags(const fs::path& path) {
    const auto rows = read_csv_file(path.string());
    if (rows.empty()) throw ParseError(path.string() + ": empty", 1);
    const auto& head = rows.front();
    if (head.size() < 10 || head.back() != "evidence" || head.front() != "id")
        throw ParseError(path.string() + ": unexpected header", 1);
    LoadedTags out;
    out.issues.assign(head.begin() + 8, head.end() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != head.size())
            throw ParseError(path.string() + ": wrong field count",
                             static_cast<long>(r + 1));
        const long long id = parse_int(row[0], static_cast<long>(r + 1));
        auto& tags = out.tags[id];
        for (std::size_t i = 0; i < out.issues.size(); ++i)
            if (row[8 + i] == "1") tags.insert(out.issues[i]);
    }
    return out;
}

LoadedTags load_latent_tags(const fs::path& path) {
    const auto rows = read_csv_file(path.string());
    if (rows.empty()) throw ParseError(path.string() + ": empty", 1);
    const auto& head = rows.front();
    if (head.size() != 9 || head.back() != "topics" || head.front() != "id")
        throw ParseError(path.string() + ": unexpected header", 1);
    LoadedTags out;
    std::set<int> labels;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != head.size())
            throw ParseError(path.string() + ": wrong field count",
                             static_cast<long>(r + 1));
        const long long id = parse_int(row[0], static_cast<long>(r + 1));
        auto& tags = out.tags[id];
        std::istringstream ss(row[8]);
        std::string part;
        while (std::getline(ss, part, '|')) {
            if (part.empty()) continue;
            labels.insert(
                static_cast<int>(parse_int(part, static_cast<long>(r + 1))));
            tags.insert(part);
        }
    }
    for (int l : labels) out.issues.push_back(std::to_string(l));
    return out;
}

void cmd_distances(RunContext& ctx, const std::string& source) {
    const auto corpus =
        import_csv(require_file(ctx, "corpus.csv", "prepare").string());
    LoadedTags loaded;
    if (source == "query")
        loaded = load_query_tags(require_file(ctx, "tagged.csv", "tag"));
    else
        loaded = load_latent_tags(
            require_file(ctx, "topic_assignments.csv", "topics"));

    if (ctx.cfg.parties.empty())
        throw ConfigError("parties", "must be set for distances");

    std::optional<EmbeddingTable> table;
    std::optional<DocVectorStore> store;
    EmbeddingBackend backend;
    if (ctx.cfg.doc_vectors) {
        if (!fs::exists(*ctx.cfg.doc_vectors))
            throw ConfigError("doc_vectors",
                              *ctx.cfg.doc_vectors + " does not exist");
        store = DocVectorStore::load(*ctx.cfg.doc_vectors, &ctx.warnings);
        backend = PrecomputedBackend{&*store};
    } else {
        table = load_table(ctx.cfg, "distances", &ctx.warnings);
        PoolingOptions popts;
        popts.remove_stopwords = true;
        popts.stopword_list = stopwords_for(ctx.cfg);
        backend = StaticPoolingBackend{&*table, popts};
    }

    const auto periods = sorted_periods(corpus, ctx.cfg.group_by);
    const ReferenceMode mode =
        ctx.cfg.baseline_party ? ReferenceMode::baseline : ReferenceMode::average;
    const std::string kind = ctx.cfg.baseline_party
                                 ? "baseline:" + *ctx.cfg.baseline_party
                                 : "average";
    const std::string sub = "distances_" + source;

    auto positions_for = [&](const TagMap& tags, const std::string& issue,
                             const std::string& period) {
        std::vector<PartyPosition> ps;
        for (const auto& party : ctx.cfg.parties)
            ps.push_back(party_position(corpus, tags, backend, party, issue,
                                        period, ctx.cfg.group_by));
        return ps;
    };

    // Shared per-period reference over every tagged comment, when asked for.
    std::map<std::string, std::optional<Eigen::VectorXd>> global_ref;
    if (ctx.cfg.global_reference) {
        TagMap any;
        for (const auto& [id, tags] : loaded.tags)
            if (!tags.empty()) any[id] = {"__any__"};
        for (const auto& period : periods) {
            const auto ps = positions_for(any, "__any__", period);
            try {
                global_ref[period] = reference_position(
                    ps, mode, ctx.cfg.baseline_party.value_or(""),
                    &ctx.warnings);
            } catch (const NoReference&) {
                ctx.warnings.add("no shared reference for period " + period);
                global_ref[period] = std::nullopt;
            }
        }
    }

    // issue -> party -> period -> similarity, for the SVG rendering
    std::map<std::string, std::map<std::string, std::map<std::string, double>>>
        sim_chart;

    std::ostringstream profile_out;
    write_csv_row(profile_out, {"reference", "party", "issue", "period",
                                "similarity", "distance", "margin",
                                "word_count"});
    for (const auto& issue : loaded.issues) {
        for (const auto& period : periods) {
            const auto ps = positions_for(loaded.tags, issue, period);
            const bool any_data =
                std::any_of(ps.begin(), ps.end(),
                            [](const PartyPosition& p) { return bool(p.vec); });
            if (!any_data) continue;

            std::optional<Eigen::VectorXd> ref;
            if (ctx.cfg.global_reference) {
                ref = global_ref[period];
            } else {
                try {
                    ref = reference_position(
                        ps, mode, ctx.cfg.baseline_party.value_or(""),
                        &ctx.warnings);
                } catch (const NoReference&) {
                    ref = std::nullopt;
                }
            }
            if (!ref) {
                ctx.warnings.add("no reference for issue " + issue +
                                 " period " + period + "; rows skipped");
                continue;
            }

            const auto profile = distance_profile(ps, *ref, kind);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const auto& entry = profile.entries[i];
                std::optional<double> margin;
                if (ps[i].vec) {
                    const auto m = estimate_uncertainty(
                        corpus, loaded.tags, backend, ps[i].party, issue,
                        period, ctx.cfg.group_by, ctx.cfg.uncertainty,
                        &ctx.warnings);
                    margin = m.margin;
                }
                std::optional<double> distance;
                if (entry.similarity) {
                    distance = 1.0 - *entry.similarity;
                    sim_chart[issue][ps[i].party][period] = *entry.similarity;
                }
                write_csv_row(profile_out,
                              {kind, ps[i].party, issue, period,
                               opt_num(entry.similarity), opt_num(distance),
                               opt_num(margin),
                               std::to_string(ps[i].word_count)});
            }
        }
    }
    emit(ctx, sub + "/profile.csv", profile_out.str());

    json heatmaps = json::object();
    for (const auto& issue : loaded.issues) {
        const auto ps = positions_for(loaded.tags, issue, "");
        const long with_data =
            std::count_if(ps.begin(), ps.end(),
                          [](const PartyPosition& p) { return bool(p.vec); });
        if (with_data < 2) {
            ctx.warnings.add("heatmap skipped for issue " + issue +
                             ": fewer than two parties have data");
            continue;
        }
        const auto hm = pairwise_heatmap(ps, issue);
        const std::string stem = sub + "/heatmap_" + slug(issue);
        {
            std::ostringstream out;
            std::vector<std::string> head = {"party"};
            for (const auto& p : hm.parties) head.push_back(p);
            write_csv_row(out, head);
            for (Eigen::Index i = 0; i < hm.similarity.rows(); ++i) {
                std::vector<std::string> row = {hm.parties[i]};
                for (Eigen::Index j = 0; j < hm.similarity.cols(); ++j) {
                    const double v = hm.similarity(i, j);
                    row.push_back(std::isnan(v) ? "" : format_number(v));
                }
                write_csv_row(out, row);
            }
            emit(ctx, stem + ".csv", out.str());
        }
        {
            std::ostringstream out;
            std::vector<std::string> head = {"party"};
            for (const auto& p : hm.parties) head.push_back(p);
            write_csv_row(out, head);
            for (Eigen::Index i = 0; i < hm.levels.rows(); ++i) {
                std::vector<std::string> row = {hm.parties[i]};
                for (Eigen::Index j = 0; j < hm.levels.cols(); ++j) {
                    const int v = hm.levels(i, j);
                    row.push_back(v == 0 ? "" : std::to_string(v));
                }
                write_csv_row(out, row);
            }
            emit(ctx, stem + "_levels.csv", out.str());
        }
        heatmaps[issue] = {{"file", stem + ".csv"},
                           {"levels_file", stem + "_levels.csv"},
                           {"bin_low", hm.bin_low},
                           {"bin_width", hm.bin_width}};
        if (ctx.emit_svg)
            emit(ctx, stem + ".svg",
                 svg_heatmap_grid("Positions: " + issue, hm.parties,
                                  hm.similarity, hm.levels));
    }
    if (!heatmaps.empty()) ctx.extra["heatmaps"] = heatmaps;
    ctx.extra["source"] = source;

    {
        std::ostringstream out;
        write_csv_row(out, {"issue", "period", "party", "words"});
        for (const auto& issue : loaded.issues)
            for (const auto& period : periods)
                for (const auto& row : party_activity(corpus, loaded.tags,
                                                      issue, period,
                                                      ctx.cfg.group_by))
                    write_csv_row(out, {issue, period, row.party,
                                        std::to_string(row.words)});
        emit(ctx, sub + "/party_activity.csv", out.str());
    }

    if (ctx.emit_svg) {
        for (const auto& [issue, by_party] : sim_chart) {
            std::vector<std::pair<std::string, std::vector<double>>> series;
            for (const auto& party : ctx.cfg.parties) {
                const auto it = by_party.find(party);
                std::vector<double> vals;
                for (const auto& period : periods) {
                    double v = std::numeric_limits<double>::quiet_NaN();
                    if (it != by_party.end()) {
                        const auto jt = it->second.find(period);
                        if (jt != it->second.end()) v = jt->second;
                    }
                    vals.push_back(v);
                }
                series.emplace_back(party, std::move(vals));
            }
            emit(ctx, sub + "/profile_" + slug(issue) + ".svg",
                 svg_line_chart("Similarity to " + kind + ": " + issue,
                                periods, series));
        }
    }
}

// --------------------------------------------------------------- diagnose --

void cmd_diagnose(RunContext& ctx) {
    const auto table = load_table(ctx.cfg, "diagnose", &ctx.warnings);

    std::vector<std::string> s1, s2;
    if (ctx.cfg.diag_stream1 || ctx.cfg.diag_stream2) {
        if (!ctx.cfg.diag_stream1 || !ctx.cfg.diag_stream2)
            throw ConfigError("diag_stream2",
                              "both diagnostic streams must be set together");
        s1 = tokenize(read_text_file(*ctx.cfg.diag_stream1));
        s2 = tokenize(read_text_file(*ctx.cfg.diag_stream2));
    } else {
        const auto corpus =
            import_csv(require_file(ctx, "corpus.csv", "prepare").string());
        std::size_t n = 0;
        for (const auto& c : corpus)
            for (const auto& tok : tokenize(c.text))
                (n++ % 2 == 0 ? s1 : s2).push_back(tok);
    }
    if (ctx.cfg.diagnostics_remove_stopwords) {
        const auto stop = stopwords_for(ctx.cfg);
        const auto keep = [&](std::vector<std::string>& v) {
            std::erase_if(v, [&](const std::string& t) { return stop.count(t); });
        };
        keep(s1);
        keep(s2);
    }

    {
        const auto hist = anisotropy(table);
        std::ostringstream out;
        write_csv_row(out, {"dimension", "count"});
        for (std::size_t d = 0; d < hist.counts.size(); ++d)
            write_csv_row(out,
                          {std::to_string(d), std::to_string(hist.counts[d])});
        emit(ctx, "anisotropy.csv", out.str());
        if (ctx.emit_svg) {
            std::vector<std::string> labels;
            std::vector<double> values;
            for (std::size_t d = 0; d < hist.counts.size(); ++d) {
                labels.push_back(std::to_string(d));
                values.push_back(static_cast<double>(hist.counts[d]));
            }
            emit(ctx, "anisotropy.svg",
                 svg_bar_chart("Dominant component counts", labels, values));
        }
    }

    const auto rm = running_mean_extrema(table, s1);
    if (rm.skipped_oov > 0)
        ctx.warnings.add("running mean: skipped " +
                         std::to_string(rm.skipped_oov) +
                         " out-of-vocabulary tokens");
    {
        std::ostringstream out;
        write_csv_row(out, {"n", "component", "value"});
        const std::size_t n_steps = rm.max_component.size();
        for (std::size_t n = 0; n < n_steps; ++n) {
            write_csv_row(out, {std::to_string(n + 1), "max",
                                format_number(rm.max_component[n])});
            write_csv_row(out, {std::to_string(n + 1), "min",
                                format_number(rm.min_component[n])});
            if (ctx.cfg.diagnostics_full_components)
                for (Eigen::Index j = 0; j < rm.means.cols(); ++j)
                    write_csv_row(
                        out, {std::to_string(n + 1), "c" + std::to_string(j),
                              format_number(rm.means(
                                  static_cast<Eigen::Index>(n), j))});
        }
        emit(ctx, "running_mean.csv", out.str());
        if (ctx.emit_svg) {
            std::vector<std::string> xs;
            for (std::size_t n = 0; n < n_steps; ++n)
                xs.push_back(std::to_string(n + 1));
            emit(ctx, "running_mean.svg",
                 svg_line_chart("Running mean extrema", xs,
                                {{"max", rm.max_component},
                                 {"min", rm.min_component}}));
        }
    }
    {
        const auto sims = running_mean_similarity(table, s1, s2);
        std::ostringstream out;
        write_csv_row(out, {"n", "cosine"});
        for (std::size_t n = 0; n < sims.size(); ++n)
            write_csv_row(out,
                          {std::to_string(n + 1), format_number(sims[n])});
        emit(ctx, "running_sim.csv", out.str());
        if (ctx.emit_svg) {
            std::vector<std::string> xs;
            for (std::size_t n = 0; n < sims.size(); ++n)
                xs.push_back(std::to_string(n + 1));
            emit(ctx, "running_sim.svg",
                 svg_line_chart("Cross-stream running-mean cosine", xs,
                                {{"cosine", sims}}));
        }
    }
}

// ----------------------------------------------------------------- filter --

void cmd_filter(RunContext& ctx) {
    if (!ctx.cfg.filter)
        throw ConfigError("filter", "must be set for filter");
    const auto corpus =
        import_csv(require_file(ctx, "corpus.csv", "prepare").string());
    const auto kept = filter_comments(corpus, ctx.cfg.filter->criteria);
    if (kept.empty()) ctx.warnings.add("filter matched no comments");
    std::ostringstream out;
    export_csv(kept, out);
    emit(ctx, ctx.cfg.filter->output, out.str());
}

// ------------------------------------------------------------------ synth --

void cmd_synth(RunContext& ctx) {
    if (!ctx.cfg.synth)
        throw ConfigError("synth", "must be set for synth");
    const SynthSpec& spec = *ctx.cfg.synth;
    const auto result = generate(spec);

    const fs::path notes = ctx.out / "notes";
    fs::create_directories(notes);
    write_note_files(result.corpus, notes.string());
    std::set<std::string> note_names;
    for (const auto& c : result.corpus) note_names.insert(c.meta.source_file);
    for (const auto& name : note_names) ctx.files.push_back("notes/" + name);

    write_ground_truth(result, (ctx.out / "ground_truth.csv").string());
    ctx.files.push_back("ground_truth.csv");

    const auto table = synthetic_embeddings(spec);
    table.save((ctx.out / "embeddings_synth.txt").string());
    ctx.files.push_back("embeddings_synth.txt");
}

int classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) ||
        dynamic_cast<const InvalidSpec*>(&e) ||
        dynamic_cast<const InvalidParams*>(&e) ||
        dynamic_cast<const EmptyCatalog*>(&e) ||
        dynamic_cast<const MissingArtifact*>(&e))
        return 1;
    return 2;
}

}  // namespace

int run_command(const std::string& subcommand, const std::string& config_path,
                const CliOverrides& overrides) {
    Warnings warnings;
    const auto flush = [&warnings] {
        for (const auto& w : warnings.messages())
            std::cerr << "warning: " << w << "\n";
    };
    try {
        RunConfig cfg = load_config(config_path);
        if (overrides.seed) {
            cfg.uncertainty.seed = *overrides.seed;
            if (cfg.synth) cfg.synth->seed = *overrides.seed;
        }
        if (overrides.baseline) cfg.baseline_party = *overrides.baseline;
        if (overrides.emit_svg) cfg.emit_svg = true;

        std::string out_dir;
        if (overrides.out_dir)
            out_dir = *overrides.out_dir;
        else if (!cfg.output_dir.empty())
            out_dir = cfg.output_dir;
        else if (const char* env = std::getenv("PARLEY_OUT"); env && *env)
            out_dir = env;
        else
            out_dir = "out";

        const std::string source = overrides.source.value_or("query");
        if (subcommand == "distances" && source != "query" && source != "latent")
            throw InvalidParams("--source expects 'query' or 'latent'");

        RunContext ctx{std::move(cfg), fs::path(out_dir), false, warnings};
        ctx.emit_svg = ctx.cfg.emit_svg;
        fs::create_directories(ctx.out);
        RunLock lock(ctx.out);

        if (subcommand == "prepare")
            cmd_prepare(ctx);
        else if (subcommand == "tag")
            cmd_tag(ctx);
        else if (subcommand == "topics")
            cmd_topics(ctx);
        else if (subcommand == "distances")
            cmd_distances(ctx, source);
        else if (subcommand == "diagnose")
            cmd_diagnose(ctx);
        else if (subcommand == "filter")
            cmd_filter(ctx);
        else if (subcommand == "synth")
            cmd_synth(ctx);
        else
            throw InvalidParams("unknown subcommand: " + subcommand);

        append_manifest(ctx, subcommand, subcommand == "synth");
        flush();
        return 0;
    } catch (const std::exception& e) {
        flush();
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

}  // namespace parley
