#include "parley/config.hpp"

#include <fstream>

#include "parley/errors.hpp"

namespace parley {

using nlohmann::json;

namespace {

const json* find(const json& root, const std::string& dotted) {
    const json* node = &root;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
        if (dot == std::string::npos) return node;
        start = dot + 1;
    }
}

template <typename T>
T value_or(const json& root, const std::string& dotted, T fallback) {
    const json* node = find(root, dotted);
    if (!node || node->is_null()) return fallback;
    try {
        return node->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(dotted, e.what());
    }
}

std::optional<std::string> opt_string(const json& root, const std::string& dotted) {
    const json* node = find(root, dotted);
    if (!node || node->is_null()) return std::nullopt;
    if (!node->is_string()) throw ConfigError(dotted, "expected a string");
    return node->get<std::string>();
}

void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

std::optional<std::pair<int, int>> opt_range(const json& root,
                                             const std::string& dotted) {
    const json* node = find(root, dotted);
    if (!node || node->is_null()) return std::nullopt;
    if (!node->is_array() || node->size() != 2)
        throw ConfigError(dotted, "expected [low, high]");
    try {
        return std::make_pair((*node)[0].get<int>(), (*node)[1].get<int>());
    } catch (const json::exception& e) {
        throw ConfigError(dotted, e.what());
    }
}

}  // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;

    cfg.notes_dir = value_or<std::string>(j, "paths.notes_dir", "");
    cfg.embedding_table = value_or<std::string>(j, "paths.embedding_table", "");
    cfg.doc_vectors = opt_string(j, "paths.doc_vectors");
    cfg.output_dir = value_or<std::string>(j, "paths.output_dir", "");
    cfg.stopwords_path = opt_string(j, "paths.stopwords");

    cfg.normalization.abbreviation_map = value_or<std::map<std::string, std::string>>(
        j, "normalization.abbreviation_map", {});
    cfg.normalization.entity_map =
        value_or<std::map<std::string, std::string>>(j, "normalization.entity_map", {});
    cfg.normalization.phrase_list =
        value_or<std::vector<std::string>>(j, "normalization.phrase_list", {});
    cfg.normalization.strip_patterns =
        value_or<std::vector<std::string>>(j, "normalization.strip_patterns", {});
    for (const auto& [key, val] : cfg.normalization.abbreviation_map)
        check(!key.empty(), "normalization.abbreviation_map", "empty key");
    for (const auto& [key, val] : cfg.normalization.entity_map)
        check(!key.empty(), "normalization.entity_map", "empty key");
    for (const auto& p : cfg.normalization.phrase_list)
        check(p.find(' ') != std::string::npos, "normalization.phrase_list",
              "phrase '" + p + "' needs at least two words");

    if (const json* issues = find(j, "issues")) {
        check(issues->is_array(), "issues", "expected an array");
        for (std::size_t i = 0; i < issues->size(); ++i) {
            const auto& entry = (*issues)[i];
            const std::string path = "issues[" + std::to_string(i) + "]";
            check(entry.is_object() && entry.contains("name") && entry.contains("seeds"),
                  path, "expected {name, seeds}");
            Issue issue;
            try {
                issue.name = entry["name"].get<std::string>();
                issue.seeds = entry["seeds"].get<std::vector<std::string>>();
            } catch (const json::exception& e) {
                throw ConfigError(path, e.what());
            }
            check(!issue.name.empty(), path + ".name", "empty issue name");
            check(!issue.seeds.empty(), path + ".seeds", "no seed keywords");
            cfg.issues.issues.push_back(std::move(issue));
        }
    }

    cfg.query.min_sim = value_or<double>(j, "query.min_sim", cfg.query.min_sim);
    cfg.query.raise_to = value_or<double>(j, "query.raise_to", cfg.query.raise_to);
    cfg.query.cap = value_or<int>(j, "query.cap", cfg.query.cap);
    check(cfg.query.min_sim > 0.0 && cfg.query.min_sim <= 1.0, "query.min_sim",
          "must lie in (0, 1]");
    check(cfg.query.raise_to > 0.0 && cfg.query.raise_to <= 1.0, "query.raise_to",
          "must lie in (0, 1]");
    check(cfg.query.min_sim <= cfg.query.raise_to, "query.min_sim",
          "must not exceed raise_to");
    check(cfg.query.cap >= 0, "query.cap", "must be nonnegative");

    auto& nmf = cfg.nmf;
    nmf.params.k = value_or<int>(j, "nmf.k", nmf.params.k);
    nmf.params.alpha = value_or<double>(j, "nmf.alpha", nmf.params.alpha);
    nmf.params.l1_ratio = value_or<double>(j, "nmf.l1_ratio", nmf.params.l1_ratio);
    nmf.params.tol = value_or<double>(j, "nmf.tol", nmf.params.tol);
    nmf.params.max_iter = value_or<int>(j, "nmf.max_iter", nmf.params.max_iter);
    nmf.params.membership_threshold =
        value_or<double>(j, "nmf.membership_threshold", nmf.params.membership_threshold);
    nmf.max_features = value_or<int>(j, "nmf.max_features", nmf.max_features);
    nmf.max_df = value_or<double>(j, "nmf.max_df", nmf.max_df);
    nmf.keywords = value_or<int>(j, "nmf.keywords", nmf.keywords);
    nmf.representatives = value_or<int>(j, "nmf.representatives", nmf.representatives);
    nmf.sweep = value_or<bool>(j, "nmf.sweep", nmf.sweep);
    nmf.sweep_min = value_or<int>(j, "nmf.sweep_min", nmf.sweep_min);
    nmf.sweep_max = value_or<int>(j, "nmf.sweep_max", nmf.sweep_max);
    check(nmf.params.k >= 2, "nmf.k", "must be >= 2");
    check(nmf.params.alpha >= 0.0, "nmf.alpha", "must be >= 0");
    check(nmf.params.l1_ratio >= 0.0 && nmf.params.l1_ratio <= 1.0, "nmf.l1_ratio",
          "must lie in [0, 1]");
    check(nmf.params.tol > 0.0, "nmf.tol", "must be > 0");
    check(nmf.params.max_iter >= 1, "nmf.max_iter", "must be >= 1");
    check(nmf.params.membership_threshold >= 0.0 &&
              nmf.params.membership_threshold <= 1.0,
          "nmf.membership_threshold", "must lie in [0, 1]");
    check(nmf.max_features >= 1, "nmf.max_features", "must be >= 1");
    check(nmf.max_df > 0.0 && nmf.max_df <= 1.0, "nmf.max_df", "must lie in (0, 1]");
    check(nmf.keywords >= 1, "nmf.keywords", "must be >= 1");
    check(nmf.representatives >= 1, "nmf.representatives", "must be >= 1");
    check(nmf.sweep_min >= 2 && nmf.sweep_max >= nmf.sweep_min, "nmf.sweep_min",
          "sweep range must satisfy 2 <= min <= max");

    cfg.parties = value_or<std::vector<std::string>>(j, "parties", {});
    cfg.baseline_party = opt_string(j, "baseline_party");

    cfg.uncertainty.fraction =
        value_or<double>(j, "uncertainty.fraction", cfg.uncertainty.fraction);
    cfg.uncertainty.reps = value_or<int>(j, "uncertainty.reps", cfg.uncertainty.reps);
    cfg.uncertainty.seed =
        value_or<std::uint64_t>(j, "uncertainty.seed", cfg.uncertainty.seed);
    check(cfg.uncertainty.fraction > 0.0 && cfg.uncertainty.fraction < 1.0,
          "uncertainty.fraction", "must lie in (0, 1)");
    check(cfg.uncertainty.reps >= 1, "uncertainty.reps", "must be >= 1");

    const std::string group = value_or<std::string>(j, "group_by", "year");
    if (group == "year")
        cfg.group_by = GroupBy::year;
    else if (group == "year_month")
        cfg.group_by = GroupBy::year_month;
    else
        throw ConfigError("group_by", "expected 'year' or 'year_month'");

    cfg.exclude_multi_party =
        value_or<bool>(j, "flags.exclude_multi_party", cfg.exclude_multi_party);
    cfg.emit_svg = value_or<bool>(j, "flags.emit_svg", cfg.emit_svg);
    cfg.global_reference =
        value_or<bool>(j, "flags.global_reference", cfg.global_reference);
    cfg.diagnostics_remove_stopwords = value_or<bool>(
        j, "flags.diagnostics_remove_stopwords", cfg.diagnostics_remove_stopwords);
    cfg.diagnostics_full_components = value_or<bool>(
        j, "flags.diagnostics_full_components", cfg.diagnostics_full_components);
    cfg.debug_per_seed_tags =
        value_or<bool>(j, "flags.debug_per_seed_tags", cfg.debug_per_seed_tags);

    if (const json* f = find(j, "filter"); f && !f->is_null()) {
        RunConfig::FilterConfig fc;
        if (auto v = value_or<std::vector<std::string>>(j, "filter.participants", {});
            !v.empty())
            fc.criteria.participants = std::set<std::string>(v.begin(), v.end());
        if (auto v = value_or<std::vector<std::string>>(j, "filter.organisations", {});
            !v.empty())
            fc.criteria.organisations = std::set<std::string>(v.begin(), v.end());
        fc.criteria.year = opt_range(j, "filter.year");
        fc.criteria.month = opt_range(j, "filter.month");
        fc.criteria.exclude_multi_party =
            value_or<bool>(j, "filter.exclude_multi_party", false);
        fc.output = value_or<std::string>(j, "filter.output", fc.output);
        cfg.filter = std::move(fc);
    }

    if (const json* s = find(j, "synth"); s && !s->is_null()) {
        SynthSpec spec;
        spec.seed = value_or<std::uint64_t>(j, "synth.seed", spec.seed);
        if (const json* parties = find(j, "synth.parties")) {
            check(parties->is_array(), "synth.parties", "expected an array");
            for (std::size_t i = 0; i < parties->size(); ++i) {
                const auto& p = (*parties)[i];
                const std::string path = "synth.parties[" + std::to_string(i) + "]";
                check(p.is_object() && p.contains("name") && p.contains("organisation"),
                      path, "expected {name, organisation}");
                spec.parties.push_back(
                    {p["name"].get<std::string>(), p["organisation"].get<std::string>()});
            }
        }
        if (const json* sessions = find(j, "synth.sessions")) {
            check(sessions->is_array(), "synth.sessions", "expected an array");
            for (std::size_t i = 0; i < sessions->size(); ++i) {
                const auto& s2 = (*sessions)[i];
                const std::string path = "synth.sessions[" + std::to_string(i) + "]";
                check(s2.is_object() && s2.contains("year") && s2.contains("month") &&
                          s2.contains("comments"),
                      path, "expected {year, month, comments}");
                spec.sessions.push_back({s2["year"].get<int>(), s2["month"].get<int>(),
                                         s2["comments"].get<int>()});
            }
        }
        if (const json* topics = find(j, "synth.topics")) {
            check(topics->is_array(), "synth.topics", "expected an array");
            for (std::size_t i = 0; i < topics->size(); ++i) {
                const auto& t = (*topics)[i];
                const std::string path = "synth.topics[" + std::to_string(i) + "]";
                check(t.is_object() && t.contains("label") && t.contains("pool"), path,
                      "expected {label, pool}");
                spec.topics.push_back({t["label"].get<std::string>(),
                                       t["pool"].get<std::vector<std::string>>()});
            }
        }
        spec.party_topic_bias =
            value_or<std::map<std::string, std::map<std::string, double>>>(
                j, "synth.party_topic_bias", {});
        if (const json* range = find(j, "synth.comment_length_range");
            range && !range->is_null()) {
            auto r = opt_range(j, "synth.comment_length_range");
            spec.comment_length_range = *r;
        }
        try {
            validate_spec(spec);
        } catch (const InvalidSpec& e) {
            throw ConfigError("synth", e.what());
        }
        cfg.synth = std::move(spec);
    }

    cfg.diag_stream1 = opt_string(j, "diagnostics.stream1");
    cfg.diag_stream2 = opt_string(j, "diagnostics.stream2");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("paths", "cannot open config file " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw ConfigError("<root>", e.what());
    }
    return parse_config(j);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json j;
    j["paths"]["notes_dir"] = cfg.notes_dir;
    j["paths"]["embedding_table"] = cfg.embedding_table;
    j["paths"]["doc_vectors"] = cfg.doc_vectors ? json(*cfg.doc_vectors) : json();
    j["paths"]["output_dir"] = cfg.output_dir;
    j["paths"]["stopwords"] = cfg.stopwords_path ? json(*cfg.stopwords_path) : json();

    j["normalization"]["abbreviation_map"] = cfg.normalization.abbreviation_map;
    j["normalization"]["entity_map"] = cfg.normalization.entity_map;
    j["normalization"]["phrase_list"] = cfg.normalization.phrase_list;
    j["normalization"]["strip_patterns"] = cfg.normalization.strip_patterns;

    j["issues"] = json::array();
    for (const auto& issue : cfg.issues.issues)
        j["issues"].push_back({{"name", issue.name}, {"seeds", issue.seeds}});

    j["query"]["min_sim"] = cfg.query.min_sim;
    j["query"]["raise_to"] = cfg.query.raise_to;
    j["query"]["cap"] = cfg.query.cap;

    j["nmf"]["k"] = cfg.nmf.params.k;
    j["nmf"]["alpha"] = cfg.nmf.params.alpha;
    j["nmf"]["l1_ratio"] = cfg.nmf.params.l1_ratio;
    j["nmf"]["tol"] = cfg.nmf.params.tol;
    j["nmf"]["max_iter"] = cfg.nmf.params.max_iter;
    j["nmf"]["membership_threshold"] = cfg.nmf.params.membership_threshold;
    j["nmf"]["max_features"] = cfg.nmf.max_features;
    j["nmf"]["max_df"] = cfg.nmf.max_df;
    j["nmf"]["keywords"] = cfg.nmf.keywords;
    j["nmf"]["representatives"] = cfg.nmf.representatives;
    j["nmf"]["sweep"] = cfg.nmf.sweep;
    j["nmf"]["sweep_min"] = cfg.nmf.sweep_min;
    j["nmf"]["sweep_max"] = cfg.nmf.sweep_max;

    j["parties"] = cfg.parties;
    j["baseline_party"] = cfg.baseline_party ? json(*cfg.baseline_party) : json();

    j["uncertainty"]["fraction"] = cfg.uncertainty.fraction;
    j["uncertainty"]["reps"] = cfg.uncertainty.reps;
    j["uncertainty"]["seed"] = cfg.uncertainty.seed;

    j["group_by"] = cfg.group_by == GroupBy::year ? "year" : "year_month";

    j["flags"]["exclude_multi_party"] = cfg.exclude_multi_party;
    j["flags"]["emit_svg"] = cfg.emit_svg;
    j["flags"]["global_reference"] = cfg.global_reference;
    j["flags"]["diagnostics_remove_stopwords"] = cfg.diagnostics_remove_stopwords;
    j["flags"]["diagnostics_full_components"] = cfg.diagnostics_full_components;
    j["flags"]["debug_per_seed_tags"] = cfg.debug_per_seed_tags;

    if (cfg.filter) {
        auto& f = j["filter"];
        if (cfg.filter->criteria.participants)
            f["participants"] = *cfg.filter->criteria.participants;
        if (cfg.filter->criteria.organisations)
            f["organisations"] = *cfg.filter->criteria.organisations;
        if (cfg.filter->criteria.year)
            f["year"] = {cfg.filter->criteria.year->first,
                         cfg.filter->criteria.year->second};
        if (cfg.filter->criteria.month)
            f["month"] = {cfg.filter->criteria.month->first,
                          cfg.filter->criteria.month->second};
        f["exclude_multi_party"] = cfg.filter->criteria.exclude_multi_party;
        f["output"] = cfg.filter->output;
    }

    if (cfg.synth) {
        auto& s = j["synth"];
        s["seed"] = cfg.synth->seed;
        s["parties"] = json::array();
        for (const auto& p : cfg.synth->parties)
            s["parties"].push_back(
                {{"name", p.name}, {"organisation", p.organisation}});
        s["sessions"] = json::array();
        for (const auto& sess : cfg.synth->sessions)
            s["sessions"].push_back({{"year", sess.year},
                                     {"month", sess.month},
                                     {"comments", sess.n_comments}});
        s["topics"] = json::array();
        for (const auto& t : cfg.synth->topics)
            s["topics"].push_back({{"label", t.label}, {"pool", t.word_pool}});
        s["party_topic_bias"] = cfg.synth->party_topic_bias;
        s["comment_length_range"] = {cfg.synth->comment_length_range.first,
                                     cfg.synth->comment_length_range.second};
    }

    if (cfg.diag_stream1) j["diagnostics"]["stream1"] = *cfg.diag_stream1;
    if (cfg.diag_stream2) j["diagnostics"]["stream2"] = *cfg.diag_stream2;
    return j;
}

}  // namespace parley
