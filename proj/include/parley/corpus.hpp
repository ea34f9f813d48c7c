#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "parley/warnings.hpp"

namespace parley {

struct SessionMeta {
    std::string source_file;
    int year = 0;
    int month = 0;

    bool operator==(const SessionMeta&) const = default;
};

struct Comment {
    long long id = 0;
    std::string text;
    SessionMeta meta;
    std::string participant;
    std::string organisation;
    // Organisations of a shared statement, in order of appearance. Empty for
    // single-organisation turns.
    std::vector<std::string> multi_organisations;

    bool operator==(const Comment&) const = default;
};

struct NormalizationConfig {
    std::map<std::string, std::string> abbreviation_map;
    std::map<std::string, std::string> entity_map;
    std::vector<std::string> phrase_list;     // multi-word expressions, joined with _
    std::vector<std::string> strip_patterns;  // literal markers removed outright
};

// Drops control and zero-width/formatting characters, removes strip_patterns,
// expands abbreviations, unifies entity spellings, joins configured phrases
// with underscores, collapses whitespace. Case is preserved. Replacement is a
// single left-to-right pass, so idempotence holds as long as map values do not
// themselves contain map keys.
std::string clean_text(const std::string& raw, const NormalizationConfig& cfg);

// Note grammar: a turn header is `Name (Organisation): text` at indentation 0,
// shared statements join `Name (Org)` groups with `&`, and indented lines
// continue the preceding turn. Anything else at indentation 0 is dropped and
// ends the current turn. Ids are assigned sequentially from start_id.
std::vector<Comment> parse_notes(const std::string& raw_note,
                                 const SessionMeta& meta,
                                 const NormalizationConfig& cfg,
                                 long long start_id = 0,
                                 Warnings* warnings = nullptr);

// Lowercased maximal runs of [A-Za-z0-9_] (non-ASCII bytes count as letters),
// length >= 2.
std::vector<std::string> tokenize(const std::string& text);
std::size_t token_count(const std::string& text);

struct FilterCriteria {
    std::optional<std::set<std::string>> participants;
    std::optional<std::set<std::string>> organisations;
    std::optional<std::pair<int, int>> year;   // inclusive
    std::optional<std::pair<int, int>> month;  // inclusive
    bool exclude_multi_party = false;
};

// True when the comment was made by the organisation, alone or as part of a
// shared statement.
bool comment_belongs_to(const Comment& c, const std::string& organisation);

std::vector<Comment> filter_comments(const std::vector<Comment>& corpus,
                                     const FilterCriteria& criteria);

extern const char* const kCorpusCsvHeader;

// The eight master-table fields of one comment, in header order.
std::vector<std::string> comment_csv_fields(const Comment& c);

void export_csv(const std::vector<Comment>& corpus, std::ostream& out);
void export_csv(const std::vector<Comment>& corpus, const std::string& path);
std::vector<Comment> import_csv(std::istream& in);
std::vector<Comment> import_csv(const std::string& path);

// Reads year/month from a `YYYY-MM-*.txt` style name; nullopt when the name
// does not follow the convention.
std::optional<SessionMeta> meta_from_filename(const std::string& filename);

enum class GroupBy { year, year_month };

// "2019" or "2019-03"; zero-padded so lexicographic order is chronological.
std::string period_key(const SessionMeta& meta, GroupBy group_by);

}  // namespace parley
