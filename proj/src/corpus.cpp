#include "parley/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "parley/csv.hpp"
#include "parley/errors.hpp"

namespace parley {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_space_byte(unsigned char c) { return c == ' ' || c == '\t'; }

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

// Control bytes and zero-width/formatting codepoints go away; space-like
// codepoints become plain spaces; everything else passes through untouched.
std::string strip_forbidden(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    const std::size_t n = raw.size();
    while (i < n) {
        const unsigned char c0 = raw[i];
        if (c0 < 0x80) {
            if (c0 == '\t' || c0 == '\n' || c0 == '\r' || c0 == '\f' || c0 == '\v')
                out.push_back(' ');
            else if (c0 >= 0x20 && c0 != 0x7f)
                out.push_back(static_cast<char>(c0));
            ++i;
            continue;
        }
        std::size_t len = 1;
        char32_t cp = 0;
        if (c0 >= 0xF0)
            len = 4, cp = c0 & 0x07;
        else if (c0 >= 0xE0)
            len = 3, cp = c0 & 0x0F;
        else if (c0 >= 0xC0)
            len = 2, cp = c0 & 0x1F;
        bool valid = len > 1 && i + len <= n;
        for (std::size_t k = 1; valid && k < len; ++k) {
            const unsigned char ck = raw[i + k];
            if ((ck & 0xC0) != 0x80)
                valid = false;
            else
                cp = (cp << 6) | (ck & 0x3F);
        }
        if (!valid) {
            out.push_back(static_cast<char>(c0));
            ++i;
            continue;
        }
        const bool drop = cp == 0xAD || (cp >= 0x200B && cp <= 0x200F) ||
                          (cp >= 0x202A && cp <= 0x202E) ||
                          (cp >= 0x2060 && cp <= 0x2064) || cp == 0xFEFF ||
                          (cp >= 0xFFF9 && cp <= 0xFFFB) || cp == 0x180E;
        const bool spacey = cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) ||
                            cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
                            cp == 0x205F || cp == 0x3000;
        if (spacey)
            out.push_back(' ');
        else if (!drop)
            out.append(raw, i, len);
        i += len;
    }
    return out;
}

std::string strip_literals(std::string text, const std::vector<std::string>& patterns) {
    for (const auto& p : patterns) {
        if (p.empty()) continue;
        std::size_t pos = 0;
        while ((pos = text.find(p, pos)) != std::string::npos) {
            text.replace(pos, p.size(), " ");
            ++pos;
        }
    }
    return text;
}

using Rules = std::vector<std::pair<std::string, std::string>>;

Rules by_length(const std::map<std::string, std::string>& m) {
    Rules rules(m.begin(), m.end());
    std::stable_sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });
    return rules;
}

// One left-to-right pass; keys only match on word boundaries; longest key wins.
std::string replace_words(const std::string& text, const Rules& rules) {
    if (rules.empty()) return text;
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        bool replaced = false;
        for (const auto& [key, value] : rules) {
            if (key.empty() || text.compare(i, key.size(), key) != 0) continue;
            if (i > 0 && is_word_byte(text[i - 1]) && is_word_byte(key.front())) continue;
            const std::size_t end = i + key.size();
            if (end < text.size() && is_word_byte(text[end]) && is_word_byte(key.back()))
                continue;
            out += value;
            i = end;
            replaced = true;
            break;
        }
        if (!replaced) out.push_back(text[i++]);
    }
    return out;
}

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending = false;
    for (unsigned char c : text) {
        if (is_space_byte(c)) {
            pending = !out.empty();
        } else {
            if (pending) out.push_back(' ');
            pending = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

char ascii_lower(char c) {
    return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c;
}

// Case-insensitive phrase match over single-spaced text; the matched span is
// emitted with its original case, spaces turned into underscores.
std::string merge_phrases(const std::string& text, std::vector<std::string> phrases) {
    phrases.erase(std::remove_if(phrases.begin(), phrases.end(),
                                 [](const std::string& p) {
                                     return p.find(' ') == std::string::npos;
                                 }),
                  phrases.end());
    if (phrases.empty()) return text;
    for (auto& p : phrases) p = collapse_whitespace(trim(p));
    std::stable_sort(phrases.begin(), phrases.end(), [](const auto& a, const auto& b) {
        return a.size() > b.size();
    });

    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        bool replaced = false;
        if (i == 0 || !is_word_byte(text[i - 1])) {
            for (const auto& phrase : phrases) {
                if (i + phrase.size() > text.size()) continue;
                bool eq = true;
                for (std::size_t k = 0; eq && k < phrase.size(); ++k)
                    eq = ascii_lower(text[i + k]) == ascii_lower(phrase[k]);
                if (!eq) continue;
                const std::size_t end = i + phrase.size();
                if (end < text.size() && is_word_byte(text[end])) continue;
                for (std::size_t k = 0; k < phrase.size(); ++k)
                    out.push_back(text[i + k] == ' ' ? '_' : text[i + k]);
                i = end;
                replaced = true;
                break;
            }
        }
        if (!replaced) out.push_back(text[i++]);
    }
    return out;
}

}  // namespace

std::string clean_text(const std::string& raw, const NormalizationConfig& cfg) {
    std::string s = strip_forbidden(raw);
    s = strip_literals(std::move(s), cfg.strip_patterns);
    s = replace_words(s, by_length(cfg.abbreviation_map));
    s = replace_words(s, by_length(cfg.entity_map));
    s = collapse_whitespace(s);
    s = merge_phrases(s, cfg.phrase_list);
    return s;
}

namespace {

struct Turn {
    std::vector<std::pair<std::string, std::string>> speakers;
    std::string text;
};

// `Name (Org)` groups joined by `&`, then `:` and the turn text.
std::optional<Turn> parse_header(const std::string& line) {
    Turn turn;
    std::size_t i = 0;
    while (true) {
        const std::size_t open = line.find('(', i);
        if (open == std::string::npos) return std::nullopt;
        const std::string name = trim(std::string_view(line).substr(i, open - i));
        if (name.empty() || name.find(':') != std::string::npos) return std::nullopt;
        const std::size_t close = line.find(')', open + 1);
        if (close == std::string::npos) return std::nullopt;
        const std::string org =
            trim(std::string_view(line).substr(open + 1, close - open - 1));
        if (org.empty()) return std::nullopt;
        turn.speakers.emplace_back(name, org);
        std::size_t k = close + 1;
        while (k < line.size() && is_space_byte(line[k])) ++k;
        if (k < line.size() && line[k] == ':') {
            turn.text = line.substr(k + 1);
            return turn;
        }
        if (k < line.size() && line[k] == '&') {
            i = k + 1;
            continue;
        }
        return std::nullopt;
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::vector<Comment> parse_notes(const std::string& raw_note,
                                 const SessionMeta& meta,
                                 const NormalizationConfig& cfg,
                                 long long start_id,
                                 Warnings* warnings) {
    std::vector<Comment> out;
    std::optional<Turn> current;
    long long next_id = start_id;

    auto flush = [&] {
        if (!current) return;
        Turn turn = std::move(*current);
        current.reset();
        const std::string text = clean_text(turn.text, cfg);
        if (text.empty()) {
            warn(warnings, meta.source_file + ": turn with empty text dropped");
            return;
        }
        Comment c;
        c.id = next_id++;
        c.text = text;
        c.meta = meta;
        std::vector<std::string> names, orgs;
        for (auto& [name, org] : turn.speakers) {
            names.push_back(name);
            if (std::find(orgs.begin(), orgs.end(), org) == orgs.end())
                orgs.push_back(org);
        }
        c.participant = join(names, " & ");
        c.organisation = orgs.front();
        if (orgs.size() > 1) c.multi_organisations = orgs;
        out.push_back(std::move(c));
    };

    std::istringstream stream(raw_note);
    std::string line;
    long line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (is_space_byte(line.front())) {
            if (!current) {
                warn(warnings, meta.source_file + ": continuation before any turn (line " +
                                   std::to_string(line_no) + ")");
                continue;
            }
            current->text += " " + trim(line);
            continue;
        }
        flush();
        if (auto turn = parse_header(line)) current = std::move(turn);
    }
    flush();
    if (out.empty())
        warn(warnings, meta.source_file + ": no comments parsed");
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_byte(text[j])) ++j;
        if (j - i >= 2) {
            std::string tok = text.substr(i, j - i);
            for (char& c : tok)
                if (static_cast<unsigned char>(c) < 0x80) c = ascii_lower(c);
            tokens.push_back(std::move(tok));
        }
        i = j;
    }
    return tokens;
}

std::size_t token_count(const std::string& text) { return tokenize(text).size(); }

bool comment_belongs_to(const Comment& c, const std::string& organisation) {
    if (c.organisation == organisation) return true;
    return std::find(c.multi_organisations.begin(), c.multi_organisations.end(),
                     organisation) != c.multi_organisations.end();
}

std::vector<Comment> filter_comments(const std::vector<Comment>& corpus,
                                     const FilterCriteria& criteria) {
    std::vector<Comment> out;
    for (const auto& c : corpus) {
        if (criteria.exclude_multi_party && !c.multi_organisations.empty()) continue;
        if (criteria.participants && !criteria.participants->count(c.participant))
            continue;
        if (criteria.organisations) {
            bool any = false;
            for (const auto& org : *criteria.organisations)
                if (comment_belongs_to(c, org)) {
                    any = true;
                    break;
                }
            if (!any) continue;
        }
        if (criteria.year &&
            (c.meta.year < criteria.year->first || c.meta.year > criteria.year->second))
            continue;
        if (criteria.month && (c.meta.month < criteria.month->first ||
                               c.meta.month > criteria.month->second))
            continue;
        out.push_back(c);
    }
    return out;
}

const char* const kCorpusCsvHeader =
    "id,text,source_file,year,month,participant,organisation,multi_organisation";

std::vector<std::string> comment_csv_fields(const Comment& c) {
    return {std::to_string(c.id),          c.text,
            c.meta.source_file,            std::to_string(c.meta.year),
            std::to_string(c.meta.month),  c.participant,
            c.organisation,                join(c.multi_organisations, "|")};
}

void export_csv(const std::vector<Comment>& corpus, std::ostream& out) {
    out << kCorpusCsvHeader << '\n';
    std::vector<const Comment*> rows;
    rows.reserve(corpus.size());
    for (const auto& c : corpus) rows.push_back(&c);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Comment* a, const Comment* b) { return a->id < b->id; });
    for (const Comment* c : rows) write_csv_row(out, comment_csv_fields(*c));
}

void export_csv(const std::vector<Comment>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    export_csv(corpus, out);
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

std::vector<Comment> import_csv(std::istream& in) {
    const auto rows = read_csv(in);
    if (rows.empty()) throw ParseError("corpus csv is empty", 1);
    std::vector<std::string> header(rows.front());
    std::ostringstream joined;
    for (std::size_t i = 0; i < header.size(); ++i) joined << (i ? "," : "") << header[i];
    if (joined.str() != kCorpusCsvHeader)
        throw ParseError("unexpected corpus csv header: " + joined.str(), 1);
    std::vector<Comment> corpus;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const long line = static_cast<long>(r + 1);
        if (row.size() != 8)
            throw ParseError("expected 8 fields, got " + std::to_string(row.size()), line);
        Comment c;
        c.id = parse_int(row[0], line);
        c.text = row[1];
        c.meta.source_file = row[2];
        c.meta.year = static_cast<int>(parse_int(row[3], line));
        c.meta.month = static_cast<int>(parse_int(row[4], line));
        c.participant = row[5];
        c.organisation = row[6];
        if (!row[7].empty()) {
            std::size_t start = 0;
            while (true) {
                const std::size_t bar = row[7].find('|', start);
                c.multi_organisations.push_back(row[7].substr(start, bar - start));
                if (bar == std::string::npos) break;
                start = bar + 1;
            }
        }
        corpus.push_back(std::move(c));
    }
    return corpus;
}

std::vector<Comment> import_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open");
    return import_csv(in);
}

std::string period_key(const SessionMeta& meta, GroupBy group_by) {
    char buf[32];
    if (group_by == GroupBy::year)
        std::snprintf(buf, sizeof buf, "%04d", meta.year);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02d", meta.year, meta.month);
    return buf;
}

std::optional<SessionMeta> meta_from_filename(const std::string& filename) {
    std::string base = filename;
    const std::size_t slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    if (base.size() < 8) return std::nullopt;
    for (int i : {0, 1, 2, 3, 5, 6})
        if (!std::isdigit(static_cast<unsigned char>(base[i]))) return std::nullopt;
    if (base[4] != '-' || base[7] != '-') return std::nullopt;
    SessionMeta meta;
    meta.source_file = base;
    meta.year = std::stoi(base.substr(0, 4));
    meta.month = std::stoi(base.substr(5, 2));
    if (meta.month < 1 || meta.month > 12) return std::nullopt;
    return meta;
}

}  // namespace parley
