#pragma once

#include <set>
#include <string>

namespace parley {

// The standard 179-word English list. data/stopwords_english.txt ships the
// same words for callers that want to edit them.
const std::set<std::string>& default_stopwords();

// One word per line; blank lines and lines starting with # are skipped.
std::set<std::string> load_stopwords(const std::string& path);

}  // namespace parley
