#pragma once

#include <string>
#include <vector>

namespace parley {

// Collects non-fatal complaints (skipped rows, degenerate inputs). Callers
// that don't care pass nullptr.
class Warnings {
public:
    void add(std::string message) { messages_.push_back(std::move(message)); }
    bool empty() const { return messages_.empty(); }
    std::size_t size() const { return messages_.size(); }
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

inline void warn(Warnings* sink, std::string message) {
    if (sink) sink->add(std::move(message));
}

}  // namespace parley
