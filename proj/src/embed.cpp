#include "parley/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "parley/csv.hpp"
#include "parley/errors.hpp"

namespace parley {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) parts.push_back(line.substr(i, j - i));
        i = j;
    }
    return parts;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> terms, Eigen::MatrixXd vectors)
    : terms_(std::move(terms)), vectors_(std::move(vectors)) {
    if (terms_.size() != static_cast<std::size_t>(vectors_.rows()))
        throw DimensionMismatch("term count does not match vector rows");
    if (terms_.empty()) throw ParseError("embedding table is empty");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].empty()) throw ParseError("empty term in embedding table");
        if (!index_.emplace(terms_[i], static_cast<int>(i)).second)
            throw ParseError("duplicate term in embedding table: " + terms_[i]);
    }
    norms_ = vectors_.rowwise().norm();
    if (norms_.maxCoeff() <= 0.0)
        throw ParseError("embedding table has no nonzero vector");
}

EmbeddingTable EmbeddingTable::load(const std::string& path, Warnings* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open");

    std::vector<std::string> terms;
    std::vector<double> values;
    std::unordered_map<std::string, std::size_t> seen;
    long dim = -1;
    long line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split_ws(line);
        if (parts.size() < 2)
            throw ParseError("expected `term v1 ... vd`", line_no);
        if (dim < 0)
            dim = static_cast<long>(parts.size()) - 1;
        else if (static_cast<long>(parts.size()) - 1 != dim)
            throw DimensionMismatch("expected " + std::to_string(dim) + " values, got " +
                                    std::to_string(parts.size() - 1) + " (line " +
                                    std::to_string(line_no) + ")");
        std::vector<double> row(dim);
        for (long k = 0; k < dim; ++k) row[k] = parse_double(parts[k + 1], line_no);

        std::string term(parts[0]);
        auto it = seen.find(term);
        if (it != seen.end()) {
            warn(warnings, path + ": duplicate term '" + term + "', keeping last");
            std::copy(row.begin(), row.end(), values.begin() + it->second * dim);
        } else {
            seen.emplace(std::move(term), terms.size());
            terms.emplace_back(parts[0]);
            values.insert(values.end(), row.begin(), row.end());
        }
    }
    if (terms.empty()) throw ParseError(path + ": no rows");
    Eigen::MatrixXd m(terms.size(), dim);
    for (std::size_t r = 0; r < terms.size(); ++r)
        for (long c = 0; c < dim; ++c) m(r, c) = values[r * dim + c];
    return EmbeddingTable(std::move(terms), std::move(m));
}

Eigen::VectorXd EmbeddingTable::vector_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) throw UnknownTerm(term);
    return vectors_.row(it->second).transpose();
}

void EmbeddingTable::save(const std::string& path, int decimals) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    char buf[64];
    for (int r = 0; r < size(); ++r) {
        out << terms_[r];
        for (int c = 0; c < dimension(); ++c) {
            std::snprintf(buf, sizeof buf, " %.*f", decimals, vectors_(r, c));
            out << buf;
        }
        out.put('\n');
    }
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size())
        throw DimensionMismatch("cosine of " + std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + " dims");
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw ZeroVector();
    // equal vectors must compare as exactly parallel, not 1 minus an ulp
    if (u == v) return 1.0;
    return u.dot(v) / (nu * nv);
}

std::vector<Neighbor> neighbors(const EmbeddingTable& table, const std::string& term,
                                double min_sim, double raise_to, int cap) {
    if (!table.contains(term)) throw UnknownTerm(term);
    const Eigen::VectorXd q = table.vector_of(term);
    const double qn = q.norm();
    if (qn == 0.0) return {};

    const Eigen::VectorXd dots = table.matrix() * q;
    const auto& norms = table.norms();
    const auto& terms = table.terms();

    auto scan = [&](double threshold) {
        std::vector<Neighbor> out;
        for (int i = 0; i < table.size(); ++i) {
            if (terms[i] == term || norms(i) == 0.0) continue;
            const double sim = dots(i) / (norms(i) * qn);
            if (sim >= threshold) out.push_back({terms[i], sim});
        }
        return out;
    };

    auto result = scan(min_sim);
    if (static_cast<long>(result.size()) > cap) result = scan(raise_to);
    std::sort(result.begin(), result.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.term < b.term;
    });
    return result;
}

std::optional<Eigen::VectorXd> pool_text(const EmbeddingTable& table,
                                         const std::vector<std::string>& tokens,
                                         const PoolingOptions& opts) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dimension());
    long count = 0;
    for (const auto& tok : tokens) {
        if (opts.remove_stopwords && opts.stopword_list.count(tok)) continue;
        if (!table.contains(tok)) continue;
        sum += table.vector_of(tok);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

DocVectorStore DocVectorStore::load(const std::string& path, Warnings* warnings) {
    const auto rows = read_csv_file(path);
    if (rows.empty()) throw ParseError(path + ": empty file", 1);
    const auto& header = rows.front();
    if (header.size() < 2 || header[0] != "id")
        throw ParseError(path + ": expected header `id,v1,...,vd`", 1);
    for (std::size_t c = 1; c < header.size(); ++c)
        if (header[c] != "v" + std::to_string(c))
            throw ParseError(path + ": expected column v" + std::to_string(c), 1);
    const long dim = static_cast<long>(header.size()) - 1;

    DocVectorStore store;
    store.vectors_.resize(static_cast<long>(rows.size()) - 1, dim);
    long next = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const long line = static_cast<long>(r + 1);
        const auto& row = rows[r];
        if (static_cast<long>(row.size()) - 1 != dim)
            throw DimensionMismatch("expected " + std::to_string(dim) + " values, got " +
                                    std::to_string(row.size() - 1) + " (line " +
                                    std::to_string(line) + ")");
        const long long id = parse_int(row[0], line);
        auto it = store.index_.find(id);
        long slot;
        if (it != store.index_.end()) {
            warn(warnings, path + ": duplicate id " + std::to_string(id) + ", keeping last");
            slot = it->second;
        } else {
            slot = next++;
            store.index_.emplace(id, static_cast<int>(slot));
            store.ids_.push_back(id);
        }
        for (long c = 0; c < dim; ++c)
            store.vectors_(slot, c) = parse_double(row[c + 1], line);
    }
    store.vectors_.conservativeResize(next, dim);
    return store;
}

Eigen::VectorXd DocVectorStore::vector_of(long long id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw MissingVector(id);
    return vectors_.row(it->second).transpose();
}

std::vector<long long> DocVectorStore::ids() const { return ids_; }

}  // namespace parley
