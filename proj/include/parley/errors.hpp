#pragma once

#include <stdexcept>
#include <string>

namespace parley {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (bad header, missing field, unparseable number).
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// A vector row whose width disagrees with the table it belongs to.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Lookup of a term that the table does not contain.
class UnknownTerm : public Error {
public:
    explicit UnknownTerm(const std::string& term)
        : Error("unknown term: " + term), term_(term) {}
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

// Cosine against a zero-norm vector is undefined.
class ZeroVector : public Error {
public:
    ZeroVector() : Error("zero vector has no direction") {}
};

// A comment id with no row in the document-vector store.
class MissingVector : public Error {
public:
    explicit MissingVector(long long id)
        : Error("no document vector for comment " + std::to_string(id)), id_(id) {}
    long long id() const { return id_; }

private:
    long long id_;
};

// Bad value in a config file; `path` is the dotted field name.
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error("config field " + path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Declarative input (generator spec, issue catalog) violating its invariants.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

// Numeric argument outside its allowed range.
class InvalidParams : public Error {
public:
    using Error::Error;
};

class EmptyCatalog : public Error {
public:
    EmptyCatalog() : Error("issue catalog is empty") {}
};

class EmptyVocabulary : public Error {
public:
    EmptyVocabulary() : Error("no terms survive vocabulary filtering") {}
};

class EmptyStream : public Error {
public:
    explicit EmptyStream(const std::string& what) : Error(what) {}
};

// No usable party position to anchor a distance profile on.
class NoReference : public Error {
public:
    explicit NoReference(const std::string& what) : Error(what) {}
};

// Fewer than two parties with data where a pairwise comparison was asked for.
class InsufficientParties : public Error {
public:
    explicit InsufficientParties(const std::string& what) : Error(what) {}
};

// Too few usable comments for a resampling estimate.
class TooLittleData : public Error {
public:
    explicit TooLittleData(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what) {}
};

}  // namespace parley
