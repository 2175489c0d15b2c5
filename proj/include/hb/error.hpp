#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hb {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit codes (see tools/hbuild.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or missing resource (lexicon file, ontology, vectors file).
class ResourceError : public Error {
public:
    using Error::Error;
};

// Malformed record in a data file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Token annotations that do not form a single tree.
class AnnotationError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

// A node merge that would close a cycle.
class MergeRejected : public Error {
public:
    using Error::Error;
};

// Embedding provider failed (transport, missing vector, bad dimension).
class ProviderError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersion : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

// A structural invariant did not hold after a pipeline stage.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace hb
