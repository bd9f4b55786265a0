#pragma once

#include <stdexcept>
#include <string>

namespace evince {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid probability vector, joint matrix, or config value.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Two distributions on different label scales were combined.
class ScaleMismatchError : public Error {
public:
    using Error::Error;
};

// Malformed debate history (index gaps, scale changes, empty).
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Prompt template references a placeholder with no binding.
class TemplateError : public Error {
public:
    using Error::Error;
};

// Model output could not be parsed into a distribution.
class ParseError : public Error {
public:
    using Error::Error;
};

// Agent failed after bounded retries; keeps the last raw output for audit.
class AgentError : public Error {
public:
    AgentError(const std::string& what, int attempts, std::string last_raw)
        : Error(what), attempts_(attempts), last_raw_(std::move(last_raw)) {}
    int attempts() const { return attempts_; }
    const std::string& last_raw() const { return last_raw_; }

private:
    int attempts_ = 0;
    std::string last_raw_;
};

class CritError : public Error {
public:
    using Error::Error;
};

// Dataset/script ingestion failure; message names the offending row and field.
class IngestError : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    using Error::Error;
};

}  // namespace evince
