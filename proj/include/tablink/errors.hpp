#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tablink {

// Malformed or inconsistent input bundle.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Table markup that cannot be laid out on a rectangular grid.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Single failed exchange with an inference endpoint; retryable.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Retries exhausted.
class BackendUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The backend answered, but not in the agreed wire format.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(const std::string& what, std::string raw_payload)
        : std::runtime_error(what), raw_(std::move(raw_payload)) {}

    const std::string& raw_payload() const noexcept { return raw_; }

private:
    std::string raw_;
};

struct Warning {
    std::string code;
    std::string detail;

    friend bool operator==(const Warning&, const Warning&) = default;
};

using Warnings = std::vector<Warning>;

inline void warn(Warnings* sink, std::string code, std::string detail) {
    if (sink) sink->push_back({std::move(code), std::move(detail)});
}

}  // namespace tablink
