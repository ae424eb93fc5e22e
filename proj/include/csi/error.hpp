#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A query referenced a vertex id that is not part of the instance.
class UnknownVertexError : public Error {
public:
    using Error::Error;
};

// A metric was requested at a point where its defining ratio has a zero
// denominator (empty neighborhood, empty accepted set, ...).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

// Some in-class datapoint has no adjacent certificate, so no prover exists.
class NoProverError : public Error {
public:
    using Error::Error;
};

// An exact enumeration was requested beyond the configured budget.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

// Malformed input text (JSON or line-based formats).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally invalid instance; carries the individual violation messages.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> issues)
        : Error(what), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

} // namespace csi
