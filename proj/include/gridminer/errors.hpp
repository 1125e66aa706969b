#pragma once

#include <stdexcept>
#include <string>

namespace gridminer {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (config, workload, dataset, query). Carries a
/// location string such as "topology.json:3" or "gridlets[1].cpu_rate".
class ParseError : public Error {
public:
    ParseError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// Input that parses but violates a domain rule (duplicate ids, p = 0, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A sub-task could not run on its partition (wrong record kind, ...).
class TaskError : public Error {
public:
    using Error::Error;
};

}  // namespace gridminer
