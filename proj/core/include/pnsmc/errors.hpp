#pragma once

#include <stdexcept>
#include <string>

namespace pnsmc {

/// Violation of a model-level contract: guard failure, corrupt rule effect,
/// stepping a net with no enabled rule, reward classification failure, or
/// invalid model parameters.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Violation of a trace/formula evaluation contract: unknown variable,
/// value-kind mismatch, or out-of-order timestamps fed to a monitor.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error with source position, used by the property and net-file
/// parsers. Lines and columns are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace pnsmc
