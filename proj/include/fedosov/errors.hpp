#pragma once

#include <stdexcept>
#include <string>

namespace fedosov {

/// Error categories, each mapped to a stable CLI exit code.
enum class errc {
    parse          = 2,
    validation     = 3,
    degenerate     = 4,
    jet_exhausted  = 5,
    hbar_division  = 6,
    no_convergence = 6,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

private:
    errc code_;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& msg)
        : Error(errc::parse,
                "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    explicit ParseError(const std::string& msg) : Error(errc::parse, "parse error: " + msg), line_(0), column_(0) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& check, const std::string& detail)
        : Error(errc::validation, "validation failed: " + check + (detail.empty() ? "" : " (" + detail + ")")),
          check_(check) {}
    const std::string& check() const { return check_; }

private:
    std::string check_;
};

class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& msg) : Error(errc::degenerate, "degenerate structure: " + msg) {}
};

class JetExhaustedError : public Error {
public:
    explicit JetExhaustedError(const std::string& msg) : Error(errc::jet_exhausted, "jet order exhausted: " + msg) {}
};

class HbarDivisionError : public Error {
public:
    explicit HbarDivisionError(const std::string& msg)
        : Error(errc::hbar_division, "division by i*hbar impossible: " + msg) {}
};

class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(const std::string& msg)
        : Error(errc::no_convergence, "fixed point did not stabilize: " + msg) {}
};

} // namespace fedosov
