#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rewrite_rl {

/// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourcePos {
    std::size_t line = 1;
    std::size_t column = 1;
};

class SyntaxError : public Error {
public:
    SyntaxError(SourcePos pos, const std::string& message)
        : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": syntax error: " + message),
          pos_(pos) {}

    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

class SemanticError : public Error {
public:
    SemanticError(SourcePos pos, const std::string& message)
        : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": semantic error: " + message),
          pos_(pos) {}

    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

class InterpretError : public Error {
public:
    enum class Kind { StepBudgetExceeded, DivisionByZero, OutOfBounds, UndefinedFunction, BadInput };

    InterpretError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class RuleError : public Error {
public:
    enum class Kind { Registration, UnknownRule, SiteMismatch };

    RuleError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class ClassifyError : public Error {
public:
    enum class Kind { AmbiguousData, EmptyInput, BadTree };

    ClassifyError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class LearnError : public Error {
public:
    enum class Kind { NoActions, FinalStateUpdate, BadStart, BadGraph, BadConfig };

    LearnError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Malformed or unreadable artifact file (graph, table, tree, corpus).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace rewrite_rl
