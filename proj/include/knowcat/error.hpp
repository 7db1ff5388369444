#pragma once

#include <stdexcept>
#include <string>

namespace knowcat {

// Base for every failure raised by the library. Runtime problems (bad input
// files, backend failures, inconsistent snapshots) derive from this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid invocation: missing flags, contradictory options. The CLI maps this
// to a different exit code than runtime failures.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A line-oriented input file had a bad line. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace knowcat
