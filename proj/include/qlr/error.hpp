#pragma once

#include <stdexcept>
#include <string>

namespace qlr {

// Element/descriptor shape disagreement, malformed tables.
class StructuralError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A documented precondition does not hold; the message carries the witness.
class ContractError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class PositionedError : public std::runtime_error {
  public:
    PositionedError(const std::string& what, int line, int col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int column() const { return col_; }

  private:
    int line_;
    int col_;
};

class SyntaxError : public PositionedError {
  public:
    using PositionedError::PositionedError;
};

class TypeError : public PositionedError {
  public:
    using PositionedError::PositionedError;
};

} // namespace qlr
