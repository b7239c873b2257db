#ifndef OPALG_ERRORS_HPP
#define OPALG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opalg {

/// Shapes or algebras do not agree (wrong block count, mismatched ambient, ...).
class StructuralError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the documented domain (k <= 0, l < 2, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NotInvertible : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A quantitative hypothesis of a bound does not hold; `value` is the
/// offending quantity (for example the product of the two cb-norms).
class HypothesisNotMet : public std::runtime_error {
public:
  HypothesisNotMet(const std::string& what, double value)
      : std::runtime_error(what + " (value " + std::to_string(value) + ")"), value_(value) {}
  double value() const noexcept { return value_; }

private:
  double value_;
};

class NoConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularStep : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Wraps an error raised inside one stage of a multi-stage pipeline.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace opalg

#endif  // OPALG_ERRORS_HPP
