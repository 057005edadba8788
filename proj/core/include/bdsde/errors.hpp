#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdsde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive enumeration would exceed its hard cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// delta * K >= 1 (or the a-priori gate fails). `min_steps` is the smallest
/// admissible n for the same horizon, 0 when not applicable.
class StepTooCoarse : public Error {
 public:
  StepTooCoarse(const std::string& what, int min_steps)
      : Error(what), min_steps_(min_steps) {}
  int min_steps() const { return min_steps_; }

 private:
  int min_steps_;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class DivergentSeries : public Error {
 public:
  using Error::Error;
};

class EmptyReport : public Error {
 public:
  using Error::Error;
};

/// Fixed-point inversion did not reach tolerance.
class NumericFailure : public Error {
 public:
  NumericFailure(const std::string& what, int level, int node, double residual)
      : Error(what), level_(level), node_(node), residual_(residual) {}
  int level() const { return level_; }
  int node() const { return node_; }
  double residual() const { return residual_; }

 private:
  int level_;
  int node_;
  double residual_;
};

}  // namespace bdsde
