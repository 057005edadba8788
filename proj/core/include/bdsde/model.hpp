#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bdsde/grid.hpp"

namespace bdsde {

/// A coefficient (generator f or backward-noise coefficient g) evaluated as
/// value(t, y, z, x), where x is the forward state of the current lattice
/// node. Only the enumerated kinds are supported so configs stay declarative.
class Coefficient {
 public:
  struct Zero {};
  struct Constant {
    double c;
  };
  /// a*y + b*z
  struct LinearYZ {
    double a, b;
  };
  /// scale * t
  struct TimeOnly {
    double scale;
  };
  /// amplitude * sin(y)
  struct ScaledSine {
    double amplitude;
  };
  /// a(t)*y + b(t)*z with a, b piecewise constant on [breaks[k], breaks[k+1]).
  struct TabulatedAffine {
    std::vector<double> breaks;
    std::vector<double> a;
    std::vector<double> b;
  };
  /// c0 + c1*x, depending on the forward state only.
  struct StateAffine {
    double c0, c1;
  };

  using Repr = std::variant<Zero, Constant, LinearYZ, TimeOnly, ScaledSine,
                            TabulatedAffine, StateAffine>;

  Coefficient() = default;

  static Coefficient zero() { return Coefficient(Zero{}); }
  static Coefficient constant(double c) { return Coefficient(Constant{c}); }
  static Coefficient linear(double a, double b) {
    return Coefficient(LinearYZ{a, b});
  }
  static Coefficient time_only(double scale = 1.0) {
    return Coefficient(TimeOnly{scale});
  }
  static Coefficient scaled_sine(double amplitude) {
    return Coefficient(ScaledSine{amplitude});
  }
  static Coefficient tabulated_affine(std::vector<double> breaks,
                                      std::vector<double> a,
                                      std::vector<double> b);
  static Coefficient state_affine(double c0, double c1) {
    return Coefficient(StateAffine{c0, c1});
  }

  double operator()(double t, double y, double z, double x = 0.0) const;

  bool depends_on_t() const;
  bool depends_on_y() const;
  bool depends_on_z() const;
  bool depends_on_x() const;

  /// Smallest valid Lipschitz constants in y and z.
  double lipschitz_y() const;
  double lipschitz_z() const;

  const Repr& repr() const { return repr_; }
  std::string describe() const;

 private:
  explicit Coefficient(Repr r) : repr_(std::move(r)) {}
  Repr repr_{Zero{}};
};

/// Terminal functional Phi over the discrete forward walk.
class TerminalFunctional {
 public:
  enum class Kind { identity, constant, call, square, path_sum };

  static TerminalFunctional identity() { return {Kind::identity, 0.0}; }
  static TerminalFunctional constant(double c) { return {Kind::constant, c}; }
  /// (w_T - strike)^+
  static TerminalFunctional call(double strike) { return {Kind::call, strike}; }
  static TerminalFunctional square() { return {Kind::square, 0.0}; }
  /// weight * sqrt(delta) * sum_{j=1..n} W_j
  static TerminalFunctional path_sum(double weight) {
    return {Kind::path_sum, weight};
  }

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool path_dependent() const { return kind_ == Kind::path_sum; }

  /// Phi as a function of the terminal value only. Throws UnsupportedModel for
  /// path-dependent kinds.
  double at_terminal(double w) const;

  /// Phi over the whole walk W_0..W_n.
  double over_path(std::span<const double> walk, const TimeGrid& grid) const;

  std::string describe() const;

 private:
  TerminalFunctional(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

/// Which closed-form solution, if any, a model has.
enum class ExactOracle { none, transport, time_integral };

struct ModelFlags {
  bool f_time_dependent = false;
  bool g_time_dependent = false;
  bool f_depends_y = false;
  bool g_depends_z = false;
};

struct ProblemSpec {
  std::string name;
  Coefficient f;
  Coefficient g;
  TerminalFunctional phi = TerminalFunctional::identity();
  /// Lipschitz constant of f and of the y-part of g.
  double K = 0.0;
  /// z-Lipschitz constant of g; must be < 1 unless exactness_only.
  double alpha = 0.0;
  /// Lets a model outside the admissible class run for oracle comparisons.
  bool exactness_only = false;
  ExactOracle oracle = ExactOracle::none;

  ModelFlags flags() const;
};

struct ValidatedSpec {
  ProblemSpec spec;
  /// delta * K, the contraction factor of the Theta fixed point.
  double contraction = 0.0;
  std::vector<std::string> warnings;
};

/// Accepts iff delta*K < 1 and alpha < 1 (alpha gate skipped for
/// exactness_only models, with a warning).
ValidatedSpec validate_spec(const ProblemSpec& spec, const TimeGrid& grid);

/// Registry keys: transport, time_integral, linear, sine, zero.
/// `linear` takes (a, b, c, d) for f = a*y + b*z, g = c*y + d*z; with no
/// parameters it uses (0.3, 0.2, 0.1, 0.2).
ProblemSpec builtin(const std::string& name, std::span<const double> params = {});

std::vector<std::string> builtin_names();

}  // namespace bdsde
