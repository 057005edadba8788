#include "bdsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdsde/errors.hpp"

namespace bdsde {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t table_index(const std::vector<double>& breaks, double t) {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  if (it == breaks.begin()) return 0;
  return static_cast<std::size_t>(std::distance(breaks.begin(), it)) - 1;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Coefficient Coefficient::tabulated_affine(std::vector<double> breaks,
                                          std::vector<double> a,
                                          std::vector<double> b) {
  if (breaks.empty() || breaks.size() != a.size() || a.size() != b.size()) {
    throw InvalidArgument(
        "tabulated_affine: breaks, a and b must be non-empty and equally long");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end()) {
    throw InvalidArgument("tabulated_affine: breaks must be strictly increasing");
  }
  return Coefficient(TabulatedAffine{std::move(breaks), std::move(a), std::move(b)});
}

double Coefficient::operator()(double t, double y, double z, double x) const {
  return std::visit(
      Overloaded{
          [](const Zero&) { return 0.0; },
          [](const Constant& c) { return c.c; },
          [&](const LinearYZ& l) { return l.a * y + l.b * z; },
          [&](const TimeOnly& s) { return s.scale * t; },
          [&](const ScaledSine& s) { return s.amplitude * std::sin(y); },
          [&](const TabulatedAffine& tab) {
            const auto k = table_index(tab.breaks, t);
            return tab.a[k] * y + tab.b[k] * z;
          },
          [&](const StateAffine& s) { return s.c0 + s.c1 * x; },
      },
      repr_);
}

bool Coefficient::depends_on_t() const {
  return std::holds_alternative<TimeOnly>(repr_) ||
         std::holds_alternative<TabulatedAffine>(repr_);
}

bool Coefficient::depends_on_y() const { return lipschitz_y() > 0.0; }

bool Coefficient::depends_on_z() const { return lipschitz_z() > 0.0; }

bool Coefficient::depends_on_x() const {
  if (const auto* s = std::get_if<StateAffine>(&repr_)) return s->c1 != 0.0;
  return false;
}

double Coefficient::lipschitz_y() const {
  return std::visit(
      Overloaded{
          [](const LinearYZ& l) { return std::abs(l.a); },
          [](const ScaledSine& s) { return std::abs(s.amplitude); },
          [](const TabulatedAffine& tab) { return max_abs(tab.a); },
          [](const auto&) { return 0.0; },
      },
      repr_);
}

double Coefficient::lipschitz_z() const {
  return std::visit(
      Overloaded{
          [](const LinearYZ& l) { return std::abs(l.b); },
          [](const TabulatedAffine& tab) { return max_abs(tab.b); },
          [](const auto&) { return 0.0; },
      },
      repr_);
}

std::string Coefficient::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Zero&) { os << "0"; },
                 [&](const Constant& c) { os << c.c; },
                 [&](const LinearYZ& l) { os << l.a << "*y + " << l.b << "*z"; },
                 [&](const TimeOnly& s) { os << s.scale << "*t"; },
                 [&](const ScaledSine& s) { os << s.amplitude << "*sin(y)"; },
                 [&](const TabulatedAffine& tab) {
                   os << "tabulated_affine[" << tab.breaks.size() << "]";
                 },
                 [&](const StateAffine& s) { os << s.c0 << " + " << s.c1 << "*x"; },
             },
             repr_);
  return os.str();
}

double TerminalFunctional::at_terminal(double w) const {
  switch (kind_) {
    case Kind::identity:
      return w;
    case Kind::constant:
      return param_;
    case Kind::call:
      return std::max(w - param_, 0.0);
    case Kind::square:
      return w * w;
    case Kind::path_sum:
      break;
  }
  throw UnsupportedModel(
      "terminal functional: path_sum depends on the whole walk and cannot be "
      "placed on a recombining lattice");
}

double TerminalFunctional::over_path(std::span<const double> walk,
                                     const TimeGrid& grid) const {
  if (walk.empty()) throw InvalidArgument("terminal functional: empty walk");
  if (kind_ != Kind::path_sum) return at_terminal(walk.back());
  double sum = 0.0;
  for (std::size_t j = 1; j < walk.size(); ++j) sum += walk[j];
  return param_ * grid.sqrt_delta() * sum;
}

std::string TerminalFunctional::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::identity:
      os << "identity";
      break;
    case Kind::constant:
      os << "constant(" << param_ << ")";
      break;
    case Kind::call:
      os << "call(" << param_ << ")";
      break;
    case Kind::square:
      os << "square";
      break;
    case Kind::path_sum:
      os << "path_sum(" << param_ << ")";
      break;
  }
  return os.str();
}

ModelFlags ProblemSpec::flags() const {
  return {f.depends_on_t(), g.depends_on_t(), f.depends_on_y(), g.depends_on_z()};
}

ValidatedSpec validate_spec(const ProblemSpec& spec, const TimeGrid& grid) {
  ValidatedSpec out{spec, grid.delta() * spec.K, {}};
  if (!(spec.K >= 0.0) || !(spec.alpha >= 0.0)) {
    throw InvalidModel("model '" + spec.name +
                       "': Lipschitz constants must be non-negative");
  }
  if (spec.alpha >= 1.0) {
    if (!spec.exactness_only) {
      throw InvalidModel("model '" + spec.name + "': alpha=" +
                         std::to_string(spec.alpha) + " must be < 1");
    }
    out.warnings.push_back("model '" + spec.name +
                           "' has alpha >= 1 and runs in exactness-only mode");
  }
  if (out.contraction >= 1.0) {
    const int min_n = static_cast<int>(std::floor(grid.horizon() * spec.K)) + 1;
    throw StepTooCoarse("model '" + spec.name + "': delta*K=" +
                            std::to_string(out.contraction) +
                            " >= 1; need n >= " + std::to_string(min_n),
                        min_n);
  }
  return out;
}

ProblemSpec builtin(const std::string& name, std::span<const double> params) {
  auto expect_params = [&](std::size_t count) {
    if (!params.empty() && params.size() != count) {
      throw InvalidArgument("model '" + name + "' takes " +
                            std::to_string(count) + " parameters, got " +
                            std::to_string(params.size()));
    }
  };

  ProblemSpec s;
  s.name = name;
  if (name == "transport") {
    // f = 0, g = z, Y_T = W_T; solution Y_t = (B_T - B_t) + W_t.
    expect_params(0);
    s.g = Coefficient::linear(0.0, 1.0);
    s.alpha = 1.0;
    s.exactness_only = true;
    s.oracle = ExactOracle::transport;
  } else if (name == "time_integral") {
    // f = 0, g = t, Y_T = 0; solution Y_t = int_t^T s dB_s.
    expect_params(0);
    s.g = Coefficient::time_only(1.0);
    s.phi = TerminalFunctional::constant(0.0);
    s.oracle = ExactOracle::time_integral;
  } else if (name == "linear") {
    expect_params(4);
    const double a = params.empty() ? 0.3 : params[0];
    const double b = params.empty() ? 0.2 : params[1];
    const double c = params.empty() ? 0.1 : params[2];
    const double d = params.empty() ? 0.2 : params[3];
    s.f = Coefficient::linear(a, b);
    s.g = Coefficient::linear(c, d);
    s.K = std::max({std::abs(a), std::abs(b), std::abs(c)});
    s.alpha = std::abs(d);
  } else if (name == "sine") {
    expect_params(0);
    s.f = Coefficient::scaled_sine(1.0);
    s.g = Coefficient::linear(0.5, 0.0);
    s.K = 1.0;
  } else if (name == "additive") {
    // f = 0, g = c: y0 = E[Phi] + c * B_T.
    expect_params(1);
    s.g = Coefficient::constant(params.empty() ? 1.0 : params[0]);
  } else if (name == "zero") {
    expect_params(0);
  } else {
    throw NotFound("unknown model '" + name + "'");
  }
  return s;
}

std::vector<std::string> builtin_names() {
  return {"transport", "time_integral", "linear", "sine", "additive", "zero"};
}

}  // namespace bdsde
