#include "mrgp/primitives.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mrgp {

namespace {

double add_eval(double a, double b) { return a + b; }
double sub_eval(double a, double b) { return a - b; }
double mul_eval(double a, double b) { return a * b; }

// protected division: unit result whenever the divisor is exactly zero
double div_eval(double a, double b) { return b == 0.0 ? 1.0 : a / b; }

double sin_eval(double a, double) { return std::sin(a); }
double cos_eval(double a, double) { return std::cos(a); }

// protected log: ln(|x|), but pass the operand through when the raw output
// would fall below -50 (covers x == 0, where ln diverges)
double ln_eval(double a, double) {
  static const double floor_abs = std::exp(-50.0);
  const double m = std::fabs(a);
  if (m < floor_abs) return a;
  return std::log(m);
}

double sqrt_eval(double a, double) { return std::sqrt(std::fabs(a)); }
double max_eval(double a, double b) { return a > b ? a : b; }
double min_eval(double a, double b) { return a < b ? a : b; }

}  // namespace

double apply(const Function& f, double a, double b) {
  const double r = f.eval(a, b);
  return std::isfinite(r) ? r : 0.0;
}

Terminal Terminal::make_constant(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return Terminal{std::string(buf, p), TerminalKind::constant, -1, v};
}

PrimitiveSet::PrimitiveSet(std::vector<Function> functions, std::vector<Terminal> terminals)
    : functions_(std::move(functions)), terminals_(std::move(terminals)) {
  if (functions_.empty() || terminals_.empty())
    throw std::invalid_argument("primitive set needs at least one function and one terminal");
  for (const auto& f : functions_)
    if (f.arity < 1 || f.arity > 2 || f.eval == nullptr)
      throw std::invalid_argument("bad function primitive: " + f.name);
  for (std::size_t i = 0; i < functions_.size(); ++i)
    for (std::size_t j = i + 1; j < functions_.size(); ++j)
      if (functions_[i].name == functions_[j].name)
        throw std::invalid_argument("duplicate function name: " + functions_[i].name);
  for (std::size_t i = 0; i < terminals_.size(); ++i) {
    for (std::size_t j = i + 1; j < terminals_.size(); ++j)
      if (terminals_[i].name == terminals_[j].name)
        throw std::invalid_argument("duplicate terminal name: " + terminals_[i].name);
    if (terminals_[i].kind == TerminalKind::feature)
      num_features_ = std::max(num_features_, terminals_[i].feature + 1);
  }
}

const Function* PrimitiveSet::find_function(const std::string& name) const {
  for (const auto& f : functions_)
    if (f.name == name) return &f;
  return nullptr;
}

const Terminal* PrimitiveSet::find_terminal(const std::string& name) const {
  for (const auto& t : terminals_)
    if (t.name == name) return &t;
  return nullptr;
}

const Terminal& PrimitiveSet::feature_terminal(int index) const {
  for (const auto& t : terminals_)
    if (t.kind == TerminalKind::feature && t.feature == index) return t;
  throw std::out_of_range("no terminal for feature index " + std::to_string(index));
}

PrimitiveSet symreg_primitive_set(int num_features) {
  if (num_features < 1) throw std::invalid_argument("symreg needs at least one feature");
  std::vector<Function> fns = {
      {"+", 2, add_eval},  {"-", 2, sub_eval},   {"*", 2, mul_eval}, {"/", 2, div_eval},
      {"sin", 1, sin_eval}, {"cos", 1, cos_eval}, {"ln", 1, ln_eval}, {"sqrt", 1, sqrt_eval},
  };
  std::vector<Terminal> terms;
  terms.reserve(static_cast<std::size_t>(num_features));
  for (int i = 0; i < num_features; ++i)
    terms.push_back(Terminal::make_feature("x" + std::to_string(i + 1), i));
  return PrimitiveSet(std::move(fns), std::move(terms));
}

const std::vector<std::string>& djss_terminal_names() {
  static const std::vector<std::string> names = {
      "PT", "NPT", "WINQ", "WKR", "rFDD", "OWT", "NOR", "NINQ",
      "W",  "rDD", "NWT",  "TIS", "SL",   "NIQ", "WIQ", "MWT",
  };
  return names;
}

PrimitiveSet djss_primitive_set() {
  std::vector<Function> fns = {
      {"+", 2, add_eval}, {"-", 2, sub_eval}, {"*", 2, mul_eval},
      {"/", 2, div_eval}, {"max", 2, max_eval}, {"min", 2, min_eval},
  };
  std::vector<Terminal> terms;
  const auto& names = djss_terminal_names();
  terms.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    terms.push_back(Terminal::make_feature(names[i], static_cast<int>(i)));
  return PrimitiveSet(std::move(fns), std::move(terms));
}

}  // namespace mrgp
