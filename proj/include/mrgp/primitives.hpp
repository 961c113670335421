#pragma once

#include <string>
#include <vector>

namespace mrgp {

enum class TerminalKind { feature, constant };

// A leaf symbol: either an input feature (x1, PT, ...) or a literal constant.
struct Terminal {
  std::string name;
  TerminalKind kind = TerminalKind::feature;
  int feature = -1;    // valid when kind == feature
  double value = 0.0;  // valid when kind == constant

  static Terminal make_feature(std::string name, int index) {
    return Terminal{std::move(name), TerminalKind::feature, index, 0.0};
  }
  static Terminal make_constant(double v);

  bool operator==(const Terminal& o) const {
    return kind == o.kind && feature == o.feature && value == o.value && name == o.name;
  }
};

// An inner-node symbol with fixed arity. `eval` already embeds the protected
// semantics of the operator; `apply` adds the final non-finite clamp.
struct Function {
  std::string name;
  int arity = 2;
  double (*eval)(double, double) = nullptr;
};

// Protected application: any non-finite raw result is replaced by 0.0 at the
// point of production, so downstream code only ever sees finite values.
double apply(const Function& f, double a, double b = 0.0);

class PrimitiveSet {
 public:
  PrimitiveSet(std::vector<Function> functions, std::vector<Terminal> terminals);

  PrimitiveSet(const PrimitiveSet&) = delete;  // nodes hold pointers into us
  PrimitiveSet& operator=(const PrimitiveSet&) = delete;
  PrimitiveSet(PrimitiveSet&&) = default;
  PrimitiveSet& operator=(PrimitiveSet&&) = default;

  const std::vector<Function>& functions() const { return functions_; }
  const std::vector<Terminal>& terminals() const { return terminals_; }

  const Function* find_function(const std::string& name) const;  // nullptr if absent
  const Terminal* find_terminal(const std::string& name) const;

  // terminal for feature index i (throws if none)
  const Terminal& feature_terminal(int index) const;

  // 1 + max feature index referenced by the terminals (0 if none)
  int num_features() const { return num_features_; }

 private:
  std::vector<Function> functions_;
  std::vector<Terminal> terminals_;
  int num_features_ = 0;
};

// {+, -, *, /, sin, cos, ln, sqrt} plus one feature terminal per input column.
PrimitiveSet symreg_primitive_set(int num_features);

// {+, -, *, /, max, min} plus the 16 shop-state terminals.
PrimitiveSet djss_primitive_set();

// Names of the 16 shop-state terminals, in feature-index order.
const std::vector<std::string>& djss_terminal_names();

}  // namespace mrgp
