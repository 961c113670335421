#pragma once

#include "mrgp/individual.hpp"
#include "mrgp/primitives.hpp"

namespace mrgp {

// Problem-side contract for the engine. Fitness is minimized. evaluate() must
// be pure (thread-safe, no shared mutable state) so parallel evaluation cannot
// change results; per-generation state changes only through begin_generation.
class FitnessBackend {
 public:
  virtual ~FitnessBackend() = default;

  virtual void begin_generation(int generation) { (void)generation; }
  virtual double evaluate(const Individual& ind) const = 0;

  // model-selection protocol: backends with a validation stage score the
  // per-generation bests and the winner goes to the unseen test stage
  virtual bool has_validation() const { return false; }
  virtual double validate(const Individual& ind) const { return evaluate(ind); }
  virtual double test(const Individual& ind) const = 0;

  virtual const PrimitiveSet& primitives() const = 0;
};

}  // namespace mrgp
