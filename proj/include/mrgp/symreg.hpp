#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mrgp/fitness.hpp"
#include "mrgp/rng.hpp"

namespace mrgp::symreg {

struct Dataset {
  std::vector<double> x;  // row-major, rows * num_features
  std::vector<double> y;
  int num_features = 0;

  std::size_t rows() const { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * static_cast<std::size_t>(num_features),
            static_cast<std::size_t>(num_features)};
  }
};

struct Problem {
  std::string name;
  Dataset train;
  Dataset test;
  PrimitiveSet prims;
};

// relative squared error: sum (y - yhat)^2 / sum (y - mean(y))^2
double rse(std::span<const double> y, std::span<const double> yhat);

// nguyen4 | keijzer11 | r1, freshly sampled per call
Problem generate_synthetic(const std::string& name, Rng& rng);

// Numeric CSV with optional header; target defaults to the last column.
// Rows are shuffled, the first round(train_fraction * n) become training data.
Problem load_csv(const std::filesystem::path& path, Rng& rng, const std::string& target = "",
                 double train_fraction = 0.75);

class Backend : public FitnessBackend {
 public:
  explicit Backend(Problem problem) : problem_(std::move(problem)) {}

  double evaluate(const Individual& ind) const override { return score(ind, problem_.train); }
  double test(const Individual& ind) const override { return score(ind, problem_.test); }
  const PrimitiveSet& primitives() const override { return problem_.prims; }
  const Problem& problem() const { return problem_; }

 private:
  double score(const Individual& ind, const Dataset& data) const;
  Problem problem_;
};

}  // namespace mrgp::symreg
