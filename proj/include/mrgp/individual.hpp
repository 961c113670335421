#pragma once

#include <optional>
#include <span>
#include <variant>

#include "mrgp/linear.hpp"
#include "mrgp/tree.hpp"

namespace mrgp {

enum class Rep { tree, linear };

using Individual = std::variant<TreeIndividual, LinearIndividual>;

inline Rep rep_of(const Individual& ind) {
  return std::holds_alternative<TreeIndividual>(ind) ? Rep::tree : Rep::linear;
}

inline std::optional<double>& fitness_of(Individual& ind) {
  return std::visit([](auto& x) -> std::optional<double>& { return x.fitness; }, ind);
}

inline const std::optional<double>& fitness_of(const Individual& ind) {
  return std::visit([](const auto& x) -> const std::optional<double>& { return x.fitness; }, ind);
}

inline double eval_individual(const Individual& ind, std::span<const double> inputs) {
  if (const auto* t = std::get_if<TreeIndividual>(&ind)) return eval_tree(*t, inputs);
  return eval_linear(std::get<LinearIndividual>(ind), inputs);
}

// size metric: tree nodes, or effective instructions weighted by 2
inline double program_size(const Individual& ind) {
  if (const auto* t = std::get_if<TreeIndividual>(&ind))
    return static_cast<double>(node_count(*t->root));
  return 2.0 * effective_length(std::get<LinearIndividual>(ind));
}

}  // namespace mrgp
