#pragma once

#include <span>
#include <string>

#include "subtree_kernel/weighting.hpp"

namespace stk {

struct DotOptions {
  // Node width for a zero weight; a weight of 1 maps to 2.0.
  double min_width = 0.1;
  // Writes vertex labels through this alphabet when set.
  const Alphabet* alphabet = nullptr;
};

// Saturated color of class k, used when the nearest point is e_k.
std::string presence_color(std::size_t k);
// Light variant, used when the nearest point is the complement of e_k.
std::string absence_color(std::size_t k);

// DOT graph of the DAG without its artificial root. Node width grows
// linearly with the weight; color encodes the nearest point of interest.
std::string dag_to_dot(const Dag& dag, std::span<const double> weights, const ClassProfile& profile,
                       const DotOptions& options = {});

}  // namespace stk
