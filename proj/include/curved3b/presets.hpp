#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "curved3b/homographic.hpp"

namespace curved3b {

/// Parameter bundle for one published phase portrait, with the sweep window
/// used to reproduce it.
struct Preset {
  std::string_view name;
  ReducedKind kind;
  double kappa;
  double c;
  double m;
  std::array<double, 2> r_range;
  std::array<double, 2> nu_range;
  std::size_t grid;
  double t_span;
};

const std::vector<Preset>& presets();

/// Throws DomainError for an unknown name.
const Preset& find_preset(std::string_view name);

}  // namespace curved3b
