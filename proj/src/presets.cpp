#include "curved3b/presets.hpp"

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"fig1a", ReducedKind::Lagrangian, 1.0, 1.0, 0.24, {0.05, 0.99}, {-2.0, 2.0}, 31, 50.0},
      {"fig1b", ReducedKind::Lagrangian, 1.0, 1.0, 4.0, {0.05, 0.95}, {-3.0, 3.0}, 31, 50.0},
      {"fig2a", ReducedKind::Lagrangian, -2.0, 1.0 / 3.0, 0.5, {0.05, 3.0}, {-2.0, 2.0}, 31, 100.0},
      {"fig2b", ReducedKind::Lagrangian, -0.3, 0.23, 0.12, {0.5, 3.0}, {-0.08, 0.08}, 31, 300.0},
      {"fig3", ReducedKind::Eulerian, 1.0, 2.0, 2.0, {0.1, 0.95}, {-3.0, 3.0}, 31, 50.0},
      {"fig4a", ReducedKind::Eulerian, -2.0, 2.0, 4.0, {0.1, 3.0}, {-3.0, 3.0}, 31, 100.0},
      {"fig4b", ReducedKind::Eulerian, -2.0, 2.0, 6.2, {0.2, 3.0}, {-2.0, 2.0}, 31, 200.0},
  };
  return table;
}

const Preset& find_preset(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  throw DomainError(fmt::format("unknown preset '{}'", name));
}

}  // namespace curved3b
