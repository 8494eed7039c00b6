#include "oseenlab/spectral_field.hpp"

#include <stdexcept>

namespace oseenlab {

Gauge gauge_from_name(const std::string& name) {
  if (name == "full") return Gauge::full;
  if (name == "core") return Gauge::core;
  throw std::invalid_argument("unknown gauge name: '" + name +
                              "' (expected 'full' or 'core')");
}

}  // namespace oseenlab
