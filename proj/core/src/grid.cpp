#include "oseenlab/grid.hpp"

#include <stdexcept>
#include <string>

namespace oseenlab {

void Grid::validate() const {
  if (!(L_xi > 0.0))
    throw std::invalid_argument("Grid: L_xi must be positive, got " +
                                std::to_string(L_xi));
  if (N_xi < 8 || N_xi % 2 != 0)
    throw std::invalid_argument("Grid: N_xi must be even and >= 8, got " +
                                std::to_string(N_xi));
  if (N_z < 0)
    throw std::invalid_argument("Grid: N_z must be nonnegative, got " +
                                std::to_string(N_z));
  if (!(z_period > 0.0))
    throw std::invalid_argument("Grid: z_period must be positive, got " +
                                std::to_string(z_period));
  if (!(weight_m >= 0.0))
    throw std::invalid_argument("Grid: weight_m must be nonnegative, got " +
                                std::to_string(weight_m));
  if (dilation_cap() <= 0.0)
    throw std::invalid_argument(
        "Grid: N_xi*pi/(3*L_xi) must exceed 1 so dilation steps are possible "
        "(increase N_xi or decrease L_xi)");
}

}  // namespace oseenlab
