#include "halfwave/grid.hpp"

#include <cmath>
#include <sstream>

namespace halfwave {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid2D::Grid2D(double half_width, int points)
    : half_width_(half_width),
      points_(points),
      spacing_(2.0 * half_width / points),
      kunit_(M_PI / half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw PreconditionError("grid half-width must be positive and finite");
  }
  if (points < 16) {
    throw PreconditionError("grid needs at least 16 points per axis, got " +
                            std::to_string(points));
  }
  if (!is_power_of_two(points)) {
    throw PreconditionError("grid resolution must be a power of two, got " +
                            std::to_string(points));
  }
}

std::string Grid2D::describe() const {
  std::ostringstream os;
  os << "L=" << half_width_ << ",N=" << points_;
  return os.str();
}

Grid2D make_grid(double half_width, int points) { return Grid2D(half_width, points); }

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where) {
  if (a != b) {
    throw PreconditionError(std::string(where) + ": grid mismatch (" + a.describe() +
                            " vs " + b.describe() + ")");
  }
}

}  // namespace halfwave
