#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace halfwave {

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative method fails to reach its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  /// Residual (or iterate) trace up to the failure, when available.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Periodic collocation grid on the square [-L, L)^2 with N points per axis.
///
/// Node (i, j) sits at x = (-L + i*dx, -L + j*dx) and is stored at flat
/// index i*N + j. FFT index m maps to the integer frequency n in
/// [-N/2, N/2) and to the wavenumber k = (pi/L) * n.
class Grid2D {
 public:
  Grid2D(double half_width, int points);

  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  double cell_area() const { return spacing_ * spacing_; }
  std::size_t size() const {
    return static_cast<std::size_t>(points_) * static_cast<std::size_t>(points_);
  }

  double coord(int i) const { return -half_width_ + i * spacing_; }

  /// Signed integer frequency of FFT index m.
  int frequency(int m) const { return m < points_ / 2 ? m : m - points_; }
  double wavenumber(int m) const { return kunit_ * frequency(m); }
  double wavenumber_unit() const { return kunit_; }
  double max_wavenumber() const { return kunit_ * (points_ / 2); }

  bool operator==(const Grid2D& other) const {
    return points_ == other.points_ && half_width_ == other.half_width_;
  }
  bool operator!=(const Grid2D& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  double half_width_;
  int points_;
  double spacing_;
  double kunit_;
};

/// Validating factory: L > 0, N a power of two, N >= 16.
Grid2D make_grid(double half_width, int points);

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where);

}  // namespace halfwave
