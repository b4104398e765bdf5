#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kfl/common.hpp"

namespace kfl {

/// A sampled function on a box in R^n (n <= 3), one value per uniform cell,
/// extended by zero outside the box. Immutable after construction.
class GridFunction {
 public:
  struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;
  };

  GridFunction(std::vector<Axis> axes, std::vector<double> values);

  static GridFunction from_callable(
      std::vector<Axis> axes,
      const std::function<double(const std::array<double, 3>&)>& fn);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double cell_measure() const { return cell_measure_; }
  double spacing(int axis) const {
    const Axis& a = axes_[axis];
    return (a.hi - a.lo) / static_cast<double>(a.count);
  }

  /// Center coordinate of cell i along `axis` for multi-index decoding.
  double cell_center(std::size_t flat, int axis) const;

  /// Value at the cell containing x, 0 outside the box.
  double value_at(const std::array<double, 3>& x) const;

  /// Multilinear interpolation of cell-center samples, 0 outside.
  double interpolate(const std::array<double, 3>& x) const;

  std::size_t flat_index(const std::array<std::size_t, 3>& idx) const;

  GridFunction scaled(double c) const;

  /// Sum of |values|^p * cell_measure.
  double power_mass(double p) const;

  // Serialization: CSV text form with a 3-line header, or packed binary.
  static GridFunction read_csv(std::istream& in);
  static GridFunction read_binary(std::istream& in);
  static GridFunction load(const std::string& path);
  void write_csv(std::ostream& out) const;
  void write_binary(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
  double cell_measure_ = 0.0;
};

}  // namespace kfl
