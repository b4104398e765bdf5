#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "kfl/common.hpp"
#include "kfl/grid_function.hpp"

namespace kfl {

enum class SegKind {
  Const,   // v = a
  Hyper,   // v = a + b/t
  LogLin,  // v = a + b * (log t - log t0)
  Pow,     // v = a * t^b
};

/// One closed-form piece of a profile on (t0, t1).
struct Segment {
  SegKind kind = SegKind::Const;
  double t0 = 0.0;
  double t1 = kInf;
  double a = 0.0;
  double b = 0.0;

  double eval(double t) const;
  /// Exact integral over [x, y] subset of [t0, t1]; +inf when divergent.
  double integral(double x, double y) const;
};

/// Piecewise closed-form representation of a non-negative function on
/// (0, inf). Step profiles (all-Const pieces) carry rearrangements exactly;
/// Hyper/Pow pieces carry f** and f** - f* exactly. Immutable value type.
class Profile {
 public:
  /// Step profile from breakpoints (t_i, v_i): value v_i on [t_i, t_{i+1}),
  /// v_m extended as a constant beyond t_m; constant extension below t_1.
  static Profile step(std::vector<std::pair<double, double>> breakpoints);

  /// Piecewise linear-in-log-t through (t_i, v_i), t_i > 0; constant
  /// extension outside [t_1, t_m].
  static Profile loglinear(std::vector<std::pair<double, double>> points);

  static Profile constant(double c);

  /// Exact non-increasing rearrangement of |f| (sorted cell values).
  static Profile rearrange(const GridFunction& f);

  /// Rearrangement of a raw value array with a common cell measure.
  static Profile rearrange_values(std::vector<double> values,
                                  double cell_measure);

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// Exact integral over (0, x]; +inf if the head diverges.
  double integral_to(double x) const;
  /// Exact integral over (0, inf); may be +inf.
  double total_mass() const;

  /// t -> (1/t) * integral_0^t, exact on step profiles.
  Profile double_star() const;

  /// t -> g**(t) - g(t) with t * (g**-g)(t) non-decreasing (exact pieces).
  Profile oscillation() const;

  /// Lebesgue measure of {t : value > lambda} for step profiles (exact).
  double measure_above(double lambda) const;

  bool is_nonincreasing(double slack = 1e-12) const;
  bool is_step() const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Segment>& segments() const { return segs_; }
  const std::optional<Segment>& head() const { return head_; }
  const Segment& tail() const { return tail_; }

  /// Declared head behaviour override: value ~ v(k0) * (t/k0)^e near zero.
  Profile with_head_exponent(double e) const;
  /// Declared tail behaviour override: value ~ v(km) * (t/km)^e at infinity.
  Profile with_tail_exponent(double e) const;

  // Two-column CSV (t, v). Step profiles round-trip exactly; other segment
  // kinds are densely sampled and written as log-linear.
  void write_csv(std::ostream& out) const;
  static Profile read_csv(std::istream& in);
  static Profile load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Profile() = default;
  void build_cumulative();
  double first_value() const;

  std::vector<double> knots_;       // strictly increasing, front() >= 0
  std::vector<Segment> segs_;       // size knots_.size() - 1
  std::optional<Segment> head_;     // covers (0, knots front) when front > 0
  Segment tail_;                    // covers (knots back, inf)
  std::vector<double> cum_;         // prefix integrals at knots
  double head_mass_ = 0.0;          // integral over (0, knots front)
};

}  // namespace kfl
