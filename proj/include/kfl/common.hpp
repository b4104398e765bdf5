#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kfl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bad user input (malformed files, literals, non-finite data).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mathematical precondition is violated (divergent defining integral,
/// degenerate weight, non-integrable head, ...).
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the admissible range of a constructed function
/// (e.g. t outside (Xi(0), Xi(inf)) in the Holmstedt evaluators).
struct range_error : std::runtime_error {
  explicit range_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool finite(double x) { return std::isfinite(x); }

/// Round-trip-safe decimal formatting for CSV/JSON output.
std::string format_double(double x);

/// Fixed significant-digit formatting for printed values.
std::string format_sig(double x, int digits);

}  // namespace kfl
