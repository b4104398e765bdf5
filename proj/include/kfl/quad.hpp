#pragma once

#include <functional>

#include "kfl/common.hpp"

namespace kfl::quad {

/// 16-point Gauss-Legendre over [x0, x1].
double gl_panel(const std::function<double(double)>& f, double x0, double x1);

/// Composite GL of f over [a, b] on the logarithmic axis:
/// integral of f(t) dt with t = e^x, panels of width <= max_width in x,
/// split at t = 1 (the |log t| kink).
double integrate_log(const std::function<double(double)>& f, double a,
                     double b, double max_width = 0.5);

/// integral of f(t) dt over (0, T]: geometric panel extension toward 0 on the
/// log axis until the running tail is negligible. The integrand must decay
/// (head-convergent); the caller is responsible for the symbolic check.
double integrate_head(const std::function<double(double)>& f, double T,
                      double rel_tol = 1e-15);

/// integral of f(t) dt over [T, inf): geometric extension toward infinity.
double integrate_tail(const std::function<double(double)>& f, double T,
                      double rel_tol = 1e-15);

// Power-log primitives: integrands t^{e-1} * (1 + |log t| / s)^g.
// Pure powers (g == 0) use the exact closed form.

bool powlog_head_converges(double e, double g);
bool powlog_tail_converges(double e, double g);

/// integral over (0, T]; +inf when divergent.
double powlog_head(double e, double g, double T, double logscale = 1.0);

/// integral over [T, inf); +inf when divergent.
double powlog_tail(double e, double g, double T, double logscale = 1.0);

/// integral over [a, b], 0 < a <= b < inf.
double powlog_finite(double e, double g, double a, double b,
                     double logscale = 1.0);

/// Adaptive Simpson on a linear axis (test oracle and general fallback).
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, int max_depth = 48);

}  // namespace kfl::quad
