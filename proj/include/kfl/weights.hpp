#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kfl/common.hpp"
#include "kfl/profile.hpp"

namespace kfl {

/// Two-piece log-power slowly varying function
///   b(t) = (1 + |log t| / logscale)^{gamma_low}   on (0, 1],
///   b(t) = (1 + |log t| / logscale)^{gamma_high}  on (1, inf).
/// The inner logscale keeps the family closed under the b_n transform.
struct SlowlyVarying {
  double gamma_low = 0.0;
  double gamma_high = 0.0;
  double logscale = 1.0;
  bool nondecreasing_class = false;  // membership claim in SV-up

  double eval(double t) const;
  bool trivial() const { return gamma_low == 0.0 && gamma_high == 0.0; }
  double gamma_at(double t) const { return t <= 1.0 ? gamma_low : gamma_high; }

  /// Smallest eps with t^eps b non-decreasing and t^-eps b non-increasing
  /// (closed form for this family: max |gamma| / logscale).
  double monotonicity_epsilon() const;

  /// Grid audit of the eps-monotonicity convention; returns the smallest
  /// passing eps found and whether the requested eps passes.
  struct MonotoneAudit {
    bool passes = false;
    double smallest_passing = 0.0;
  };
  MonotoneAudit audit_monotone(double eps, int per_decade = 8) const;

  void validate() const;  // enforces SV-up constraints when flagged
};

/// Weight w(t) = t^alpha * b(t)^rho.
struct PowerSVWeight {
  double alpha = 0.0;
  SlowlyVarying sv;
  double rho = 1.0;

  double eval(double t) const;
  bool pure_power() const { return sv.trivial() || rho == 0.0; }
  double log_exp_low() const { return rho * sv.gamma_low; }
  double log_exp_high() const { return rho * sv.gamma_high; }

  /// Parse "t^A" or "t^A*log^G"; G applies to both pieces.
  static PowerSVWeight parse(const std::string& literal);
  std::string to_string() const;
};

/// integral_0^T s^shift w(s) ds and companions; exact for pure powers,
/// panel quadrature on the log axis otherwise; +inf when divergent.
double weight_integral_head(const PowerSVWeight& w, double shift, double T);
double weight_integral_tail(const PowerSVWeight& w, double shift, double T);
double weight_integral(const PowerSVWeight& w, double shift, double a,
                       double b);

struct LogGrid {
  double tmin = 1e-6;
  double tmax = 1e6;
  int per_decade = 10;
  std::vector<double> points() const;
};

struct ConditionResult {
  bool holds = false;
  double constant = kInf;  // sup of the defining ratio over the grid
  bool finite_everywhere = false;
  bool stable = false;  // not still growing at either grid end
};

/// B_r: sup_t  t^r integral_t^inf s^-r w / integral_0^t w.
ConditionResult check_Br(const PowerSVWeight& w, double r,
                         const LogGrid& grid = {});
/// B_r^*: sup_t  t^r integral_0^t s^-r w / integral_0^t w.
ConditionResult check_Brstar(const PowerSVWeight& w, double r,
                             const LogGrid& grid = {});
/// B_inf^*: sup_t  integral_0^t log(t/s) w / integral_0^t w.
ConditionResult check_Binftystar(const PowerSVWeight& w,
                                 const LogGrid& grid = {});

/// Hardy operators with exact closed-form evaluation on profile segments.
/// P h (t) = t^-1 integral_0^t h;  Q h (t) = integral_t^inf h(s)/s ds;
/// Q_eta h (t) = t^-eta integral_t^inf s^{eta-1} h(s) ds.
std::function<double(double)> hardy_P(const Profile& h);
std::function<double(double)> hardy_Q(const Profile& h);
std::function<double(double)> hardy_Qeta(const Profile& h, double eta);

/// Iterated regularizations of a slowly varying b:
///   averages:   a_0 = 1/b,  a_l(t) = t^-1 integral_0^t a_{l-1},
///   conjugates: c_0 = b,    c_l(t) = t integral_t^inf c_{l-1}(u) u^-2 du.
class SVRegularization {
 public:
  static SVRegularization averages(const SlowlyVarying& b, int levels);
  static SVRegularization conjugates(const SlowlyVarying& b, int levels);

  double eval(double t) const { return eval_level(levels_, t); }
  double eval_level(int level, double t) const;
  int levels() const { return levels_; }

  /// min/max of a_N(t)*b(t) (averages) resp. c_N(t)/b(t) (conjugates)
  /// over [lo, hi].
  std::pair<double, double> certified_band(double lo = 1e-6,
                                           double hi = 1e6) const;

 private:
  SVRegularization() = default;
  void build(bool averages);
  SlowlyVarying b_;
  int levels_ = 0;
  bool averages_ = true;
  std::vector<double> x_;                     // log-grid
  std::vector<std::vector<double>> values_;   // per level
};

/// b_n(t) = 1 / b(t^{-1/n}); exact within the family (requires SV-up flag).
SlowlyVarying bn_transform(const SlowlyVarying& b, int n);

/// Evaluable weight with power-log asymptotics at both ends; carries the
/// exact PowerSVWeight when one exists.
struct EvalWeight {
  std::function<double(double)> fn;
  double head_power = 0.0, head_log = 0.0;
  double tail_power = 0.0, tail_log = 0.0;
  double logscale = 1.0;
  std::optional<PowerSVWeight> closed;

  double eval(double t) const { return closed ? closed->eval(t) : fn(t); }
};

/// wbar(t) = t^{-mr/n-r} w(t) (integral_t^inf s^{-mr/n-r} w ds)^{-r'}.
/// Requires the tail integral to converge (else the weight degenerates and
/// the divergence precondition is reported as violated).
EvalWeight associate_weight_bar(const PowerSVWeight& w, int m, int n,
                                double r);

/// nu(t) = t^{r+r'-1} I1 I2 / (I1 + t^{r'} I2)^{r+1},
/// I1 = integral_0^t wbar,  I2 = integral_t^inf s^{-r'} wbar.
EvalWeight second_associate_nu(const EvalWeight& wbar, double r);

/// integral_0^T s^shift w(s) ds for an evaluable weight, using the declared
/// power-log asymptotics below/above the probed range; +inf when divergent.
double eval_weight_head_integral(const EvalWeight& w, double shift, double T);
double eval_weight_tail_integral(const EvalWeight& w, double shift, double T);
double eval_weight_integral(const EvalWeight& w, double shift, double a,
                            double b);

}  // namespace kfl
