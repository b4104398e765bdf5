#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kfl/common.hpp"
#include "kfl/grid_function.hpp"
#include "kfl/profile.hpp"
#include "kfl/weights.hpp"

namespace kfl {

enum class SpaceFamily {
  Lebesgue,         // ||f||_p
  Lorentz,          // (int (t^{1/p} f*)^r dt/t)^{1/r}
  LorentzKaramata,  // extra slowly varying factor b(t)
  Lambda,           // (int (f*)^r w dt)^{1/r}
  Gamma,            // (int (f**)^r w dt)^{1/r}
  Scone,            // (int (f**-f*)^r w dt)^{1/r}, requires f*(inf) = 0
  SGage,            // ||(f**-f*) v||_{base representation}
};

/// Tagged description of a function-space norm. Value type; validated at
/// construction time via validate().
struct SpaceSpec {
  SpaceFamily family = SpaceFamily::Lebesgue;
  double p = 2.0;  // kInf allowed
  double r = 2.0;  // kInf allowed
  SlowlyVarying b;                    // LorentzKaramata
  PowerSVWeight w;                    // Lambda / Gamma / Scone
  std::shared_ptr<SpaceSpec> base;    // SGage
  double v_exponent = 0.0;            // SGage multiplier v(t) = t^{v_exponent}

  void validate() const;
  std::string to_string() const;
  static SpaceSpec parse(const std::string& literal);

  static SpaceSpec lebesgue(double p);
  static SpaceSpec lorentz(double p, double r);
  static SpaceSpec lorentz_karamata(double p, double r, SlowlyVarying b);
  static SpaceSpec lambda(double r, PowerSVWeight w);
  static SpaceSpec gamma(double r, PowerSVWeight w);
  static SpaceSpec scone(double r, PowerSVWeight w);
  static SpaceSpec sgage(SpaceSpec base, double v_exponent);

  /// True for the families whose representation norm is
  /// (int (g*)^r w ds)^{1/r} for a power-log w (r < inf).
  bool lambda_representable() const;
  double lambda_r() const;
  PowerSVWeight lambda_weight() const;
};

/// Norm of the step profile g (typically a rearrangement) in the given space.
/// +inf is a legal value for divergent norms.
double profile_norm(const SpaceSpec& spec, const Profile& g);

/// Norm of a grid function: rearranges and dispatches. +inf legal.
double space_norm(const SpaceSpec& spec, const GridFunction& f);

/// Norm of an already-sorted non-increasing value array with common cell
/// measure (the hot path used by the smoothness module).
double sorted_norm(const SpaceSpec& spec, const std::vector<double>& sorted,
                   double cell);

/// One span of a common-exponent power function: h(t) = c * t^e on [x, y).
struct PowerPiece {
  double x = 0.0;
  double y = 0.0;  // kInf allowed on the last piece
  double c = 0.0;
};

/// (int_0^inf (h*(s))^r w(s) ds)^{1/r} for piecewise h = c_i t^e, e < 0:
/// the exact rearranged-integrand norm used by the S_X(w) cones.
double rearranged_power_norm(std::vector<PowerPiece> pieces, double e,
                             double r, const PowerSVWeight& w);

/// || u^{-sigma-1/s} b(1/u) omega(u) ||_{L_s(du/u over the modulus grid)}:
/// the smoothness-seminorm integral of a measured modulus (log-linear in u
/// between samples). s = kInf takes the sup form.
double besov_seminorm_from_modulus(const std::vector<double>& u,
                                   const std::vector<double>& omega,
                                   double sigma, const SlowlyVarying& b,
                                   double s);

}  // namespace kfl
