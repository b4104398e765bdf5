#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kfl/common.hpp"

namespace kfl {

/// Banach lattice over ((0,inf), dt/t) with
///   ||h||_F = || u^{-theta} (1+|log u|)^gamma h(u) ||_{L_q(du/u)}.
/// Construction enforces Xi(1) = ||min(1,.)||_F < inf.
struct PowerLogLattice {
  double q = 1.0;  // [1, inf]
  double theta = 0.5;
  double gamma = 0.0;

  void validate() const;
  static PowerLogLattice parse(const std::string& literal);  // F(q=..,theta=..,gamma=..)
  std::string to_string() const;
};

/// Log-grid representation of a quasiconcave profile s -> K(s):
/// non-decreasing with K(s)/s non-increasing (1e-12 slack on the grid).
/// Evaluation: linear K(t1) s/t1 below the grid, log-linear inside,
/// constant above.
struct QuasiconcaveProfile {
  std::vector<double> t;
  std::vector<double> K;

  void validate(double slack = 1e-12) const;
  double eval(double s) const;
  QuasiconcaveProfile scaled(double c) const;
};

/// Windowed lattice norm of a callable h over (a, b); panel quadrature on
/// the log axis with geometric extension toward the infinite ends (+inf is a
/// legal value, detected symbolically for the built-in closed forms).
double lattice_norm(const PowerLogLattice& F,
                    const std::function<double(double)>& h, double a, double b);

/// ||chi_(a,b)||_F, closed power-log form.
double chi_norm(const PowerLogLattice& F, double a, double b);
/// ||s chi_(a,b)||_F, closed power-log form.
double s_chi_norm(const PowerLogLattice& F, double a, double b);
/// || K(.) chi_(a,b) ||_F for a quasiconcave profile (closed head/tail,
/// panel quadrature on the interior log-linear pieces).
double k_chi_norm(const PowerLogLattice& F, const QuasiconcaveProfile& K,
                  double a, double b);

/// Fundamental functions: Xi(t) = ||min(.,t)||_F, Theta(t) = t / Xi(t).
double fundamental_Xi(const PowerLogLattice& F, double t);
double fundamental_Theta(const PowerLogLattice& F, double t);

/// Grid-estimated admissible ranges (Xi(0), Xi(inf)) resp. (Theta(0),
/// Theta(inf)) for the Holmstedt evaluators.
std::pair<double, double> Xi_range(const PowerLogLattice& F);
std::pair<double, double> Theta_range(const PowerLogLattice& F);

/// Generalized reverse of the continuous strictly monotone Xi/Theta:
/// phi(t) = inf{tau : Xi(tau) > t}; range errors outside (Xi(0), Xi(inf)).
double reverse_Xi(const PowerLogLattice& F, double t);
double reverse_Theta(const PowerLogLattice& F, double t);

/// Generalized reverse function of a non-decreasing grid profile
/// (left-continuous step or piecewise-linear), with exact flats: the value
/// at a flat level is the right edge of the flat.
class MonotoneGridFn {
 public:
  enum class Interp { Step, Linear };
  MonotoneGridFn(std::vector<double> x, std::vector<double> y, Interp interp);

  double eval(double x) const;
  double reverse(double t) const;  // inf{tau : f(tau) > t}
  double ymin() const { return y_.front(); }
  double ymax() const { return y_.back(); }

 private:
  std::vector<double> x_, y_;
  Interp interp_;
};

// Holmstedt-type two-term evaluators on K-profiles.

/// || K chi_(0,phi(t)) ||_F0 + K(phi(t)) || chi_(phi(t),inf) ||_F0.
double holmstedt_A_rhs(const QuasiconcaveProfile& K, const PowerLogLattice& F0,
                       double t);

/// t (K(psi)/psi) || s chi_(0,psi) ||_F1 + t || K chi_(psi,inf) ||_F1.
double holmstedt_B_rhs(const QuasiconcaveProfile& K, const PowerLogLattice& F1,
                       double t);

/// Same two-term expression as the A-form (Ul'yanov-type inequalities use
/// the identical right-hand side shape).
double ulyanov_profile_rhs(const QuasiconcaveProfile& K,
                           const PowerLogLattice& F0, double t);

/// Same two-term expression as the B-form; used as an upper bound.
double marchaud_profile_rhs(const QuasiconcaveProfile& K,
                            const PowerLogLattice& F1, double t);
/// Same expression; used as a lower bound.
double reverse_marchaud_profile_lhs(const QuasiconcaveProfile& K,
                                    const PowerLogLattice& F1, double t);

struct KolyadaPair {
  double lhs = 0.0;
  double rhs = 0.0;
};
/// lhs = B-shape on K_Z with psi from Theta_F1; rhs = A-shape on K_X with
/// phi from Xi_F0.
KolyadaPair kolyada_profile_pair(const QuasiconcaveProfile& K_Z,
                                 const QuasiconcaveProfile& K_X,
                                 const PowerLogLattice& F0,
                                 const PowerLogLattice& F1, double t);

}  // namespace kfl
