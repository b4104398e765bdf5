#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kfl/common.hpp"
#include "kfl/grid_function.hpp"
#include "kfl/spaces.hpp"

namespace kfl {

/// Truncation control for fractional differences. The binomial tail bound
/// certifies sum_{nu>M} |binom(kappa,nu)| <= tail_tol; for compactly
/// supported grid functions the series also terminates exactly once nu*h
/// leaves the box (zero extension), whichever happens first.
struct FracDiffParams {
  double kappa = 1.0;
  double tail_tol = 1e-8;
  int max_terms = 10000;
};

/// kappa (kappa-1) ... (kappa-nu+1) / nu!, by the stable ratio recurrence.
double frac_binom(double kappa, int nu);

/// Signed coefficients (-1)^nu binom(kappa, nu) for nu = 0..M with M chosen
/// by the tail certificate (or the hard cap, whichever is smaller). Exact
/// finite list for integer kappa.
std::vector<double> frac_diff_coefficients(double kappa, double tail_tol,
                                           int max_terms, int hard_cap);

/// sum_nu (-1)^nu binom(kappa,nu) f(x + nu h), zero extension outside the
/// box. h must be grid-commensurate unless interpolate is set.
GridFunction frac_diff(const GridFunction& f, const std::array<double, 3>& h,
                       const FracDiffParams& params, bool interpolate = false);

/// Norm functor on a sorted (non-increasing absolute values) array.
using SortedNormFn =
    std::function<double(const std::vector<double>&, double cell)>;

SortedNormFn make_sorted_norm(const SpaceSpec& spec, double cell,
                              std::size_t n_values);

/// Gamma-type norm (int (f**)^r nu dt)^{1/r} against an evaluable weight;
/// exact head/tail, panel quadrature across the averaged staircase.
SortedNormFn make_gamma_eval_norm(double r, const EvalWeight& nu,
                                  std::size_t n_values, double cell);

/// Batched modulus computation for one (f, kappa) against several norms over
/// a t-grid: shares the fractional differences and the sort across norms and
/// uses nested shift sets so each modulus is non-decreasing in t.
struct ModulusRequest {
  double kappa = 1.0;
  std::vector<SortedNormFn> norms;
  FracDiffParams params{};
  int dir_samples = 16;   // n >= 2 spread directions (axes are always added)
  bool axis_only = false; // n >= 2: restrict shifts to the coordinate axes
};

/// moduli[norm][i] = omega_kappa(f, tgrid[i]) in the given norms.
std::vector<std::vector<double>> modulus_grid(const GridFunction& f,
                                              const ModulusRequest& req,
                                              const std::vector<double>& tgrid);

/// Single-point modulus of smoothness.
double modulus(const GridFunction& f, double t, double kappa,
               const SpaceSpec& spec, int dir_samples = 16,
               bool axis_only = false);

/// Upper estimate of K_0(f, s; X, W^k X): minimum over the zero candidate and
/// k-fold Steklov averages at window scales around s^{1/k}; the candidate
/// Sobolev seminorm uses k-th finite differences of the averaged function.
double k_upper(const GridFunction& f, double s, int k, const SpaceSpec& spec);

/// Quasiconcave regularization: running max, then scale back by the running
/// min of K/t.
std::vector<double> quasiconcave_regularize(const std::vector<double>& t,
                                            const std::vector<double>& K);

/// The two displayed equivalents of K(f,t; X, S_X(v_{k,n})) computed from
/// exact profiles: formA uses (f*(s)-f*(T)) chi_(0,T) plus the tail term,
/// formB uses (f**-f*) chi_(0,T) plus the same tail, T = t^{n/k}.
struct KsxForms {
  double formA = 0.0;
  double formB = 0.0;
};
KsxForms k_sx_profile(const GridFunction& f, const SpaceSpec& X, int k, int n,
                      double t);

}  // namespace kfl
