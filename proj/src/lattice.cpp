#include "kfl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kfl/quad.hpp"

namespace kfl {

namespace {

// sup over [a,b] of t^{e} (1+|log t|)^g, exact via endpoints, the kink at
// t = 1, and the interior stationary points.
double powlog_sup(double e, double g, double a, double b) {
  auto val = [&](double t) {
    return std::pow(t, e) * std::pow(1.0 + std::abs(std::log(t)), g);
  };
  double best = 0.0;
  auto consider = [&](double t) {
    if (t >= a && t <= b && t > 0.0 && std::isfinite(t)) {
      best = std::max(best, val(t));
    }
  };
  if (a == 0.0) {
    // limit toward zero: t^e l^g -> 0 if e>0, inf if e<0 (or e=0, g>0)
    if (e < 0.0 || (e == 0.0 && g > 0.0)) return kInf;
    if (e == 0.0 && g <= 0.0) best = std::max(best, 1.0);  // sup near 0 is l^g <= 1... l->inf, g<0 -> 0; g=0 -> 1
    a = std::min(1e-300, b);
  } else {
    consider(a);
  }
  if (b == kInf) {
    if (e > 0.0 || (e == 0.0 && g > 0.0)) return kInf;
    if (e == 0.0 && g == 0.0) best = std::max(best, 1.0);
    b = std::max(1e300, a);
  } else {
    consider(b);
  }
  consider(1.0);
  // stationary: d/dx [e x + g log(1+|x|)] = e + g*sign(x)/(1+|x|) = 0
  if (e != 0.0 && g != 0.0) {
    const double z = -g / e - 1.0;  // |x| = z on the branch sign(x) = +1
    if (z > 0.0) consider(std::exp(z));
    const double z2 = g / e - 1.0;  // branch x < 0: e - g/(1+|x|) = 0
    if (z2 > 0.0) consider(std::exp(-z2));
  }
  return best;
}

}  // namespace

void PowerLogLattice::validate() const {
  if (!(q >= 1.0) || (!std::isfinite(q) && q != kInf)) {
    throw input_error("lattice: q must lie in [1,inf]");
  }
  if (!std::isfinite(theta) || !std::isfinite(gamma)) {
    throw input_error("lattice: theta and gamma must be finite");
  }
  // Xi(1) < inf (fundamental-function condition).
  if (q == kInf) {
    const bool head_ok = theta < 1.0 || (theta == 1.0 && gamma <= 0.0);
    const bool tail_ok = theta > 0.0 || (theta == 0.0 && gamma <= 0.0);
    if (!head_ok || !tail_ok) {
      throw input_error(
          "lattice: ||min(1,.)||_F diverges for these (q,theta,gamma)");
    }
    return;
  }
  const bool head_ok = quad::powlog_head_converges((1.0 - theta) * q,
                                                   gamma * q);
  const bool tail_ok = quad::powlog_tail_converges(-theta * q, gamma * q);
  if (!head_ok || !tail_ok) {
    throw input_error(
        "lattice: ||min(1,.)||_F diverges for these (q,theta,gamma)");
  }
}

PowerLogLattice PowerLogLattice::parse(const std::string& literal) {
  std::string s = literal;
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.rfind("F(", 0) != 0 || s.back() != ')') {
    throw input_error("lattice literal must look like F(q=..,theta=..,gamma=..)");
  }
  PowerLogLattice F;
  std::string body = s.substr(2, s.size() - 3);
  std::istringstream is(body);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw input_error("lattice literal: expected key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double x;
    if (val == "inf") {
      x = kInf;
    } else {
      try {
        x = std::stod(val);
      } catch (...) {
        throw input_error("lattice literal: bad number '" + val + "'");
      }
    }
    if (key == "q") {
      F.q = x;
    } else if (key == "theta") {
      F.theta = x;
    } else if (key == "gamma") {
      F.gamma = x;
    } else {
      throw input_error("lattice literal: unknown key '" + key + "'");
    }
  }
  F.validate();
  return F;
}

std::string PowerLogLattice::to_string() const {
  std::ostringstream os;
  os << "F(q=" << (q == kInf ? std::string("inf") : format_sig(q, 12))
     << ",theta=" << format_sig(theta, 12) << ",gamma="
     << format_sig(gamma, 12) << ")";
  return os.str();
}

void QuasiconcaveProfile::validate(double slack) const {
  if (t.size() != K.size() || t.size() < 2) {
    throw input_error("quasiconcave profile: need >= 2 grid points");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(K[i] > 0.0) || !std::isfinite(K[i])) {
      throw input_error("quasiconcave profile: entries must be positive");
    }
    if (i > 0) {
      if (!(t[i] > t[i - 1])) {
        throw input_error("quasiconcave profile: grid must increase");
      }
      if (K[i] < K[i - 1] * (1.0 - slack) - slack) {
        throw input_error("quasiconcave profile: K must be non-decreasing");
      }
      if (K[i] / t[i] > K[i - 1] / t[i - 1] * (1.0 + slack) + slack) {
        throw input_error("quasiconcave profile: K/t must be non-increasing");
      }
    }
  }
}

double QuasiconcaveProfile::eval(double s) const {
  if (!(s > 0.0)) throw range_error("profile eval: s must be positive");
  if (s <= t.front()) return K.front() * s / t.front();
  if (s >= t.back()) return K.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double u = (std::log(s) - std::log(t[i])) /
                   (std::log(t[i + 1]) - std::log(t[i]));
  return K[i] + (K[i + 1] - K[i]) * u;
}

QuasiconcaveProfile QuasiconcaveProfile::scaled(double c) const {
  QuasiconcaveProfile out = *this;
  for (double& v : out.K) v *= c;
  return out;
}

double chi_norm(const PowerLogLattice& F, double a, double b) {
  if (b <= a) return 0.0;
  if (F.q == kInf) {
    return powlog_sup(-F.theta, F.gamma, a, b);
  }
  double integral;
  if (a == 0.0) {
    integral = b == kInf ? kInf
                         : quad::powlog_head(-F.theta * F.q, F.gamma * F.q, b);
  } else if (b == kInf) {
    integral = quad::powlog_tail(-F.theta * F.q, F.gamma * F.q, a);
  } else {
    integral = quad::powlog_finite(-F.theta * F.q, F.gamma * F.q, a, b);
  }
  return std::isfinite(integral) ? std::pow(integral, 1.0 / F.q) : kInf;
}

double s_chi_norm(const PowerLogLattice& F, double a, double b) {
  if (b <= a) return 0.0;
  if (F.q == kInf) {
    return powlog_sup(1.0 - F.theta, F.gamma, a, b);
  }
  double integral;
  if (a == 0.0) {
    integral = b == kInf
                   ? kInf
                   : quad::powlog_head((1.0 - F.theta) * F.q, F.gamma * F.q, b);
  } else if (b == kInf) {
    integral = quad::powlog_tail((1.0 - F.theta) * F.q, F.gamma * F.q, a);
  } else {
    integral =
        quad::powlog_finite((1.0 - F.theta) * F.q, F.gamma * F.q, a, b);
  }
  return std::isfinite(integral) ? std::pow(integral, 1.0 / F.q) : kInf;
}

double k_chi_norm(const PowerLogLattice& F, const QuasiconcaveProfile& K,
                  double a, double b) {
  if (b <= a) return 0.0;
  const double t1 = K.t.front(), tm = K.t.back();
  // Split the window into: linear head (0,t1), log-linear interior pieces,
  // constant tail (tm, inf).
  if (F.q == kInf) {
    double best = 0.0;
    const double lo = std::max(a, 0.0), hi = b;
    // head: K(s) = K1 s / t1 -> (K1/t1) * s^{1-theta} l^gamma
    const double h_hi = std::min(hi, t1);
    if (lo < h_hi) {
      best = std::max(best, K.K.front() / t1 *
                                powlog_sup(1.0 - F.theta, F.gamma, lo, h_hi));
    }
    // interior: dense sampling per piece
    for (std::size_t i = 0; i + 1 < K.t.size(); ++i) {
      const double x = std::max(lo, K.t[i]), y = std::min(hi, K.t[i + 1]);
      if (y <= x) continue;
      for (int s = 0; s <= 48; ++s) {
        const double u = x * std::pow(y / x, s / 48.0);
        best = std::max(best, std::pow(u, -F.theta) *
                                  std::pow(1.0 + std::abs(std::log(u)),
                                           F.gamma) *
                                  K.eval(u));
      }
    }
    const double t_lo = std::max(lo, tm);
    if (hi > t_lo) {
      best = std::max(best,
                      K.K.back() * powlog_sup(-F.theta, F.gamma, t_lo, hi));
    }
    return best;
  }
  double acc = 0.0;
  // head
  const double h_hi = std::min(b, t1);
  if (a < h_hi) {
    const double c = K.K.front() / t1;
    double piece;
    if (a == 0.0) {
      piece = quad::powlog_head((1.0 - F.theta) * F.q, F.gamma * F.q, h_hi);
    } else {
      piece = quad::powlog_finite((1.0 - F.theta) * F.q, F.gamma * F.q, a,
                                  h_hi);
    }
    if (!std::isfinite(piece)) return kInf;
    acc += std::pow(c, F.q) * piece;
  }
  // interior pieces: quadrature of (u^-theta l^gamma K(u))^q du/u
  for (std::size_t i = 0; i + 1 < K.t.size(); ++i) {
    const double x = std::max(a, K.t[i]), y = std::min(b, K.t[i + 1]);
    if (y <= x) continue;
    acc += quad::integrate_log(
        [&](double u) {
          const double g = std::pow(u, -F.theta) *
                           std::pow(1.0 + std::abs(std::log(u)), F.gamma) *
                           K.eval(u);
          return std::pow(g, F.q) / u;
        },
        x, y, 0.25);
  }
  // constant tail
  const double t_lo = std::max(a, tm);
  if (b > t_lo) {
    double piece;
    if (b == kInf) {
      piece = quad::powlog_tail(-F.theta * F.q, F.gamma * F.q, t_lo);
    } else {
      piece = quad::powlog_finite(-F.theta * F.q, F.gamma * F.q, t_lo, b);
    }
    if (!std::isfinite(piece)) return kInf;
    acc += std::pow(K.K.back(), F.q) * piece;
  }
  return std::isfinite(acc) ? std::pow(acc, 1.0 / F.q) : kInf;
}

double lattice_norm(const PowerLogLattice& F,
                    const std::function<double(double)>& h, double a,
                    double b) {
  if (b <= a) return 0.0;
  auto g = [&](double u) {
    return std::pow(u, -F.theta) *
           std::pow(1.0 + std::abs(std::log(u)), F.gamma) * std::abs(h(u));
  };
  if (F.q == kInf) {
    double best = 0.0;
    const double lo = a == 0.0 ? 1e-12 : a;
    const double hi = b == kInf ? 1e12 : b;
    for (int i = 0; i <= 600; ++i) {
      const double u = lo * std::pow(hi / lo, i / 600.0);
      best = std::max(best, g(u));
    }
    return best;
  }
  auto integrand = [&](double u) { return std::pow(g(u), F.q) / u; };
  double acc = 0.0;
  const double lo = a == 0.0 ? std::min(1.0, b) : a;
  const double hi = b == kInf ? std::max(1.0, a) : b;
  if (a == 0.0) {
    acc += quad::integrate_head(integrand, lo);
  }
  if (b == kInf) {
    acc += quad::integrate_tail(integrand, hi);
  }
  if (lo < hi) acc += quad::integrate_log(integrand, lo, hi, 0.25);
  return std::pow(acc, 1.0 / F.q);
}

double fundamental_Xi(const PowerLogLattice& F, double t) {
  if (!(t > 0.0)) throw range_error("Xi: t must be positive");
  if (F.q == kInf) {
    return std::max(powlog_sup(1.0 - F.theta, F.gamma, 0.0, t),
                    t * powlog_sup(-F.theta, F.gamma, t, kInf));
  }
  const double head =
      quad::powlog_head((1.0 - F.theta) * F.q, F.gamma * F.q, t);
  const double tail = quad::powlog_tail(-F.theta * F.q, F.gamma * F.q, t);
  return std::pow(head + std::pow(t, F.q) * tail, 1.0 / F.q);
}

double fundamental_Theta(const PowerLogLattice& F, double t) {
  return t / fundamental_Xi(F, t);
}

std::pair<double, double> Xi_range(const PowerLogLattice& F) {
  return {fundamental_Xi(F, 1e-14), fundamental_Xi(F, 1e14)};
}

std::pair<double, double> Theta_range(const PowerLogLattice& F) {
  return {fundamental_Theta(F, 1e-14), fundamental_Theta(F, 1e14)};
}

namespace {

double bisect_monotone(const std::function<double(double)>& fn, double target,
                       double lo, double hi) {
  // fn increasing in log-space; returns tau with fn(tau) ~= target.
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (llo + lhi);
    if (fn(std::exp(mid)) > target) {
      lhi = mid;
    } else {
      llo = mid;
    }
  }
  return std::exp(0.5 * (llo + lhi));
}

}  // namespace

double reverse_Xi(const PowerLogLattice& F, double t) {
  const auto [lo, hi] = Xi_range(F);
  if (!(t > lo) || !(t < hi)) {
    throw range_error("reverse_Xi: t outside (Xi(0), Xi(inf))");
  }
  return bisect_monotone([&](double tau) { return fundamental_Xi(F, tau); },
                         t, 1e-14, 1e14);
}

double reverse_Theta(const PowerLogLattice& F, double t) {
  const auto [lo, hi] = Theta_range(F);
  if (!(t > lo) || !(t < hi)) {
    throw range_error("reverse_Theta: t outside (Theta(0), Theta(inf))");
  }
  return bisect_monotone(
      [&](double tau) { return fundamental_Theta(F, tau); }, t, 1e-14, 1e14);
}

MonotoneGridFn::MonotoneGridFn(std::vector<double> x, std::vector<double> y,
                               Interp interp)
    : x_(std::move(x)), y_(std::move(y)), interp_(interp) {
  if (x_.size() != y_.size() || x_.size() < 2) {
    throw input_error("monotone grid fn: need >= 2 points");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw input_error("monotone grid fn: x must increase");
    if (y_[i] < y_[i - 1]) throw input_error("monotone grid fn: y must not decrease");
  }
}

double MonotoneGridFn::eval(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  if (interp_ == Interp::Step) {
    // left-continuous step: value jumps at the NEXT breakpoint
    return y_[i];
  }
  const double u = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return y_[i] + (y_[i + 1] - y_[i]) * u;
}

double MonotoneGridFn::reverse(double t) const {
  if (!(t >= y_.front()) || !(t < y_.back())) {
    throw range_error("generalized reverse: t outside the value range");
  }
  // inf{tau : f(tau) > t}: find the first index with y > t.
  const auto it = std::upper_bound(y_.begin(), y_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - y_.begin());
  if (interp_ == Interp::Step) {
    // f(tau) = y_i on (x_i, x_{i+1}]; f first exceeds t at tau just past x_j
    return x_[j];
  }
  // piecewise linear: crossing inside segment (j-1, j) unless flat at t
  const std::size_t i = j - 1;
  if (y_[j] == y_[i]) {
    // flat exactly at level t cannot happen (y_j > t >= y_i); defensive
    return x_[j];
  }
  if (y_[i] == t) {
    // exact hit: f > t first happens immediately after the flat run ending
    // at x_i... but with linear interp the function exceeds t right after
    // the last x with value t.
    std::size_t last = i;
    while (last + 1 < y_.size() && y_[last + 1] == t) ++last;
    return x_[last];
  }
  const double u = (t - y_[i]) / (y_[j] - y_[i]);
  return x_[i] + (x_[j] - x_[i]) * u;
}

double holmstedt_A_rhs(const QuasiconcaveProfile& K, const PowerLogLattice& F0,
                       double t) {
  K.validate(1e-9);
  F0.validate();
  const double phi = reverse_Xi(F0, t);
  const double term1 = k_chi_norm(F0, K, 0.0, phi);
  const double term2 = K.eval(phi) * chi_norm(F0, phi, kInf);
  return term1 + term2;
}

double holmstedt_B_rhs(const QuasiconcaveProfile& K, const PowerLogLattice& F1,
                       double t) {
  K.validate(1e-9);
  F1.validate();
  const double psi = reverse_Theta(F1, t);
  const double term1 = t * (K.eval(psi) / psi) * s_chi_norm(F1, 0.0, psi);
  const double term2 = t * k_chi_norm(F1, K, psi, kInf);
  return term1 + term2;
}

double ulyanov_profile_rhs(const QuasiconcaveProfile& K,
                           const PowerLogLattice& F0, double t) {
  return holmstedt_A_rhs(K, F0, t);
}

double marchaud_profile_rhs(const QuasiconcaveProfile& K,
                            const PowerLogLattice& F1, double t) {
  return holmstedt_B_rhs(K, F1, t);
}

double reverse_marchaud_profile_lhs(const QuasiconcaveProfile& K,
                                    const PowerLogLattice& F1, double t) {
  return holmstedt_B_rhs(K, F1, t);
}

KolyadaPair kolyada_profile_pair(const QuasiconcaveProfile& K_Z,
                                 const QuasiconcaveProfile& K_X,
                                 const PowerLogLattice& F0,
                                 const PowerLogLattice& F1, double t) {
  KolyadaPair out;
  out.lhs = holmstedt_B_rhs(K_Z, F1, t);
  out.rhs = holmstedt_A_rhs(K_X, F0, t);
  return out;
}

}  // namespace kfl
