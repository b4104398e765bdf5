#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "kfl/lattice.hpp"
#include "kfl/quad.hpp"

using namespace kfl;

namespace {

QuasiconcaveProfile min_profile(double knee) {
  // K(s) = min(knee_value..., s): use K(s) = min(1, s) sampled on a log grid
  QuasiconcaveProfile K;
  for (double s = 1e-6; s <= 1e6; s *= std::pow(10.0, 0.125)) {
    K.t.push_back(s);
    K.K.push_back(std::min(knee, s));
  }
  K.validate(1e-9);
  return K;
}

QuasiconcaveProfile identity_profile() {
  QuasiconcaveProfile K;
  for (double s = 1e-8; s <= 1e8; s *= std::pow(10.0, 0.125)) {
    K.t.push_back(s);
    K.K.push_back(s);
  }
  return K;
}

QuasiconcaveProfile random_quasiconcave(testutil::Rng& rng) {
  // random concave-ish: K(s) = sum c_i min(s, a_i)
  std::vector<std::pair<double, double>> terms;
  const int m = rng.uniform_int(2, 6);
  for (int i = 0; i < m; ++i) {
    terms.emplace_back(rng.uniform(0.2, 2.0),
                       std::pow(10.0, rng.uniform(-3.0, 3.0)));
  }
  QuasiconcaveProfile K;
  for (double s = 1e-6; s <= 1e6; s *= std::pow(10.0, 0.25)) {
    double v = 0.0;
    for (auto& [c, a] : terms) v += c * std::min(s, a);
    K.t.push_back(s);
    K.K.push_back(v);
  }
  K.validate(1e-9);
  return K;
}

}  // namespace

TEST_CASE("fundamental function closed forms") {
  // q = 1, theta in (0,1): Xi(t) = t^{1-theta} (1/(1-theta) + 1/theta)
  for (double theta : {0.25, 0.5, 0.75}) {
    PowerLogLattice F{1.0, theta, 0.0};
    F.validate();
    for (double t : {0.1, 1.0, 17.0}) {
      const double expect =
          std::pow(t, 1.0 - theta) * (1.0 / (1.0 - theta) + 1.0 / theta);
      CHECK(fundamental_Xi(F, t) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // theta = 1/2: Xi(t) = 4 sqrt(t), so Phi(1) = 4 and ||min(x,.)|| = 4 sqrt x
  PowerLogLattice F{1.0, 0.5, 0.0};
  CHECK(fundamental_Xi(F, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fundamental_Xi(F, 2.0) ==
        doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
  // q = inf, theta = 1/2: ||min(1,u)|| = sup u^{-1/2} min(1,u) = 1
  PowerLogLattice Finf{kInf, 0.5, 0.0};
  Finf.validate();
  CHECK(fundamental_Xi(Finf, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Theta * Xi = t exactly
  for (double t : {0.3, 2.0, 100.0}) {
    CHECK(fundamental_Theta(F, t) * fundamental_Xi(F, t) ==
          doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("construction rejects divergent fundamental functions") {
  const PowerLogLattice bad1{2.0, 1.2, 0.0};
  CHECK_THROWS_AS(bad1.validate(), input_error);
  const PowerLogLattice bad2{2.0, 0.0, 0.0};
  CHECK_THROWS_AS(bad2.validate(), input_error);
  const PowerLogLattice ok1{2.0, 0.0, -1.0};
  CHECK_NOTHROW(ok1.validate());
  const PowerLogLattice ok2{kInf, 1.0, -0.5};
  CHECK_NOTHROW(ok2.validate());
  CHECK_THROWS_AS(PowerLogLattice::parse("F(q=2,theta=1.5,gamma=0)"),
                  input_error);
  const auto F = PowerLogLattice::parse("F(q=2,theta=0.4,gamma=0)");
  CHECK(F.theta == doctest::Approx(0.4));
}

TEST_CASE("Xi is quasiconcave and Theta non-decreasing on a grid") {
  PowerLogLattice F{2.0, 0.4, 0.5};
  F.validate();
  double prevXi = 0.0, prevRatio = kInf, prevTheta = 0.0;
  for (double t = 1e-5; t <= 1e5; t *= 1.7) {
    const double xi = fundamental_Xi(F, t);
    CHECK(xi >= prevXi - 1e-12);
    CHECK(xi / t <= prevRatio * (1 + 1e-12));
    const double th = fundamental_Theta(F, t);
    CHECK(th >= prevTheta - 1e-12);
    prevXi = xi;
    prevRatio = xi / t;
    prevTheta = th;
  }
}

TEST_CASE("generalized reverse: identity, square, and flats") {
  // identity
  std::vector<double> xs, ys;
  for (double x = 0.0; x <= 10.0; x += 0.25) {
    xs.push_back(x);
    ys.push_back(x);
  }
  MonotoneGridFn ident(xs, ys, MonotoneGridFn::Interp::Linear);
  for (double t : {0.3, 2.0, 7.7}) {
    CHECK(ident.reverse(t) == doctest::Approx(t).epsilon(1e-12));
  }
  // square: R(xi)(t) = sqrt(t)
  std::vector<double> xq, yq;
  for (double x = 0.0; x <= 4.0; x += 1e-3) {
    xq.push_back(x);
    yq.push_back(x * x);
  }
  MonotoneGridFn square(xq, yq, MonotoneGridFn::Interp::Linear);
  for (double t : {0.09, 1.0, 9.0}) {
    CHECK(square.reverse(t) == doctest::Approx(std::sqrt(t)).epsilon(1e-5));
  }
  // flat at value v: the reverse jumps to the right edge of the flat
  MonotoneGridFn flat({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 2.0},
                      MonotoneGridFn::Interp::Linear);
  CHECK(flat.reverse(1.0) == doctest::Approx(2.0));
  // brute-force check of inf{tau : f(tau) > t}
  for (double t : {0.25, 0.5, 1.0, 1.5}) {
    double brute = 3.0;
    for (double tau = 0.0; tau <= 3.0; tau += 1e-4) {
      if (flat.eval(tau) > t) {
        brute = tau;
        break;
      }
    }
    CHECK(flat.reverse(t) == doctest::Approx(brute).epsilon(1e-3));
  }
}

TEST_CASE("reverse triple on constructed fundamental functions") {
  // xi(R xi (t)) <= t; t <= R xi (xi(t)); equality under continuity.
  testutil::Rng rng(3);
  int built = 0;
  for (double q : {1.0, 2.0, kInf}) {
    for (double theta : {0.25, 0.5, 0.75}) {
      for (double gamma : {-1.0, 0.0, 1.0}) {
        PowerLogLattice F{q, theta, gamma};
        try {
          F.validate();
        } catch (const input_error&) {
          continue;
        }
        ++built;
        for (double t : {0.01, 0.5, 3.0, 50.0}) {
          const double phi = reverse_Xi(F, t);
          CHECK(fundamental_Xi(F, phi) == doctest::Approx(t).epsilon(1e-9));
          const double tau = 0.37 * t;
          CHECK(reverse_Xi(F, fundamental_Xi(F, tau)) >=
                tau * (1.0 - 1e-9));
          const double psi = reverse_Theta(F, t);
          CHECK(fundamental_Theta(F, psi) ==
                doctest::Approx(t).epsilon(1e-9));
        }
      }
    }
  }
  CHECK(built >= 20);
  // grid profiles with flats satisfy the one-sided triple
  MonotoneGridFn flat({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 2.0},
                      MonotoneGridFn::Interp::Linear);
  for (double t = 0.05; t < 2.0; t += 0.1) {
    CHECK(flat.eval(flat.reverse(t)) <= t + 1e-12);
  }
  for (double tau = 0.05; tau < 3.0; tau += 0.1) {
    const double v = flat.eval(tau);
    if (v < flat.ymax()) {
      CHECK(tau <= flat.reverse(v) + 1e-12);
    }
  }
  CHECK_THROWS_AS(flat.reverse(5.0), range_error);
}

TEST_CASE("Holmstedt identity-profile law") {
  const auto K = identity_profile();
  for (double theta : {0.25, 0.5, 0.75}) {
    PowerLogLattice F{1.0, theta, 0.0};
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      CHECK(holmstedt_A_rhs(K, F, t) == doctest::Approx(t).epsilon(1e-9));
    }
  }
  for (double q : {2.0, kInf}) {
    PowerLogLattice F{q, 0.5, 0.0};
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      const double rhs = holmstedt_A_rhs(K, F, t);
      CHECK(rhs >= t * (1.0 - 1e-9));
      CHECK(rhs <= 2.0 * t * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("A-form against a piecewise integration oracle for K = min(1,s)") {
  const auto K = min_profile(1.0);
  PowerLogLattice F{1.0, 0.5, 0.0};
  for (double t : {0.4, 1.0, 4.0, 40.0}) {
    const double phi = reverse_Xi(F, t);
    // oracle: || K chi_(0,phi) ||_F + K(phi) || chi_(phi,inf) ||_F with
    // K = min(1,s): integral s^{-1/2} min(1,s) ds/s over (0,phi)
    auto integrand = [&](double u) {
      return std::pow(u, -0.5) * std::min(1.0, u) / u;
    };
    double term1;
    if (phi <= 1.0) {
      term1 = quad::adaptive_simpson([&](double u) { return std::pow(u, -0.5); },
                                     1e-12, phi, 1e-13);
    } else {
      term1 = quad::adaptive_simpson([&](double u) { return std::pow(u, -0.5); },
                                     1e-12, 1.0, 1e-13) +
              quad::adaptive_simpson(
                  [&](double u) { return std::pow(u, -1.5); }, 1.0, phi,
                  1e-13);
    }
    (void)integrand;
    const double term2 = std::min(1.0, phi) * 2.0 * std::pow(phi, -0.5);
    const double mine = holmstedt_A_rhs(K, F, t);
    CHECK(mine == doctest::Approx(term1 + term2).epsilon(1e-5));
  }
}

TEST_CASE("B-form basics: closed value, homogeneity, divergence") {
  const auto K = min_profile(1.0);
  PowerLogLattice F{1.0, 0.5, 0.0};
  // psi(t) = 16 t^2 (Theta(t) = sqrt(t)/4); for t < 1/4 the value is 4t.
  for (double t : {0.01, 0.1, 0.2}) {
    CHECK(holmstedt_B_rhs(K, F, t) == doctest::Approx(4.0 * t).epsilon(1e-6));
  }
  // homogeneity in K for both forms
  const auto K3 = K.scaled(3.0);
  for (double t : {0.05, 0.5}) {
    CHECK(holmstedt_B_rhs(K3, F, t) ==
          doctest::Approx(3.0 * holmstedt_B_rhs(K, F, t)).epsilon(1e-10));
    CHECK(holmstedt_A_rhs(K3, F, t) ==
          doctest::Approx(3.0 * holmstedt_A_rhs(K, F, t)).epsilon(1e-10));
  }
  // K(s) = s with a lattice whose tail cannot hold it: +inf propagates
  const auto Kid = identity_profile();
  PowerLogLattice Ftail{1.0, 0.25, 0.0};  // ||s chi_(psi,inf)|| diverges
  const double val = holmstedt_B_rhs(Kid, Ftail, 0.5);
  CHECK(val == kInf);
}

TEST_CASE("aliases agree with the base expressions") {
  testutil::Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const auto K = random_quasiconcave(rng);
    PowerLogLattice F{rng.uniform_int(1, 2) == 1 ? 1.0 : 2.0,
                      rng.uniform(0.2, 0.8), 0.0};
    const double t = std::pow(10.0, rng.uniform(-1.5, 1.5));
    CHECK(ulyanov_profile_rhs(K, F, t) == holmstedt_A_rhs(K, F, t));
    CHECK(marchaud_profile_rhs(K, F, t) == holmstedt_B_rhs(K, F, t));
    CHECK(reverse_marchaud_profile_lhs(K, F, t) ==
          holmstedt_B_rhs(K, F, t));
  }
}

TEST_CASE("kolyada pair: finite closed checks and homogeneity") {
  const auto K = min_profile(1.0);
  PowerLogLattice F0{1.0, 0.5, 0.0}, F1{1.0, 0.5, 0.0};
  const auto pr = kolyada_profile_pair(K, K, F0, F1, 0.2);
  CHECK(std::isfinite(pr.lhs));
  CHECK(std::isfinite(pr.rhs));
  const auto pr3 = kolyada_profile_pair(K.scaled(3.0), K, F0, F1, 0.2);
  CHECK(pr3.lhs == doctest::Approx(3.0 * pr.lhs).epsilon(1e-10));
  CHECK(pr3.rhs == doctest::Approx(pr.rhs).epsilon(1e-10));
}

TEST_CASE("derived A-expression is quasiconcave in t over random profiles") {
  testutil::Rng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const auto K = random_quasiconcave(rng);
    const double thetas[3] = {0.25, 0.5, 0.75};
    const double gammas[3] = {-1.0, 0.0, 1.0};
    PowerLogLattice F{rep % 3 == 0 ? 1.0 : (rep % 3 == 1 ? 2.0 : kInf),
                      thetas[rep % 3], gammas[(rep / 3) % 3]};
    try {
      F.validate();
    } catch (const input_error&) {
      continue;
    }
    double prev = 0.0, prev_ratio = kInf;
    for (double t = 0.01; t <= 100.0; t *= 2.0) {
      double v;
      try {
        v = holmstedt_A_rhs(K, F, t);
      } catch (const range_error&) {
        continue;
      }
      if (!std::isfinite(v)) continue;
      CHECK(v >= prev * (1.0 - 1e-8));
      CHECK(v / t <= prev_ratio * (1.0 + 1e-8));
      prev = v;
      prev_ratio = v / t;
    }
  }
}

TEST_CASE("windowed lattice norms: zero function and closed chi forms") {
  PowerLogLattice F{2.0, 0.5, 0.0};
  CHECK(lattice_norm(F, [](double) { return 0.0; }, 0.0, kInf) == 0.0);
  // ||chi_(a,b)||_F^q = int_a^b u^{-q theta - 1} du
  const double a = 0.5, b = 4.0;
  const double expect =
      std::sqrt((std::pow(a, -1.0) - std::pow(b, -1.0)) / 1.0);
  CHECK(chi_norm(F, a, b) == doctest::Approx(expect).epsilon(1e-12));
}
