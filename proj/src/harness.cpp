#include "kfl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kfl/quad.hpp"

namespace kfl {

using nlohmann::json;

std::string schema_version() { return "kfl/1"; }

// ---------------------------------------------------------------------------
// Deterministic random helpers (fixed algorithms, platform-independent).

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1.0));
  }
  double gauss() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

double sqr(double x) { return x * x; }

}  // namespace

// ---------------------------------------------------------------------------
// Test families.

namespace {

using Maker = std::function<double(const std::array<double, 3>&)>;

Maker make_indicator_sum(Rng& rng, int dim, double lo, double hi) {
  const int kcnt = rng.uniform_int(1, 4);
  struct BoxPart {
    std::array<double, 3> a, b;
    double c;
  };
  auto parts = std::make_shared<std::vector<BoxPart>>();
  const double w = hi - lo;
  for (int i = 0; i < kcnt; ++i) {
    BoxPart bp;
    for (int ax = 0; ax < dim; ++ax) {
      const double c = rng.uniform(lo + 0.15 * w, hi - 0.15 * w);
      const double half = rng.uniform(0.02, 0.25) * w * 0.5;
      bp.a[ax] = c - half;
      bp.b[ax] = c + half;
    }
    bp.c = rng.uniform(0.2, 2.0);
    parts->push_back(bp);
  }
  const int d = dim;
  return [parts, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& bp : *parts) {
      bool in = true;
      for (int ax = 0; ax < d; ++ax) {
        in = in && x[ax] >= bp.a[ax] && x[ax] < bp.b[ax];
      }
      if (in) v += bp.c;
    }
    return v;
  };
}

Maker make_hat_chain(Rng& rng, int dim, double lo, double hi) {
  const int kcnt = rng.uniform_int(2, 6);
  struct Hat {
    std::array<double, 3> c;
    double w, h;
  };
  auto hats = std::make_shared<std::vector<Hat>>();
  const double width = hi - lo;
  for (int i = 0; i < kcnt; ++i) {
    Hat hh;
    for (int ax = 0; ax < dim; ++ax) {
      hh.c[ax] = rng.uniform(lo + 0.2 * width, hi - 0.2 * width);
    }
    hh.w = rng.uniform(0.01, 0.12) * width;
    hh.h = rng.uniform(0.3, 2.0);
    hats->push_back(hh);
  }
  const int d = dim;
  return [hats, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& hh : *hats) {
      double rad = 0.0;
      for (int ax = 0; ax < d; ++ax) rad += sqr(x[ax] - hh.c[ax]);
      rad = std::sqrt(rad);
      v += hh.h * std::max(0.0, 1.0 - rad / hh.w);
    }
    return v;
  };
}

double bspline3(double u) {
  // Cubic B-spline bump supported on [-2, 2].
  const double a = std::abs(u);
  if (a >= 2.0) return 0.0;
  if (a <= 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
  const double t = 2.0 - a;
  return t * t * t / 6.0;
}

Maker make_spline_chain(Rng& rng, int dim, double lo, double hi) {
  const int kcnt = rng.uniform_int(2, 5);
  struct Bump {
    std::array<double, 3> c;
    double w, h;
  };
  auto bumps = std::make_shared<std::vector<Bump>>();
  const double width = hi - lo;
  for (int i = 0; i < kcnt; ++i) {
    Bump b;
    for (int ax = 0; ax < dim; ++ax) {
      b.c[ax] = rng.uniform(lo + 0.25 * width, hi - 0.25 * width);
    }
    b.w = rng.uniform(0.02, 0.1) * width;
    b.h = rng.uniform(0.3, 2.0);
    bumps->push_back(b);
  }
  const int d = dim;
  return [bumps, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& b : *bumps) {
      double rad = 0.0;
      for (int ax = 0; ax < d; ++ax) rad += sqr(x[ax] - b.c[ax]);
      v += b.h * bspline3(std::sqrt(rad) / b.w);
    }
    return v;
  };
}

Maker make_gaussian_sum(Rng& rng, int dim, double lo, double hi) {
  const int kcnt = rng.uniform_int(1, 3);
  struct Blob {
    std::array<double, 3> c;
    double s, h;
  };
  auto blobs = std::make_shared<std::vector<Blob>>();
  const double width = hi - lo;
  for (int i = 0; i < kcnt; ++i) {
    Blob b;
    for (int ax = 0; ax < dim; ++ax) {
      b.c[ax] = rng.uniform(lo + 0.3 * width, hi - 0.3 * width);
    }
    // sigma small enough that the mass outside the box is < 1e-12 of total
    b.s = rng.uniform(width / 64.0, width / 20.0);
    b.h = rng.uniform(0.3, 2.0);
    blobs->push_back(b);
  }
  const int d = dim;
  return [blobs, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& b : *blobs) {
      double rad2 = 0.0;
      for (int ax = 0; ax < d; ++ax) rad2 += sqr(x[ax] - b.c[ax]);
      v += b.h * std::exp(-rad2 / (2.0 * b.s * b.s));
    }
    return v;
  };
}

Maker make_cusp(Rng& rng, int dim, double lo, double hi) {
  struct Cusp {
    std::array<double, 3> c;
    double a, w, h;
  };
  const int kcnt = rng.uniform_int(1, 3);
  auto cusps = std::make_shared<std::vector<Cusp>>();
  const double width = hi - lo;
  for (int i = 0; i < kcnt; ++i) {
    Cusp cc;
    for (int ax = 0; ax < dim; ++ax) {
      cc.c[ax] = rng.uniform(lo + 0.2 * width, hi - 0.2 * width);
    }
    cc.a = rng.uniform(0.3, 1.5);
    cc.w = rng.uniform(0.05, 0.2) * width;
    cc.h = rng.uniform(0.5, 1.5);
    cusps->push_back(cc);
  }
  const int d = dim;
  return [cusps, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& cc : *cusps) {
      double rad = 0.0;
      for (int ax = 0; ax < d; ++ax) rad += sqr(x[ax] - cc.c[ax]);
      rad = std::sqrt(rad);
      if (rad < cc.w) {
        v += cc.h * std::pow(rad, cc.a);
      }
    }
    return v;
  };
}

Maker make_trig(Rng& rng, int dim, double lo, double hi) {
  struct Mode {
    std::array<double, 3> nu;
    double a, phase;
  };
  const int kcnt = rng.uniform_int(2, 5);
  auto modes = std::make_shared<std::vector<Mode>>();
  for (int i = 0; i < kcnt; ++i) {
    Mode m;
    for (int ax = 0; ax < dim; ++ax) {
      m.nu[ax] = rng.uniform_int(1, 6);
    }
    m.a = rng.uniform(0.2, 1.0);
    m.phase = rng.uniform(0.0, 2.0 * M_PI);
    modes->push_back(m);
  }
  const double scale = M_PI / (hi - lo);
  const int d = dim;
  return [modes, scale, d](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& m : *modes) {
      double arg = m.phase;
      for (int ax = 0; ax < d; ++ax) arg += m.nu[ax] * scale * x[ax];
      v += m.a * std::cos(arg);
    }
    return v;
  };
}

}  // namespace

std::vector<GridFunction> TestFamily::generate() const {
  if (dim < 1 || dim > 3) throw input_error("family: dim must be 1..3");
  if (count < 1) throw input_error("family: count must be >= 1");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<GridFunction::Axis> axes(dim);
  for (int a = 0; a < dim; ++a) axes[a] = {box_lo, box_hi, cells};
  std::vector<GridFunction> out;
  out.reserve(count);
  std::vector<std::string> kinds;
  if (name == "mixed") {
    kinds = {"spline", "gaussian", "cusp"};
  } else if (name == "smooth") {
    kinds = {"spline", "gaussian"};
  } else {
    kinds = {name};
  }
  for (int i = 0; i < count; ++i) {
    const std::string& kind = kinds[i % kinds.size()];
    Maker mk;
    if (kind == "indicator") {
      mk = make_indicator_sum(rng, dim, box_lo, box_hi);
    } else if (kind == "hat") {
      mk = make_hat_chain(rng, dim, box_lo, box_hi);
    } else if (kind == "spline") {
      mk = make_spline_chain(rng, dim, box_lo, box_hi);
    } else if (kind == "gaussian") {
      mk = make_gaussian_sum(rng, dim, box_lo, box_hi);
    } else if (kind == "cusp") {
      mk = make_cusp(rng, dim, box_lo, box_hi);
    } else if (kind == "trig") {
      mk = make_trig(rng, dim, box_lo, box_hi);
    } else {
      throw input_error("family: unknown generator '" + name + "'");
    }
    out.push_back(GridFunction::from_callable(axes, mk));
  }
  return out;
}

std::string TestFamily::id_of(int index) const {
  std::vector<std::string> kinds;
  if (name == "mixed") {
    kinds = {"spline", "gaussian", "cusp"};
  } else if (name == "smooth") {
    kinds = {"spline", "gaussian"};
  } else {
    kinds = {name};
  }
  return kinds[index % kinds.size()] + "-" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// Case ids.

namespace {

const std::pair<CaseId, const char*> kCaseNames[] = {
    {CaseId::MARCHAUD_CLASSIC, "MARCHAUD_CLASSIC"},
    {CaseId::TIMAN, "TIMAN"},
    {CaseId::REVERSE_MARCHAUD, "REVERSE_MARCHAUD"},
    {CaseId::ULYANOV_CLASSIC, "ULYANOV_CLASSIC"},
    {CaseId::ULYANOV_STRENGTHENED, "ULYANOV_STRENGTHENED"},
    {CaseId::KOLYADA, "KOLYADA"},
    {CaseId::SHARP_ULYANOV, "SHARP_ULYANOV"},
    {CaseId::PROP11A, "PROP11A"},
    {CaseId::PROP11B, "PROP11B"},
    {CaseId::PROP13A, "PROP13A"},
    {CaseId::PROP13B, "PROP13B"},
    {CaseId::PROP13PRIME_A, "PROP13PRIME_A"},
    {CaseId::PROP13PRIME_B, "PROP13PRIME_B"},
    {CaseId::KOLULY, "KOLULY"},
    {CaseId::ULYKOL, "ULYKOL"},
    {CaseId::COR59, "COR59"},
    {CaseId::COR510, "COR510"},
    {CaseId::THM68, "THM68"},
    {CaseId::HOLMSTEDT_PROFILE, "HOLMSTEDT_PROFILE"},
};

}  // namespace

CaseId case_id_from_string(const std::string& s) {
  for (const auto& [id, name] : kCaseNames) {
    if (s == name) return id;
  }
  throw input_error("unknown case id: " + s);
}

std::string to_string(CaseId id) {
  for (const auto& [cid, name] : kCaseNames) {
    if (cid == id) return name;
  }
  return "?";
}

bool case_is_extended(CaseId id) {
  return id == CaseId::PROP13PRIME_A || id == CaseId::PROP13PRIME_B ||
         id == CaseId::COR59 || id == CaseId::COR510;
}

// ---------------------------------------------------------------------------
// Hypothesis validation.

namespace {

double derived_pstar(double p, double delta, int n) {
  const double inv = 1.0 / p - delta / n;
  if (!(inv > 0.0)) return kInf;
  return 1.0 / inv;
}

bool is_nat(double x) { return x > 0.0 && x == std::floor(x); }

}  // namespace

std::vector<std::string> parameter_validate(const InequalityCase& c) {
  std::vector<std::string> v;
  const CaseParams& prm = c.prm;
  auto need = [&](bool ok, const std::string& rule) {
    if (!ok) v.push_back(rule);
  };
  need(!c.tgrid.empty(), "t-grid must be non-empty");
  for (std::size_t i = 0; i < c.tgrid.size(); ++i) {
    if (!(c.tgrid[i] > 0.0) ||
        (i > 0 && !(c.tgrid[i] > c.tgrid[i - 1]))) {
      need(false, "t-grid must be positive and increasing");
      break;
    }
  }
  need(prm.n >= 1 && prm.n <= 3, "n must be 1, 2 or 3");
  const double p = prm.p;
  const double n = prm.n;
  auto check_pstar = [&](double delta) {
    const double ps = derived_pstar(p, delta, prm.n);
    if (prm.pstar != 0.0 &&
        std::abs(1.0 / prm.pstar - (1.0 / p - delta / n)) > 1e-12) {
      need(false, "1/p* must equal 1/p - delta/n");
    }
    need(std::isfinite(ps), "1/p - delta/n must be positive");
  };
  switch (c.id) {
    case CaseId::MARCHAUD_CLASSIC:
      need(prm.k >= 1 && prm.m >= 1, "k, m must be natural");
      need(p >= 1.0, "p must lie in [1,inf]");
      break;
    case CaseId::TIMAN:
      need(prm.k >= 1 && prm.m >= 1, "k, m must be natural");
      need(p > 1.0 && std::isfinite(p), "Timan form requires 1 < p < inf");
      break;
    case CaseId::REVERSE_MARCHAUD:
      need(prm.k >= 1 && prm.m >= 1, "k, m must be natural");
      need(p > 1.0 && std::isfinite(p),
           "reverse Marchaud form requires 1 < p < inf");
      break;
    case CaseId::ULYANOV_CLASSIC:
      need(p >= 1.0 && std::isfinite(p), "requires 1 <= p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.k >= 1, "k must be natural");
      check_pstar(prm.delta);
      break;
    case CaseId::ULYANOV_STRENGTHENED:
      need(p >= 1.0 && std::isfinite(p), "requires 1 <= p < inf");
      need(prm.delta > 0.0 && prm.delta < prm.k &&
               prm.delta < n / p,
           "requires 0 < delta < min(k, n/p)");
      check_pstar(prm.delta);
      break;
    case CaseId::KOLYADA:
      need((p > 1.0 && std::isfinite(p)) || (p == 1.0 && prm.n >= 2),
           "requires 1 < p < inf, or p = 1 with n >= 2");
      need(prm.delta > 0.0 &&
               prm.delta < std::min(n / p, static_cast<double>(prm.k)),
           "requires 0 < delta < min(n/p, k)");
      check_pstar(prm.delta);
      break;
    case CaseId::SHARP_ULYANOV:
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.beta > 0.0, "beta must be positive");
      check_pstar(prm.delta);
      break;
    case CaseId::PROP11A: {
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.beta > 0.0 && prm.sigma > 0.0, "beta, sigma must be positive");
      need(prm.r0 <= prm.r1, "requires r0 <= r1");
      const double q0 = prm.q0;
      need(q0 >= 1.0, "q0 must lie in [1,inf]");
      if (p != 2.0) {
        need(q0 <= std::min({p, 2.0, prm.r1}),
             "q0 <= min{p,2,r1} when p != 2");
      } else if (prm.r0 <= 2.0) {
        need(q0 <= std::min(2.0, prm.r1), "q0 <= min{2,r1} when p=2, r0<=2");
      } else {
        need(q0 < 2.0, "q0 < 2 when p = 2 and r0 > 2");
      }
      break;
    }
    case CaseId::PROP11B: {
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.beta > 0.0 && prm.gamma_exp > 0.0,
           "beta, gamma must be positive");
      need(prm.r0 <= prm.r1, "requires r0 <= r1");
      const double q1 = prm.q1;
      need(q1 >= 1.0, "q1 must lie in [1,inf]");
      if (p != 2.0) {
        need(q1 >= std::max({p, 2.0, prm.r0}),
             "q1 >= max{p,2,r0} when p != 2");
      } else if (prm.r1 >= 2.0) {
        need(q1 >= std::max(2.0, prm.r0), "q1 >= max{2,r0} when p=2, r1>=2");
      } else {
        need(q1 > 2.0, "q1 > 2 when p = 2 and r1 < 2");
      }
      break;
    }
    case CaseId::PROP13A:
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.beta > 0.0, "beta must be positive");
      need(prm.r0 <= prm.r1 && prm.q1 <= prm.r1,
           "requires r0 <= r1 and q1 <= r1");
      check_pstar(prm.delta);
      break;
    case CaseId::PROP13B:
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.beta > 0.0, "beta must be positive");
      need(prm.r0 <= prm.q0 && prm.q1 <= prm.r1,
           "requires r0 <= q0 and q1 <= r1");
      check_pstar(prm.delta);
      break;
    case CaseId::PROP13PRIME_A:
    case CaseId::PROP13PRIME_B:
      need(prm.n >= 2, "requires n >= 2");
      need(p == 1.0, "requires p = 1");
      need(prm.delta >= 1.0 && prm.delta < n, "requires 1 <= delta < n");
      need(prm.beta > 0.0, "beta must be positive");
      need(is_nat(prm.beta + prm.delta), "beta + delta must be natural");
      need(prm.q1 >= 1.0 && prm.q1 <= prm.r1, "requires 1 <= q1 <= r1");
      if (prm.pstar != 0.0) {
        need(std::abs(1.0 / prm.pstar - (1.0 - prm.delta / n)) <= 1e-12,
             "1/p* must equal 1 - delta/n");
      }
      need(1.0 - prm.delta / n > 0.0, "requires delta < n");
      break;
    case CaseId::KOLULY: {
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.beta > 0.0, "beta must be positive");
      const double ps = derived_pstar(p, prm.delta, prm.n);
      need(prm.r <= std::min(ps, 2.0), "requires r <= min{p*, 2}");
      check_pstar(prm.delta);
      break;
    }
    case CaseId::ULYKOL: {
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.delta > 0.0 && prm.delta < n / p, "requires 0 < delta < n/p");
      need(prm.beta > 0.0 && prm.gamma_exp > 0.0,
           "beta, gamma must be positive");
      const double ps = derived_pstar(p, prm.delta, prm.n);
      need(prm.r >= std::max(ps, 2.0), "requires r >= max{p*, 2}");
      check_pstar(prm.delta);
      break;
    }
    case CaseId::COR59: {
      need(prm.k >= 1 && prm.m >= 1 && prm.k + prm.m < prm.n,
           "requires k + m < n");
      need(prm.r > 1.0 && std::isfinite(prm.r), "requires 1 < r < inf");
      try {
        const auto br = check_Br(prm.w, prm.r);
        need(br.holds, "w must satisfy the B_r condition");
        const double q = prm.r * (prm.k + prm.m - 1) / prm.n;
        const auto bq = check_Brstar(prm.w, q);
        need(bq.holds, "w must satisfy the B*_{r(k+m-1)/n} condition");
      } catch (const std::exception& e) {
        need(false, std::string("weight condition check failed: ") + e.what());
      }
      break;
    }
    case CaseId::COR510:
      need(prm.k >= 1 && prm.m >= 1 && prm.k + prm.m < prm.n,
           "requires k + m < n");
      need(p > 1.0 && p < n / (prm.k + prm.m - 1.0),
           "requires 1 < p < n/(k+m-1)");
      need(prm.rbar > 1.0 && prm.rbar <= prm.r && std::isfinite(prm.r),
           "requires 1 < rbar <= r < inf");
      break;
    case CaseId::THM68:
      need(prm.kappa > 0.0, "kappa must be positive");
      need(p > 1.0 && std::isfinite(p), "requires 1 < p < inf");
      need(prm.sigma > 0.0 && prm.sigma < n / p, "requires 0 < sigma < n/p");
      need(prm.r >= 1.0 && prm.r <= prm.s, "requires 1 <= r <= s");
      try {
        prm.b.validate();
        need(prm.b.nondecreasing_class || prm.b.trivial(),
             "b must lie in the non-decreasing slowly varying class");
      } catch (const std::exception& e) {
        need(false, e.what());
      }
      need(prm.B.trivial() || prm.n == 1,
           "nontrivial B requires n = 1 (log-scale closure)");
      break;
    case CaseId::HOLMSTEDT_PROFILE: {
      try {
        PowerLogLattice F{prm.lat_q, prm.lat_theta, prm.lat_gamma};
        F.validate();
      } catch (const std::exception& e) {
        need(false, e.what());
      }
      need(prm.k >= 1, "k must be natural");
      break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Measured-modulus integrals.

namespace {

struct Table {
  const std::vector<double>* u = nullptr;
  const std::vector<double>* om = nullptr;

  double at(double x) const {
    const auto& uu = *u;
    const auto& oo = *om;
    if (x <= uu.front()) return oo.front();
    if (x >= uu.back()) return oo.back();
    const auto it = std::upper_bound(uu.begin(), uu.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - uu.begin()) - 1;
    const double w = (std::log(x) - std::log(uu[i])) /
                     (std::log(uu[i + 1]) - std::log(uu[i]));
    return oo[i] + (oo[i + 1] - oo[i]) * w;
  }
};

// (int_lo^hi [u^{-a} bfac(1/u) om(u)]^q du/u)^{1/q}; q = inf -> sup form.
double head_q(const Table& tb, double a, double q, double lo, double hi,
              const SlowlyVarying* bfac) {
  if (hi <= lo) return 0.0;
  auto wfn = [&](double x) {
    double v = std::pow(x, -a);
    if (bfac && !bfac->trivial()) v *= bfac->eval(1.0 / x);
    return v;
  };
  const auto& uu = *tb.u;
  if (q == kInf) {
    double best = std::max(wfn(lo) * tb.at(lo), wfn(hi) * tb.at(hi));
    for (double x : uu) {
      if (x > lo && x < hi) best = std::max(best, wfn(x) * tb.at(x));
    }
    return best;
  }
  double acc = 0.0;
  // Panels between table knots clipped to [lo,hi].
  for (std::size_t i = 0; i + 1 < uu.size(); ++i) {
    const double x = std::max(lo, uu[i]), y = std::min(hi, uu[i + 1]);
    if (y <= x) continue;
    acc += quad::gl_panel(
        [&](double lx) {
          const double t = std::exp(lx);
          const double g = wfn(t) * tb.at(t);
          return g <= 0.0 ? 0.0 : std::pow(g, q);
        },
        std::log(x), std::log(y));
  }
  // Clip ends outside the table range (constant extension of om).
  if (lo < uu.front()) {
    const double y = std::min(hi, uu.front());
    acc += quad::gl_panel(
        [&](double lx) {
          const double t = std::exp(lx);
          const double g = wfn(t) * tb.om->front();
          return g <= 0.0 ? 0.0 : std::pow(g, q);
        },
        std::log(lo), std::log(y));
  }
  if (hi > uu.back()) {
    const double x = std::max(lo, uu.back());
    acc += quad::gl_panel(
        [&](double lx) {
          const double t = std::exp(lx);
          const double g = wfn(t) * tb.om->back();
          return g <= 0.0 ? 0.0 : std::pow(g, q);
        },
        std::log(x), std::log(hi));
  }
  return std::pow(acc, 1.0 / q);
}

// (int_t^inf [u^{-a} om(u)]^q du/u)^{1/q} with om extended by its saturation
// value beyond the measured range; requires a > 0 for the analytic tail.
double tail_q(const Table& tb, double a, double q, double t) {
  const auto& uu = *tb.u;
  const double sat = tb.om->back();
  if (q == kInf) {
    double best = std::pow(t, -a) * tb.at(t);
    for (double x : uu) {
      if (x > t) best = std::max(best, std::pow(x, -a) * tb.at(x));
    }
    return best;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < uu.size(); ++i) {
    const double x = std::max(t, uu[i]), y = uu[i + 1];
    if (y <= x) continue;
    acc += quad::gl_panel(
        [&](double lx) {
          const double u = std::exp(lx);
          const double g = std::pow(u, -a) * tb.at(u);
          return g <= 0.0 ? 0.0 : std::pow(g, q);
        },
        std::log(x), std::log(y));
  }
  const double U = std::max(t, uu.back());
  if (!(a > 0.0)) return kInf;
  acc += std::pow(sat, q) * std::pow(U, -a * q) / (a * q);
  if (t < uu.front()) {
    acc += quad::gl_panel(
        [&](double lx) {
          const double u = std::exp(lx);
          const double g = std::pow(u, -a) * tb.om->front();
          return g <= 0.0 ? 0.0 : std::pow(g, q);
        },
        std::log(t), std::log(std::min(uu.front(), uu.back())));
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

// ---------------------------------------------------------------------------
// Shared measurement tables.

namespace {

struct Requirement {
  double kappa = 1.0;
  std::string key;
  SortedNormFn norm;
  bool axis_only = false;
  int dir_samples = 16;
};

class ModulusTables {
 public:
  ModulusTables(const std::vector<GridFunction>* fs, std::vector<double> ugrid)
      : fs_(fs), ugrid_(std::move(ugrid)) {}

  const std::vector<double>& ugrid() const { return ugrid_; }

  void require(const Requirement& r) {
    for (const auto& q : reqs_) {
      if (q.key == r.key) return;
    }
    reqs_.push_back(r);
  }

  void compute(int jobs) {
    // Group requirements by kappa (and shift-mode) and batch the norms.
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < reqs_.size(); ++i) {
      if (!tables_.count(reqs_[i].key)) missing.push_back(i);
    }
    if (missing.empty()) return;
    for (std::size_t i : missing) {
      tables_[reqs_[i].key].assign(fs_->size(), {});
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i : missing) {
      std::ostringstream gk;
      gk << reqs_[i].kappa << '|' << reqs_[i].axis_only << '|'
         << reqs_[i].dir_samples;
      groups[gk.str()].push_back(i);
    }
    const auto process_f = [&](std::size_t fi) {
      for (const auto& [gk, idxs] : groups) {
        ModulusRequest req;
        req.kappa = reqs_[idxs.front()].kappa;
        req.params.kappa = req.kappa;
        req.axis_only = reqs_[idxs.front()].axis_only;
        req.dir_samples = reqs_[idxs.front()].dir_samples;
        for (std::size_t i : idxs) req.norms.push_back(reqs_[i].norm);
        auto res = modulus_grid((*fs_)[fi], req, ugrid_);
        for (std::size_t k = 0; k < idxs.size(); ++k) {
          tables_[reqs_[idxs[k]].key][fi] = std::move(res[k]);
        }
      }
    };
    if (jobs <= 1 || fs_->size() <= 1) {
      for (std::size_t fi = 0; fi < fs_->size(); ++fi) process_f(fi);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      const int nt = std::min<std::size_t>(jobs, fs_->size());
      for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
          for (;;) {
            const std::size_t fi = next.fetch_add(1);
            if (fi >= fs_->size()) return;
            process_f(fi);
          }
        });
      }
      for (auto& th : pool) th.join();
    }
  }

  Table table(std::size_t fi, const std::string& key) {
    auto it = tables_.find(key);
    if (it == tables_.end()) throw input_error("missing modulus table " + key);
    return Table{&ugrid_, &it->second[fi]};
  }

 private:
  const std::vector<GridFunction>* fs_;
  std::vector<double> ugrid_;
  std::vector<Requirement> reqs_;
  std::map<std::string, std::vector<std::vector<double>>> tables_;
};

std::string spec_key(double kappa, const SpaceSpec& spec) {
  std::ostringstream os;
  os << "om[" << format_sig(kappa, 15) << "]" << spec.to_string();
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Per-case evaluation.

namespace {

struct CaseEval {
  // Registers requirements, then computes (lhs, rhs) at a report scale.
  std::vector<Requirement> needs;
  std::function<std::pair<double, double>(ModulusTables&, std::size_t fi,
                                          double t)>
      eval;
};

Requirement make_req(double kappa, const SpaceSpec& spec, const CaseParams& prm,
                     const GridFunction& proto) {
  Requirement r;
  r.kappa = kappa;
  r.key = spec_key(kappa, spec);
  r.norm = make_sorted_norm(spec, proto.cell_measure(), proto.size());
  r.axis_only = prm.axis_only;
  r.dir_samples = prm.dir_samples;
  return r;
}

CaseEval build_case_eval(const InequalityCase& c, const GridFunction& proto) {
  const CaseParams& prm = c.prm;
  const double n = prm.n;
  CaseEval ce;
  const double tf = c.t_floor;
  switch (c.id) {
    case CaseId::MARCHAUD_CLASSIC:
    case CaseId::TIMAN: {
      const auto X = SpaceSpec::lebesgue(prm.p);
      const double k = prm.k;
      const std::string klo = spec_key(prm.k, X);
      const std::string khi = spec_key(prm.k + prm.m, X);
      ce.needs = {make_req(prm.k, X, prm, proto),
                  make_req(prm.k + prm.m, X, prm, proto)};
      const double q =
          c.id == CaseId::TIMAN ? std::min(2.0, prm.p) : 1.0;
      ce.eval = [klo, khi, k, q](ModulusTables& tb, std::size_t fi, double t) {
        const Table lo = tb.table(fi, klo), hi = tb.table(fi, khi);
        const double lhs = lo.at(t);
        const double rhs = std::pow(t, k) * tail_q(hi, k, q, t);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::REVERSE_MARCHAUD: {
      const auto X = SpaceSpec::lebesgue(prm.p);
      const double k = prm.k;
      const std::string klo = spec_key(prm.k, X);
      const std::string khi = spec_key(prm.k + prm.m, X);
      ce.needs = {make_req(prm.k, X, prm, proto),
                  make_req(prm.k + prm.m, X, prm, proto)};
      const double rr = std::max(2.0, prm.p);
      ce.eval = [klo, khi, k, rr](ModulusTables& tb, std::size_t fi, double t) {
        const Table lo = tb.table(fi, klo), hi = tb.table(fi, khi);
        const double lhs = std::pow(t, k) * tail_q(hi, k, rr, t);
        const double rhs = lo.at(t);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::ULYANOV_CLASSIC:
    case CaseId::ULYANOV_STRENGTHENED: {
      const double ps = prm.pstar != 0.0 ? prm.pstar
                                         : derived_pstar(prm.p, prm.delta,
                                                         prm.n);
      const auto Xp = SpaceSpec::lebesgue(prm.p);
      const auto Xs = SpaceSpec::lebesgue(ps);
      const std::string key_s = spec_key(prm.k, Xs);
      const std::string key_p = spec_key(prm.k, Xp);
      ce.needs = {make_req(prm.k, Xs, prm, proto),
                  make_req(prm.k, Xp, prm, proto)};
      const double delta = prm.delta, k = prm.k;
      const bool strengthened = c.id == CaseId::ULYANOV_STRENGTHENED;
      ce.eval = [key_s, key_p, delta, k, ps, tf, strengthened](
                    ModulusTables& tb, std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        double lhs;
        if (strengthened) {
          double best = 0.0;
          for (std::size_t i = 0; i < ts.u->size(); ++i) {
            const double u = (*ts.u)[i];
            if (u >= t && u < 1.0) {
              best = std::max(best, (*ts.om)[i] / std::pow(u, k - delta));
            }
          }
          best = std::max(best, ts.at(t) / std::pow(t, k - delta));
          lhs = std::pow(t, k - delta) * best;
        } else {
          lhs = ts.at(t);
        }
        const double rhs = head_q(tp, delta, ps, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::KOLYADA: {
      const double ps = prm.pstar != 0.0 ? prm.pstar
                                         : derived_pstar(prm.p, prm.delta,
                                                         prm.n);
      const auto Xp = SpaceSpec::lebesgue(prm.p);
      const auto Xs = SpaceSpec::lebesgue(ps);
      const std::string key_s = spec_key(prm.k, Xs);
      const std::string key_p = spec_key(prm.k, Xp);
      ce.needs = {make_req(prm.k, Xs, prm, proto),
                  make_req(prm.k, Xp, prm, proto)};
      const double delta = prm.delta, k = prm.k, p = prm.p;
      ce.eval = [key_s, key_p, delta, k, p, ps, tf](ModulusTables& tb,
                                                    std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        const double lhs =
            std::pow(t, k - delta) * tail_q(ts, k - delta, p, t);
        const double rhs = head_q(tp, delta, ps, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::SHARP_ULYANOV: {
      const double ps = prm.pstar != 0.0 ? prm.pstar
                                         : derived_pstar(prm.p, prm.delta,
                                                         prm.n);
      const auto Xp = SpaceSpec::lebesgue(prm.p);
      const auto Xs = SpaceSpec::lebesgue(ps);
      const std::string key_s = spec_key(prm.beta, Xs);
      const std::string key_p = spec_key(prm.beta + prm.delta, Xp);
      ce.needs = {make_req(prm.beta, Xs, prm, proto),
                  make_req(prm.beta + prm.delta, Xp, prm, proto)};
      const double delta = prm.delta;
      ce.eval = [key_s, key_p, delta, ps, tf](ModulusTables& tb,
                                              std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        const double lhs = ts.at(t);
        const double rhs = head_q(tp, delta, ps, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::PROP11A: {
      const auto X1 = SpaceSpec::lorentz(prm.p, prm.r1);
      const auto X0 = SpaceSpec::lorentz(prm.p, prm.r0);
      const std::string key_l = spec_key(prm.beta, X1);
      const std::string key_h = spec_key(prm.beta + prm.sigma, X0);
      ce.needs = {make_req(prm.beta, X1, prm, proto),
                  make_req(prm.beta + prm.sigma, X0, prm, proto)};
      const double beta = prm.beta, q0 = prm.q0;
      ce.eval = [key_l, key_h, beta, q0](ModulusTables& tb, std::size_t fi,
                                         double t) {
        const Table tl = tb.table(fi, key_l), th = tb.table(fi, key_h);
        const double lhs = tl.at(t);
        const double rhs = std::pow(t, beta) * tail_q(th, beta, q0, t);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::PROP11B: {
      const auto X1 = SpaceSpec::lorentz(prm.p, prm.r1);
      const auto X0 = SpaceSpec::lorentz(prm.p, prm.r0);
      const std::string key_h = spec_key(prm.beta + prm.gamma_exp, X1);
      const std::string key_l = spec_key(prm.beta, X0);
      ce.needs = {make_req(prm.beta + prm.gamma_exp, X1, prm, proto),
                  make_req(prm.beta, X0, prm, proto)};
      const double beta = prm.beta, gam = prm.gamma_exp, q1 = prm.q1;
      ce.eval = [key_h, key_l, beta, gam, q1](ModulusTables& tb,
                                              std::size_t fi, double t) {
        const Table th = tb.table(fi, key_h), tl = tb.table(fi, key_l);
        const double lhs = std::pow(t, beta) * tail_q(th, gam, q1, t);
        const double rhs = tl.at(t);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::PROP13A:
    case CaseId::PROP13B: {
      const double ps = prm.pstar != 0.0 ? prm.pstar
                                         : derived_pstar(prm.p, prm.delta,
                                                         prm.n);
      const auto Xs = SpaceSpec::lorentz(ps, prm.r1);
      const auto Xp = SpaceSpec::lorentz(prm.p, prm.r0);
      const double order_s =
          c.id == CaseId::PROP13A ? prm.beta : prm.beta + prm.delta;
      const std::string key_s = spec_key(order_s, Xs);
      const std::string key_p = spec_key(prm.beta + prm.delta, Xp);
      ce.needs = {make_req(order_s, Xs, prm, proto),
                  make_req(prm.beta + prm.delta, Xp, prm, proto)};
      const double delta = prm.delta, beta = prm.beta, q0 = prm.q0,
                   q1 = prm.q1;
      const bool bform = c.id == CaseId::PROP13B;
      ce.eval = [key_s, key_p, delta, beta, q0, q1, tf, bform](
                    ModulusTables& tb, std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        double lhs;
        if (bform) {
          lhs = std::pow(t, beta) * tail_q(ts, beta, q0, t);
        } else {
          lhs = ts.at(t);
        }
        const double rhs = head_q(tp, delta, q1, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::PROP13PRIME_A:
    case CaseId::PROP13PRIME_B: {
      const double ps = 1.0 / (1.0 - prm.delta / n);
      const auto Xs = SpaceSpec::lorentz(ps, prm.r1);
      const auto X1 = SpaceSpec::lebesgue(1.0);
      const double order_s =
          c.id == CaseId::PROP13PRIME_A ? prm.beta : prm.beta + prm.delta;
      const std::string key_s = spec_key(order_s, Xs);
      const std::string key_p = spec_key(prm.beta + prm.delta, X1);
      ce.needs = {make_req(order_s, Xs, prm, proto),
                  make_req(prm.beta + prm.delta, X1, prm, proto)};
      const double delta = prm.delta, beta = prm.beta, q0 = prm.q0,
                   q1 = prm.q1;
      const bool bform = c.id == CaseId::PROP13PRIME_B;
      ce.eval = [key_s, key_p, delta, beta, q0, q1, tf, bform](
                    ModulusTables& tb, std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        double lhs;
        if (bform) {
          lhs = std::pow(t, beta) * tail_q(ts, beta, q0, t);
        } else {
          lhs = ts.at(t);
        }
        const double rhs = head_q(tp, delta, q1, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::KOLULY:
    case CaseId::ULYKOL: {
      const double ps = prm.pstar != 0.0 ? prm.pstar
                                         : derived_pstar(prm.p, prm.delta,
                                                         prm.n);
      const auto Xs = SpaceSpec::lorentz(ps, prm.r);
      const auto Xp = SpaceSpec::lorentz(prm.p, prm.r);
      const bool kol = c.id == CaseId::ULYKOL;
      const double order_s = kol ? prm.beta + prm.gamma_exp : prm.beta;
      const std::string key_s = spec_key(order_s, Xs);
      const std::string key_p = spec_key(prm.beta + prm.delta, Xp);
      ce.needs = {make_req(order_s, Xs, prm, proto),
                  make_req(prm.beta + prm.delta, Xp, prm, proto)};
      const double delta = prm.delta, beta = prm.beta, r = prm.r;
      ce.eval = [key_s, key_p, delta, beta, r, tf, kol](ModulusTables& tb,
                                                        std::size_t fi,
                                                        double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        double lhs;
        if (kol) {
          lhs = std::pow(t, beta) * tail_q(ts, beta, r, t);
        } else {
          lhs = ts.at(t);
        }
        const double rhs = head_q(tp, delta, r, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::COR59: {
      const auto lam = SpaceSpec::lambda(prm.r, prm.w);
      const std::string key_p = spec_key(prm.k + prm.m, lam);
      ce.needs = {make_req(prm.k + prm.m, lam, prm, proto)};
      // LHS modulus in Gamma_r(nu) with nu from the associate-weight chain.
      const EvalWeight wbar = associate_weight_bar(prm.w, prm.m, prm.n, prm.r);
      const EvalWeight nu = second_associate_nu(wbar, prm.r);
      Requirement lr;
      lr.kappa = prm.k;
      lr.key = "om[" + format_sig(prm.k, 15) + "]Gamma_r(nu)";
      lr.norm = make_gamma_eval_norm(prm.r, nu, proto.size(),
                                     proto.cell_measure());
      lr.axis_only = prm.axis_only;
      lr.dir_samples = prm.dir_samples;
      ce.needs.push_back(lr);
      const std::string key_l = lr.key;
      const double m = prm.m, r = prm.r;
      ce.eval = [key_l, key_p, m, r, tf](ModulusTables& tb, std::size_t fi,
                                         double t) {
        const Table tl = tb.table(fi, key_l), tp = tb.table(fi, key_p);
        const double lhs = tl.at(t);
        const double rhs = head_q(tp, m, r, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::COR510: {
      const double ps = 1.0 / (1.0 / prm.p - static_cast<double>(prm.m) / n);
      const auto Xs = SpaceSpec::lorentz_karamata(ps, prm.r, prm.b);
      const auto Xp = SpaceSpec::lorentz_karamata(prm.p, prm.rbar, prm.b);
      const std::string key_s = spec_key(prm.k, Xs);
      const std::string key_p = spec_key(prm.k + prm.m, Xp);
      ce.needs = {make_req(prm.k, Xs, prm, proto),
                  make_req(prm.k + prm.m, Xp, prm, proto)};
      const double m = prm.m, r = prm.r;
      ce.eval = [key_s, key_p, m, r, tf](ModulusTables& tb, std::size_t fi,
                                         double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        const double lhs = ts.at(t);
        const double rhs = head_q(tp, m, r, tf, t, nullptr);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::THM68: {
      const double ps = prm.pstar != 0.0
                            ? prm.pstar
                            : 1.0 / (1.0 / prm.p - prm.sigma / n);
      SlowlyVarying bn = bn_transform(prm.b, prm.n);
      if (!prm.B.trivial()) {
        if (prm.n != 1) {
          throw input_error("THM68: nontrivial B requires n = 1");
        }
        bn.gamma_low += prm.B.gamma_low;
        bn.gamma_high += prm.B.gamma_high;
      }
      const auto Xs = SpaceSpec::lorentz_karamata(ps, prm.s, prm.B);
      const auto Xp = SpaceSpec::lorentz_karamata(prm.p, prm.r, bn);
      const std::string key_s = spec_key(prm.kappa, Xs);
      const std::string key_p = spec_key(prm.kappa + prm.sigma, Xp);
      ce.needs = {make_req(prm.kappa, Xs, prm, proto),
                  make_req(prm.kappa + prm.sigma, Xp, prm, proto)};
      const double sigma = prm.sigma, s = prm.s;
      const SlowlyVarying b = prm.b;
      ce.eval = [key_s, key_p, sigma, s, b, tf](ModulusTables& tb,
                                                std::size_t fi, double t) {
        const Table ts = tb.table(fi, key_s), tp = tb.table(fi, key_p);
        const double lhs = ts.at(t);
        const double rhs = head_q(tp, sigma, s, tf, t, &b);
        return std::make_pair(lhs, rhs);
      };
      break;
    }
    case CaseId::HOLMSTEDT_PROFILE:
      // handled separately in run_case
      break;
  }
  return ce;
}

}  // namespace

QuasiconcaveProfile measure_kprofile(const GridFunction& f,
                                     const SpaceSpec& spec, int k,
                                     const std::vector<double>& sgrid) {
  std::vector<double> K(sgrid.size());
  bool all_zero = true;
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    K[i] = k_upper(f, sgrid[i], k, spec);
    if (K[i] > 0.0) all_zero = false;
  }
  if (all_zero) {
    throw domain_error("measure_kprofile: degenerate (zero) function");
  }
  auto reg = quasiconcave_regularize(sgrid, K);
  QuasiconcaveProfile prof;
  prof.t = sgrid;
  prof.K = std::move(reg);
  prof.validate(1e-9);
  return prof;
}

// ---------------------------------------------------------------------------
// run_case.

namespace {

VerificationReport run_case_impl(const InequalityCase& c,
                                 const TestFamily& family, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto violations = parameter_validate(c);
  if (!violations.empty()) {
    std::string msg = "hypotheses violated for " + to_string(c.id) + ":";
    for (const auto& vi : violations) msg += "\n  - " + vi;
    throw hypothesis_violation(msg);
  }
  if (family.dim != c.prm.n) {
    throw hypothesis_violation("family dimension does not match the case n");
  }
  VerificationReport rep;
  rep.case_id = to_string(c.id);
  rep.family = family.name;
  rep.seed = family.seed;
  rep.cells = family.cells;
  rep.ceiling = c.ceiling;
  rep.schema_version = schema_version();
  rep.modulus_mode = c.prm.n == 1 ? "all-commensurate"
                                  : (c.prm.axis_only ? "axis" : "full");
  rep.one_sided = c.prm.n >= 2;
  const auto fs = family.generate();

  if (c.id == CaseId::HOLMSTEDT_PROFILE) {
    // Derived-expression quasiconcavity of the two-term Holmstedt forms on
    // measured K-profiles: lhs = raw expression, rhs = quasiconcave envelope.
    const PowerLogLattice F{c.prm.lat_q, c.prm.lat_theta, c.prm.lat_gamma};
    F.validate();
    const auto X = SpaceSpec::lebesgue(2.0);
    std::vector<double> sgrid;
    for (double s = c.t_floor; s <= c.u_max * 1.0000001; s *= std::sqrt(2.0)) {
      sgrid.push_back(s);
    }
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      QuasiconcaveProfile K;
      try {
        K = measure_kprofile(fs[fi], X, c.prm.k, sgrid);
      } catch (const domain_error&) {
        rep.degenerate = true;
        continue;
      }
      for (int form = 0; form < 2; ++form) {
        std::vector<double> ts, vals;
        for (double t : c.tgrid) {
          double v;
          try {
            v = form == 0 ? holmstedt_A_rhs(K, F, t)
                          : holmstedt_B_rhs(K, F, t);
          } catch (const range_error&) {
            ++rep.skipped_out_of_range;
            continue;
          }
          if (!std::isfinite(v)) {
            ++rep.rhs_infinite;
            continue;
          }
          ts.push_back(t);
          vals.push_back(v);
        }
        if (ts.size() < 2) continue;
        const auto env = quasiconcave_regularize(ts, vals);
        for (std::size_t i = 0; i < ts.size(); ++i) {
          CaseRow row;
          row.t = ts[i];
          row.lhs = vals[i];
          row.rhs = env[i];
          row.ratio = env[i] > 0.0 ? std::max(vals[i] / env[i],
                                              env[i] / vals[i])
                                   : kInf;
          row.f_id = family.id_of(static_cast<int>(fi)) +
                     (form == 0 ? "/A" : "/B");
          rep.rows.push_back(row);
        }
      }
    }
  } else {
    // Measurement grid: quarter-octaves from the floor to u_max.
    std::vector<double> ugrid;
    const double lo = std::log2(c.t_floor), hi = std::log2(c.u_max);
    const int ilo = static_cast<int>(std::llround(lo * 4.0));
    const int ihi = static_cast<int>(std::llround(hi * 4.0));
    for (int i = ilo; i <= ihi; ++i) {
      ugrid.push_back(std::pow(2.0, static_cast<double>(i) / 4.0));
    }
    ModulusTables tables(&fs, ugrid);
    const auto ce = build_case_eval(c, fs.front());
    for (const auto& r : ce.needs) tables.require(r);
    tables.compute(jobs);
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      for (double t : c.tgrid) {
        auto [lhs, rhs] = ce.eval(tables, fi, t);
        CaseRow row;
        row.t = t;
        row.lhs = lhs;
        row.rhs = rhs;
        row.f_id = family.id_of(static_cast<int>(fi));
        if (!std::isfinite(rhs)) {
          ++rep.rhs_infinite;
          row.ratio = std::numeric_limits<double>::quiet_NaN();
        } else if (rhs == 0.0) {
          row.ratio = lhs == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                 : kInf;
        } else {
          row.ratio = lhs / rhs;
        }
        rep.rows.push_back(row);
      }
    }
  }
  // Aggregate.
  double sup = 0.0;
  bool any_finite = false;
  bool any_infinite_ratio = false;
  std::map<int, double> decades;
  for (const auto& row : rep.rows) {
    if (std::isnan(row.ratio)) continue;
    if (!std::isfinite(row.ratio)) {
      any_infinite_ratio = true;
      continue;
    }
    any_finite = true;
    sup = std::max(sup, row.ratio);
    const int dec = static_cast<int>(std::floor(std::log10(row.t)));
    auto [it, fresh] = decades.try_emplace(dec, row.ratio);
    if (!fresh) it->second = std::max(it->second, row.ratio);
  }
  rep.sup_ratio = any_infinite_ratio ? kInf : sup;
  for (const auto& [dec, s] : decades) {
    rep.per_decade_sup.emplace_back(std::pow(10.0, dec + 1), s);
  }
  if (!any_finite) {
    rep.degenerate = rep.rows.empty() || rep.degenerate;
    rep.inconclusive = true;
    rep.pass = false;
  } else {
    rep.pass = std::isfinite(rep.sup_ratio) && rep.sup_ratio <= c.ceiling;
  }
  {
    json prm;
    prm["n"] = c.prm.n;
    prm["p"] = c.prm.p;
    prm["pstar"] = c.prm.pstar;
    prm["delta"] = c.prm.delta;
    prm["beta"] = c.prm.beta;
    prm["sigma"] = c.prm.sigma;
    prm["gamma"] = c.prm.gamma_exp;
    prm["kappa"] = c.prm.kappa;
    prm["k"] = c.prm.k;
    prm["m"] = c.prm.m;
    prm["r0"] = c.prm.r0;
    prm["r1"] = c.prm.r1;
    prm["q0"] = c.prm.q0;
    prm["q1"] = c.prm.q1;
    prm["r"] = c.prm.r;
    prm["rbar"] = c.prm.rbar;
    prm["s"] = c.prm.s;
    prm["b"] = {{"gamma_low", c.prm.b.gamma_low},
                {"gamma_high", c.prm.b.gamma_high},
                {"logscale", c.prm.b.logscale}};
    prm["B"] = {{"gamma_low", c.prm.B.gamma_low},
                {"gamma_high", c.prm.B.gamma_high},
                {"logscale", c.prm.B.logscale}};
    prm["w"] = c.prm.w.to_string();
    prm["lattice"] = {{"q", c.prm.lat_q},
                      {"theta", c.prm.lat_theta},
                      {"gamma", c.prm.lat_gamma}};
    prm["t_floor"] = c.t_floor;
    prm["u_max"] = c.u_max;
    rep.params_json = prm.dump();
  }
  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

}  // namespace

VerificationReport run_case(const InequalityCase& c, const TestFamily& family,
                            int jobs) {
  return run_case_impl(c, family, jobs);
}

VerificationReport run_case_refined(const InequalityCase& c,
                                    const TestFamily& family, int jobs) {
  VerificationReport rep = run_case_impl(c, family, jobs);
  TestFamily fine = family;
  fine.cells = family.cells * 2;
  const VerificationReport rep2 = run_case_impl(c, fine, jobs);
  rep.refined_sup_ratio = rep2.sup_ratio;
  if (std::isfinite(rep.sup_ratio) && rep.sup_ratio > 0.0 &&
      std::isfinite(rep2.sup_ratio)) {
    rep.refinement_stable =
        std::abs(rep2.sup_ratio - rep.sup_ratio) <= 0.05 * rep.sup_ratio;
  } else {
    rep.refinement_stable = false;
  }
  rep.pass = rep.pass && rep.refinement_stable;
  return rep;
}

// ---------------------------------------------------------------------------
// Reports and summaries.

std::string VerificationReport::to_json() const {
  json j;
  j["schema"] = schema_version.empty() ? kfl::schema_version()
                                       : schema_version;
  j["case_id"] = case_id;
  j["parameters"] = json::parse(params_json.empty() ? "{}" : params_json);
  j["family"] = family;
  j["seed"] = seed;
  j["cells"] = cells;
  j["ceiling"] = ceiling;
  j["sup_ratio"] = std::isfinite(sup_ratio) ? json(sup_ratio) : json("+inf");
  j["pass"] = pass;
  j["degenerate"] = degenerate;
  j["inconclusive"] = inconclusive;
  j["rhs_infinite"] = rhs_infinite;
  j["skipped_out_of_range"] = skipped_out_of_range;
  j["one_sided"] = one_sided;
  j["modulus_mode"] = modulus_mode;
  if (!std::isnan(refined_sup_ratio)) {
    j["refined_sup_ratio"] = refined_sup_ratio;
    j["refinement_stable"] = refinement_stable;
  }
  json decs = json::array();
  for (const auto& [d, s] : per_decade_sup) {
    decs.push_back({{"t_below", d}, {"sup", s}});
  }
  j["per_decade_sup"] = decs;
  j["seconds"] = seconds;
  json rws = json::array();
  for (const auto& r : rows) {
    json rj;
    rj["t"] = r.t;
    rj["lhs"] = std::isfinite(r.lhs) ? json(r.lhs) : json("+inf");
    rj["rhs"] = std::isfinite(r.rhs) ? json(r.rhs) : json("+inf");
    rj["ratio"] = std::isfinite(r.ratio)
                      ? json(r.ratio)
                      : (std::isnan(r.ratio) ? json(nullptr) : json("+inf"));
    rj["f_id"] = r.f_id;
    rws.push_back(rj);
  }
  j["rows"] = rws;
  return j.dump(2);
}

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "t,lhs,rhs,ratio,f_id\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ','
       << (std::isnan(r.ratio) ? "" : format_double(r.ratio)) << ',' << r.f_id
       << "\n";
  }
  return os.str();
}

std::vector<SummaryRow> best_constant(
    const std::vector<VerificationReport>& reports) {
  std::vector<SummaryRow> out;
  for (const auto& r : reports) {
    SummaryRow row;
    row.case_id = r.case_id;
    row.family = r.family;
    row.constant = r.sup_ratio;
    row.refined = r.refined_sup_ratio;
    if (std::isnan(r.refined_sup_ratio)) {
      row.stability = "single";
    } else {
      row.stability = r.refinement_stable ? "stable" : "unstable";
    }
    row.pass = r.pass;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config.

namespace {

SlowlyVarying sv_from_json(const json& j) {
  SlowlyVarying b;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "1") return b;
    if (s.rfind("log+^", 0) == 0) {
      b.gamma_high = std::stod(s.substr(5));
      b.nondecreasing_class = true;
      return b;
    }
    if (s.rfind("log^", 0) == 0) {
      const double g = std::stod(s.substr(4));
      b.gamma_low = g;
      b.gamma_high = g;
      return b;
    }
    throw input_error("config: bad slowly varying literal '" + s + "'");
  }
  for (const auto& [k, v] : j.items()) {
    if (k == "gamma_low") {
      b.gamma_low = v.get<double>();
    } else if (k == "gamma_high") {
      b.gamma_high = v.get<double>();
    } else if (k == "logscale") {
      b.logscale = v.get<double>();
    } else if (k == "nondecreasing") {
      b.nondecreasing_class = v.get<bool>();
    } else {
      throw input_error("config: unknown slowly varying key '" + k + "'");
    }
  }
  return b;
}

PowerSVWeight weight_from_json(const json& j) {
  if (j.is_string()) return PowerSVWeight::parse(j.get<std::string>());
  PowerSVWeight w;
  for (const auto& [k, v] : j.items()) {
    if (k == "alpha") {
      w.alpha = v.get<double>();
    } else if (k == "power") {
      w.rho = v.get<double>();
    } else if (k == "sv") {
      if (!v.is_array()) throw input_error("config: weight sv must be a list");
      for (const auto& piece : v) {
        double lo = 0.0, hi = 0.0;
        bool hi_inf = false;
        double gamma = 0.0;
        for (const auto& [pk, pv] : piece.items()) {
          if (pk == "interval") {
            lo = pv.at(0).get<double>();
            if (pv.at(1).is_string()) {
              hi_inf = pv.at(1).get<std::string>() == "inf";
            } else {
              hi = pv.at(1).get<double>();
            }
          } else if (pk == "gamma") {
            gamma = pv.get<double>();
          } else {
            throw input_error("config: unknown weight sv key '" + pk + "'");
          }
        }
        if (lo == 0.0 && hi == 1.0 && !hi_inf) {
          w.sv.gamma_low = gamma;
        } else if (lo == 1.0 && hi_inf) {
          w.sv.gamma_high = gamma;
        } else {
          throw input_error(
              "config: weight sv pieces must be [0,1] and [1,\"inf\"]");
        }
      }
    } else {
      throw input_error("config: unknown weight key '" + k + "'");
    }
  }
  return w;
}

double param_number(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInf;
    throw input_error("config: bad numeric parameter");
  }
  return v.get<double>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw input_error(std::string("config: JSON parse error: ") + e.what());
  }
  RunConfig cfg;
  bool saw_version = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "version") {
      cfg.version = val.get<std::string>();
      saw_version = true;
    } else if (key == "seed") {
      cfg.seed = val.get<std::uint64_t>();
    } else if (key == "out") {
      cfg.out = val.get<std::string>();
    } else if (key == "grid") {
      for (const auto& [gk, gv] : val.items()) {
        if (gk == "cells") {
          cfg.family.cells = gv.get<std::size_t>();
        } else if (gk == "box") {
          cfg.family.box_lo = gv.at(0).get<double>();
          cfg.family.box_hi = gv.at(1).get<double>();
        } else if (gk == "dim") {
          cfg.family.dim = gv.get<int>();
        } else {
          throw input_error("config: unknown grid key '" + gk + "'");
        }
      }
    } else if (key == "family") {
      for (const auto& [fk, fv] : val.items()) {
        if (fk == "name") {
          cfg.family.name = fv.get<std::string>();
        } else if (fk == "count") {
          cfg.family.count = fv.get<int>();
        } else {
          throw input_error("config: unknown family key '" + fk + "'");
        }
      }
    } else if (key == "tgrid") {
      for (const auto& [tk, tv] : val.items()) {
        if (tk == "min") {
          cfg.t_min = tv.get<double>();
        } else if (tk == "max") {
          cfg.t_max = tv.get<double>();
        } else if (tk == "per_octave") {
          cfg.per_octave = tv.get<int>();
        } else {
          throw input_error("config: unknown tgrid key '" + tk + "'");
        }
      }
    } else if (key == "floor") {
      cfg.t_floor = val.get<double>();
    } else if (key == "umax") {
      cfg.u_max = val.get<double>();
    } else if (key == "ceiling") {
      cfg.ceiling = val.get<double>();
    } else if (key == "refine") {
      cfg.refine = val.get<bool>();
    } else if (key == "jobs") {
      cfg.jobs = val.get<int>();
    } else if (key == "extended") {
      cfg.extended = val.get<bool>();
    } else if (key == "plots") {
      cfg.plots = val.get<bool>();
    } else if (key == "cases") {
      if (!val.is_array()) throw input_error("config: cases must be a list");
      for (const auto& cj : val) {
        InequalityCase c;
        bool saw_id = false;
        for (const auto& [ck, cv] : cj.items()) {
          if (ck == "id") {
            c.id = case_id_from_string(cv.get<std::string>());
            saw_id = true;
          } else if (ck == "ceiling") {
            c.ceiling = cv.get<double>();
          } else if (ck == "params") {
            for (const auto& [pk, pv] : cv.items()) {
              auto& prm = c.prm;
              if (pk == "n") {
                prm.n = pv.get<int>();
              } else if (pk == "p") {
                prm.p = param_number(pv);
              } else if (pk == "pstar") {
                prm.pstar = param_number(pv);
              } else if (pk == "delta") {
                prm.delta = pv.get<double>();
              } else if (pk == "beta") {
                prm.beta = pv.get<double>();
              } else if (pk == "sigma") {
                prm.sigma = pv.get<double>();
              } else if (pk == "gamma") {
                prm.gamma_exp = pv.get<double>();
              } else if (pk == "kappa") {
                prm.kappa = pv.get<double>();
              } else if (pk == "k") {
                prm.k = pv.get<int>();
              } else if (pk == "m") {
                prm.m = pv.get<int>();
              } else if (pk == "r0") {
                prm.r0 = param_number(pv);
              } else if (pk == "r1") {
                prm.r1 = param_number(pv);
              } else if (pk == "q0") {
                prm.q0 = param_number(pv);
              } else if (pk == "q1") {
                prm.q1 = param_number(pv);
              } else if (pk == "r") {
                prm.r = param_number(pv);
              } else if (pk == "rbar") {
                prm.rbar = param_number(pv);
              } else if (pk == "s") {
                prm.s = param_number(pv);
              } else if (pk == "b") {
                prm.b = sv_from_json(pv);
              } else if (pk == "B") {
                prm.B = sv_from_json(pv);
              } else if (pk == "w") {
                prm.w = weight_from_json(pv);
              } else if (pk == "lat_q") {
                prm.lat_q = param_number(pv);
              } else if (pk == "lat_theta") {
                prm.lat_theta = pv.get<double>();
              } else if (pk == "lat_gamma") {
                prm.lat_gamma = pv.get<double>();
              } else if (pk == "axis_only") {
                prm.axis_only = pv.get<bool>();
              } else if (pk == "dir_samples") {
                prm.dir_samples = pv.get<int>();
              } else {
                throw input_error("config: unknown case parameter '" + pk +
                                  "'");
              }
            }
          } else {
            throw input_error("config: unknown case key '" + ck + "'");
          }
        }
        if (!saw_id) throw input_error("config: case without id");
        cfg.cases.push_back(std::move(c));
      }
    } else {
      throw input_error("config: unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw input_error("config: missing version tag");
  if (cfg.version != "kfl-config/1") {
    throw input_error("config: version tag '" + cfg.version +
                      "' does not match this binary (kfl-config/1)");
  }
  // Fill derived per-case grids.
  for (auto& c : cfg.cases) {
    if (c.tgrid.empty()) {
      const int ilo = static_cast<int>(std::llround(std::log2(cfg.t_min) * 4));
      const int ihi = static_cast<int>(std::llround(std::log2(cfg.t_max) * 4));
      const int step = std::max(1, 4 / cfg.per_octave);
      for (int i = ilo; i <= ihi; i += step) {
        c.tgrid.push_back(std::pow(2.0, i / 4.0));
      }
    }
    if (c.ceiling == 100.0) c.ceiling = cfg.ceiling;
    c.t_floor = cfg.t_floor;
    c.u_max = cfg.u_max;
  }
  return cfg;
}

RunConfig RunConfig::default_config() {
  RunConfig cfg;
  cfg.family.name = "mixed";
  cfg.family.count = 15;
  cfg.family.cells = 2048;
  auto add = [&](CaseId id, CaseParams prm) {
    InequalityCase c;
    c.id = id;
    c.prm = prm;
    cfg.cases.push_back(c);
  };
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.k = 1;
    prm.m = 1;
    add(CaseId::MARCHAUD_CLASSIC, prm);
    add(CaseId::TIMAN, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.delta = 0.25;
    prm.pstar = 4.0;
    prm.k = 1;
    add(CaseId::ULYANOV_CLASSIC, prm);
    add(CaseId::ULYANOV_STRENGTHENED, prm);
    add(CaseId::KOLYADA, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.delta = 0.25;
    prm.pstar = 4.0;
    prm.beta = 1.0;
    add(CaseId::SHARP_ULYANOV, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.beta = 1.0;
    prm.sigma = 1.0;
    prm.r0 = 2.0;
    prm.r1 = 2.0;
    prm.q0 = 2.0;
    add(CaseId::PROP11A, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.beta = 1.0;
    prm.gamma_exp = 1.0;
    prm.r0 = 2.0;
    prm.r1 = 2.0;
    prm.q1 = 2.0;
    add(CaseId::PROP11B, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.delta = 0.25;
    prm.pstar = 4.0;
    prm.beta = 1.0;
    prm.r0 = 2.0;
    prm.r1 = 2.0;
    prm.q1 = 2.0;
    add(CaseId::PROP13A, prm);
    prm.q0 = 2.0;
    add(CaseId::PROP13B, prm);
  }
  {
    CaseParams prm;
    prm.p = 2.0;
    prm.sigma = 0.25;
    prm.kappa = 1.0;
    prm.r = 2.0;
    prm.s = 2.0;
    prm.b.gamma_high = 0.5;
    prm.b.nondecreasing_class = true;
    add(CaseId::THM68, prm);
  }
  // Derived t-grids.
  for (auto& c : cfg.cases) {
    const int ilo = static_cast<int>(std::llround(std::log2(cfg.t_min) * 4));
    const int ihi = static_cast<int>(std::llround(std::log2(cfg.t_max) * 4));
    const int step = std::max(1, 4 / cfg.per_octave);
    for (int i = ilo; i <= ihi; i += step) {
      c.tgrid.push_back(std::pow(2.0, i / 4.0));
    }
    c.ceiling = cfg.ceiling;
    c.t_floor = cfg.t_floor;
    c.u_max = cfg.u_max;
  }
  return cfg;
}

namespace {

json sv_to_json(const SlowlyVarying& b) {
  if (b.trivial() && b.logscale == 1.0) return json("1");
  if (b.gamma_low == 0.0 && b.nondecreasing_class && b.logscale == 1.0) {
    return json("log+^" + format_sig(b.gamma_high, 12));
  }
  if (b.gamma_low == b.gamma_high && b.logscale == 1.0 &&
      !b.nondecreasing_class) {
    return json("log^" + format_sig(b.gamma_low, 12));
  }
  return json{{"gamma_low", b.gamma_low},
              {"gamma_high", b.gamma_high},
              {"logscale", b.logscale},
              {"nondecreasing", b.nondecreasing_class}};
}

json case_to_json(const InequalityCase& c) {
  json prm;
  const CaseParams d;  // defaults; emit only values that differ
  auto put = [&](const char* key, double v, double dv) {
    if (v != dv) prm[key] = v == kInf ? json("inf") : json(v);
  };
  put("p", c.prm.p, d.p);
  put("pstar", c.prm.pstar, d.pstar);
  put("delta", c.prm.delta, d.delta);
  put("beta", c.prm.beta, d.beta);
  put("sigma", c.prm.sigma, d.sigma);
  put("gamma", c.prm.gamma_exp, d.gamma_exp);
  put("kappa", c.prm.kappa, d.kappa);
  if (c.prm.n != d.n) prm["n"] = c.prm.n;
  if (c.prm.k != d.k) prm["k"] = c.prm.k;
  if (c.prm.m != d.m) prm["m"] = c.prm.m;
  put("r0", c.prm.r0, d.r0);
  put("r1", c.prm.r1, d.r1);
  put("q0", c.prm.q0, d.q0);
  put("q1", c.prm.q1, d.q1);
  put("r", c.prm.r, d.r);
  put("rbar", c.prm.rbar, d.rbar);
  put("s", c.prm.s, d.s);
  if (!c.prm.b.trivial()) prm["b"] = sv_to_json(c.prm.b);
  if (!c.prm.B.trivial()) prm["B"] = sv_to_json(c.prm.B);
  if (!c.prm.w.pure_power() || c.prm.w.alpha != 0.0) {
    prm["w"] = c.prm.w.to_string();
  }
  put("lat_q", c.prm.lat_q, d.lat_q);
  put("lat_theta", c.prm.lat_theta, d.lat_theta);
  put("lat_gamma", c.prm.lat_gamma, d.lat_gamma);
  if (c.prm.axis_only) prm["axis_only"] = true;
  json out;
  out["id"] = to_string(c.id);
  out["params"] = prm;
  return out;
}

}  // namespace

std::string RunConfig::to_json_text() const {
  json j;
  j["version"] = version;
  j["seed"] = seed;
  j["out"] = out;
  j["grid"] = {{"cells", family.cells},
               {"box", {family.box_lo, family.box_hi}},
               {"dim", family.dim}};
  j["family"] = {{"name", family.name}, {"count", family.count}};
  j["tgrid"] = {{"min", t_min}, {"max", t_max}, {"per_octave", per_octave}};
  j["floor"] = t_floor;
  j["umax"] = u_max;
  j["ceiling"] = ceiling;
  j["refine"] = refine;
  j["jobs"] = jobs;
  j["extended"] = extended;
  j["plots"] = plots;
  json cj = json::array();
  for (const auto& c : cases) cj.push_back(case_to_json(c));
  j["cases"] = cj;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Suite runner.

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

std::string svg_loglog_plot(const std::vector<CaseRow>& rows,
                            const std::string& title) {
  const int W = 640, H = 480, ML = 60, MB = 40, MT = 30, MR = 20;
  double xmin = kInf, xmax = 0.0, ymin = kInf, ymax = 0.0;
  for (const auto& r : rows) {
    if (!(r.t > 0.0)) continue;
    xmin = std::min(xmin, r.t);
    xmax = std::max(xmax, r.t);
    for (double v : {r.lhs, r.rhs}) {
      if (std::isfinite(v) && v > 0.0) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" "
     << "font-size=\"13\">" << title << "</text>\n";
  if (!(xmax > xmin) || !(ymax > ymin)) {
    os << "</svg>\n";
    return os.str();
  }
  auto px = [&](double t) {
    return ML + (std::log(t / xmin) / std::log(xmax / xmin)) * (W - ML - MR);
  };
  auto py = [&](double v) {
    return H - MB -
           (std::log(v / ymin) / std::log(ymax / ymin)) * (H - MB - MT);
  };
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  // One polyline per (f_id, side).
  std::map<std::string, std::vector<std::pair<double, double>>> lhs, rhs;
  for (const auto& r : rows) {
    if (std::isfinite(r.lhs) && r.lhs > 0.0) lhs[r.f_id].push_back({r.t, r.lhs});
    if (std::isfinite(r.rhs) && r.rhs > 0.0) rhs[r.f_id].push_back({r.t, r.rhs});
  }
  auto dump = [&](const auto& curves, const char* color) {
    for (const auto& [fid, pts] : curves) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1\" points=\"";
      for (const auto& [t, v] : pts) os << px(t) << ',' << py(v) << ' ';
      os << "\"/>\n";
    }
  };
  dump(lhs, "#1f77b4");
  dump(rhs, "#d62728");
  os << "<text x=\"" << W - MR << "\" y=\"" << H - 8
     << "\" text-anchor=\"end\" font-size=\"11\">t (log)</text>\n";
  os << "<text x=\"" << ML + 4 << "\" y=\"" << MT + 12
     << "\" font-size=\"11\" fill=\"#1f77b4\">lhs</text>\n";
  os << "<text x=\"" << ML + 40 << "\" y=\"" << MT + 12
     << "\" font-size=\"11\" fill=\"#d62728\">rhs</text>\n";
  os << "</svg>\n";
  return os.str();
}

SuiteResult run_suite(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult result;
  TestFamily family = cfg.family;
  family.seed = cfg.seed;
  std::vector<json> summaries;
  bool all_pass = true;
  for (const auto& c : cfg.cases) {
    if (case_is_extended(c.id) && !cfg.extended) continue;
    TestFamily fam = family;
    if (c.prm.n != fam.dim) {
      fam.dim = c.prm.n;
      fam.cells = c.prm.n == 2 ? std::min<std::size_t>(fam.cells, 256)
                               : (c.prm.n == 3
                                      ? std::min<std::size_t>(fam.cells, 64)
                                      : fam.cells);
    }
    VerificationReport rep;
    try {
      rep = cfg.refine ? run_case_refined(c, fam, cfg.jobs)
                       : run_case(c, fam, cfg.jobs);
    } catch (const hypothesis_violation& e) {
      rep.case_id = to_string(c.id);
      rep.family = fam.name;
      rep.inconclusive = true;
      rep.pass = false;
      rep.params_json = json{{"hypothesis_violation", e.what()}}.dump();
    }
    all_pass = all_pass && rep.pass;
    const std::string base = out_dir + "/" + rep.case_id;
    atomic_write(base + ".json", rep.to_json());
    atomic_write(base + ".csv", rep.to_csv());
    if (cfg.plots && !rep.rows.empty()) {
      atomic_write(base + ".svg", svg_loglog_plot(rep.rows, rep.case_id));
    }
    result.reports.push_back(std::move(rep));
  }
  // Summary.
  const auto rows = best_constant(result.reports);
  json sm = json::array();
  for (const auto& r : rows) {
    json e;
    e["case_id"] = r.case_id;
    e["family"] = r.family;
    e["constant"] = std::isfinite(r.constant) ? json(r.constant)
                                              : json("+inf");
    if (!std::isnan(r.refined)) e["refined"] = r.refined;
    e["stability"] = r.stability;
    e["pass"] = r.pass;
    sm.push_back(e);
  }
  json top;
  top["schema"] = schema_version();
  top["seed"] = cfg.seed;
  top["summary"] = sm;
  atomic_write(out_dir + "/summary.json", top.dump(2));
  result.exit_code = all_pass ? 0 : 1;
  (void)summaries;
  return result;
}

}  // namespace kfl
