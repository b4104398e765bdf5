#include "kfl/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kfl/quad.hpp"

namespace kfl {

double frac_binom(double kappa, int nu) {
  if (nu < 0) throw input_error("frac_binom: nu must be >= 0");
  double b = 1.0;
  for (int j = 1; j <= nu; ++j) {
    b *= (kappa - static_cast<double>(j) + 1.0) / static_cast<double>(j);
  }
  return b;
}

namespace {

bool is_integer(double x) { return x == std::floor(x); }

}  // namespace

std::vector<double> frac_diff_coefficients(double kappa, double tail_tol,
                                           int max_terms, int hard_cap) {
  if (!(kappa > 0.0)) throw input_error("frac_diff: kappa must be positive");
  const int cap = std::min(max_terms, hard_cap);
  std::vector<double> coeffs;
  if (is_integer(kappa)) {
    const int k = static_cast<int>(kappa);
    coeffs.reserve(k + 1);
    double b = 1.0;
    for (int nu = 0; nu <= k; ++nu) {
      coeffs.push_back((nu % 2 == 0 ? 1.0 : -1.0) * b);
      b *= (kappa - nu) / (nu + 1.0);
    }
    return coeffs;
  }
  coeffs.reserve(256);
  double b = 1.0;  // binom(kappa, nu)
  for (int nu = 0; nu <= cap; ++nu) {
    coeffs.push_back((nu % 2 == 0 ? 1.0 : -1.0) * b);
    const double next = b * (kappa - nu) / (nu + 1.0);
    // Past nu > kappa the magnitudes decrease like nu^{-kappa-1}; the tail
    // sum is ~ |b_{nu+1}| (nu+1)/kappa. Stop once certified below tail_tol.
    if (nu > kappa) {
      const double tail_bound =
          std::abs(next) * (static_cast<double>(nu) + 2.0) / kappa * 2.0;
      if (tail_bound <= tail_tol) {
        return coeffs;
      }
    }
    b = next;
  }
  return coeffs;  // caller pairs this with the support-exit termination
}

namespace {

// Integer cell shift per axis for a commensurate h; throws otherwise.
std::array<long long, 3> commensurate_shift(const GridFunction& f,
                                            const std::array<double, 3>& h) {
  std::array<long long, 3> j{0, 0, 0};
  for (int a = 0; a < f.dim(); ++a) {
    const double step = f.spacing(a);
    const double q = h[a] / step;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
      throw input_error(
          "frac_diff: shift is not grid-commensurate (enable interpolation)");
    }
    j[a] = static_cast<long long>(r);
  }
  return j;
}

// out += c * f shifted by nu*j cells (zero extension), done in place.
void accumulate_shift(const GridFunction& f, std::vector<double>& out,
                      double c, const std::array<long long, 3>& off) {
  const int d = f.dim();
  const auto& axes = f.axes();
  std::array<long long, 3> cnt{1, 1, 1};
  for (int a = 0; a < d; ++a) cnt[a] = static_cast<long long>(axes[a].count);
  std::array<long long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max(0LL, -off[a]);
    hi[a] = std::min(cnt[a], cnt[a] - off[a]);
    if (lo[a] >= hi[a]) return;  // fully outside
  }
  const auto& vals = f.values();
  if (d == 1) {
    for (long long i = lo[0]; i < hi[0]; ++i) {
      out[static_cast<std::size_t>(i)] +=
          c * vals[static_cast<std::size_t>(i + off[0])];
    }
    return;
  }
  if (d == 2) {
    for (long long i = lo[0]; i < hi[0]; ++i) {
      const long long base = i * cnt[1];
      const long long sbase = (i + off[0]) * cnt[1] + off[1];
      for (long long jj = lo[1]; jj < hi[1]; ++jj) {
        out[static_cast<std::size_t>(base + jj)] +=
            c * vals[static_cast<std::size_t>(sbase + jj)];
      }
    }
    return;
  }
  for (long long i = lo[0]; i < hi[0]; ++i) {
    for (long long jj = lo[1]; jj < hi[1]; ++jj) {
      const long long base = (i * cnt[1] + jj) * cnt[2];
      const long long sbase =
          ((i + off[0]) * cnt[1] + (jj + off[1])) * cnt[2] + off[2];
      for (long long kk = lo[2]; kk < hi[2]; ++kk) {
        out[static_cast<std::size_t>(base + kk)] +=
            c * vals[static_cast<std::size_t>(sbase + kk)];
      }
    }
  }
}

// Number of cell-shifts after which nu*j exits the box entirely.
int support_exit(const GridFunction& f, const std::array<long long, 3>& j) {
  int exit_nu = std::numeric_limits<int>::max();
  for (int a = 0; a < f.dim(); ++a) {
    if (j[a] == 0) continue;
    const auto cnt = static_cast<long long>(f.axes()[a].count);
    const long long nu =
        (cnt + std::abs(j[a]) - 1) / std::abs(j[a]);  // ceil(count/|j|)
    exit_nu = std::min(exit_nu, static_cast<int>(nu));
  }
  return exit_nu;
}

std::vector<double> frac_diff_values(const GridFunction& f,
                                     const std::array<long long, 3>& j,
                                     const std::vector<double>& coeffs) {
  std::vector<double> out(f.size(), 0.0);
  const int exit_nu = support_exit(f, j);
  const int terms =
      std::min<long long>(static_cast<long long>(coeffs.size()),
                          static_cast<long long>(exit_nu) + 1);
  for (int nu = 0; nu < terms; ++nu) {
    if (coeffs[nu] == 0.0) continue;
    accumulate_shift(
        f, out, coeffs[nu],
        {j[0] * nu, f.dim() > 1 ? j[1] * nu : 0, f.dim() > 2 ? j[2] * nu : 0});
  }
  return out;
}

}  // namespace

GridFunction frac_diff(const GridFunction& f, const std::array<double, 3>& h,
                       const FracDiffParams& params, bool interpolate) {
  bool zero_shift = true;
  for (int a = 0; a < f.dim(); ++a) {
    if (h[a] != 0.0) zero_shift = false;
  }
  if (zero_shift) {
    // All shifts coincide; the alternating binomial sum vanishes.
    std::vector<double> zeros(f.size(), 0.0);
    return GridFunction(f.axes(), std::move(zeros));
  }
  const auto coeffs = frac_diff_coefficients(params.kappa, params.tail_tol,
                                             params.max_terms, 2000000);
  bool commensurate = true;
  std::array<long long, 3> j{0, 0, 0};
  try {
    j = commensurate_shift(f, h);
  } catch (const input_error&) {
    commensurate = false;
  }
  if (commensurate) {
    return GridFunction(f.axes(), frac_diff_values(f, j, coeffs));
  }
  if (!interpolate) {
    throw input_error(
        "frac_diff: shift is not grid-commensurate (enable interpolation)");
  }
  // Interpolated shifts: evaluate f(x + nu h) by multilinear interpolation.
  std::vector<double> out(f.size(), 0.0);
  const double diam = [&] {
    double d2 = 0.0;
    for (int a = 0; a < f.dim(); ++a) {
      const double w = f.axes()[a].hi - f.axes()[a].lo;
      d2 += w * w;
    }
    return std::sqrt(d2);
  }();
  double hn = 0.0;
  for (int a = 0; a < f.dim(); ++a) hn += h[a] * h[a];
  hn = std::sqrt(hn);
  const int exit_nu = static_cast<int>(std::ceil(diam / hn)) + 1;
  const int terms = std::min<int>(static_cast<int>(coeffs.size()), exit_nu + 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < f.dim(); ++a) x[a] = f.cell_center(i, a);
    double acc = coeffs[0] * f.values()[i];
    for (int nu = 1; nu < terms; ++nu) {
      std::array<double, 3> xs = x;
      for (int a = 0; a < f.dim(); ++a) xs[a] += nu * h[a];
      acc += coeffs[nu] * f.interpolate(xs);
    }
    out[i] = acc;
  }
  return GridFunction(f.axes(), std::move(out));
}

SortedNormFn make_sorted_norm(const SpaceSpec& spec, double cell,
                              std::size_t n_values) {
  spec.validate();
  if (spec.lambda_representable() && std::isfinite(spec.lambda_r())) {
    const double rr = spec.lambda_r();
    const PowerSVWeight w = spec.lambda_weight();
    // Cumulative weight masses at the uniform breakpoints j*cell.
    auto cum = std::make_shared<std::vector<double>>(n_values + 1, 0.0);
    for (std::size_t jj = 1; jj <= n_values; ++jj) {
      const double a = static_cast<double>(jj - 1) * cell;
      const double b = static_cast<double>(jj) * cell;
      const double piece = jj == 1 ? weight_integral_head(w, 0.0, b)
                                   : weight_integral(w, 0.0, a, b);
      (*cum)[jj] = (*cum)[jj - 1] + piece;
    }
    if (!std::isfinite(cum->back())) {
      // Head of w not integrable: every nonzero norm is infinite.
      return [](const std::vector<double>& sorted, double) {
        for (double v : sorted) {
          if (v != 0.0) return kInf;
        }
        return 0.0;
      };
    }
    return [cum, rr](const std::vector<double>& sorted, double) {
      double acc = 0.0;
      const std::size_t n = std::min(sorted.size(), cum->size() - 1);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = sorted[i];
        if (v <= 0.0) break;  // sorted non-increasing, rest are zero
        acc += std::pow(v, rr) * ((*cum)[i + 1] - (*cum)[i]);
      }
      return std::pow(acc, 1.0 / rr);
    };
  }
  SpaceSpec copy = spec;
  return [copy](const std::vector<double>& sorted, double c) {
    return sorted_norm(copy, sorted, c);
  };
}

SortedNormFn make_gamma_eval_norm(double r, const EvalWeight& nu,
                                  std::size_t n_values, double cell) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw input_error("gamma norm: r must lie in [1,inf)");
  }
  auto nu_copy = std::make_shared<EvalWeight>(nu);
  const double head_mass = eval_weight_head_integral(*nu_copy, 0.0, cell);
  (void)n_values;
  return [r, nu_copy, head_mass](const std::vector<double>& sorted,
                                 double c) {
    const std::size_t n = sorted.size();
    if (n == 0 || sorted.front() <= 0.0) return 0.0;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      prefix[i + 1] = prefix[i] + sorted[i] * c;
    }
    auto dstar = [&](double t) {
      if (t <= c) return sorted[0];
      const double total = static_cast<double>(n) * c;
      if (t >= total) return prefix[n] / t;
      const auto j = static_cast<std::size_t>(t / c);
      return (prefix[j] + sorted[j] * (t - static_cast<double>(j) * c)) / t;
    };
    if (!std::isfinite(head_mass)) return kInf;
    double acc = std::pow(sorted[0], r) * head_mass;
    const double total = static_cast<double>(n) * c;
    acc += quad::integrate_log(
        [&](double t) { return std::pow(dstar(t), r) * nu_copy->eval(t); },
        c, total, 0.1);
    const double tail =
        eval_weight_tail_integral(*nu_copy, -r, total);
    if (!std::isfinite(tail)) return kInf;
    acc += std::pow(prefix[n], r) * tail;
    return std::pow(acc, 1.0 / r);
  };
}

namespace {

std::vector<std::array<double, 3>> direction_set(int dim, int dir_samples,
                                                 bool axis_only) {
  std::vector<std::array<double, 3>> dirs;
  for (int a = 0; a < dim; ++a) {
    std::array<double, 3> d{0.0, 0.0, 0.0};
    d[a] = 1.0;
    dirs.push_back(d);
    d[a] = -1.0;
    dirs.push_back(d);
  }
  if (axis_only || dim == 1) return dirs;
  if (dim == 2) {
    for (int i = 0; i < dir_samples; ++i) {
      const double ang = 2.0 * M_PI * (static_cast<double>(i) + 0.5) /
                         dir_samples;
      dirs.push_back({std::cos(ang), std::sin(ang), 0.0});
    }
    return dirs;
  }
  // dim == 3: spherical Fibonacci spread.
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < dir_samples; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / dir_samples;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ang = 2.0 * M_PI * i / golden;
    dirs.push_back({rad * std::cos(ang), rad * std::sin(ang), z});
  }
  return dirs;
}

void sort_abs_desc(std::vector<double>& v) {
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end(), std::greater<double>());
}

}  // namespace

std::vector<std::vector<double>> modulus_grid(const GridFunction& f,
                                              const ModulusRequest& req,
                                              const std::vector<double>& tgrid) {
  for (std::size_t i = 1; i < tgrid.size(); ++i) {
    if (!(tgrid[i] > tgrid[i - 1])) {
      throw input_error("modulus: t-grid must be strictly increasing");
    }
  }
  if (tgrid.empty()) throw input_error("modulus: empty t-grid");
  if (!(tgrid.front() > 0.0)) throw input_error("modulus: t must be positive");
  const auto coeffs = frac_diff_coefficients(req.params.kappa,
                                             req.params.tail_tol,
                                             req.params.max_terms, 2000000);
  const std::size_t nnorm = req.norms.size();
  std::vector<std::vector<double>> result(nnorm,
                                          std::vector<double>(tgrid.size(), 0.0));
  const double cell = f.cell_measure();
  if (f.dim() == 1) {
    const double step = f.spacing(0);
    const auto nmax = static_cast<long long>(f.axes()[0].count);
    const long long jmax = std::min(
        nmax, static_cast<long long>(std::floor(tgrid.back() / step + 1e-9)));
    std::vector<double> run(nnorm, 0.0);
    std::size_t ti = 0;
    // t below one cell admits no commensurate shift: modulus 0 (grid floor).
    while (ti < tgrid.size() &&
           static_cast<long long>(std::floor(tgrid[ti] / step + 1e-9)) < 1) {
      ++ti;
    }
    // Shifts in increasing magnitude; each t picks up the prefix sup.
    for (long long j = 1; j <= jmax; ++j) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        auto vals = frac_diff_values(f, {sgn == 0 ? j : -j, 0, 0}, coeffs);
        sort_abs_desc(vals);
        for (std::size_t s = 0; s < nnorm; ++s) {
          run[s] = std::max(run[s], req.norms[s](vals, cell));
        }
      }
      while (ti < tgrid.size() &&
             static_cast<long long>(std::floor(tgrid[ti] / step + 1e-9)) == j) {
        for (std::size_t s = 0; s < nnorm; ++s) result[s][ti] = run[s];
        ++ti;
      }
    }
    // Remaining t beyond jmax*step keep the saturated sup.
    for (; ti < tgrid.size(); ++ti) {
      for (std::size_t s = 0; s < nnorm; ++s) result[s][ti] = run[s];
    }
    // t below one cell: no commensurate shift, modulus 0 (grid floor).
    return result;
  }
  // n >= 2: nested magnitude ladder * fixed directions, snapped to the grid.
  const auto dirs = direction_set(f.dim(), req.dir_samples, req.axis_only);
  const double tmax = tgrid.back();
  std::vector<double> mags;
  for (double m = tmax; m > tgrid.front() * 0.25; m /= std::sqrt(2.0)) {
    mags.push_back(m);
  }
  std::sort(mags.begin(), mags.end());
  struct Shift {
    double len;
    std::array<long long, 3> j;
  };
  std::vector<Shift> shifts;
  for (double m : mags) {
    for (const auto& d : dirs) {
      std::array<long long, 3> j{0, 0, 0};
      double len2 = 0.0;
      bool nonzero = false;
      for (int a = 0; a < f.dim(); ++a) {
        const double step = f.spacing(a);
        j[a] = static_cast<long long>(std::llround(m * d[a] / step));
        if (j[a] != 0) nonzero = true;
        const double comp = static_cast<double>(j[a]) * step;
        len2 += comp * comp;
      }
      if (!nonzero) continue;
      shifts.push_back({std::sqrt(len2), j});
    }
  }
  std::sort(shifts.begin(), shifts.end(),
            [](const Shift& a, const Shift& b) { return a.len < b.len; });
  shifts.erase(std::unique(shifts.begin(), shifts.end(),
                           [](const Shift& a, const Shift& b) {
                             return a.len == b.len && a.j == b.j;
                           }),
               shifts.end());
  std::vector<double> run(nnorm, 0.0);
  std::size_t ti = 0;
  for (const auto& sh : shifts) {
    while (ti < tgrid.size() && tgrid[ti] < sh.len) {
      for (std::size_t s = 0; s < nnorm; ++s) result[s][ti] = run[s];
      ++ti;
    }
    auto vals = frac_diff_values(f, sh.j, coeffs);
    sort_abs_desc(vals);
    for (std::size_t s = 0; s < nnorm; ++s) {
      run[s] = std::max(run[s], req.norms[s](vals, cell));
    }
  }
  for (; ti < tgrid.size(); ++ti) {
    for (std::size_t s = 0; s < nnorm; ++s) result[s][ti] = run[s];
  }
  return result;
}

double modulus(const GridFunction& f, double t, double kappa,
               const SpaceSpec& spec, int dir_samples, bool axis_only) {
  ModulusRequest req;
  req.kappa = kappa;
  req.params.kappa = kappa;
  req.dir_samples = dir_samples;
  req.axis_only = axis_only;
  req.norms.push_back(make_sorted_norm(spec, f.cell_measure(), f.size()));
  return modulus_grid(f, req, {t})[0][0];
}

// ---------------------------------------------------------------------------
// K-functional upper estimate via iterated Steklov averages.

namespace {

// Rolling mean over a window of w cells along one axis (forward window),
// zero extension outside the box.
std::vector<double> rolling_mean_axis(const GridFunction& f,
                                      const std::vector<double>& in, int axis,
                                      long long w) {
  const int d = f.dim();
  std::array<long long, 3> cnt{1, 1, 1};
  for (int a = 0; a < d; ++a) cnt[a] = static_cast<long long>(f.axes()[a].count);
  std::vector<double> out(in.size(), 0.0);
  // Iterate over lines along `axis`.
  std::array<long long, 3> stride{0, 0, 0};
  stride[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * cnt[a + 1];
  std::array<long long, 3> idx{0, 0, 0};
  const long long nline = static_cast<long long>(in.size()) / cnt[axis];
  std::vector<double> prefix(cnt[axis] + 1, 0.0);
  for (long long line = 0; line < nline; ++line) {
    // Decode the fixed coordinates of this line.
    long long rem = line;
    long long base = 0;
    for (int a = 0; a < d; ++a) {
      if (a == axis) continue;
      const long long c = rem % cnt[a];
      rem /= cnt[a];
      base += c * stride[a];
    }
    for (long long i = 0; i < cnt[axis]; ++i) {
      prefix[i + 1] = prefix[i] + in[base + i * stride[axis]];
    }
    for (long long i = 0; i < cnt[axis]; ++i) {
      const long long j0 = i;
      const long long j1 = std::min(cnt[axis], i + w);
      const double sum = prefix[j1] - prefix[j0];  // cells beyond are zero
      out[base + i * stride[axis]] = sum / static_cast<double>(w);
    }
  }
  (void)idx;
  return out;
}

std::vector<double> axis_difference(const GridFunction& f,
                                    const std::vector<double>& in, int axis,
                                    int order) {
  // order-th forward difference with step one cell along axis, zero ext.
  const int d = f.dim();
  std::array<long long, 3> cnt{1, 1, 1};
  for (int a = 0; a < d; ++a) cnt[a] = static_cast<long long>(f.axes()[a].count);
  std::array<long long, 3> stride{0, 0, 0};
  stride[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * cnt[a + 1];
  std::vector<double> cur = in;
  for (int o = 0; o < order; ++o) {
    std::vector<double> next(cur.size(), 0.0);
    const long long nline = static_cast<long long>(cur.size()) / cnt[axis];
    for (long long line = 0; line < nline; ++line) {
      long long rem = line;
      long long base = 0;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        const long long c = rem % cnt[a];
        rem /= cnt[a];
        base += c * stride[a];
      }
      for (long long i = 0; i < cnt[axis]; ++i) {
        const double hi = i + 1 < cnt[axis] ? cur[base + (i + 1) * stride[axis]]
                                            : 0.0;
        next[base + i * stride[axis]] = hi - cur[base + i * stride[axis]];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

void multi_indices(int dim, int order, std::vector<std::array<int, 3>>& out) {
  if (dim == 1) {
    out.push_back({order, 0, 0});
    return;
  }
  if (dim == 2) {
    for (int a = 0; a <= order; ++a) out.push_back({a, order - a, 0});
    return;
  }
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; b <= order - a; ++b) out.push_back({a, b, order - a - b});
  }
}

}  // namespace

double k_upper(const GridFunction& f, double s, int k, const SpaceSpec& spec) {
  if (!(s > 0.0)) throw input_error("k_upper: s must be positive");
  if (k < 1) throw input_error("k_upper: k must be >= 1");
  const double cell = f.cell_measure();
  const auto norm = make_sorted_norm(spec, cell, f.size());
  auto norm_of = [&](std::vector<double> vals) {
    sort_abs_desc(vals);
    return norm(vals, cell);
  };
  double best = norm_of(f.values());  // the zero candidate
  const double hstar = std::pow(s, 1.0 / k);
  std::vector<long long> windows;
  for (int i = 0; i < 15; ++i) {
    const double h = hstar / 8.0 * std::pow(64.0, i / 14.0);
    long long w = std::llround(h / f.spacing(0));
    w = std::max<long long>(1, w);
    w = std::min<long long>(w, static_cast<long long>(f.axes()[0].count));
    if (windows.empty() || windows.back() != w) windows.push_back(w);
  }
  std::vector<std::array<int, 3>> mus;
  multi_indices(f.dim(), k, mus);
  for (long long w : windows) {
    // k-fold Steklov average with window w cells applied along every axis.
    std::vector<double> g = f.values();
    for (int rep = 0; rep < k; ++rep) {
      for (int a = 0; a < f.dim(); ++a) {
        g = rolling_mean_axis(f, g, a, w);
      }
    }
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = f.values()[i] - g[i];
    double value = norm_of(std::move(diff));
    // |g|_{W^k X}: sum over |mu| = k of the mu-th difference quotient of the
    // smooth candidate at the grid scale.
    double semi = 0.0;
    for (const auto& mu : mus) {
      std::vector<double> dg = g;
      double scale = 1.0;
      for (int a = 0; a < f.dim(); ++a) {
        if (mu[a] > 0) {
          for (int rep = 0; rep < mu[a]; ++rep) {
            dg = axis_difference(f, dg, a, 1);
          }
          scale *= std::pow(f.spacing(a), mu[a]);
        }
      }
      for (double& v : dg) v /= scale;
      semi += norm_of(std::move(dg));
    }
    value += s * semi;
    best = std::min(best, value);
  }
  return best;
}

std::vector<double> quasiconcave_regularize(const std::vector<double>& t,
                                            const std::vector<double>& K) {
  if (t.size() != K.size()) {
    throw input_error("quasiconcave_regularize: size mismatch");
  }
  std::vector<double> out(K.size());
  double run = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    run = std::max(run, K[i]);
    out[i] = run;
  }
  double slope = kInf;
  for (std::size_t i = 0; i < K.size(); ++i) {
    slope = std::min(slope, out[i] / t[i]);
    out[i] = slope * t[i];
  }
  return out;
}

KsxForms k_sx_profile(const GridFunction& f, const SpaceSpec& X, int k, int n,
                      double t) {
  if (!(t > 0.0)) throw input_error("k_sx_profile: t must be positive");
  if (!X.lambda_representable() || !std::isfinite(X.lambda_r())) {
    throw input_error(
        "k_sx_profile: the base space must be Lambda-representable with "
        "finite exponent");
  }
  const double rr = X.lambda_r();
  const PowerSVWeight w = X.lambda_weight();
  const Profile fstar = Profile::rearrange(f);
  const Profile osc = fstar.oscillation();
  const double T = std::pow(t, static_cast<double>(n) / k);
  const double fT = fstar.eval(T);
  const auto& knots = fstar.knots();
  const auto& segs = fstar.segments();
  // Head of form A: (f*(s) - f*(T)) chi_(0,T), already non-increasing.
  double headA_int = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double x = knots[i], y = std::min(knots[i + 1], T);
    if (y <= x) break;
    const double v = segs[i].a - fT;
    if (v > 0.0) headA_int += std::pow(v, rr) * (i == 0 && x == 0.0
                                          ? weight_integral_head(w, 0.0, y)
                                          : weight_integral(w, 0.0, x, y));
  }
  const double headA = std::pow(headA_int, 1.0 / rr);
  // Head of form B: (f** - f*) chi_(0,T), rearranged power pieces (e = -1).
  std::vector<PowerPiece> headB_pieces;
  const auto& oknots = osc.knots();
  for (std::size_t i = 0; i < osc.segments().size(); ++i) {
    const Segment& sg = osc.segments()[i];
    if (sg.kind != SegKind::Pow || sg.a <= 0.0) continue;
    const double x = std::max(oknots[i], 0.0), y = std::min(oknots[i + 1], T);
    if (y > x) headB_pieces.push_back({x, y, sg.a});
  }
  const double headB = rearranged_power_norm(std::move(headB_pieces), -1.0,
                                             rr, w);
  // Tail: s^{-k/n} (f** - f*) chi_(T,inf), exponent -1 - k/n.
  const double e_tail = -1.0 - static_cast<double>(k) / n;
  std::vector<PowerPiece> tail_pieces;
  for (std::size_t i = 0; i < osc.segments().size(); ++i) {
    const Segment& sg = osc.segments()[i];
    if (sg.kind != SegKind::Pow || sg.a <= 0.0) continue;
    const double x = std::max(oknots[i], T), y = oknots[i + 1];
    if (y > x) tail_pieces.push_back({x, y, sg.a});
  }
  const Segment& otail = osc.tail();
  if (otail.kind == SegKind::Pow && otail.a > 0.0) {
    tail_pieces.push_back({std::max(oknots.back(), T), kInf, otail.a});
  }
  const double tail = rearranged_power_norm(std::move(tail_pieces), e_tail,
                                            rr, w);
  KsxForms out;
  out.formA = headA + t * tail;
  out.formB = headB + t * tail;
  return out;
}

}  // namespace kfl
