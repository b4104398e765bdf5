#include "kfl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kfl {

double Segment::eval(double t) const {
  switch (kind) {
    case SegKind::Const:
      return a;
    case SegKind::Hyper:
      return a + b / t;
    case SegKind::LogLin:
      return a + b * (std::log(t) - std::log(t0));
    case SegKind::Pow:
      return a * std::pow(t, b);
  }
  return 0.0;
}

double Segment::integral(double x, double y) const {
  if (y <= x) return 0.0;
  switch (kind) {
    case SegKind::Const:
      return a * (y - x);
    case SegKind::Hyper:
      if (x <= 0.0) return b != 0.0 ? kInf : a * y;
      return a * (y - x) + b * std::log(y / x);
    case SegKind::LogLin: {
      const double l0 = std::log(t0);
      auto anti = [&](double t) {
        return a * t + b * t * (std::log(t) - l0 - 1.0);
      };
      return anti(y) - anti(x);
    }
    case SegKind::Pow: {
      if (b == -1.0) {
        if (x <= 0.0) return a != 0.0 ? kInf : 0.0;
        return a * std::log(y / x);
      }
      const double e = b + 1.0;
      if (x <= 0.0) {
        if (e <= 0.0) return a != 0.0 ? kInf : 0.0;
        return a * std::pow(y, e) / e;
      }
      return a * (std::pow(y, e) - std::pow(x, e)) / e;
    }
  }
  return 0.0;
}

void Profile::build_cumulative() {
  cum_.assign(knots_.size(), 0.0);
  head_mass_ = 0.0;
  if (head_) {
    head_mass_ = head_->integral(0.0, knots_.front());
  }
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    cum_[i + 1] = cum_[i] + segs_[i].integral(knots_[i], knots_[i + 1]);
  }
}

double Profile::first_value() const {
  if (!segs_.empty()) return segs_.front().eval(knots_.front() == 0.0
                                                    ? 0.5 * knots_[1]
                                                    : knots_.front());
  return tail_.eval(std::max(knots_.front(), 1e-300));
}

Profile Profile::step(std::vector<std::pair<double, double>> pts) {
  if (pts.empty()) throw input_error("profile: no breakpoints");
  Profile p;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].first) || !std::isfinite(pts[i].second)) {
      throw input_error("profile: non-finite breakpoint");
    }
    if (pts[i].second < 0.0) throw input_error("profile: negative value");
    if (i > 0 && !(pts[i].first > pts[i - 1].first)) {
      throw input_error("profile: breakpoints must be strictly increasing");
    }
  }
  if (pts.front().first < 0.0) throw input_error("profile: t must be >= 0");
  p.knots_.reserve(pts.size());
  for (auto& q : pts) p.knots_.push_back(q.first);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    p.segs_.push_back(Segment{SegKind::Const, pts[i].first, pts[i + 1].first,
                              pts[i].second, 0.0});
  }
  if (p.knots_.front() > 0.0) {
    p.head_ = Segment{SegKind::Const, 0.0, p.knots_.front(),
                      pts.front().second, 0.0};
  }
  p.tail_ = Segment{SegKind::Const, p.knots_.back(), kInf, pts.back().second,
                    0.0};
  p.build_cumulative();
  return p;
}

Profile Profile::loglinear(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2) throw input_error("profile: need >= 2 points");
  Profile p;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].first > 0.0)) {
      throw input_error("profile: log-linear points need t > 0");
    }
    if (pts[i].second < 0.0) throw input_error("profile: negative value");
    if (i > 0 && !(pts[i].first > pts[i - 1].first)) {
      throw input_error("profile: breakpoints must be strictly increasing");
    }
  }
  for (auto& q : pts) p.knots_.push_back(q.first);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double slope = (pts[i + 1].second - pts[i].second) /
                         (std::log(pts[i + 1].first) - std::log(pts[i].first));
    p.segs_.push_back(Segment{SegKind::LogLin, pts[i].first, pts[i + 1].first,
                              pts[i].second, slope});
  }
  p.head_ = Segment{SegKind::Const, 0.0, p.knots_.front(), pts.front().second,
                    0.0};
  p.tail_ = Segment{SegKind::Const, p.knots_.back(), kInf, pts.back().second,
                    0.0};
  p.build_cumulative();
  return p;
}

Profile Profile::constant(double c) {
  return step({{0.0, c}});
}

Profile Profile::rearrange_values(std::vector<double> values,
                                  double cell_measure) {
  if (values.empty()) throw input_error("rearrange: empty value set");
  if (!(cell_measure > 0.0)) throw input_error("rearrange: bad cell measure");
  for (double& v : values) {
    if (!std::isfinite(v)) throw input_error("rearrange: non-finite value");
    v = std::abs(v);
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  // Coalesce runs of equal values into single steps. Knots are single
  // products cell * count so level-set measures reproduce the grid sums
  // exactly.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(values.size() + 1);
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    pts.emplace_back(cell_measure * static_cast<double>(i), values[i]);
    i = j;
  }
  if (pts.back().second != 0.0) {
    // zero extension outside the box
    pts.emplace_back(cell_measure * static_cast<double>(values.size()), 0.0);
  }
  return step(std::move(pts));
}

Profile Profile::rearrange(const GridFunction& f) {
  return rearrange_values(f.values(), f.cell_measure());
}

double Profile::eval(double t) const {
  if (!(t > 0.0)) throw range_error("profile eval: t must be positive");
  if (t < knots_.front()) return head_ ? head_->eval(t) : first_value();
  if (t >= knots_.back()) return tail_.eval(t);
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return segs_[i].eval(t);
}

double Profile::integral_to(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (x <= knots_.front()) {
    return head_ ? head_->integral(0.0, x) : 0.0;
  }
  double acc = head_mass_;
  if (x >= knots_.back()) {
    acc += cum_.back();
    acc += tail_.integral(knots_.back(), x);
    return acc;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return acc + cum_[i] + segs_[i].integral(knots_[i], x);
}

double Profile::total_mass() const {
  double acc = head_mass_ + cum_.back();
  const double tail_at = tail_.eval(std::max(knots_.back(), 1e-300) * 2.0);
  if (tail_at == 0.0) return acc;
  if (tail_.kind == SegKind::Const ||
      (tail_.kind == SegKind::Pow && tail_.b >= -1.0) ||
      tail_.kind == SegKind::Hyper) {
    return kInf;
  }
  return acc + tail_.integral(knots_.back(), kInf);
}

Profile Profile::double_star() const {
  if (head_ && head_->kind == SegKind::Pow && head_->b <= -1.0) {
    throw domain_error("double_star: non-integrable head (exponent <= -1)");
  }
  if (!std::isfinite(head_mass_)) {
    throw domain_error("double_star: non-integrable head");
  }
  Profile out;
  out.knots_ = knots_;
  out.segs_.reserve(segs_.size());
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Segment& s = segs_[i];
    const double c0 = head_mass_ + cum_[i];
    if (s.kind != SegKind::Const) {
      throw domain_error("double_star: exact evaluation requires a step profile");
    }
    // (c0 + a (t - t0)) / t = a + (c0 - a t0) / t
    out.segs_.push_back(Segment{SegKind::Hyper, s.t0, s.t1, s.a,
                                c0 - s.a * s.t0});
  }
  if (head_) {
    const Segment& h = *head_;
    if (h.kind == SegKind::Const) {
      out.head_ = h;
    } else if (h.kind == SegKind::Pow) {
      // (1/t) * a t^{b+1}/(b+1) = (a/(b+1)) t^b
      out.head_ = Segment{SegKind::Pow, 0.0, h.t1, h.a / (h.b + 1.0), h.b};
    } else {
      throw domain_error("double_star: unsupported head segment");
    }
  }
  const double mass = head_mass_ + cum_.back();
  const Segment& tl = tail_;
  if (tl.kind == SegKind::Const) {
    if (tl.a == 0.0) {
      out.tail_ = Segment{SegKind::Pow, knots_.back(), kInf, mass, -1.0};
    } else {
      out.tail_ = Segment{SegKind::Hyper, knots_.back(), kInf, tl.a,
                          mass - tl.a * knots_.back()};
    }
  } else if (tl.kind == SegKind::Pow && tl.b == -1.0) {
    // (mass + a log(t/T)) / t: not closed under the segment algebra unless
    // a == 0; reject the genuinely new case.
    if (tl.a == 0.0) {
      out.tail_ = Segment{SegKind::Pow, knots_.back(), kInf, mass, -1.0};
    } else {
      throw domain_error("double_star: unsupported tail segment");
    }
  } else {
    throw domain_error("double_star: unsupported tail segment");
  }
  // Degenerate zero-knot case (single knot at 0): tail only.
  out.build_cumulative();
  return out;
}

Profile Profile::oscillation() const {
  Profile dstar = double_star();
  Profile out;
  out.knots_ = knots_;
  out.segs_.reserve(segs_.size());
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Segment& s = segs_[i];
    const Segment& d = dstar.segs_[i];
    // d = a + c/t with d.a == s.a for step inputs; difference is c/t.
    out.segs_.push_back(
        Segment{SegKind::Pow, s.t0, s.t1, d.b, -1.0});
  }
  if (head_) {
    out.head_ = Segment{SegKind::Const, 0.0, knots_.front(), 0.0, 0.0};
    if (head_->kind == SegKind::Pow) {
      // v** - v = a t^b (1/(b+1) - 1)
      out.head_ = Segment{SegKind::Pow, 0.0, knots_.front(),
                          head_->a * (1.0 / (head_->b + 1.0) - 1.0), head_->b};
    }
  }
  const Segment& dt = dstar.tail_;
  if (dt.kind == SegKind::Pow) {  // mass/t - 0
    out.tail_ = dt;
  } else {  // Hyper a + c/t minus Const a
    out.tail_ = Segment{SegKind::Pow, knots_.back(), kInf, dt.b, -1.0};
  }
  out.build_cumulative();
  return out;
}

double Profile::measure_above(double lambda) const {
  if (!is_step()) throw domain_error("measure_above: step profiles only");
  if (lambda < 0.0) return kInf;
  if (tail_.a > lambda) return kInf;
  if (is_nonincreasing(0.0)) {
    // {g > lambda} = (0, T): T is the first knot whose segment value drops
    // to lambda or below; exact (knots carry the grid sums).
    if (segs_.empty()) return 0.0;  // constant tail value <= lambda
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      if (!(segs_[i].a > lambda)) return i == 0 ? 0.0 : knots_[i];
    }
    return knots_.back();
  }
  double m = 0.0;
  if (head_ && head_->a > lambda) m += knots_.front();
  for (const Segment& s : segs_) {
    if (s.a > lambda) m += s.t1 - s.t0;
  }
  return m;
}

bool Profile::is_step() const {
  for (const Segment& s : segs_) {
    if (s.kind != SegKind::Const) return false;
  }
  if (head_ && head_->kind != SegKind::Const) return false;
  return tail_.kind == SegKind::Const;
}

bool Profile::is_nonincreasing(double slack) const {
  double prev = head_ ? head_->a : kInf;
  auto seg_monotone = [&](const Segment& s, double at0, double at1) {
    if (at0 > prev + slack) return false;
    if (at1 > at0 + slack) return false;
    switch (s.kind) {
      case SegKind::Const:
        break;
      case SegKind::Hyper:
        if (s.b < -slack) return false;
        break;
      case SegKind::LogLin:
        if (s.b > slack) return false;
        break;
      case SegKind::Pow:
        if (s.a > slack && s.b > slack) return false;
        break;
    }
    prev = at1;
    return true;
  };
  for (const Segment& s : segs_) {
    const double v0 = s.eval(s.t0 > 0.0 ? s.t0 : 0.5 * s.t1);
    const double v1 = s.eval(s.t1);
    if (!seg_monotone(s, v0, v1)) return false;
  }
  const double tv = tail_.eval(std::max(knots_.back(), 1e-300) * 1.0000001);
  if (tv > prev + slack) return false;
  if (tail_.kind == SegKind::Pow && tail_.a > slack && tail_.b > slack) {
    return false;
  }
  if (tail_.kind == SegKind::LogLin && tail_.b > slack) return false;
  return true;
}

Profile Profile::with_head_exponent(double e) const {
  Profile p = *this;
  if (p.knots_.front() > 0.0) {
    const double v0 = p.segs_.empty() ? p.tail_.eval(p.knots_.front())
                                      : p.segs_.front().eval(p.knots_.front());
    const double k0 = p.knots_.front();
    // v(t) = v0 * (t/k0)^e
    p.head_ = Segment{SegKind::Pow, 0.0, k0, v0 / std::pow(k0, e), e};
  }
  p.build_cumulative();
  return p;
}

Profile Profile::with_tail_exponent(double e) const {
  Profile p = *this;
  const double km = p.knots_.back();
  if (km <= 0.0) throw domain_error("tail exponent needs a positive last knot");
  const double vm = p.tail_.eval(km);
  if (e == 0.0) {
    p.tail_ = Segment{SegKind::Const, km, kInf, vm, 0.0};
  } else {
    p.tail_ = Segment{SegKind::Pow, km, kInf, vm / std::pow(km, e), e};
  }
  p.build_cumulative();
  return p;
}

void Profile::write_csv(std::ostream& out) const {
  if (is_step()) {
    out << "# kfl-profile,1,step\n";
    if (head_ && knots_.front() > 0.0) {
      out << format_double(0.0) << ',' << format_double(head_->a) << "\n";
    }
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      out << format_double(knots_[i]) << ',' << format_double(segs_[i].a)
          << "\n";
    }
    out << format_double(knots_.back()) << ',' << format_double(tail_.a)
        << "\n";
    return;
  }
  out << "# kfl-profile,1,loglin\n";
  // Dense sampling: knots plus 8 log-spaced interior samples per segment,
  // plus a decade of tail.
  auto emit = [&](double t) {
    out << format_double(t) << ',' << format_double(eval(t)) << "\n";
  };
  const double t0 = knots_.front() > 0.0 ? knots_.front() : knots_[1] * 1e-3;
  emit(t0 * 0.999999999999);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double a = std::max(knots_[i], t0 * 1e-6), b = knots_[i + 1];
    for (int j = 0; j < 8; ++j) {
      const double t = a * std::pow(b / a, (j + 0.0) / 8.0);
      if (t > 0.0) emit(t);
    }
  }
  emit(knots_.back());
  for (int j = 1; j <= 8; ++j) {
    emit(knots_.back() * std::pow(10.0, j / 8.0));
  }
}

Profile Profile::read_csv(std::istream& in) {
  std::string line;
  bool step_mode = true;
  std::vector<std::pair<double, double>> pts;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '\r') continue;
    if (line[0] == '#') {
      if (first && line.find("loglin") != std::string::npos) step_mode = false;
      first = false;
      continue;
    }
    first = false;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw input_error("profile csv: expected 't,v' at line " +
                        std::to_string(lineno));
    }
    try {
      pts.emplace_back(std::stod(line.substr(0, comma)),
                       std::stod(line.substr(comma + 1)));
    } catch (...) {
      throw input_error("profile csv: bad number at line " +
                        std::to_string(lineno));
    }
  }
  if (pts.empty()) throw input_error("profile csv: no data rows");
  return step_mode ? step(std::move(pts)) : loglinear(std::move(pts));
}

Profile Profile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  return read_csv(in);
}

void Profile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open " + path + " for writing");
  write_csv(out);
}

}  // namespace kfl
