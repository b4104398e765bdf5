#include "kfl/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kfl {

GridFunction::GridFunction(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  if (axes_.empty() || axes_.size() > 3) {
    throw input_error("GridFunction: dim must be 1, 2 or 3");
  }
  std::size_t n = 1;
  cell_measure_ = 1.0;
  for (const Axis& a : axes_) {
    if (a.count < 2) throw input_error("GridFunction: counts must be >= 2");
    if (!(a.hi > a.lo)) throw input_error("GridFunction: hi must exceed lo");
    n *= a.count;
    cell_measure_ *= (a.hi - a.lo) / static_cast<double>(a.count);
  }
  if (values_.size() != n) {
    throw input_error("GridFunction: values size does not match counts");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw input_error("GridFunction: non-finite value");
  }
}

GridFunction GridFunction::from_callable(
    std::vector<Axis> axes,
    const std::function<double(const std::array<double, 3>&)>& fn) {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= a.count;
  std::vector<double> vals(n);
  const int d = static_cast<int>(axes.size());
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t f = 0; f < n; ++f) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const double h = (axes[a].hi - axes[a].lo) / axes[a].count;
      x[a] = axes[a].lo + (static_cast<double>(idx[a]) + 0.5) * h;
    }
    vals[f] = fn(x);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < axes[a].count) break;
      idx[a] = 0;
    }
  }
  return GridFunction(std::move(axes), std::move(vals));
}

double GridFunction::cell_center(std::size_t flat, int axis) const {
  std::size_t stride = 1;
  for (int a = dim() - 1; a > axis; --a) stride *= axes_[a].count;
  const std::size_t i = (flat / stride) % axes_[axis].count;
  return axes_[axis].lo + (static_cast<double>(i) + 0.5) * spacing(axis);
}

std::size_t GridFunction::flat_index(
    const std::array<std::size_t, 3>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f = f * axes_[a].count + idx[a];
  return f;
}

double GridFunction::value_at(const std::array<double, 3>& x) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const Axis& ax = axes_[a];
    if (x[a] < ax.lo || x[a] >= ax.hi) return 0.0;
    const double h = spacing(a);
    auto i = static_cast<std::size_t>((x[a] - ax.lo) / h);
    if (i >= ax.count) i = ax.count - 1;
    idx[a] = i;
  }
  return values_[flat_index(idx)];
}

double GridFunction::interpolate(const std::array<double, 3>& x) const {
  // Multilinear over cell centers; zero beyond the outermost centers' box
  // extension (consistent with the zero-extension convention).
  const int d = dim();
  std::array<std::size_t, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  std::array<bool, 3> clamped_out{false, false, false};
  for (int a = 0; a < d; ++a) {
    const Axis& ax = axes_[a];
    const double h = spacing(a);
    const double u = (x[a] - ax.lo) / h - 0.5;  // in units of cells
    if (u <= -1.0 || u >= static_cast<double>(ax.count)) {
      clamped_out[a] = true;
      continue;
    }
    const double fl = std::floor(u);
    base[a] = static_cast<std::size_t>(std::max(0.0, fl));
    frac[a] = u - fl;
    if (fl < 0.0) {
      base[a] = 0;  // blend with zero outside
    }
  }
  for (int a = 0; a < d; ++a) {
    if (clamped_out[a]) return 0.0;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    std::array<std::size_t, 3> idx = base;
    bool outside = false;
    for (int a = 0; a < d; ++a) {
      const bool hi = (c >> a) & 1;
      const Axis& ax = axes_[a];
      const double u = (x[a] - ax.lo) / spacing(a) - 0.5;
      const double fl = std::floor(u);
      const long long cell = static_cast<long long>(fl) + (hi ? 1 : 0);
      wgt *= hi ? (u - fl) : (1.0 - (u - fl));
      if (cell < 0 || cell >= static_cast<long long>(ax.count)) {
        outside = true;  // zero extension contributes nothing
      } else {
        idx[a] = static_cast<std::size_t>(cell);
      }
    }
    if (!outside && wgt != 0.0) acc += wgt * values_[flat_index(idx)];
  }
  return acc;
}

GridFunction GridFunction::scaled(double c) const {
  std::vector<double> vals(values_.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = c * values_[i];
  return GridFunction(axes_, std::move(vals));
}

double GridFunction::power_mass(double p) const {
  double s = 0.0;
  for (double v : values_) s += std::pow(std::abs(v), p);
  return s * cell_measure_;
}

namespace {

constexpr char kMagic[4] = {'K', 'F', 'L', 'G'};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

GridFunction GridFunction::read_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw input_error("gridfn csv: unexpected end of file at line " +
                        std::to_string(lineno + 1));
    }
    ++lineno;
  };
  next_line();
  auto head = split_csv_line(line);
  if (head.size() != 2 || head[0] != "kfl-gridfn" || head[1] != "1") {
    throw input_error("gridfn csv: bad magic header at line 1");
  }
  next_line();
  auto dimrow = split_csv_line(line);
  if (dimrow.size() != 2 || dimrow[0] != "dim") {
    throw input_error("gridfn csv: expected 'dim,<d>' at line 2");
  }
  int d = 0;
  try {
    d = std::stoi(dimrow[1]);
  } catch (...) {
    throw input_error("gridfn csv: bad dim at line 2");
  }
  if (d < 1 || d > 3) throw input_error("gridfn csv: dim must be 1..3");
  next_line();
  auto boxrow = split_csv_line(line);
  if (boxrow.size() != static_cast<std::size_t>(1 + 3 * d) ||
      boxrow[0] != "box") {
    throw input_error("gridfn csv: expected 'box,lo,hi,count' triples at line 3");
  }
  std::vector<Axis> axes(d);
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) {
    try {
      axes[a].lo = std::stod(boxrow[1 + 3 * a]);
      axes[a].hi = std::stod(boxrow[2 + 3 * a]);
      axes[a].count = std::stoul(boxrow[3 + 3 * a]);
    } catch (...) {
      throw input_error("gridfn csv: bad axis fields at line 3");
    }
    n *= axes[a].count;
  }
  std::vector<double> vals;
  vals.reserve(n);
  while (vals.size() < n) {
    next_line();
    if (line.empty()) continue;
    try {
      vals.push_back(std::stod(line));
    } catch (...) {
      throw input_error("gridfn csv: bad value at line " +
                        std::to_string(lineno));
    }
  }
  return GridFunction(std::move(axes), std::move(vals));
}

void GridFunction::write_csv(std::ostream& out) const {
  out << "kfl-gridfn,1\n";
  out << "dim," << dim() << "\n";
  out << "box";
  for (const Axis& a : axes_) {
    out << ',' << format_double(a.lo) << ',' << format_double(a.hi) << ','
        << a.count;
  }
  out << "\n";
  for (double v : values_) out << format_double(v) << "\n";
}

GridFunction GridFunction::read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw input_error("gridfn binary: bad magic");
  }
  std::uint32_t version = 0, d = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  if (!in || version != 1 || d < 1 || d > 3) {
    throw input_error("gridfn binary: bad header");
  }
  std::vector<Axis> axes(d);
  std::size_t n = 1;
  for (std::uint32_t a = 0; a < d; ++a) {
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&axes[a].lo), sizeof(double));
    in.read(reinterpret_cast<char*>(&axes[a].hi), sizeof(double));
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    axes[a].count = static_cast<std::size_t>(count);
    n *= axes[a].count;
  }
  std::vector<double> vals(n);
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw input_error("gridfn binary: truncated values");
  return GridFunction(std::move(axes), std::move(vals));
}

void GridFunction::write_binary(std::ostream& out) const {
  out.write(kMagic, 4);
  const std::uint32_t version = 1, d = static_cast<std::uint32_t>(dim());
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  for (const Axis& a : axes_) {
    const std::uint64_t count = a.count;
    out.write(reinterpret_cast<const char*>(&a.lo), sizeof(double));
    out.write(reinterpret_cast<const char*>(&a.hi), sizeof(double));
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
  }
  out.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GridFunction GridFunction::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.seekg(0);
  if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(in);
  return read_csv(in);
}

void GridFunction::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open " + path + " for writing");
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") {
    write_binary(out);
  } else {
    write_csv(out);
  }
}

}  // namespace kfl
