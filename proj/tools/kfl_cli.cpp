// Command line for the kfl shared library. Every operation goes through the
// C API in kfl.h; this file only parses arguments and moves bytes.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kfl.h"

namespace {

int fail_code(int status) {
  std::cerr << "error: " << kfl_last_error() << "\n";
  switch (status) {
    case KFL_ERR_VERIFY:
      return 1;
    case KFL_ERR_INVALID:
      return 2;
    case KFL_ERR_DOMAIN:
    case KFL_ERR_RANGE:
      return 2;
    default:
      return 3;
  }
}

std::string sig12(double x) {
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string full(double x) {
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> parse_tgrid(const std::string& spec) {
  // "min:max:per_octave" or comma-separated values
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double mn, mx;
    int per = 2;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &mn, &mx, &per) < 2 ||
        !(mn > 0) || !(mx >= mn) || per < 1) {
      throw std::runtime_error("bad t-grid spec '" + spec +
                               "' (want min:max:per_octave)");
    }
    const double step = std::pow(2.0, 1.0 / per);
    for (double t = mn; t <= mx * 1.0000001; t *= step) out.push_back(t);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw std::runtime_error("bad t value '" + item + "'");
    }
  }
  if (out.empty()) throw std::runtime_error("empty t-grid");
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << content;
  }
  fs::rename(tmp, target);
}

std::string grab_text(int (*fn)(char*, size_t, size_t*)) {
  size_t needed = 0;
  fn(nullptr, 0, &needed);
  std::string buf(needed, '\0');
  if (fn(buf.data(), buf.size(), &needed) != KFL_OK) {
    throw std::runtime_error(kfl_last_error());
  }
  buf.resize(std::strlen(buf.c_str()));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kfl - rearrangements, Lorentz-type norms, smoothness moduli "
               "and inequality verification"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir;
  int jobs = 0;
  bool extended = false;
  std::size_t grid_cells = 0;
  app.add_option("--seed", seed, "seed override for the harness");
  app.add_option("--out", out_dir, "output directory / file prefix");
  app.add_option("--jobs", jobs, "worker threads for the harness");
  app.add_flag("--extended", extended, "include the coarse multi-d cases");
  app.add_option("--grid", grid_cells, "grid cells per axis override");

  // rearrange ---------------------------------------------------------------
  auto* c_re = app.add_subcommand("rearrange",
                                  "write f* and f** profiles of a grid "
                                  "function as CSV");
  std::string re_input;
  c_re->add_option("input", re_input, "grid function file")->required();

  // norm ----------------------------------------------------------------------
  auto* c_norm = app.add_subcommand("norm", "norm of a grid function");
  std::string norm_space, norm_input;
  c_norm->add_option("space", norm_space, "space literal")->required();
  c_norm->add_option("input", norm_input, "grid function file")->required();

  // modulus -------------------------------------------------------------------
  auto* c_mod = app.add_subcommand("modulus",
                                   "modulus of smoothness over a t-grid");
  std::string mod_input, mod_space = "Lebesgue(p=2)",
              mod_tgrid = "0.00390625:0.25:2";
  double mod_kappa = 1.0;
  bool mod_axis = false;
  c_mod->add_option("input", mod_input)->required();
  c_mod->add_option("--kappa", mod_kappa, "order of the modulus");
  c_mod->add_option("--space", mod_space, "space literal");
  c_mod->add_option("--tgrid", mod_tgrid, "min:max:per_octave or v1,v2,...");
  c_mod->add_flag("--axis-only", mod_axis, "restrict shifts to the axes");

  // kfun ------------------------------------------------------------------------
  auto* c_kf = app.add_subcommand("kfun", "K-functional upper estimate over "
                                          "an s-grid");
  std::string kf_input, kf_space = "Lebesgue(p=2)",
              kf_tgrid = "0.00390625:0.25:2";
  int kf_k = 1;
  c_kf->add_option("input", kf_input)->required();
  c_kf->add_option("--k", kf_k, "Sobolev order");
  c_kf->add_option("--space", kf_space, "space literal");
  c_kf->add_option("--tgrid", kf_tgrid, "min:max:per_octave or v1,v2,...");

  // weights -----------------------------------------------------------------------
  auto* c_w = app.add_subcommand("weights", "weight-class condition check");
  std::string w_cond, w_literal;
  double w_r = 2.0;
  c_w->add_option("check", w_cond, "Br | Brstar | Binftystar")->required();
  c_w->add_option("weight", w_literal, "weight literal t^A[*log^G]")
      ->required();
  c_w->add_option("--r", w_r, "exponent r of the condition");

  // holmstedt ------------------------------------------------------------------------
  auto* c_h = app.add_subcommand("holmstedt",
                                 "two-term K-functional expression on a "
                                 "profile CSV");
  std::string h_profile, h_lattice = "F(q=2,theta=0.5,gamma=0)",
              h_form = "A", h_tgrid = "0.00390625:0.25:2";
  c_h->add_option("profile", h_profile, "two-column CSV (t,K)")->required();
  c_h->add_option("--lattice", h_lattice, "lattice literal");
  c_h->add_option("--form", h_form, "A or B");
  c_h->add_option("--tgrid", h_tgrid, "min:max:per_octave or v1,v2,...");

  // verify ---------------------------------------------------------------------------
  auto* c_v = app.add_subcommand("verify", "run the inequality suite");
  std::string v_config;
  bool v_print_default = false;
  bool v_no_plots = false;
  c_v->add_option("config", v_config, "config JSON (omit for the bundled "
                                      "default suite)");
  c_v->add_flag("--default-config", v_print_default,
                "print the bundled default config and exit");
  c_v->add_flag("--no-plots", v_no_plots, "skip SVG plot files");

  // report ----------------------------------------------------------------------------
  auto* c_rep = app.add_subcommand("report", "summary table from report "
                                             "JSON files");
  std::string rep_dir;
  c_rep->add_option("dir", rep_dir, "report directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_re->parsed()) {
      kfl_gridfn* f = nullptr;
      int st = kfl_gridfn_load(re_input.c_str(), &f);
      if (st != KFL_OK) return fail_code(st);
      kfl_profile *star = nullptr, *dstar = nullptr;
      st = kfl_rearrange(f, &star);
      if (st == KFL_OK) st = kfl_profile_double_star(star, &dstar);
      if (st != KFL_OK) {
        kfl_gridfn_free(f);
        return fail_code(st);
      }
      std::string stem = re_input;
      const auto slash = stem.find_last_of('/');
      if (slash != std::string::npos) stem = stem.substr(slash + 1);
      const auto dot = stem.find_last_of('.');
      if (dot != std::string::npos) stem = stem.substr(0, dot);
      const std::string dir = out_dir.empty() ? "." : out_dir;
      const std::string p1 = dir + "/" + stem + ".star.csv";
      const std::string p2 = dir + "/" + stem + ".dstar.csv";
      if (kfl_profile_save(star, p1.c_str()) != KFL_OK ||
          kfl_profile_save(dstar, p2.c_str()) != KFL_OK) {
        return fail_code(KFL_ERR_INVALID);
      }
      std::cout << p1 << "\n" << p2 << "\n";
      kfl_profile_free(star);
      kfl_profile_free(dstar);
      kfl_gridfn_free(f);
      return 0;
    }
    if (c_norm->parsed()) {
      kfl_gridfn* f = nullptr;
      int st = kfl_gridfn_load(norm_input.c_str(), &f);
      if (st != KFL_OK) return fail_code(st);
      double value = 0.0;
      st = kfl_space_norm(norm_space.c_str(), f, &value);
      kfl_gridfn_free(f);
      if (st != KFL_OK) return fail_code(st);
      std::cout << sig12(value) << "\n";
      return 0;
    }
    if (c_mod->parsed() || c_kf->parsed()) {
      const bool is_mod = c_mod->parsed();
      const std::string input = is_mod ? mod_input : kf_input;
      const std::string space = is_mod ? mod_space : kf_space;
      const auto tgrid = parse_tgrid(is_mod ? mod_tgrid : kf_tgrid);
      kfl_gridfn* f = nullptr;
      int st = kfl_gridfn_load(input.c_str(), &f);
      if (st != KFL_OK) return fail_code(st);
      std::vector<double> vals(tgrid.size());
      st = is_mod ? kfl_modulus(f, mod_kappa, space.c_str(), tgrid.data(),
                                tgrid.size(), mod_axis ? 1 : 0, vals.data())
                  : kfl_kfun(f, kf_k, space.c_str(), tgrid.data(),
                             tgrid.size(), vals.data());
      kfl_gridfn_free(f);
      if (st != KFL_OK) return fail_code(st);
      std::ostringstream os;
      os << (is_mod ? "t,omega\n" : "s,K\n");
      for (std::size_t i = 0; i < tgrid.size(); ++i) {
        os << full(tgrid[i]) << ',' << full(vals[i]) << "\n";
      }
      if (out_dir.empty()) {
        std::cout << os.str();
      } else {
        const std::string path =
            out_dir + (is_mod ? "/modulus.csv" : "/kfun.csv");
        write_file_atomic(path, os.str());
        std::cout << path << "\n";
      }
      return 0;
    }
    if (c_w->parsed()) {
      int holds = 0;
      double constant = 0.0;
      const int st = kfl_weight_check(w_literal.c_str(), w_cond.c_str(), w_r,
                                      &holds, &constant);
      if (st != KFL_OK) return fail_code(st);
      if (holds) {
        std::cout << "B condition '" << w_cond << "' holds, c = "
                  << sig12(constant) << "\n";
      } else {
        std::cout << "B condition '" << w_cond << "' fails\n";
      }
      return 0;
    }
    if (c_h->parsed()) {
      const auto tgrid = parse_tgrid(h_tgrid);
      std::vector<double> vals(tgrid.size());
      const int st = kfl_holmstedt_eval(h_profile.c_str(), h_lattice.c_str(),
                                        h_form == "B" || h_form == "b" ? 1 : 0,
                                        tgrid.data(), tgrid.size(),
                                        vals.data());
      if (st != KFL_OK) return fail_code(st);
      std::cout << "t,value\n";
      for (std::size_t i = 0; i < tgrid.size(); ++i) {
        std::cout << full(tgrid[i]) << ',' << full(vals[i]) << "\n";
      }
      return 0;
    }
    if (c_v->parsed()) {
      if (v_print_default) {
        std::cout << grab_text(kfl_default_config_json) << "\n";
        return 0;
      }
      std::string config_path = v_config;
      std::string patched;
      if (grid_cells > 0) {
        // Patch the grid size into the config through its JSON form.
        nlohmann::json j;
        if (config_path.empty()) {
          j = nlohmann::json::parse(grab_text(kfl_default_config_json));
        } else {
          std::ifstream in(config_path);
          if (!in) {
            std::cerr << "error: cannot open config " << config_path << "\n";
            return 2;
          }
          try {
            in >> j;
          } catch (const std::exception& e) {
            std::cerr << "error: config parse: " << e.what() << "\n";
            return 2;
          }
        }
        j["grid"]["cells"] = grid_cells;
        patched = (std::filesystem::temp_directory_path() /
                   ("kfl-config-" + std::to_string(::getpid()) + ".json"))
                      .string();
        write_file_atomic(patched, j.dump(2));
        config_path = patched;
      }
      const std::string dir = out_dir.empty() ? "reports" : out_dir;
      const int st = kfl_verify(config_path.empty() ? nullptr
                                                    : config_path.c_str(),
                                dir.c_str(), seed, jobs, extended ? 1 : 0,
                                v_no_plots ? 0 : 1);
      if (!patched.empty()) std::filesystem::remove(patched);
      if (st == KFL_OK) {
        std::cout << "verify: all cases PASS; reports in " << dir << "\n";
        return 0;
      }
      if (st == KFL_ERR_VERIFY) {
        std::cerr << "error: " << kfl_last_error() << "\n";
        std::cout << "verify: failures; reports in " << dir << "\n";
        return 1;
      }
      return fail_code(st);
    }
    if (c_rep->parsed()) {
      size_t needed = 0;
      kfl_report_summary(rep_dir.c_str(), nullptr, 0, &needed);
      std::string buf(needed, '\0');
      const int st =
          kfl_report_summary(rep_dir.c_str(), buf.data(), buf.size(), &needed);
      if (st != KFL_OK) return fail_code(st);
      buf.resize(std::strlen(buf.c_str()));
      std::cout << buf;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
