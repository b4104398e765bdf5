#include "kfl.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kfl/harness.hpp"
#include "kfl/lattice.hpp"
#include "kfl/profile.hpp"
#include "kfl/smoothness.hpp"
#include "kfl/spaces.hpp"
#include "kfl/weights.hpp"

using namespace kfl;

struct kfl_gridfn {
  GridFunction f;
};

struct kfl_profile {
  Profile g;
};

namespace {

thread_local std::string t_last_error;

int fail(int code, const std::string& msg) {
  t_last_error = msg;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const input_error& e) {
    return fail(KFL_ERR_INVALID, e.what());
  } catch (const domain_error& e) {
    return fail(KFL_ERR_DOMAIN, e.what());
  } catch (const range_error& e) {
    return fail(KFL_ERR_RANGE, e.what());
  } catch (const hypothesis_violation& e) {
    return fail(KFL_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(KFL_ERR_INTERNAL, e.what());
  }
}

int put_text(const std::string& text, char* buffer, size_t cap,
             size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buffer || cap == 0) return KFL_OK;
  const size_t n = std::min(cap - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
  if (n < text.size()) return fail(KFL_ERR_INVALID, "buffer too small");
  return KFL_OK;
}

}  // namespace

extern "C" {

const char* kfl_version(void) { return "1.0.0"; }

const char* kfl_last_error(void) { return t_last_error.c_str(); }

int kfl_gridfn_load(const char* path, kfl_gridfn** out) {
  if (!path || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = new kfl_gridfn{GridFunction::load(path)};
    return KFL_OK;
  });
}

int kfl_gridfn_create(int dim, const double* lo, const double* hi,
                      const size_t* counts, const double* values,
                      kfl_gridfn** out) {
  if (!lo || !hi || !counts || !values || !out) {
    return fail(KFL_ERR_INVALID, "null argument");
  }
  return guarded([&] {
    std::vector<GridFunction::Axis> axes;
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) {
      axes.push_back({lo[a], hi[a], counts[a]});
      n *= counts[a];
    }
    std::vector<double> vals(values, values + n);
    *out = new kfl_gridfn{GridFunction(std::move(axes), std::move(vals))};
    return KFL_OK;
  });
}

int kfl_gridfn_save(const kfl_gridfn* f, const char* path) {
  if (!f || !path) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    f->f.save(path);
    return KFL_OK;
  });
}

int kfl_gridfn_size(const kfl_gridfn* f, size_t* out) {
  if (!f || !out) return fail(KFL_ERR_INVALID, "null argument");
  *out = f->f.size();
  return KFL_OK;
}

void kfl_gridfn_free(kfl_gridfn* f) { delete f; }

int kfl_rearrange(const kfl_gridfn* f, kfl_profile** out) {
  if (!f || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = new kfl_profile{Profile::rearrange(f->f)};
    return KFL_OK;
  });
}

int kfl_profile_double_star(const kfl_profile* g, kfl_profile** out) {
  if (!g || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = new kfl_profile{g->g.double_star()};
    return KFL_OK;
  });
}

int kfl_profile_oscillation(const kfl_profile* g, kfl_profile** out) {
  if (!g || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = new kfl_profile{g->g.oscillation()};
    return KFL_OK;
  });
}

int kfl_profile_eval(const kfl_profile* g, double t, double* out) {
  if (!g || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = g->g.eval(t);
    return KFL_OK;
  });
}

int kfl_profile_load(const char* path, kfl_profile** out) {
  if (!path || !out) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    *out = new kfl_profile{Profile::load(path)};
    return KFL_OK;
  });
}

int kfl_profile_save(const kfl_profile* g, const char* path) {
  if (!g || !path) return fail(KFL_ERR_INVALID, "null argument");
  return guarded([&] {
    g->g.save(path);
    return KFL_OK;
  });
}

void kfl_profile_free(kfl_profile* g) { delete g; }

int kfl_space_norm(const char* space_literal, const kfl_gridfn* f,
                   double* out) {
  if (!space_literal || !f || !out) {
    return fail(KFL_ERR_INVALID, "null argument");
  }
  return guarded([&] {
    const SpaceSpec spec = SpaceSpec::parse(space_literal);
    *out = space_norm(spec, f->f);
    return KFL_OK;
  });
}

int kfl_modulus(const kfl_gridfn* f, double kappa, const char* space_literal,
                const double* ts, size_t nt, int axis_only, double* out) {
  if (!f || !space_literal || !ts || !out || nt == 0) {
    return fail(KFL_ERR_INVALID, "null or empty argument");
  }
  return guarded([&] {
    const SpaceSpec spec = SpaceSpec::parse(space_literal);
    ModulusRequest req;
    req.kappa = kappa;
    req.params.kappa = kappa;
    req.axis_only = axis_only != 0;
    req.norms.push_back(
        make_sorted_norm(spec, f->f.cell_measure(), f->f.size()));
    const std::vector<double> tgrid(ts, ts + nt);
    const auto res = modulus_grid(f->f, req, tgrid);
    for (size_t i = 0; i < nt; ++i) out[i] = res[0][i];
    return KFL_OK;
  });
}

int kfl_kfun(const kfl_gridfn* f, int k, const char* space_literal,
             const double* ss, size_t ns, double* out) {
  if (!f || !space_literal || !ss || !out || ns == 0) {
    return fail(KFL_ERR_INVALID, "null or empty argument");
  }
  return guarded([&] {
    const SpaceSpec spec = SpaceSpec::parse(space_literal);
    for (size_t i = 0; i < ns; ++i) {
      out[i] = k_upper(f->f, ss[i], k, spec);
    }
    return KFL_OK;
  });
}

int kfl_weight_check(const char* weight_literal, const char* cond, double r,
                     int* holds, double* constant) {
  if (!weight_literal || !cond || !holds || !constant) {
    return fail(KFL_ERR_INVALID, "null argument");
  }
  return guarded([&] {
    const PowerSVWeight w = PowerSVWeight::parse(weight_literal);
    ConditionResult res;
    const std::string c = cond;
    if (c == "Br") {
      res = check_Br(w, r);
    } else if (c == "Brstar") {
      res = check_Brstar(w, r);
    } else if (c == "Binftystar") {
      res = check_Binftystar(w);
    } else {
      throw input_error("unknown weight condition '" + c +
                        "' (expected Br, Brstar or Binftystar)");
    }
    *holds = res.holds ? 1 : 0;
    *constant = res.constant;
    return KFL_OK;
  });
}

int kfl_holmstedt_eval(const char* profile_csv, const char* lattice_literal,
                       int form_b, const double* ts, size_t nt, double* out) {
  if (!profile_csv || !lattice_literal || !ts || !out || nt == 0) {
    return fail(KFL_ERR_INVALID, "null or empty argument");
  }
  return guarded([&] {
    std::ifstream in(profile_csv);
    if (!in) throw input_error(std::string("cannot open ") + profile_csv);
    QuasiconcaveProfile K;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw input_error("profile csv: expected 't,K' at line " +
                          std::to_string(lineno));
      }
      try {
        K.t.push_back(std::stod(line.substr(0, comma)));
        K.K.push_back(std::stod(line.substr(comma + 1)));
      } catch (...) {
        throw input_error("profile csv: bad number at line " +
                          std::to_string(lineno));
      }
    }
    K.validate(1e-9);
    const PowerLogLattice F = PowerLogLattice::parse(lattice_literal);
    for (size_t i = 0; i < nt; ++i) {
      out[i] = form_b ? holmstedt_B_rhs(K, F, ts[i])
                      : holmstedt_A_rhs(K, F, ts[i]);
    }
    return KFL_OK;
  });
}

int kfl_verify(const char* config_path, const char* out_dir, uint64_t seed,
               int jobs, int extended, int plots) {
  if (!out_dir) return fail(KFL_ERR_INVALID, "null out_dir");
  return guarded([&]() -> int {
    RunConfig cfg;
    if (config_path) {
      std::ifstream in(config_path);
      if (!in) {
        throw input_error(std::string("cannot open config ") + config_path);
      }
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = RunConfig::from_json_text(ss.str());
    } else {
      cfg = RunConfig::default_config();
    }
    if (seed != 0) cfg.seed = seed;
    if (jobs > 0) cfg.jobs = jobs;
    if (extended) cfg.extended = true;
    cfg.plots = plots != 0;
    const SuiteResult res = run_suite(cfg, out_dir);
    if (res.exit_code != 0) {
      return fail(KFL_ERR_VERIFY,
                  "verification reported failing or inconclusive cases");
    }
    return KFL_OK;
  });
}

int kfl_default_config_json(char* buffer, size_t cap, size_t* needed) {
  return guarded([&] {
    return put_text(RunConfig::default_config().to_json_text(), buffer, cap,
                    needed);
  });
}

int kfl_report_summary(const char* dir, char* buffer, size_t cap,
                       size_t* needed) {
  if (!dir) return fail(KFL_ERR_INVALID, "null dir");
  return guarded([&]() -> int {
    namespace fs = std::filesystem;
    std::ostringstream os;
    os << "case_id,family,constant,refined,stability,pass\n";
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json" &&
          entry.path().filename() != "summary.json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      std::ifstream in(p);
      nlohmann::json j;
      try {
        in >> j;
      } catch (...) {
        continue;
      }
      if (!j.contains("case_id") || !j.contains("sup_ratio")) continue;
      os << j["case_id"].get<std::string>() << ','
         << (j.contains("family") ? j["family"].get<std::string>() : "") << ',';
      if (j["sup_ratio"].is_number()) {
        os << format_double(j["sup_ratio"].get<double>());
      } else {
        os << "+inf";
      }
      os << ',';
      if (j.contains("refined_sup_ratio") &&
          j["refined_sup_ratio"].is_number()) {
        os << format_double(j["refined_sup_ratio"].get<double>()) << ','
           << (j.value("refinement_stable", false) ? "stable" : "unstable");
      } else {
        os << ",single";
      }
      os << ',' << (j.value("pass", false) ? "PASS" : "FAIL") << "\n";
    }
    return put_text(os.str(), buffer, cap, needed);
  });
}

}  // extern "C"
