#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "kfl.h"

namespace {

std::string write_indicator_csv(const std::string& path) {
  // unit indicator on [-2,2] with 2000 cells
  const std::size_t n = 2000;
  std::ofstream out(path);
  out << "kfl-gridfn,1\n";
  out << "dim,1\n";
  out << "box,-2,2," << n << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -2.0 + (i + 0.5) * 4.0 / n;
    out << ((x >= 0.0 && x < 1.0) ? 1 : 0) << "\n";
  }
  return path;
}

}  // namespace

TEST_CASE("gridfn load, rearrange, double star, eval through the C API") {
  const std::string path = write_indicator_csv("capi_indicator.csv");
  kfl_gridfn* f = nullptr;
  REQUIRE(kfl_gridfn_load(path.c_str(), &f) == KFL_OK);
  size_t n = 0;
  CHECK(kfl_gridfn_size(f, &n) == KFL_OK);
  CHECK(n == 2000);
  kfl_profile* star = nullptr;
  REQUIRE(kfl_rearrange(f, &star) == KFL_OK);
  double v = 0.0;
  CHECK(kfl_profile_eval(star, 0.5, &v) == KFL_OK);
  CHECK(v == doctest::Approx(1.0));
  kfl_profile* dstar = nullptr;
  REQUIRE(kfl_profile_double_star(star, &dstar) == KFL_OK);
  CHECK(kfl_profile_eval(dstar, 2.0, &v) == KFL_OK);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(kfl_profile_save(star, "capi_star.csv") == KFL_OK);
  kfl_profile* loaded = nullptr;
  REQUIRE(kfl_profile_load("capi_star.csv", &loaded) == KFL_OK);
  CHECK(kfl_profile_eval(loaded, 0.5, &v) == KFL_OK);
  CHECK(v == doctest::Approx(1.0));
  kfl_profile_free(loaded);
  kfl_profile_free(dstar);
  kfl_profile_free(star);
  kfl_gridfn_free(f);
}

TEST_CASE("space norms and error codes") {
  const std::string path = write_indicator_csv("capi_ind2.csv");
  kfl_gridfn* f = nullptr;
  REQUIRE(kfl_gridfn_load(path.c_str(), &f) == KFL_OK);
  double v = 0.0;
  CHECK(kfl_space_norm("Lorentz(p=2,r=2)", f, &v) == KFL_OK);
  CHECK(v == doctest::Approx(1.0).epsilon(2e-3));
  // bad literal -> invalid
  CHECK(kfl_space_norm("Nope(p=2)", f, &v) == KFL_ERR_INVALID);
  CHECK(std::strlen(kfl_last_error()) > 0);
  // degenerate weighted space -> invalid (constructor invariant)
  CHECK(kfl_space_norm("Lambda(r=2,w=t^-1.0)", f, &v) == KFL_ERR_INVALID);
  kfl_gridfn_free(f);
}

TEST_CASE("modulus and kfun grids") {
  const std::string path = write_indicator_csv("capi_ind3.csv");
  kfl_gridfn* f = nullptr;
  REQUIRE(kfl_gridfn_load(path.c_str(), &f) == KFL_OK);
  const std::vector<double> ts = {1.0 / 64, 1.0 / 32, 1.0 / 16};
  std::vector<double> om(ts.size()), kv(ts.size());
  REQUIRE(kfl_modulus(f, 1.0, "Lebesgue(p=2)", ts.data(), ts.size(), 0,
                      om.data()) == KFL_OK);
  CHECK(om[0] <= om[1]);
  CHECK(om[1] <= om[2]);
  REQUIRE(kfl_kfun(f, 1, "Lebesgue(p=2)", ts.data(), ts.size(), kv.data()) ==
          KFL_OK);
  for (double x : kv) CHECK(std::isfinite(x));
  kfl_gridfn_free(f);
}

TEST_CASE("weight checks") {
  int holds = 0;
  double c = 0.0;
  REQUIRE(kfl_weight_check("t^0.0", "Br", 2.0, &holds, &c) == KFL_OK);
  CHECK(holds == 1);
  CHECK(c == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(kfl_weight_check("t^1.0", "Br", 2.0, &holds, &c) == KFL_OK);
  CHECK(holds == 0);
  CHECK(kfl_weight_check("t^0.0", "Wrong", 2.0, &holds, &c) ==
        KFL_ERR_INVALID);
}

TEST_CASE("holmstedt evaluator on a profile CSV") {
  {
    std::ofstream out("capi_kprofile.csv");
    out << "# t,K\n";
    for (double s = 1e-4; s <= 1e4; s *= 2.0) {
      out << s << ',' << std::min(1.0, s) << "\n";
    }
  }
  const std::vector<double> ts = {0.05, 0.2, 1.0};
  std::vector<double> vals(ts.size());
  REQUIRE(kfl_holmstedt_eval("capi_kprofile.csv", "F(q=1,theta=0.5,gamma=0)",
                             0, ts.data(), ts.size(), vals.data()) == KFL_OK);
  for (double v : vals) CHECK(std::isfinite(v));
  REQUIRE(kfl_holmstedt_eval("capi_kprofile.csv", "F(q=1,theta=0.5,gamma=0)",
                             1, ts.data(), ts.size(), vals.data()) == KFL_OK);
  CHECK(vals[0] == doctest::Approx(4.0 * 0.05).epsilon(1e-5));
  // malformed lattice literal
  CHECK(kfl_holmstedt_eval("capi_kprofile.csv", "F(z=1)", 0, ts.data(),
                           ts.size(), vals.data()) == KFL_ERR_INVALID);
}

TEST_CASE("default config is exposed and verify rejects bad configs") {
  size_t needed = 0;
  REQUIRE(kfl_default_config_json(nullptr, 0, &needed) == KFL_OK);
  REQUIRE(needed > 2);
  std::string buf(needed, '\0');
  REQUIRE(kfl_default_config_json(buf.data(), buf.size(), &needed) == KFL_OK);
  CHECK(buf.find("kfl-config/1") != std::string::npos);
  {
    std::ofstream bad("capi_bad_config.json");
    bad << "{\"version\":\"kfl-config/1\",\"mystery\":true}";
  }
  CHECK(kfl_verify("capi_bad_config.json", "capi_reports", 0, 1, 0, 0) ==
        KFL_ERR_INVALID);
  CHECK(kfl_verify("no-such-file.json", "capi_reports", 0, 1, 0, 0) ==
        KFL_ERR_INVALID);
}

TEST_CASE("tiny verification run through the C API") {
  {
    std::ofstream cfg("capi_tiny_config.json");
    cfg << R"({
      "version": "kfl-config/1",
      "seed": 5,
      "grid": {"cells": 256, "box": [-1, 1]},
      "family": {"name": "mixed", "count": 2},
      "tgrid": {"min": 0.03125, "max": 0.125, "per_octave": 1},
      "floor": 0.0078125,
      "umax": 4.0,
      "refine": false,
      "plots": false,
      "cases": [
        {"id": "ULYANOV_CLASSIC",
         "params": {"p": 2, "delta": 0.25, "pstar": 4, "k": 1}}
      ]
    })";
  }
  const int st =
      kfl_verify("capi_tiny_config.json", "capi_reports_tiny", 0, 1, 0, 1);
  CHECK(st == KFL_OK);
  std::ifstream rep("capi_reports_tiny/ULYANOV_CLASSIC.json");
  CHECK(rep.good());
  size_t needed = 0;
  REQUIRE(kfl_report_summary("capi_reports_tiny", nullptr, 0, &needed) ==
          KFL_OK);
  std::string buf(needed, '\0');
  REQUIRE(kfl_report_summary("capi_reports_tiny", buf.data(), buf.size(),
                             &needed) == KFL_OK);
  CHECK(buf.find("ULYANOV_CLASSIC") != std::string::npos);
  CHECK(buf.find("PASS") != std::string::npos);
}
