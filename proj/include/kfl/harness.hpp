#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kfl/common.hpp"
#include "kfl/grid_function.hpp"
#include "kfl/lattice.hpp"
#include "kfl/smoothness.hpp"
#include "kfl/spaces.hpp"
#include "kfl/weights.hpp"

namespace kfl {

/// Seeded generator of test functions. Every generated function passes the
/// GridFunction invariants and carries < 1e-12 of its mass outside the box.
struct TestFamily {
  std::string name = "mixed";  // indicator|hat|spline|gaussian|cusp|trig|
                               // smooth|mixed
  std::uint64_t seed = 1;
  int count = 15;
  int dim = 1;
  std::size_t cells = 2048;  // per axis
  double box_lo = -1.0;
  double box_hi = 1.0;

  std::vector<GridFunction> generate() const;
  std::string id_of(int index) const;
};

enum class CaseId {
  MARCHAUD_CLASSIC,
  TIMAN,
  REVERSE_MARCHAUD,
  ULYANOV_CLASSIC,
  ULYANOV_STRENGTHENED,
  KOLYADA,
  SHARP_ULYANOV,
  PROP11A,
  PROP11B,
  PROP13A,
  PROP13B,
  PROP13PRIME_A,
  PROP13PRIME_B,
  KOLULY,
  ULYKOL,
  COR59,
  COR510,
  THM68,
  HOLMSTEDT_PROFILE,
};

CaseId case_id_from_string(const std::string& s);
std::string to_string(CaseId id);
/// Cases excluded from the default gate (coarse multi-d grids).
bool case_is_extended(CaseId id);

struct CaseParams {
  int n = 1;
  double p = 2.0;
  double pstar = 0.0;  // derived from (p, delta, n) when 0
  double delta = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  double gamma_exp = 0.0;  // the gamma of the reverse Marchaud forms
  double kappa = 0.0;      // THM68 modulus order
  int k = 1;
  int m = 1;
  double r0 = 2.0, r1 = 2.0;
  double q0 = 0.0, q1 = 0.0;  // 0 = derived/default where the case allows
  double r = 2.0, rbar = 2.0, s = 2.0;
  SlowlyVarying b;
  SlowlyVarying B;
  PowerSVWeight w;
  double lat_q = 2.0, lat_theta = 0.5, lat_gamma = 0.0;
  bool axis_only = false;
  int dir_samples = 16;
};

struct InequalityCase {
  CaseId id = CaseId::ULYANOV_CLASSIC;
  CaseParams prm;
  std::vector<double> tgrid;  // report scales
  double ceiling = 100.0;
  double t_floor = 0.0009765625;  // 2^-10, measurement floor
  double u_max = 4.0;             // largest measured scale
};

/// Checks every stated hypothesis of the case; violations are data.
std::vector<std::string> parameter_validate(const InequalityCase& c);

/// Thrown by run_case when parameter_validate reports violations.
struct hypothesis_violation : std::runtime_error {
  explicit hypothesis_violation(const std::string& msg)
      : std::runtime_error(msg) {}
};

struct CaseRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string f_id;
};

struct VerificationReport {
  std::string case_id;
  std::string params_json;  // serialized parameter record
  std::string family;
  std::vector<CaseRow> rows;
  double sup_ratio = 0.0;
  std::vector<std::pair<double, double>> per_decade_sup;  // (decade hi, sup)
  bool pass = false;
  bool degenerate = false;
  bool inconclusive = false;
  int rhs_infinite = 0;
  int skipped_out_of_range = 0;
  bool one_sided = false;
  std::string modulus_mode;
  double refined_sup_ratio = std::numeric_limits<double>::quiet_NaN();
  bool refinement_stable = true;
  std::uint64_t seed = 0;
  std::size_t cells = 0;
  double ceiling = 0.0;
  double seconds = 0.0;
  std::string schema_version;

  std::string to_json() const;
  std::string to_csv() const;
};

VerificationReport run_case(const InequalityCase& c, const TestFamily& family,
                            int jobs = 1);

/// run_case plus a doubled-grid re-run; fills refined_sup_ratio and
/// refinement_stable (±5%).
VerificationReport run_case_refined(const InequalityCase& c,
                                    const TestFamily& family, int jobs = 1);

/// K-profile of f measured by k_upper over the s-grid, then quasiconcave
/// regularization.
QuasiconcaveProfile measure_kprofile(const GridFunction& f,
                                     const SpaceSpec& spec, int k,
                                     const std::vector<double>& sgrid);

struct SummaryRow {
  std::string case_id;
  std::string family;
  double constant = 0.0;
  double refined = std::numeric_limits<double>::quiet_NaN();
  std::string stability;  // stable|unstable|single
  bool pass = false;
};

std::vector<SummaryRow> best_constant(
    const std::vector<VerificationReport>& reports);

// ---------------------------------------------------------------------------
// Config-driven suite runner.

struct RunConfig {
  std::string version = "kfl-config/1";
  std::uint64_t seed = 1;
  std::string out = "reports";
  TestFamily family;
  double t_min = 0.00390625;  // 2^-8
  double t_max = 0.25;        // 2^-2
  int per_octave = 2;
  double t_floor = 0.0009765625;  // 2^-10
  double u_max = 4.0;
  double ceiling = 100.0;
  bool refine = true;
  int jobs = 1;
  bool extended = false;
  bool plots = true;
  std::vector<InequalityCase> cases;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig default_config();
  std::string to_json_text() const;
};

struct SuiteResult {
  std::vector<VerificationReport> reports;
  int exit_code = 0;  // 0 pass, 1 fail/inconclusive
};

/// Runs every selected case, writes JSON + CSV (+ SVG) into out_dir.
SuiteResult run_suite(const RunConfig& cfg, const std::string& out_dir);

/// Minimal SVG log-log line plot (t vs lhs and rhs).
std::string svg_loglog_plot(const std::vector<CaseRow>& rows,
                            const std::string& title);

/// Write a file atomically (temp + rename).
void atomic_write(const std::string& path, const std::string& content);

std::string schema_version();

}  // namespace kfl
