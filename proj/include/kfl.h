/* kfl - function-space numerics: rearrangements, Lorentz-type norms,
 * smoothness moduli, K-functional estimates, weight conditions and the
 * inequality verification harness.
 *
 * C API of the shared library. All objects are opaque handles; every
 * function returns a status code (KFL_OK on success) and leaves a
 * human-readable message for the calling thread in kfl_last_error().
 */
#ifndef KFL_H
#define KFL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  KFL_OK = 0,
  KFL_ERR_VERIFY = 1,   /* verification suite reported failures */
  KFL_ERR_INVALID = 2,  /* malformed input, literal or config */
  KFL_ERR_DOMAIN = 3,   /* mathematical precondition violated */
  KFL_ERR_RANGE = 4,    /* argument outside the admissible range */
  KFL_ERR_INTERNAL = 5
};

typedef struct kfl_gridfn kfl_gridfn;
typedef struct kfl_profile kfl_profile;

const char* kfl_version(void);

/* Message describing the most recent failure on this thread. */
const char* kfl_last_error(void);

/* --- grid functions ----------------------------------------------------- */

/* Load from CSV (3-line header) or packed binary, detected by content. */
int kfl_gridfn_load(const char* path, kfl_gridfn** out);

/* dim in {1,2,3}; lo/hi/counts arrays of length dim; values row-major of
 * length prod(counts). */
int kfl_gridfn_create(int dim, const double* lo, const double* hi,
                      const size_t* counts, const double* values,
                      kfl_gridfn** out);

int kfl_gridfn_save(const kfl_gridfn* f, const char* path);
int kfl_gridfn_size(const kfl_gridfn* f, size_t* out);
void kfl_gridfn_free(kfl_gridfn* f);

/* --- rearrangement calculus --------------------------------------------- */

/* Exact non-increasing rearrangement of |f|. */
int kfl_rearrange(const kfl_gridfn* f, kfl_profile** out);

/* t -> (1/t) integral_0^t g, exact on step profiles. */
int kfl_profile_double_star(const kfl_profile* g, kfl_profile** out);

/* t -> g**(t) - g(t). */
int kfl_profile_oscillation(const kfl_profile* g, kfl_profile** out);

int kfl_profile_eval(const kfl_profile* g, double t, double* out);
int kfl_profile_load(const char* path, kfl_profile** out);
int kfl_profile_save(const kfl_profile* g, const char* path);
void kfl_profile_free(kfl_profile* g);

/* --- norms and smoothness ------------------------------------------------ */

/* space_literal: Lebesgue(p=2) | Lorentz(p=2,r=1) | LK(p=2,r=2,b=log^0.5) |
 * Lambda(r=2,w=t^0.0*log^1) | Gamma(...) | Scone(...) |
 * SGage(base=Lorentz(p=2,r=2);v=t^-0.5).
 * Divergent norms report +infinity in *out with KFL_OK. */
int kfl_space_norm(const char* space_literal, const kfl_gridfn* f,
                   double* out);

/* Modulus of smoothness of order kappa at each scale ts[0..nt). */
int kfl_modulus(const kfl_gridfn* f, double kappa, const char* space_literal,
                const double* ts, size_t nt, int axis_only, double* out);

/* K-functional upper estimate K_0(f, s; X, W^k X) at each ss[0..ns). */
int kfl_kfun(const kfl_gridfn* f, int k, const char* space_literal,
             const double* ss, size_t ns, double* out);

/* --- weights -------------------------------------------------------------- */

/* cond: "Br" | "Brstar" | "Binftystar" (r ignored for the last).
 * weight_literal: t^A or t^A*log^G. */
int kfl_weight_check(const char* weight_literal, const char* cond, double r,
                     int* holds, double* constant);

/* --- Holmstedt evaluators -------------------------------------------------- */

/* profile_csv: two-column CSV of a quasiconcave K-profile (t,K).
 * lattice_literal: F(q=2,theta=0.5,gamma=0). form_b == 0 evaluates the
 * A-form right-hand side, otherwise the B-form. */
int kfl_holmstedt_eval(const char* profile_csv, const char* lattice_literal,
                       int form_b, const double* ts, size_t nt, double* out);

/* --- verification suite ---------------------------------------------------- */

/* config_path NULL runs the bundled default suite. seed == 0 keeps the
 * config's seed; jobs <= 0 keeps the config's jobs. Writes per-case JSON,
 * CSV (and SVG when plots != 0) plus summary.json into out_dir.
 * Returns KFL_OK when every case passes, KFL_ERR_VERIFY otherwise. */
int kfl_verify(const char* config_path, const char* out_dir, uint64_t seed,
               int jobs, int extended, int plots);

/* The bundled default configuration as JSON text (two-call size pattern). */
int kfl_default_config_json(char* buffer, size_t cap, size_t* needed);

/* Aggregate the per-case reports under dir into a summary CSV. */
int kfl_report_summary(const char* dir, char* buffer, size_t cap,
                       size_t* needed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KFL_H */
