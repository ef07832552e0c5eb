/* C interface of the degen library.
 *
 * All objects are opaque handles released with their _free function.
 * Functions return a degen_status; on failure the message is available
 * from degen_last_error() in the calling thread until the next call.
 */
#ifndef DEGEN_DEGEN_H
#define DEGEN_DEGEN_H

#include <stddef.h>

#if defined(DEGEN_BUILDING_LIBRARY)
#define DEGEN_API __attribute__((visibility("default")))
#else
#define DEGEN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum degen_status {
  DEGEN_OK = 0,
  DEGEN_ERR_ARGUMENT = 1,
  DEGEN_ERR_DIMENSION = 2,
  DEGEN_ERR_MODEL = 3,
  DEGEN_ERR_CERTIFICATION = 4,
  DEGEN_ERR_CONFIG = 5,
  DEGEN_ERR_IO = 6,
  DEGEN_ERR_INTERNAL = 7,
  /* The command ran but at least one of its checks failed; the report is
   * still returned. */
  DEGEN_CHECK_FAILED = 8
} degen_status;

typedef struct degen_config degen_config;
typedef struct degen_report degen_report;
typedef struct degen_eddy degen_eddy;

DEGEN_API const char* degen_version(void);
DEGEN_API const char* degen_status_name(degen_status status);
DEGEN_API const char* degen_last_error(void);

/* Configuration ---------------------------------------------------------- */

DEGEN_API degen_status degen_config_load(const char* path, degen_config** out);
DEGEN_API degen_status degen_config_parse(const char* text, degen_config** out);
DEGEN_API void degen_config_free(degen_config* config);

/* Commands --------------------------------------------------------------- */

typedef struct degen_run_options {
  int has_seed;
  unsigned seed;
  int threads;         /* 0 = use the config value */
  const char* out_dir; /* NULL or "" = use the config value */
} degen_run_options;

/* Number of commands and the name of command i (NULL if out of range). */
DEGEN_API size_t degen_command_count(void);
DEGEN_API const char* degen_command_name(size_t i);

/* Returns DEGEN_OK or DEGEN_CHECK_FAILED with *out set, or an error code
 * with *out = NULL. options may be NULL. */
DEGEN_API degen_status degen_run(const char* command, const degen_config* config,
                                 const degen_run_options* options, degen_report** out);

DEGEN_API int degen_report_pass(const degen_report* report);
/* JSON text owned by the report. indent < 0 gives the compact form. */
DEGEN_API const char* degen_report_json(degen_report* report, int indent);
DEGEN_API void degen_report_free(degen_report* report);

/* Eddy-current problem with scalar materials --------------------------------
 * boxes holds box_count conducting cell boxes as
 * {lox, hix, loy, hiy, loz, hiz}, half-open cell ranges. */

DEGEN_API degen_status degen_eddy_create(int n, const int* boxes, size_t box_count, double sigma, double mu,
                                         degen_eddy** out);
DEGEN_API void degen_eddy_free(degen_eddy* eddy);

typedef struct degen_eddy_dims {
  size_t edges;
  size_t faces;
  size_t h0;
  size_t h2;
  size_t multipliers;
  int components;
} degen_eddy_dims;

DEGEN_API degen_status degen_eddy_get_dims(const degen_eddy* eddy, degen_eddy_dims* out);

typedef struct degen_eddy_constants {
  double c1;
  double k0;
  double k1;
  double c_star;
  double c0_formula;
  double c0_direct;
} degen_eddy_constants;

DEGEN_API degen_status degen_eddy_get_constants(const degen_eddy* eddy, degen_eddy_constants* out);

/* Solves with J(t) = P_H0(j_space) g(t), K = 0 on a uniform grid, where g is
 * the sin^2 ramp from start over width. e_out receives (steps + 1) * edges
 * values, node-major; may be NULL. residuals receives the two relative
 * residuals; may be NULL. */
DEGEN_API degen_status degen_eddy_solve_ramp(const degen_eddy* eddy, const double* j_space, double horizon,
                                             int steps, double rho, double start, double width, double* e_out,
                                             double* residuals);

#ifdef __cplusplus
}
#endif

#endif
