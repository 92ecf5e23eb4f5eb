/* C interface to the nonlocal touch-down laboratory.
 *
 * All entry points return 0 on success or a nonzero code mirroring the CLI
 * exit codes: 2 bad configuration / input, 3 solver abort (non-finite
 * state), 4 step budget exhausted before quench, 5 hard verification
 * failure, 1 anything else.  mq_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef MEMS_QUENCH_H
#define MEMS_QUENCH_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mq_config mq_config; /* parsed flat key=value configuration */
typedef struct mq_run mq_run;       /* completed run directory, loaded */

#define MQ_OK 0
#define MQ_ERR 1
#define MQ_ERR_CONFIG 2
#define MQ_ERR_NAN 3
#define MQ_ERR_MAX_STEPS 4
#define MQ_ERR_VERIFY 5

const char* mq_last_error(void);
const char* mq_version(void);

/* configuration ---------------------------------------------------------- */
mq_config* mq_config_load(const char* path);
mq_config* mq_config_parse(const char* text);
mq_config* mq_config_clone(const mq_config* cfg);
int mq_config_set(mq_config* cfg, const char* key, const char* value);
/* copies the raw value into buf (truncated to buflen-1); 0 on success,
 * MQ_ERR_CONFIG when the key is absent */
int mq_config_get(const mq_config* cfg, const char* key, char* buf,
                  size_t buflen);
void mq_config_free(mq_config* cfg);

/* simulate: integrate to quench and write a run directory ----------------- */
int mq_simulate(const mq_config* cfg, const char* out_dir);

/* completed runs ---------------------------------------------------------- */
mq_run* mq_run_open(const char* run_dir);
void mq_run_free(mq_run* run);
const char* mq_run_status(const mq_run* run);
double mq_run_quench_time(const mq_run* run);  /* fitted T; NaN if absent */
double mq_run_theta_star(const mq_run* run);   /* fitted rate constant */

/* similarity frame + spectral components at the snapshot nearest t -------- */
int mq_transform(const mq_run* run, double t, const char* out_prefix);
int mq_decompose(const mq_run* run, double t, const char* out_prefix);

/* theorem diagnostics; writes reports beside the run, exit 5 on a hard
 * invariant failure */
int mq_verify(const char* run_dir);

/* finite-dimensional handle of the constructed initial data --------------- */
int mq_gamma_map(const mq_config* cfg, double d0, const double* d1, int n,
                 double* q0_out, double* q1_out);

/* cartesian sweep: overrides like "gamma=0,0.1 lambda=1" ------------------- */
int mq_sweep(const mq_config* cfg, const char* overrides, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* MEMS_QUENCH_H */
