/* C interface to the cyclesync library. All objects are opaque handles owned by the caller
 * and released with the matching *_free function. Every function returning csync_status
 * leaves a thread-local message retrievable with csync_last_error(). Handle out-parameters are
 * set to NULL when a call fails. */
#ifndef CYCLESYNC_H
#define CYCLESYNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(CYCLESYNC_BUILDING)
#define CSYNC_API __attribute__((visibility("default")))
#else
#define CSYNC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csync_status {
    CSYNC_OK = 0,
    CSYNC_INVALID_ARGUMENT = 1,
    CSYNC_NON_OSCILLATORY = 2,
    CSYNC_ZERO_OUTPUT = 3,
    CSYNC_MISSING_FINAL_DEMAND = 4,
    CSYNC_DISCONNECTED = 5,
    CSYNC_COMPLEX_SPECTRUM = 6,
    CSYNC_NON_CONVERGENCE = 7,
    CSYNC_REDUCIBLE = 8,
    CSYNC_NUMERICAL_BLOWUP = 9,
    CSYNC_TOO_FEW_PEAKS = 10,
    CSYNC_PHASE_UNDEFINED = 11,
    CSYNC_DEGENERATE_SERIES = 12,
    CSYNC_ENTRAINMENT_FAILURE = 13,
    CSYNC_NOT_OSCILLATING = 14,
    CSYNC_DEGENERATE_TANGENT = 15,
    CSYNC_ILL_CONDITIONED = 16,
    CSYNC_CONSISTENCY_BREACH = 17,
    CSYNC_DUPLICATE_KEY = 18,
    CSYNC_MALFORMED_ROW = 19,
    CSYNC_SERIES_TOO_SHORT = 20,
    CSYNC_MISSING_JOIN_YEAR = 21,
    CSYNC_NON_POSITIVE_VALUE = 22,
    CSYNC_INSUFFICIENT_OVERLAP = 23,
    CSYNC_EMPTY_GROUP = 24,
    CSYNC_IO = 25,
    CSYNC_CONFIG = 26,
    CSYNC_INTERNAL = 99
} csync_status;

/* Coarse classes; the CLI uses them as exit codes. */
typedef enum csync_error_kind {
    CSYNC_KIND_NONE = 0,
    CSYNC_KIND_CONFIG = 2,
    CSYNC_KIND_NUMERICAL = 3,
    CSYNC_KIND_DATA = 4
} csync_error_kind;

typedef struct csync_network csync_network;
typedef struct csync_spectrum csync_spectrum;
typedef struct csync_trajectory csync_trajectory;
typedef struct csync_orbit csync_orbit;
typedef struct csync_params csync_params;
typedef struct csync_table csync_table;

CSYNC_API const char* csync_version(void);
CSYNC_API const char* csync_last_error(void);
CSYNC_API const char* csync_status_name(csync_status status);
CSYNC_API csync_error_kind csync_status_kind(csync_status status);

/* Agent dynamics. */
CSYNC_API csync_status csync_steady_state_alpha0(double alpha1, double alpha2, double delta, double* alpha0);
CSYNC_API csync_status csync_linear_frequency(double alpha1, double alpha2, double delta, double* psi);
/* 0 stable node, 1 stable focus, 2 limit cycle, 3 unstable other */
CSYNC_API csync_status csync_classify(double alpha1, double alpha2, double delta, int* stability);

/* Networks. topology: complete | star | chain | two_clique (n ignored for two_clique, 3+3 cliques). */
CSYNC_API csync_status csync_network_topology(const char* topology, int n, double eps, csync_network** out);
CSYNC_API csync_status csync_network_two_clique(int clique_a, int clique_b, int bridge_a, int bridge_b, double eps,
                                                csync_network** out);
CSYNC_API csync_status csync_network_from_matrix(const double* w_row_major, int n, csync_network** out);
CSYNC_API csync_status csync_network_from_flows(const char* csv_path, csync_network** out);
CSYNC_API csync_status csync_network_uniform(int n, csync_network** out);
CSYNC_API int csync_network_size(const csync_network* net);
CSYNC_API csync_status csync_network_weight(const csync_network* net, int i, int j, double* w);
CSYNC_API const char* csync_network_label(const csync_network* net, int i);
CSYNC_API csync_status csync_network_output(const csync_network* net, int i, double* output);
/* out receives n values. */
CSYNC_API csync_status csync_network_centrality(const csync_network* net, double* out);
CSYNC_API void csync_network_free(csync_network* net);

/* Spectrum of I - W. Aborts with CSYNC_COMPLEX_SPECTRUM when an imaginary part exceeds max_imag. */
CSYNC_API csync_status csync_spectrum_compute(const csync_network* net, double max_imag, csync_spectrum** out);
/* Symmetric normalized Laplacian K^-1/2 L K^-1/2 of a topology network, coupling eps. */
CSYNC_API csync_status csync_spectrum_laplacian(const csync_network* net, csync_spectrum** out);
CSYNC_API int csync_spectrum_size(const csync_spectrum* spec);
CSYNC_API csync_status csync_spectrum_eigenvalue(const csync_spectrum* spec, int k, double* re, double* im);
/* out receives n values: column k of Q. */
CSYNC_API csync_status csync_spectrum_vector(const csync_spectrum* spec, int k, double* out);
CSYNC_API csync_status csync_spectrum_coupling(const csync_spectrum* spec, double* coupling);
/* Interleaved (x_i, y_i) vectors of length 2n. */
CSYNC_API csync_status csync_to_eigenbasis(const csync_spectrum* spec, const double* xi, double* zeta);
CSYNC_API csync_status csync_from_eigenbasis(const csync_spectrum* spec, const double* zeta, double* xi);
CSYNC_API void csync_spectrum_free(csync_spectrum* spec);

/* Simulation. alpha1 holds n values; sigma_* are AR(1) innovation scales. */
typedef struct csync_sim_options {
    int steps;
    int burn_in;
    int retain;
    int stride;
    uint64_t seed;
    double alpha2;
    double delta;
    double rho_u, sigma_u;
    double rho_v, sigma_v;
    double rho_z, sigma_z;
} csync_sim_options;

CSYNC_API void csync_sim_options_default(csync_sim_options* opt);
CSYNC_API csync_status csync_simulate(const csync_network* net, const double* alpha1, const csync_sim_options* opt,
                                      csync_trajectory** out);
CSYNC_API int csync_trajectory_steps(const csync_trajectory* traj);
CSYNC_API int csync_trajectory_nodes(const csync_trajectory* traj);
CSYNC_API int csync_trajectory_first_step(const csync_trajectory* traj);
/* var: 'x' or 'y'. */
CSYNC_API csync_status csync_trajectory_value(const csync_trajectory* traj, char var, int step, int node, double* out);
CSYNC_API csync_status csync_trajectory_period(const csync_trajectory* traj, int node, double* period);
CSYNC_API csync_status csync_trajectory_write_csv(const csync_trajectory* traj, const char* path);
CSYNC_API void csync_trajectory_free(csync_trajectory* traj);

/* Synchronized orbit and Floquet-type exponents. */
CSYNC_API csync_status csync_orbit_create(double alpha1, double alpha2, double delta, int steps, int burn_in,
                                          csync_orbit** out);
CSYNC_API csync_status csync_orbit_period(const csync_orbit* orbit, double* period);
CSYNC_API csync_status csync_orbit_lyapunov(const csync_orbit* orbit, double k, int burn_in, double* mu1, double* mu2);
CSYNC_API void csync_orbit_free(csync_orbit* orbit);

/* Key/value configuration for csync_run; keys look like "section.key". */
CSYNC_API csync_status csync_params_create(csync_params** out);
CSYNC_API csync_status csync_params_set(csync_params* params, const char* key, const char* value);
CSYNC_API void csync_params_free(csync_params* params);

CSYNC_API int csync_experiment_count(void);
CSYNC_API const char* csync_experiment_name(int index);
CSYNC_API const char* csync_experiment_description(int index);
/* Newline-separated "key = default" lines for an experiment, or NULL if unknown. */
CSYNC_API const char* csync_experiment_defaults(const char* name);

/* Runs an experiment, writing its files under out_dir. The summary table may be NULL. */
CSYNC_API csync_status csync_run(const char* experiment, const csync_params* params, const char* out_dir, int jobs,
                                 csync_table** summary);

CSYNC_API int csync_table_rows(const csync_table* table);
CSYNC_API int csync_table_cols(const csync_table* table);
CSYNC_API const char* csync_table_column(const csync_table* table, int col);
/* Numeric cells return the value; text cells return NaN. */
CSYNC_API double csync_table_value(const csync_table* table, int row, int col);
/* Text rendering of any cell. */
CSYNC_API const char* csync_table_text(const csync_table* table, int row, int col);
CSYNC_API int csync_table_file_count(const csync_table* table);
CSYNC_API const char* csync_table_file(const csync_table* table, int index);
CSYNC_API csync_status csync_table_write_csv(const csync_table* table, const char* path);
CSYNC_API void csync_table_free(csync_table* table);

#ifdef __cplusplus
}
#endif

#endif
