/* Copyright The nonbloch Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to libnonbloch. Every function returns an nb_status; on failure the
 * message is available from nb_last_error() on the calling thread. Objects returned
 * through out-pointers are owned by the caller and released with the matching
 * *_free function. Vectors of length d (k, mu, n_hat, ...) are plain double arrays.
 */

#ifndef NONBLOCH_H
#define NONBLOCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nb_status
{
  NB_OK = 0,
  NB_ERR_INVALID_ARGUMENT = 1,
  NB_ERR_DIMENSION = 2,
  NB_ERR_ON_SPECTRUM = 3,
  NB_ERR_NO_CONVERGENCE = 4,
  NB_ERR_EIGENSOLVER = 5,
  NB_ERR_IO = 6,
  NB_ERR_UNSUPPORTED = 7,
  NB_ERR_INTERNAL = 99
} nb_status;

typedef struct nb_complex
{
  double re;
  double im;
} nb_complex;

typedef struct nb_model nb_model;
typedef struct nb_table nb_table;
typedef struct nb_gbz nb_gbz;
typedef struct nb_lattice nb_lattice;
typedef struct nb_eigen nb_eigen;

const char *nb_version(void);
const char *nb_last_error(void);
void nb_set_threads(int n); /* n <= 0 restores the default */
void nb_free(void *p);      /* arrays and strings returned by this library */

/* Models */
nb_status nb_model_load(const char *source, nb_model **out); /* built-in name or JSON path */
nb_status nb_model_from_json(const char *text, nb_model **out);
nb_status nb_model_to_json(const nb_model *m, char **out);
nb_status nb_model_gauge(const nb_model *m, const double *mu, nb_model **out);
void nb_model_free(nb_model *m);
int nb_model_dim(const nb_model *m);
int nb_model_n_orb(const nb_model *m);
double nb_model_scale(const nb_model *m);
/* n_orb x n_orb, column-major. */
nb_status nb_eval_bloch(const nb_model *m, const double *k, const double *mu, nb_complex *out);

/* Tables of named double columns */
size_t nb_table_rows(const nb_table *t);
size_t nb_table_cols(const nb_table *t);
const char *nb_table_column(const nb_table *t, size_t c);
double nb_table_value(const nb_table *t, size_t r, size_t c);
nb_status nb_table_write_csv(const nb_table *t, const char *path);
void nb_table_free(nb_table *t);

/* Supercell sweep: columns k_1..k_d, mu_1..mu_d, re_E, im_E, bloch_weight, band_index. */
nb_status nb_sweep(const nb_model *m, const int *sizes, const double *mu, int twist_per_axis,
                   nb_table **out);
/* Spectrum of one supercell; mode 0 = diluted, 1 = boundary. out holds n_orb * prod(sizes). */
nb_status nb_supercell_spectrum(const nb_model *m, const int *sizes, const double *twist,
                                const double *mu, int mode, nb_complex *out);

/* Diagnostics */
nb_status nb_winding(const nb_model *m, nb_complex e, const double *mu, const double *n_hat,
                     const double *k_perp, int grid, int *out);
/* Columns re_E, im_E, w (nan on the spectrum). Grid is Re-fastest. */
nb_status nb_winding_map(const nb_model *m, double re_min, double re_max, int n_re,
                         double im_min, double im_max, int n_im, const double *mu,
                         const double *n_hat, const double *k_perp, int loop_grid,
                         nb_table **out);
/* phi (Jensen-line form) and g (length d) at one point. */
nb_status nb_potential(const nb_model *m, nb_complex e, const double *mu, int n_perp,
                       double *phi, double *g);
/* Columns mu_1..mu_d, phi, g_1..g_d over `count` mu points (count * d doubles). */
nb_status nb_potential_scan(const nb_model *m, nb_complex e, const double *mus, size_t count,
                            int n_perp, nb_table **out);
/* Columns re_E, im_E, rho from the sample potential of the given eigenvalues. */
nb_status nb_nbf_density(const nb_complex *eigenvalues, size_t count, double re_min,
                         double re_max, int n_re, double im_min, double im_max, int n_im,
                         nb_table **out, double *integral);
/* Columns k_1..k_d, sign, residual. */
nb_status nb_find_nbfs(const nb_model *m, nb_complex e, const double *mu, nb_table **out);

/* Spectral-potential search */
typedef enum nb_verdict
{
  NB_CUSP_OBC = 0,
  NB_PLATEAU_EXCLUDED = 1,
  NB_INCONCLUSIVE = 2
} nb_verdict;

typedef struct nb_search_options
{
  int n_perp;
  double g_tol;
  double step_tol;
  int max_iter;
  double ring_radius;
  double plateau_g_tol;
} nb_search_options;

void nb_search_options_default(nb_search_options *opt);

typedef struct nb_search_result
{
  nb_verdict verdict;
  double mu_min[8];
  double phi_min;
  int iterations;
  int cusp_flag;
  int termination; /* 0 gradient, 1 step, 2 max_iter, 3 failure */
} nb_search_result;

/* opt may be NULL. trajectory (optional): columns mu_1..mu_d, phi, g_1..g_d. */
nb_status nb_classify(const nb_model *m, nb_complex e, const nb_search_options *opt,
                      nb_search_result *out, nb_table **trajectory);

nb_status nb_candidate_grid(const nb_model *m, double spacing, double pad, nb_complex **out,
                            size_t *count);
nb_status nb_predict_obc(const nb_model *m, const nb_complex *candidates, size_t count,
                         const nb_search_options *opt, nb_gbz **out);
size_t nb_gbz_size(const nb_gbz *g);
nb_status nb_gbz_energy(const nb_gbz *g, size_t i, nb_complex *out);
/* One row per (E, NBF): re_E, im_E, re_cand, im_cand, k_1..k_d, mu_1..mu_d. */
nb_status nb_gbz_table(const nb_gbz *g, nb_table **out);
/* Columns re_E, im_E, k, mu, endpoint, near_gbz. */
nb_status nb_saddle_points(const nb_model *m, const nb_gbz *g, double radius, nb_table **out);
void nb_gbz_free(nb_gbz *g);

/* Finite lattices */
nb_status nb_lattice_chain(const nb_model *m, int length, nb_lattice **out);
nb_status nb_lattice_rect(const nb_model *m, int lx, int ly, nb_lattice **out);
nb_status nb_lattice_parallelogram(const nb_model *m, int a, int b, int offset,
                                   nb_lattice **out);
/* sites: count * dim integers. */
nb_status nb_lattice_mask(const nb_model *m, const int *sites, size_t count, nb_lattice **out);
size_t nb_lattice_sites(const nb_lattice *l);
int nb_lattice_dim(const nb_lattice *l);
nb_status nb_lattice_site(const nb_lattice *l, size_t i, int *out);
size_t nb_lattice_warning_count(const nb_lattice *l);
const char *nb_lattice_warning(const nb_lattice *l, size_t i);
/* matrix order = sites * n_orb, column-major. */
size_t nb_lattice_order(const nb_lattice *l);
nb_status nb_lattice_hamiltonian(const nb_lattice *l, nb_complex *out);
void nb_lattice_free(nb_lattice *l);

nb_status nb_diagonalize(const nb_lattice *l, nb_eigen **out);
size_t nb_eigen_count(const nb_eigen *e);
nb_status nb_eigen_value(const nb_eigen *e, size_t i, nb_complex *out);
/* Unit right eigenvector, nb_lattice_order entries. */
nb_status nb_eigen_right(const nb_eigen *e, size_t i, nb_complex *out);
nb_status nb_eigen_left(const nb_eigen *e, size_t i, nb_complex *out);
void nb_eigen_free(nb_eigen *e);

/* Multi-gauge eigenvalues of the lattice's site set; gauges: n_gauges * dim doubles. */
nb_status nb_stable_spectrum(const nb_model *m, const nb_lattice *l, const double *gauges,
                             size_t n_gauges, double kappa_max, nb_complex **out,
                             size_t *count);

nb_status nb_dos(const nb_complex *eigenvalues, size_t count, double im_line,
                 const double *re_grid, size_t n_re, double *out);
/* Indices of interior local maxima of |rho| (NaN nodes skipped), largest first. idx holds n entries. */
nb_status nb_dos_peaks(const double *rho, size_t n, size_t *idx, size_t *count);
/* One value per site. */
nb_status nb_skin_profile(const nb_lattice *l, const nb_eigen *e, double *out);

/* G = (E - H)^-1, order^2 entries column-major. */
nb_status nb_greens(const nb_lattice *l, nb_complex e, nb_complex *out, double *residual);
/* out receives nb_lattice_order energies. */
nb_status nb_extract_from_greens(const nb_lattice *l, const nb_complex *probes, size_t n_probes,
                                 double noise, uint64_t seed, nb_complex *out,
                                 size_t *probes_used);

/* Fourier-Laplace transform of a site field (one amplitude per site) over s points
 * (n_s * dim doubles) and an n_k-point axis per dimension. Columns s_1..s_d, k_1..k_d,
 * abs, arg. */
nb_status nb_flt(const nb_lattice *l, const nb_complex *state, const double *s, size_t n_s,
                 int n_k, int normalize, nb_table **out);
/* Columns s_1..s_d, k_1..k_d, value; largest first. */
nb_status nb_flt_hotspots(const nb_lattice *l, const nb_complex *state, const double *s,
                          size_t n_s, int n_k, double frac, nb_table **out);

#ifdef __cplusplus
}
#endif

#endif /* NONBLOCH_H */
