#ifndef MOGFADE_H
#define MOGFADE_H

/* Generated by cbindgen from mogfade-capi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Anything other than `MF_STATUS_OK` leaves out-parameters
 untouched; call `mf_last_error` for a diagnostic.
 */
typedef enum {
  MF_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  MF_STATUS_NULL_ARG = 1,
  /*
   Malformed UTF-8 or JSON input.
   */
  MF_STATUS_PARSE = 2,
  /*
   A numeric routine left its supported regime (domain, overflow,
   divergence, non-convergence, quadrature failure, pdf pole).
   */
  MF_STATUS_NUMERIC = 3,
  /*
   Structurally valid input that fails semantic checks.
   */
  MF_STATUS_INVALID = 4,
  MF_STATUS_IO = 5,
  /*
   A panic was caught at the boundary; state may be stale, inputs are
   untouched.
   */
  MF_STATUS_PANIC = 6,
} MfStatus;

/*
 A fitted Gaussian-mixture envelope model. Opaque; create via
 `mf_model_from_json` or `mf_model_fit`, release via `mf_model_free`.
 */
typedef struct MfModel MfModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message from the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *mf_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *mf_version(void);

/*
 Parses a model from JSON: either a bare model document or a `fit`
 artifact wrapping one under `"model"`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
MfStatus mf_model_from_json(const char *json, MfModel **out);

/*
 Serializes the model as a JSON document. The returned string must be
 released with `mf_string_free`.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_model_to_json(const MfModel *model, char **out);

/*
 Draws envelope samples from the channel described by `channel_json` and
 fits a `components`-term mixture to them. `fit_config_json` may be null
 for defaults; `n_train` of 0 selects the default training size.

 # Safety
 String arguments must be NUL-terminated (or null where allowed); `out`
 must be a valid pointer.
 */
MfStatus mf_model_fit(const char *channel_json,
                      size_t components,
                      size_t n_train,
                      uint64_t seed,
                      const char *fit_config_json,
                      MfModel **out);

/*
 Releases a model handle. Null is a no-op.

 # Safety
 `model` must be null or a pointer from this library, not yet freed.
 */
void mf_model_free(MfModel *model);

/*
 Releases a string returned by this library. Null is a no-op.

 # Safety
 `s` must be null or a pointer from this library, not yet freed.
 */
void mf_string_free(char *s);

/*
 Number of mixture components.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_model_components(const MfModel *model, size_t *out);

/*
 Mean SNR the model is scaled to.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_model_avg_snr(const MfModel *model, double *out);

/*
 Copies the model, rescaled to a new mean SNR.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_model_with_avg_snr(const MfModel *model, double avg_snr, MfModel **out);

/*
 P[γ < gamma_th].

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_outage(const MfModel *model, double gamma_th, double *out);

/*
 Ergodic capacity in bits/s for the given bandwidth in Hz.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_capacity(const MfModel *model, double bandwidth, double *out);

/*
 E[γⁿ] for n up to 4.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_raw_moment(const MfModel *model, uint32_t n, double *out);

/*
 Amount of fading, Var[γ]/E[γ]².

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_amount_of_fading(const MfModel *model, double *out);

/*
 MGF E[e^{−sγ}] at `s ≥ 0`.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_mgf(const MfModel *model, double s, double *out);

/*
 Symbol error rate for coherent binary signaling with argument scale `g`
 (1.0 for BPSK, 0.5 for orthogonal BFSK) over `branches` MRC branches.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_ser_binary(const MfModel *model, double g, size_t branches, double *out);

/*
 Symbol error rate for M-ary PSK over `branches` MRC branches.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_ser_mpsk(const MfModel *model, uint32_t m, size_t branches, double *out);

/*
 Symbol error rate for square M-QAM over `branches` MRC branches.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_ser_qam(const MfModel *model, uint32_t m, size_t branches, double *out);

/*
 Detection threshold achieving false-alarm probability `pf` for
 time-bandwidth product `u`.

 # Safety
 `out` must be a valid pointer.
 */
MfStatus mf_threshold_from_pf(uint32_t u, double pf, double *out);

/*
 False-alarm probability of an energy detector at threshold `lambda`.

 # Safety
 `out` must be a valid pointer.
 */
MfStatus mf_false_alarm_prob(uint32_t u, double lambda, double *out);

/*
 Average detection probability, truncating the series at `terms`.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_avg_pd(const MfModel *model, uint32_t u, double lambda, size_t terms, double *out);

/*
 Upper bound on the detection-probability mass dropped by truncating at
 `terms`.

 # Safety
 `model` must be a live handle; `out` must be a valid pointer.
 */
MfStatus mf_pd_truncation_bound(const MfModel *model,
                                uint32_t u,
                                double lambda,
                                size_t terms,
                                double *out);

/*
 KL divergence (nats) from the channel's exact envelope density to the
 model's, over the positive axis.

 # Safety
 `channel_json` must be a NUL-terminated string; `model` must be a live
 handle; `out` must be a valid pointer.
 */
MfStatus mf_kl_divergence(const char *channel_json, const MfModel *model, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOGFADE_H */
