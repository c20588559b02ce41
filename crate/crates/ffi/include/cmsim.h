#ifndef CMSIM_H
#define CMSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CmsimStatus {
  CMSIM_STATUS_OK = 0,
  CMSIM_STATUS_NULL_POINTER = 1,
  CMSIM_STATUS_INVALID_ARGUMENT = 2,
  CMSIM_STATUS_LENGTH_MISMATCH = 3,
  CMSIM_STATUS_INFEASIBLE = 4,
  // A sequence or point is not a valid codeword of the object.
  CMSIM_STATUS_INVALID_INPUT = 5,
  CMSIM_STATUS_INTERNAL = 6,
} CmsimStatus;

// Opaque distribution matcher.
typedef struct CmsimShaper CmsimShaper;

// Opaque Voronoi constellation.
typedef struct CmsimVoronoi CmsimVoronoi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// NUL-terminated message of the last failed call on this thread; valid
// until the next failing call on the same thread.
const char *cmsim_last_error(void);

// Library version as a static NUL-terminated string.
const char *cmsim_version(void);

// Nearest point of a built-in lattice (`Z<n>`, `D<n>`, `E8`, `L24`, `RL24`).
//
// # Safety
// `name` must be a NUL-terminated string; `y` and `out` must point to `dim`
// readable resp. writable doubles.
enum CmsimStatus cmsim_quantize(const char *name, const double *y, double *out, size_t dim);

// Transmission rate in bits per two dimensions of a named preset.
//
// # Safety
// `preset` must be NUL-terminated; `rate` must be writable.
enum CmsimStatus cmsim_compute_rate(const char *preset, double *rate);

// Build the Voronoi code of a pair such as `Z24/8RL24` with q = n. `offset`
// is `generic`, `half-basis` or NULL for the default (generic).
//
// # Safety
// `pair` and a non-null `offset` must be NUL-terminated; `out` must be
// writable. The handle is released with [`cmsim_voronoi_free`].
enum CmsimStatus cmsim_voronoi_new(const char *pair, const char *offset, struct CmsimVoronoi **out);

// # Safety
// `code` must come from [`cmsim_voronoi_new`] and not be used afterwards.
void cmsim_voronoi_free(struct CmsimVoronoi *code);

// Label length k, LRB count q and dimension n.
//
// # Safety
// `code` must be a live handle; the outputs must be writable.
enum CmsimStatus cmsim_voronoi_params(const struct CmsimVoronoi *code,
                                      size_t *k,
                                      size_t *q,
                                      size_t *dim);

// Constellation point of a k-bit label.
//
// # Safety
// `bits` holds `n_bits` bytes, `out` has room for `n_out` doubles.
enum CmsimStatus cmsim_voronoi_encode(const struct CmsimVoronoi *code,
                                      const uint8_t *bits,
                                      size_t n_bits,
                                      double *out,
                                      size_t n_out);

// Label of the nearest constellation point.
//
// # Safety
// `y` holds `n_y` doubles, `bits` has room for `n_bits` bytes.
enum CmsimStatus cmsim_voronoi_decode(const struct CmsimVoronoi *code,
                                      const double *y,
                                      size_t n_y,
                                      uint8_t *bits,
                                      size_t n_bits);

// Max-log LLRs of the q least reliable bits (positive favours 0).
//
// # Safety
// `y` holds `n_y` doubles, `llr` has room for `n_llr` doubles.
enum CmsimStatus cmsim_voronoi_lrb_llr(const struct CmsimVoronoi *code,
                                       const double *y,
                                       size_t n_y,
                                       double sigma2,
                                       double *llr,
                                       size_t n_llr);

// The k − q most reliable bits given decoded LRBs.
//
// # Safety
// `y` holds `n_y` doubles, `lrbs` holds `n_lrbs` bytes, `mrbs` has room for
// `n_mrbs` bytes.
enum CmsimStatus cmsim_voronoi_mrb_hard_decision(const struct CmsimVoronoi *code,
                                                 const double *y,
                                                 size_t n_y,
                                                 const uint8_t *lrbs,
                                                 size_t n_lrbs,
                                                 uint8_t *mrbs,
                                                 size_t n_mrbs);

// Matcher of `kind` (`ccdm` or `ess`) for `alphabet` amplitudes,
// blocklength `n` and `l` input bits.
//
// # Safety
// `kind` must be NUL-terminated; `out` must be writable. Release the
// handle with [`cmsim_shaper_free`].
enum CmsimStatus cmsim_shaper_new(const char *kind,
                                  size_t alphabet,
                                  size_t n,
                                  size_t l,
                                  struct CmsimShaper **out);

// # Safety
// `s` must come from [`cmsim_shaper_new`] and not be used afterwards.
void cmsim_shaper_free(struct CmsimShaper *s);

// Blocklength N and input length L.
//
// # Safety
// `s` must be a live handle; the outputs must be writable.
enum CmsimStatus cmsim_shaper_params(const struct CmsimShaper *s, size_t *n, size_t *l);

// L input bits to N amplitude indices (index j is amplitude 2j + 1).
//
// # Safety
// `bits` holds `n_bits` bytes, `out` has room for `n_out` bytes.
enum CmsimStatus cmsim_shaper_encode(const struct CmsimShaper *s,
                                     const uint8_t *bits,
                                     size_t n_bits,
                                     uint8_t *out,
                                     size_t n_out);

// N amplitude indices back to L bits; fails with `InvalidInput` when the
// sequence is not in the matcher's image.
//
// # Safety
// `seq` holds `n_seq` bytes, `bits` has room for `n_bits` bytes.
enum CmsimStatus cmsim_shaper_decode(const struct CmsimShaper *s,
                                     const uint8_t *seq,
                                     size_t n_seq,
                                     uint8_t *bits,
                                     size_t n_bits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMSIM_H */
