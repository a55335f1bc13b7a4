#ifndef FERMGRID_H
#define FERMGRID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FgStatus {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_ARGUMENT = 2,
  FG_STATUS_VERIFICATION_FAILED = 3,
  FG_STATUS_INTERNAL = 4,
} FgStatus;

typedef enum FgMethod {
  FG_METHOD_OURS = 0,
  FG_METHOD_ONED_FSWAP = 1,
} FgMethod;

typedef enum FgFfftVariant {
  FG_FFFT_VARIANT_FSWAP_BASELINE = 0,
  FG_FFFT_VARIANT_FP_SANDWICH = 1,
  FG_FFFT_VARIANT_GAMMA_SANDWICH = 2,
} FgFfftVariant;

typedef enum FgEncoding {
  FG_ENCODING_JORDAN_WIGNER = 0,
  FG_ENCODING_BRAVYI_KITAEV = 1,
  FG_ENCODING_PARITY = 2,
} FgEncoding;

// Opaque compiled circuit.
typedef struct FgCircuit FgCircuit;

// Resource counts of a circuit after CNOT compilation.
typedef struct FgMetrics {
  size_t cnot_depth;
  size_t gates;
  size_t idle;
  size_t qubits;
  size_t spacetime;
} FgMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty when none. The
// pointer stays valid until the next failing call on the same thread.
const char *fg_last_error(void);

// Compiles the fermionic permutation sending mode `i` to `map[i]` on an
// `side x side` grid. `method` is an `FgMethod` value.
//
// # Safety
// `map` must point to `len` readable values and `out` must be writable.
enum FgStatus fg_compile_fperm(const size_t *map,
                               size_t len,
                               size_t side,
                               uint32_t method,
                               struct FgCircuit **out);

// Builds the grid FFT. `variant` is an `FgFfftVariant` value.
//
// # Safety
// `out` must be writable.
enum FgStatus fg_build_ffft(size_t side, uint32_t variant, struct FgCircuit **out);

// Encoding conversion circuit on the order-`k` Hilbert layout. `from` and
// `to` are `FgEncoding` values.
//
// # Safety
// `out` must be writable.
enum FgStatus fg_convert_encoding(uint32_t from, uint32_t to, uint32_t k, struct FgCircuit **out);

// # Safety
// `circuit` must be a live handle and `out` writable.
enum FgStatus fg_circuit_metrics(const struct FgCircuit *circuit, struct FgMetrics *out);

// Analytic fidelity estimate at two-qubit error rate `p2q`.
//
// # Safety
// `m` must be readable and `out` writable.
enum FgStatus fg_estimate_fidelity(const struct FgMetrics *m, double p2q, double *out);

// Checks that the circuit conjugates every Majorana as the permutation
// prescribes. `FG_STATUS_VERIFICATION_FAILED` when any string differs.
//
// # Safety
// `circuit` must be a live handle; `map` must point to `len` values.
enum FgStatus fg_verify_fperm(const struct FgCircuit *circuit,
                              const size_t *map,
                              size_t len,
                              size_t side);

// Circuit as JSON; release with `fg_string_free`.
//
// # Safety
// `circuit` must be a live handle and `out` writable.
enum FgStatus fg_circuit_to_json(const struct FgCircuit *circuit, char **out);

// # Safety
// `s` must come from `fg_circuit_to_json` or be null.
void fg_string_free(char *s);

// # Safety
// `circuit` must come from this library or be null; it is invalid after.
void fg_circuit_free(struct FgCircuit *circuit);

// Null-terminated crate version.
const char *fg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FERMGRID_H */
