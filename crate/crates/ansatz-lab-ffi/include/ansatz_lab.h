#ifndef ANSATZ_LAB_H
#define ANSATZ_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define AL_OK 0

#define AL_ERR_NULL 1

#define AL_ERR_INVALID 2

#define AL_ERR_IO 3

#define AL_ERR_BUFFER 4

#define AL_ERR_PANIC 5

// Built or parsed circuit.
typedef struct AlCircuit AlCircuit;

// Pauli-sum observable.
typedef struct AlObservable AlObservable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *al_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message length
// excluding the terminator.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
uintptr_t al_last_error(char *buf, uintptr_t len);

// Builds an ansatz. `family` is a slug such as `"rx-rz-cx-a"`.
//
// # Safety
// `family` must be a NUL-terminated string; `out` must be writable.
int32_t al_circuit_build(const char *family,
                         uintptr_t n_qubits,
                         uintptr_t layers,
                         struct AlCircuit **out);

// Parses a circuit from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
int32_t al_circuit_from_json(const char *json, struct AlCircuit **out);

// Writes the circuit JSON into `buf`. `needed` receives the byte length
// including the terminator; `AL_ERR_BUFFER` if `len` is smaller.
//
// # Safety
// `c` must come from this library; `buf` must be null or valid for `len` bytes.
int32_t al_circuit_to_json(const struct AlCircuit *c, char *buf, uintptr_t len, uintptr_t *needed);

// # Safety
// `c` must be null or come from this library, and not be used afterwards.
void al_circuit_free(struct AlCircuit *c);

// Raw parameter count, CX count and entanglement layers.
//
// # Safety
// `c` must come from this library; the out pointers must be writable.
int32_t al_circuit_resources(const struct AlCircuit *c,
                             uintptr_t *params,
                             uintptr_t *cx,
                             uintptr_t *layers);

// Effective parameter count after the exact rewrite rules.
//
// # Safety
// `c` must come from this library; `out` must be writable.
int32_t al_circuit_effective_params(const struct AlCircuit *c, uintptr_t *out);

// Jacobian rank; `state_mode` nonzero ranks the output state instead of the unitary.
//
// # Safety
// `c` must come from this library; `out` must be writable.
int32_t al_circuit_rank(const struct AlCircuit *c,
                        int32_t state_mode,
                        uintptr_t seeds,
                        uint64_t seed,
                        double rel_tol,
                        uintptr_t *out);

// Parses a Pauli-sum text (`offset c` and `c PAULIS` lines).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
int32_t al_observable_parse(const char *text, struct AlObservable **out);

// Loads a Pauli-sum file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
int32_t al_observable_load(const char *path, struct AlObservable **out);

// # Safety
// `o` must be null or come from this library, and not be used afterwards.
void al_observable_free(struct AlObservable *o);

// # Safety
// `o` must come from this library; `out` must be writable.
int32_t al_observable_n_qubits(const struct AlObservable *o, uintptr_t *out);

// Exact minimum eigenvalue.
//
// # Safety
// `o` must come from this library; `out` must be writable.
int32_t al_observable_exact_minimum(const struct AlObservable *o, double *out);

// `⟨ψ(θ)|O|ψ(θ)⟩` for the circuit applied to `|0…0⟩`.
//
// # Safety
// Handles must come from this library; `theta` must hold `theta_len` values.
int32_t al_expectation(const struct AlCircuit *c,
                       const struct AlObservable *o,
                       const double *theta,
                       uintptr_t theta_len,
                       double *out);

// Multistart Nelder–Mead minimization of `⟨O⟩`. `max_evals == 0` selects
// the default budget. Writes the best energy and `ε = |E_a − E|/|E|`
// (absolute when `E = 0`).
//
// # Safety
// Handles must come from this library; out pointers must be writable.
int32_t al_optimize(const struct AlCircuit *c,
                    const struct AlObservable *o,
                    uintptr_t restarts,
                    uint64_t seed,
                    uintptr_t max_evals,
                    double *energy,
                    double *epsilon);

// Order of the CX layer given as `n_pairs` (control, target) pairs stored
// flat in `pairs`.
//
// # Safety
// `pairs` must hold `2·n_pairs` values; `out` must be writable.
int32_t al_layer_order(const uintptr_t *pairs,
                       uintptr_t n_pairs,
                       uintptr_t n_qubits,
                       uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANSATZ_LAB_H */
