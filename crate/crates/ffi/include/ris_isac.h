#ifndef RIS_ISAC_H
#define RIS_ISAC_H

/* Generated by cbindgen from src/lib.rs. Do not edit by hand. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum RisStatus {
  RIS_STATUS_OK = 0,
  RIS_STATUS_NULL_POINTER = 1,
  RIS_STATUS_INVALID_UTF8 = 2,
  RIS_STATUS_PARSE = 3,
  RIS_STATUS_VALIDATION = 4,
  RIS_STATUS_GEOMETRY = 5,
  RIS_STATUS_INVALID_INPUT = 6,
  RIS_STATUS_INTEGRITY = 7,
  RIS_STATUS_IO = 8,
  RIS_STATUS_BUFFER_TOO_SMALL = 9,
  RIS_STATUS_PANIC = 10,
} RisStatus;

/**
 * Grid metric selector for [`ris_sweep`], passed as `uint32_t`.
 */
typedef enum RisMetric {
  RIS_METRIC_DELTA_SNR_B = 0,
  RIS_METRIC_SENSING_GAIN = 1,
  RIS_METRIC_SECURITY_GAP = 2,
  RIS_METRIC_SCALAR_OBJECTIVE = 3,
} RisMetric;

/**
 * Representative selector for [`ris_result_representative`], passed as
 * `uint32_t`.
 */
typedef enum RisRepresentative {
  RIS_REPRESENTATIVE_BEST_SNR_B = 0,
  RIS_REPRESENTATIVE_BEST_SECURITY_GAP = 1,
  RIS_REPRESENTATIVE_BEST_SENSING_GAIN = 2,
  RIS_REPRESENTATIVE_BALANCED = 3,
} RisRepresentative;

/**
 * Opaque optimization result handle.
 */
typedef struct RisResult RisResult;

/**
 * Opaque scenario handle.
 */
typedef struct RisScenario RisScenario;

/**
 * A RIS deployment: position in meters, orientation in radians, element
 * count and ISAC weight in [0, 1].
 */
typedef struct RisCandidate {
  double x;
  double y;
  double theta;
  uint32_t num_elements;
  double alpha;
} RisCandidate;

/**
 * Frame-averaged metrics of one candidate, all in dB.
 */
typedef struct RisMetrics {
  double snr_b_db;
  double snr_e_db;
  double snr_t_total_db;
  double snr_t_direct_db;
  double delta_snr_b_db;
  double security_gap_db;
  double sensing_gain_db;
} RisMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *ris_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ris_version(void);

/**
 * Creates a scenario with every parameter at its default.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum RisStatus ris_scenario_default(struct RisScenario **out);

/**
 * Parses and validates a scenario from a JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` as for
 * [`ris_scenario_default`].
 */
enum RisStatus ris_scenario_from_json(const char *json, struct RisScenario **out);

/**
 * Loads and validates a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` as for
 * [`ris_scenario_default`].
 */
enum RisStatus ris_scenario_load(const char *path, struct RisScenario **out);

/**
 * Replaces the master seed of a scenario.
 *
 * # Safety
 * `scenario` must be a live handle or null.
 */
enum RisStatus ris_scenario_set_seed(struct RisScenario *scenario, uint64_t seed);

/**
 * Serializes a scenario to JSON. Release the string with
 * [`ris_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for one write.
 */
enum RisStatus ris_scenario_to_json(const struct RisScenario *scenario, char **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void ris_scenario_free(struct RisScenario *scenario);

/**
 * Evaluates one candidate with the default substream layout.
 *
 * # Safety
 * `scenario` must be a live handle; `candidate` and `out` must be valid.
 */
enum RisStatus ris_evaluate(const struct RisScenario *scenario,
                            const struct RisCandidate *candidate,
                            struct RisMetrics *out);

/**
 * Sweeps one metric over the deployment area.
 *
 * `rows` and `cols` are always written on success or on
 * `RIS_STATUS_BUFFER_TOO_SMALL`. Values are row-major with rows along
 * increasing y. Pass `values = NULL` to query the dimensions only.
 *
 * # Safety
 * `scenario` must be a live handle; `values` must be null or hold
 * `capacity` doubles; `rows` and `cols` must be valid.
 */
enum RisStatus ris_sweep(const struct RisScenario *scenario,
                         double theta,
                         uint32_t num_elements,
                         double alpha,
                         double cell_size,
                         uint32_t metric,
                         double *values,
                         size_t capacity,
                         size_t *rows,
                         size_t *cols);

/**
 * Runs the coarse-to-fine search. `search_params_json` may be null for the
 * defaults; omitted fields take their defaults.
 *
 * # Safety
 * `scenario` must be a live handle; `search_params_json` null or a
 * NUL-terminated string; `out` valid for one write.
 */
enum RisStatus ris_optimize(const struct RisScenario *scenario,
                            const char *search_params_json,
                            struct RisResult **out);

/**
 * Loads a saved result and checks its integrity.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid for one write.
 */
enum RisStatus ris_result_load(const char *path, struct RisResult **out);

/**
 * Number of evaluated candidates in a result, or 0 for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t ris_result_len(const struct RisResult *result);

/**
 * Number of search rounds executed, or 0 for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t ris_result_rounds(const struct RisResult *result);

/**
 * Copies one representative solution.
 *
 * # Safety
 * `result` must be a live handle; `candidate` and `metrics` valid.
 */
enum RisStatus ris_result_representative(const struct RisResult *result,
                                         uint32_t which,
                                         struct RisCandidate *candidate,
                                         struct RisMetrics *metrics);

/**
 * Copies the evaluated candidate at `index`.
 *
 * # Safety
 * `result` must be a live handle; `candidate` and `metrics` valid.
 */
enum RisStatus ris_result_candidate(const struct RisResult *result,
                                    size_t index,
                                    struct RisCandidate *candidate,
                                    struct RisMetrics *metrics);

/**
 * Serializes a result in the same JSON format the CLI writes. Release the
 * string with [`ris_string_free`].
 *
 * # Safety
 * `result` must be a live handle; `out` valid for one write.
 */
enum RisStatus ris_result_to_json(const struct RisResult *result, char **out);

/**
 * Releases a result. Null is ignored.
 *
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void ris_result_free(struct RisResult *result);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ris_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIS_ISAC_H */
