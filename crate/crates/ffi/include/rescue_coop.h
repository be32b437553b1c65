#ifndef RESCUE_COOP_H
#define RESCUE_COOP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  // Scenario or mission text could not be parsed.
  RC_STATUS_PARSE = 3,
  // A value is out of its allowed range.
  RC_STATUS_RANGE = 4,
  RC_STATUS_IO = 5,
  // The closed-form model rejected its inputs.
  RC_STATUS_MODEL = 6,
  // The world could not be built.
  RC_STATUS_SIM = 7,
  RC_STATUS_INDEX_OUT_OF_RANGE = 8,
  RC_STATUS_PANIC = 9,
} RcStatus;

typedef enum RcRobotClass {
  RC_ROBOT_CLASS_CARRIER = 0,
  RC_ROBOT_CLASS_SUPPLIER = 1,
  RC_ROBOT_CLASS_OBSERVER = 2,
} RcRobotClass;

typedef enum RcPhase {
  RC_PHASE_TO_SITE = 0,
  RC_PHASE_RESCUING = 1,
  RC_PHASE_TO_SHELTER = 2,
  RC_PHASE_UNLOADING = 3,
  RC_PHASE_TO_CHARGE = 4,
  RC_PHASE_CHARGING = 5,
  RC_PHASE_IDLE = 6,
} RcPhase;

// Opaque validated scenario.
typedef struct RcScenario RcScenario;

// Opaque simulation state.
typedef struct RcWorld RcWorld;

typedef struct RcTrialMetrics {
  uint64_t rescued_units;
  double total_energy_spent;
  // NaN when nothing was rescued.
  double energy_per_unit;
  uint64_t rounds_completed;
} RcTrialMetrics;

typedef struct RcRobot {
  uint32_t id;
  enum RcRobotClass class_;
  enum RcPhase phase;
  double x;
  double y;
  double energy;
  uint32_t load;
  uint32_t capacity;
} RcRobot;

typedef struct RcProfile {
  double v;
  double com;
  // `INFINITY` for whole-map perception.
  double sen;
  double eng;
  double res;
  double cap;
} RcProfile;

typedef struct RcProfileSet {
  struct RcProfile carrier;
  struct RcProfile supplier;
  struct RcProfile observer;
} RcProfileSet;

typedef struct RcComposition {
  uint32_t carrier;
  uint32_t supplier;
  uint32_t observer;
} RcComposition;

// Mission parameters. `requirement` points at `requirement_len` values and
// may be null when the length is zero.
typedef struct RcMission {
  double t_n;
  double l;
  uint32_t n;
  double c;
  double t_c;
  double e_c;
  double e_t;
  const double *requirement;
  uintptr_t requirement_len;
} RcMission;

typedef struct RcAnalyticReport {
  double lambda_round;
  double expected_rounds;
  double throughput_per_round;
  double expected_utility;
  double expected_energy;
  double encounter_rate;
} RcAnalyticReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if the last call
// succeeded. Release with [`rc_string_free`].
char *rc_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library.
void rc_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *rc_version(void);

// Parses and validates scenario TOML. `origin` labels error messages and
// may be null.
//
// # Safety
// `toml` and `origin` must be null or NUL-terminated; `out` must be writable.
enum RcStatus rc_scenario_from_toml(const char *toml, const char *origin, struct RcScenario **out);

// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum RcStatus rc_scenario_load(const char *path, struct RcScenario **out);

// Number of built-in reproduction scenarios.
uintptr_t rc_builtin_scenario_count(void);

// # Safety
// `out` must be writable.
enum RcStatus rc_scenario_builtin(uintptr_t index, struct RcScenario **out);

// Scenario name. Release with [`rc_string_free`].
//
// # Safety
// `scenario` must be a live handle.
char *rc_scenario_name(const struct RcScenario *scenario);

// # Safety
// `scenario` must be null or a handle not yet freed.
void rc_scenario_free(struct RcScenario *scenario);

// Runs one full seeded trial.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum RcStatus rc_run_trial(const struct RcScenario *scenario,
                           uint64_t seed,
                           struct RcTrialMetrics *out);

// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum RcStatus rc_world_new(const struct RcScenario *scenario, uint64_t seed, struct RcWorld **out);

// Advances up to `ticks` ticks, stopping at the end of the mission.
//
// # Safety
// `world` must be a live handle.
enum RcStatus rc_world_step(struct RcWorld *world, uint64_t ticks);

// Simulated seconds elapsed; NaN for a null handle.
//
// # Safety
// `world` must be null or a live handle.
double rc_world_clock(const struct RcWorld *world);

// # Safety
// `world` must be null or a live handle.
bool rc_world_is_finished(const struct RcWorld *world);

// # Safety
// `world` must be null or a live handle.
uintptr_t rc_world_robot_count(const struct RcWorld *world);

// # Safety
// `world` must be a live handle; `out` must be writable.
enum RcStatus rc_world_robot(const struct RcWorld *world, uintptr_t index, struct RcRobot *out);

// Metrics of the world as it stands.
//
// # Safety
// `world` must be a live handle; `out` must be writable.
enum RcStatus rc_world_metrics(const struct RcWorld *world, struct RcTrialMetrics *out);

// # Safety
// `world` must be null or a handle not yet freed.
void rc_world_free(struct RcWorld *world);

// Fills `out` with the built-in capability profiles.
//
// # Safety
// `out` must be writable.
enum RcStatus rc_default_profiles(struct RcProfileSet *out);

// Closed-form evaluation of one composition. `profiles` may be null for the
// built-in profiles.
//
// # Safety
// `mission` must be valid; `profiles` null or valid; `out` writable.
enum RcStatus rc_analytic_evaluate(struct RcComposition composition,
                                   const struct RcMission *mission,
                                   const struct RcProfileSet *profiles,
                                   struct RcAnalyticReport *out);

// Best composition of exactly `budget` robots, or of one to `budget` robots
// when `at_most` is set. `profiles` may be null.
//
// # Safety
// `mission` must be valid; `profiles` null or valid; outputs writable.
enum RcStatus rc_optimize(uint32_t budget,
                          bool at_most,
                          const struct RcMission *mission,
                          const struct RcProfileSet *profiles,
                          struct RcComposition *best,
                          struct RcAnalyticReport *best_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESCUE_COOP_H */
