#ifndef HOTEL_AUCTION_H
#define HOTEL_AUCTION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HaStatus {
  HA_STATUS_OK = 0,
  HA_STATUS_NULL_POINTER = 1,
  HA_STATUS_INVALID_UTF8 = 2,
  HA_STATUS_PARSE = 3,
  HA_STATUS_INVALID_INPUT = 4,
  /**
   * The request was well formed but cannot be carried out, for example
   * brute force on an instance above its enumeration cap.
   */
  HA_STATUS_REFUSED = 5,
  HA_STATUS_PANIC = 6,
} HaStatus;

typedef enum HaSolver {
  HA_SOLVER_EXACT = 0,
  HA_SOLVER_GREEDY = 1,
  HA_SOLVER_FCFS = 2,
  HA_SOLVER_BRUTE = 3,
} HaSolver;

typedef enum HaObjective {
  HA_OBJECTIVE_INCOME = 0,
  HA_OBJECTIVE_PROFIT = 1,
} HaObjective;

/**
 * Accepted-price distribution.
 */
typedef struct HaDistribution HaDistribution;

/**
 * Forward auction with its bids.
 */
typedef struct HaInstance HaInstance;

/**
 * Expected profit and acceptance probability are exact fractions.
 */
typedef struct HaPricingDecision {
  int64_t price_cents;
  int64_t expected_profit_cents_num;
  int64_t expected_profit_cents_den;
  int64_t acceptance_num;
  int64_t acceptance_den;
  bool abstain;
} HaPricingDecision;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ha_last_error_message(void);

/**
 * Builds a distribution from `len` accepted prices in cents.
 *
 * # Safety
 * `prices_cents` must point to `len` readable values; `out` must be writable.
 */
enum HaStatus ha_distribution_new(const int64_t *prices_cents,
                                  size_t len,
                                  struct HaDistribution **out);

/**
 * # Safety
 * `dist` must come from [`ha_distribution_new`] and not be freed twice.
 */
void ha_distribution_free(struct HaDistribution *dist);

/**
 * Expected-profit maximizing offer for a hotel with per-night `cost_cents`.
 *
 * # Safety
 * `dist` must be a live handle and `out` writable.
 */
enum HaStatus ha_distribution_optimize(const struct HaDistribution *dist,
                                       int64_t cost_cents,
                                       struct HaPricingDecision *out);

/**
 * Expected profit in cents of offering `price_cents`, as `num / den`.
 *
 * # Safety
 * `dist` must be a live handle; `num` and `den` writable.
 */
enum HaStatus ha_distribution_expected_profit(const struct HaDistribution *dist,
                                              int64_t cost_cents,
                                              int64_t price_cents,
                                              int64_t *num,
                                              int64_t *den);

/**
 * Parses a JSON instance document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` writable.
 */
enum HaStatus ha_instance_from_json(const char *json, struct HaInstance **out);

/**
 * # Safety
 * `inst` must come from [`ha_instance_from_json`] and not be freed twice.
 */
void ha_instance_free(struct HaInstance *inst);

/**
 * Clears the auction and writes a JSON result document to `out_json`:
 * `{"status", "objective", "best_bound", "nodes_explored", "accepted": {"<id>": arrival_night}}`.
 *
 * `time_limit_ms` of 0 keeps the default budget.
 *
 * # Safety
 * `inst` must be a live handle; `out_json` writable. Free the string with
 * [`ha_string_free`].
 */
enum HaStatus ha_instance_solve(const struct HaInstance *inst,
                                enum HaSolver solver,
                                enum HaObjective objective_mode,
                                uint64_t time_limit_ms,
                                char **out_json);

/**
 * Writes the CPLEX LP model of the auction to `out_lp`.
 *
 * # Safety
 * `inst` must be a live handle; `out_lp` writable. Free the string with
 * [`ha_string_free`].
 */
enum HaStatus ha_instance_export_lp(const struct HaInstance *inst,
                                    enum HaObjective objective_mode,
                                    char **out_lp);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void ha_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOTEL_AUCTION_H */
