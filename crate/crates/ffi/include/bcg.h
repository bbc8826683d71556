/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef BCG_H
#define BCG_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BcgFamily {
  BCG_FAMILY_PIGOU = 0,
  BCG_FAMILY_BYPASS = 1,
  BCG_FAMILY_ROUNDABOUT = 2,
  BCG_FAMILY_TRIANGLE = 3,
} BcgFamily;

typedef enum BcgRegime {
  BCG_REGIME_LOW = 0,
  BCG_REGIME_MID = 1,
  BCG_REGIME_HIGH = 2,
} BcgRegime;

typedef enum BcgStatus {
  BCG_STATUS_OK = 0,
  BCG_STATUS_NULL_POINTER = 1,
  BCG_STATUS_INVALID_UTF8 = 2,
  BCG_STATUS_INVALID_ARGUMENT = 3,
  BCG_STATUS_INVALID_GAME = 4,
  BCG_STATUS_PARSE = 5,
  BCG_STATUS_IO = 6,
  BCG_STATUS_TOO_LARGE = 7,
  BCG_STATUS_NO_CONVERGENCE = 8,
  BCG_STATUS_INTERNAL = 9,
  BCG_STATUS_PANIC = 10,
} BcgStatus;

/**
 * Opaque handle to a validated game.
 */
typedef struct BcgGame BcgGame;

/**
 * Summary of an analysis. `exhaustive` is false for best-response-only
 * reports, whose ratios are lower estimates.
 */
typedef struct BcgAnalysis {
  size_t num_equilibria;
  double optimum_cost;
  double best_eq_cost;
  double worst_eq_cost;
  double poa;
  double pos;
  bool exhaustive;
} BcgAnalysis;

typedef struct BcgBound {
  double p;
  double poa;
  double pos;
  double lambda;
  double mu;
  double y_min;
  enum BcgRegime regime;
} BcgBound;

typedef struct BcgSmoothnessCheck {
  /**
   * Largest `LHS - RHS` over the grid; at most 0 when the inequality holds.
   */
  double worst_violation;
  size_t worst_k;
  size_t worst_m;
} BcgSmoothnessCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bcg_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void bcg_string_free(char *s);

/**
 * Parses and validates a game from a JSON document.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum BcgStatus bcg_game_from_json(const char *json, struct BcgGame **out);

/**
 * Loads and validates a game from a JSON file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum BcgStatus bcg_game_load(const char *path, struct BcgGame **out);

/**
 * Writes a game as JSON to `path`.
 *
 * # Safety
 * `game` must be a live handle and `path` a nul-terminated string.
 */
enum BcgStatus bcg_game_save(const struct BcgGame *game, const char *path);

/**
 * JSON text of a game; release with [`bcg_string_free`].
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
enum BcgStatus bcg_game_to_json(const struct BcgGame *game, char **out);

/**
 * Generates a family instance. `m` is only read for roundabouts, where 0
 * selects `⌊(1 + p + √(p(2+p))) k⌋`; `k` is ignored for the triangle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_game_generate(enum BcgFamily family,
                                 size_t k,
                                 size_t m,
                                 double p,
                                 struct BcgGame **out);

/**
 * Random affine instance, deterministic in `seed`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_game_random(size_t players,
                               size_t resources,
                               size_t max_strategies,
                               double p_min,
                               double p_max,
                               uint64_t seed,
                               struct BcgGame **out);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must come from this library and not have been freed already.
 */
void bcg_game_free(struct BcgGame *game);

/**
 * Number of players, 0 for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t bcg_game_num_players(const struct BcgGame *game);

/**
 * Number of resources, 0 for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t bcg_game_num_resources(const struct BcgGame *game);

/**
 * Expected cost of `player` under the profile `choices[0..len]`.
 *
 * # Safety
 * `game` must be a live handle, `choices` must point to `len` values and
 * `out` must be valid.
 */
enum BcgStatus bcg_expected_player_cost(const struct BcgGame *game,
                                        const size_t *choices,
                                        size_t len,
                                        size_t player,
                                        double *out);

/**
 * Expected social cost of the profile `choices[0..len]`.
 *
 * # Safety
 * As for [`bcg_expected_player_cost`].
 */
enum BcgStatus bcg_expected_social_cost(const struct BcgGame *game,
                                        const size_t *choices,
                                        size_t len,
                                        double *out);

/**
 * Expected Rosenthal potential of the profile `choices[0..len]`.
 *
 * # Safety
 * As for [`bcg_expected_player_cost`].
 */
enum BcgStatus bcg_potential(const struct BcgGame *game,
                             const size_t *choices,
                             size_t len,
                             double *out);

/**
 * Whether `choices[0..len]` is an equilibrium up to `eps`.
 *
 * # Safety
 * As for [`bcg_expected_player_cost`].
 */
enum BcgStatus bcg_is_equilibrium(const struct BcgGame *game,
                                  const size_t *choices,
                                  size_t len,
                                  double eps,
                                  bool *out);

/**
 * Exhaustive analysis. Fails with [`BcgStatus::TooLarge`] past the
 * enumeration limit.
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
enum BcgStatus bcg_analyze(const struct BcgGame *game, double eps, struct BcgAnalysis *out);

/**
 * Full analysis report as JSON, including every equilibrium profile;
 * release with [`bcg_string_free`].
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
enum BcgStatus bcg_analyze_json(const struct BcgGame *game, double eps, char **out);

/**
 * Tight price-of-anarchy bound at `p`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_poa_bound(double p, double *out);

/**
 * Tight price-of-stability bound at `p`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_pos_bound(double p, double *out);

/**
 * Every closed-form quantity at `p ∈ (0, 1]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_bound(double p, struct BcgBound *out);

/**
 * Upper regime breakpoint, the real root of `8p³ + 4p² = 1`.
 */
double bcg_p_bar1(void);

/**
 * Checks `k(1+mp) <= λ k(1-p+pk) + μ m(1-p+pm)` on `1 <= k <= k_max`,
 * `0 <= m <= m_max`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcgStatus bcg_verify_smoothness(double p,
                                     double lambda,
                                     double mu,
                                     size_t k_max,
                                     size_t m_max,
                                     struct BcgSmoothnessCheck *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BCG_H */
