#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bcg.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
              #cond);                                                  \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  BcgGame *game = NULL;
  CHECK(bcg_game_generate(BCG_FAMILY_TRIANGLE, 0, 0, 1.0, &game) == BCG_STATUS_OK);
  CHECK(bcg_game_num_players(game) == 3);

  size_t all_long[3] = {1, 1, 1};
  double cost = 0.0;
  CHECK(bcg_expected_player_cost(game, all_long, 3, 0, &cost) == BCG_STATUS_OK);
  CHECK(cost == 5.0);

  BcgAnalysis report;
  CHECK(bcg_analyze(game, 1e-9, &report) == BCG_STATUS_OK);
  CHECK(fabs(report.poa - 2.5) < 1e-9);
  CHECK(report.exhaustive);
  bcg_game_free(game);

  BcgBound b;
  CHECK(bcg_bound(0.3, &b) == BCG_STATUS_OK);
  CHECK(b.regime == BCG_REGIME_MID);

  CHECK(bcg_game_from_json("{", &game) == BCG_STATUS_PARSE);
  CHECK(strstr(bcg_last_error_message(), "line 1") != NULL);

  printf("ok\n");
  return 0;
}
