/* Builds the order-2 model, anneals it and verifies the best sample. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hadamard_ising.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "failed: %s (%s)\n", #cond,               \
                    hi_last_error_message());                         \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    HiModel *raw = NULL, *model = NULL;
    HiResults *results = NULL;
    CHECK(hi_model_build(HI_PROBLEM_HSEARCH, 2, 0, NULL, 0, 0, &raw) == HI_STATUS_OK);
    CHECK(hi_model_num_vars(raw) == 6);
    CHECK(hi_model_normalize(raw, &model) == HI_STATUS_OK);

    HiAnnealConfig cfg = hi_anneal_config_default();
    cfg.seed = 3;
    CHECK(hi_anneal(model, &cfg, &results) == HI_STATUS_OK);
    CHECK(hi_results_len(results) >= 1);

    int8_t spins[6];
    double energy = 0.0;
    uint64_t count = 0;
    bool ok = false;
    CHECK(hi_results_sample(results, 0, spins, 6, &energy, &count) == HI_STATUS_OK);
    CHECK(fabs(energy + 28.0 / 12.0) < 1e-9);
    CHECK(hi_verify_sample(model, spins, 6, &ok) == HI_STATUS_OK && ok);
    CHECK(hi_results_sample(results, 0, spins, 5, NULL, NULL) == HI_STATUS_BUFFER_TOO_SMALL);

    CHECK(hi_model_build(HI_PROBLEM_HSEARCH, 6, 0, NULL, 0, 0, &raw) == HI_STATUS_INVALID_ARGUMENT);
    CHECK(strlen(hi_last_error_message()) > 0);

    hi_results_free(results);
    hi_model_free(model);
    hi_model_free(raw);
    printf("c smoke ok\n");
    return 0;
}
