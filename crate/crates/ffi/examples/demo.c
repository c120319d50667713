/* Minimal consumer of the C interface: configure a squeezed, disordered
 * run, execute it, and print the information measures of the final step.
 *
 * Build against the shared library, e.g. from the repository root:
 *
 *   cargo build -p collision-sim-ffi
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      -Ltarget/debug -lcollision_sim_ffi -lm -o demo
 *   LD_LIBRARY_PATH=target/debug ./demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "collision_sim.h"

static void check(CsimStatus status, const char *what) {
    if (status != CSIM_STATUS_OK) {
        const char *message = csim_last_error_message();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)status,
                message ? message : "no detail");
        exit(1);
    }
}

int main(void) {
    printf("collision-sim %s\n", csim_version());

    CsimConfig *config = csim_config_new();
    check(csim_config_set(config, "steps", "40"), "set steps");
    check(csim_config_set(config, "pattern", "alternating:0.5"), "set pattern");
    check(csim_config_set(config, "memory_disorder", "1.5707963267948966"),
          "set memory_disorder");
    check(csim_config_set(config, "env_disorder", "uniform:0:6.283185307179586"),
          "set env_disorder");

    CsimSeries *series = NULL;
    check(csim_run(config, 8, &series), "run");
    csim_config_free(config);

    size_t last = csim_series_len(series) - 1;
    double bmi, i3, spread;
    check(csim_series_value(series, last, CSIM_FIELD_I2SM, &bmi), "read i2_s_m");
    check(csim_series_value(series, last, CSIM_FIELD_I3, &i3), "read i3");
    check(csim_series_std(series, last, CSIM_FIELD_I2SM, &spread), "read spread");

    printf("final step %zu over %zu samples: i2_s_m = %.6f +/- %.6f, i3 = %.6f\n",
           last, csim_series_n_samples(series), bmi, spread, i3);

    csim_series_free(series);
    return 0;
}
