#include <stdio.h>
#include <stdlib.h>
#include "swe_ffi.h"

int main(void) {
    SweSimulation *sim = NULL;
    if (swe_simulation_new("preset = energy-study-iii\nN = 16\nT = 1.3\n", &sim) != SWE_STATUS_OK) {
        fprintf(stderr, "%s\n", swe_last_error_message());
        return 1;
    }
    if (swe_simulation_run_to_end(sim) != SWE_STATUS_OK) {
        fprintf(stderr, "%s\n", swe_last_error_message());
        return 2;
    }
    SweEnergyRecord rec;
    swe_simulation_energy(sim, &rec);
    size_t m = swe_simulation_nodes_per_side(sim);
    double *phi = (double *)malloc(m * m * sizeof(double));
    int rc = swe_simulation_copy_field(sim, SWE_FIELD_PHI, phi, m * m) == SWE_STATUS_OK ? 0 : 3;
    printf("%zu %zu %.6e %.6e\n", rec.step, m, rec.energy, phi[m * m / 2]);
    free(phi);
    swe_simulation_free(sim);

    SweSimulation *bad = NULL;
    if (swe_simulation_new("N = 1\n", &bad) != SWE_STATUS_CONFIG_ERROR || bad != NULL) {
        return 4;
    }
    return rc;
}
