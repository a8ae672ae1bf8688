/* cc smoke.c -I../include -L../../../target/release -l:libnonlocal_lwr_ffi.a -lm -lpthread -ldl */
#include <stdio.h>
#include <stdlib.h>
#include "nonlocal_lwr.h"

static const char *CONFIG =
    "[model]\nvariant = \"mean_velocity\"\nvelocity = { family = \"affine_one_minus_rho\" }\n"
    "[kernel]\nfamily = \"downcast_parabola\"\neta = 0.1\n"
    "[grid]\nlength = 1.0\nh = 0.01\n"
    "[initial]\nkind = \"piecewise_constant\"\n"
    "breakpoints = [[0.0, 0.3333333333333333], [0.3333333333333333, 1.0], [0.6666666666666666, 0.3333333333333333]]\n"
    "[scheme]\nname = \"godunov\"\n"
    "[run]\nt_final = 0.1\n";

int main(void) {
    NlSimulation *sim = NULL;
    if (nl_simulation_new(CONFIG, &sim) != NL_STATUS_OK) {
        fprintf(stderr, "new: %s\n", nl_last_error());
        return 1;
    }
    if (nl_simulation_run_to(sim, 0.1) != NL_STATUS_OK) {
        fprintf(stderr, "run: %s\n", nl_last_error());
        return 1;
    }
    size_t n = 0;
    nl_simulation_n_cells(sim, &n);
    double *rho = malloc(n * sizeof *rho);
    nl_simulation_density(sim, rho, n);
    double mass = 0.0;
    for (size_t j = 0; j < n; j++) mass += rho[j] / (double)n;
    printf("cells %zu mass %.15f\n", n, mass);
    free(rho);
    nl_simulation_free(sim);
    return 0;
}
