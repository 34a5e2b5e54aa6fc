#include <stdio.h>
#include <string.h>
#include "nkverify.h"

int main(void) {
    NkOptions opts;
    if (nk_options_default(&opts) != NK_STATUS_OK) return 10;
    NkReport *r = NULL;
    if (nk_run_structure(&opts, 20, 2, &r) != NK_STATUS_OK) return 11;
    if (!nk_report_passed(r)) return 12;
    char *json = NULL;
    if (nk_report_to_json(r, &json) != NK_STATUS_OK) return 13;
    if (strstr(json, "\"suite\": \"structure\"") == NULL) return 14;
    nk_string_free(json);
    nk_report_free(r);

    NkImmersion *imm = NULL;
    if (nk_immersion_from_example("nope", &imm) != NK_STATUS_UNKNOWN_EXAMPLE) return 15;
    if (nk_last_error_message() == NULL) return 16;

    double v[3] = {2.0, 0.0, 0.0}, c[10];
    if (nk_cubic_from_v(v, c) != NK_STATUS_OK || c[3] != 8.0) return 17;
    printf("ok %s\n", nk_version());
    return 0;
}
