#include <stdio.h>
#include <string.h>
#include "relcor.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, relcor_last_error() ? relcor_last_error() : ""); return 1; } } while (0)

int main(void) {
    const char *spec_json =
        "{\"type\":\"predicate\",\"space\":{\"vars\":[{\"name\":\"x\",\"min\":0,\"max\":3}]},"
        "\"dom\":\"x < 3\",\"rel\":\"x' == x + 1\"}";
    RelcorSpec *spec = NULL;
    RelcorProgram *dec = NULL, *inc = NULL, *bad = NULL;
    CHECK(relcor_spec_from_json(spec_json, &spec) == RELCOR_STATUS_OK);
    CHECK(relcor_program_parse("int x in 0..3; x = x - 1;", &dec) == RELCOR_STATUS_OK);
    CHECK(relcor_program_parse("int x in 0..3; x = x + 1;", &inc) == RELCOR_STATUS_OK);
    CHECK(relcor_program_parse("int x in 0..3; x = ;", &bad) == RELCOR_STATUS_SYNTAX);
    CHECK(bad == NULL && relcor_last_error() != NULL);

    size_t cd = 99;
    bool yes = false;
    CHECK(relcor_competence_domain_size(spec, dec, &cd) == RELCOR_STATUS_OK && cd == 0);
    CHECK(relcor_is_correct(spec, inc, &yes) == RELCOR_STATUS_OK && yes);
    CHECK(relcor_more_correct(spec, inc, dec, true, &yes) == RELCOR_STATUS_OK && yes);

    size_t n = 0;
    CHECK(relcor_mutant_count(dec, "aorb", &n) == RELCOR_STATUS_OK && n == 4);

    char *tree = NULL;
    CHECK(relcor_repair(spec, dec, NULL, &tree) == RELCOR_STATUS_OK);
    CHECK(strstr(tree, "\"fault_depth_ub\": 1") != NULL);
    relcor_string_free(tree);

    relcor_program_free(dec);
    relcor_program_free(inc);
    relcor_spec_free(spec);
    printf("ok %s\n", relcor_version());
    return 0;
}
