#include <stdio.h>
#include <string.h>
#include "scf_verify.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    ScfRule *rule = NULL;
    CHECK(scf_rule_parse("DICT:1", 2, 3, &rule) == SCF_STATUS_OK);

    bool sp = false;
    CHECK(scf_rule_is_strategy_proof(rule, &sp) == SCF_STATUS_OK && sp);

    int32_t dictator = -2;
    CHECK(scf_rule_dictator(rule, &dictator) == SCF_STATUS_OK && dictator == 1);

    uint32_t outcome = 99;
    CHECK(scf_rule_evaluate(rule, "a,b,c|c,a,b", &outcome) == SCF_STATUS_OK && outcome == 2);

    ScfClassification c;
    CHECK(scf_rule_classify(rule, &c) == SCF_STATUS_OK);
    CHECK(c.total == 36 && c.manipulable == 0 && c.dictatorial == 36 && c.tops_only);

    char *text = NULL;
    CHECK(scf_rule_to_string(rule, &text) == SCF_STATUS_OK && strcmp(text, "DICT:1") == 0);
    scf_string_free(text);
    scf_rule_free(rule);

    ScfRule *bad = NULL;
    CHECK(scf_rule_parse("TOPS:n=2,m=3:0001112x2", 0, 0, &bad) == SCF_STATUS_PARSE);
    CHECK(bad == NULL);
    CHECK(strstr(scf_last_error_message(), "20") != NULL);

    char *json = NULL;
    bool holds = false;
    CHECK(scf_census_json(2, 3, 0, 0, &json, &holds) == SCF_STATUS_OK && holds);
    CHECK(strstr(json, "\"strategy_proof\": 2") != NULL);
    scf_string_free(json);

    bool passed = true;
    CHECK(scf_verify_lemma_json("THM", 3, 2, 0, 0, &json, &passed) == SCF_STATUS_OK && !passed);
    CHECK(strstr(json, "MAJLEX") != NULL);
    scf_string_free(json);

    CHECK(scf_verify_lemma_json("L2", 2, 3, 0, 0, &json, &passed) == SCF_STATUS_UNKNOWN_LEMMA);
    printf("ok %s\n", scf_version());
    return 0;
}
