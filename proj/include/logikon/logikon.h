#ifndef LOGIKON_LOGIKON_H
#define LOGIKON_LOGIKON_H

#include <stddef.h>

#if defined(_WIN32)
#define LK_API __declspec(dllexport)
#else
#define LK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lk_status {
  LK_OK = 0,
  LK_ERR_SYNTAX,
  LK_ERR_ARITY,
  LK_ERR_UNDECLARED,
  LK_ERR_DUPLICATE,
  LK_ERR_INVALID_ARGUMENT,
  LK_ERR_OUT_OF_RANGE,
  LK_ERR_NON_FINITE,
  LK_ERR_BUDGET,
  LK_ERR_UNSUPPORTED,
  LK_ERR_STALE_TAPE,
  LK_ERR_LAYOUT,
  LK_ERR_PRECONDITION,
  LK_ERR_RETRACTION,
  LK_ERR_IO,
  LK_ERR_INTERNAL
} lk_status;

typedef struct lk_theory lk_theory;
typedef struct lk_network lk_network;

typedef struct lk_network_info {
  size_t inputs;
  size_t outputs;
  size_t gates;
  size_t depth;
  size_t slots;
  size_t parameters;
  double beta;
} lk_network_info;

LK_API const char* lk_version(void);
LK_API const char* lk_status_name(lk_status status);

/* Message of the last failed call on this thread; empty after success. */
LK_API const char* lk_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
LK_API void lk_string_free(char* s);

LK_API lk_status lk_theory_parse(const char* source, lk_theory** out);
LK_API lk_status lk_theory_load(const char* path, lk_theory** out);
LK_API void lk_theory_free(lk_theory* theory);
LK_API lk_status lk_theory_print(const lk_theory* theory, char** out);
/* JSON array of {subject, line, column, message}; empty when valid. */
LK_API lk_status lk_theory_validate(const lk_theory* theory, char** out_json);

LK_API lk_status lk_network_compile(const lk_theory* theory, const char* expr, double beta,
                                    lk_network** out);
/* Outputs are the axiom's left and right sides. */
LK_API lk_status lk_network_compile_axiom(const lk_theory* theory, const char* axiom,
                                          double beta, lk_network** out);
LK_API lk_status lk_network_from_json(const char* text, lk_network** out);
LK_API lk_status lk_network_to_json(const lk_network* net, char** out);
LK_API void lk_network_free(lk_network* net);
LK_API lk_status lk_network_info_get(const lk_network* net, lk_network_info* info);

/* beta <= 0 uses the network's own temperature. */
LK_API lk_status lk_network_eval(const lk_network* net, const double* input, size_t input_len,
                                 double beta, double* output, size_t output_len);

/* axioms: comma-separated names, or NULL for all. */
LK_API lk_status lk_network_constraint_report(const lk_network* net, const char* axioms,
                                              char** out_json);

/* Bit-exact forward comparison on vertices and seeded samples; writes a
   report entry as JSON and sets *identical. */
LK_API lk_status lk_network_compare(const lk_network* a, const lk_network* b, size_t samples,
                                    unsigned long long seed, char** out_json, int* identical);

/* Trains in place. config_json may be NULL; data_csv is headerless with the
   input columns first. */
LK_API lk_status lk_train(lk_network* net, const char* config_json, const char* data_csv,
                          char** trace_csv, char** summary_json);

/* options_json: {"suites": [...], "beta_grid": [...], "seed": n, "samples": n}. */
LK_API lk_status lk_verify_theory(const lk_theory* theory, const char* options_json,
                                  char** report_json, char** table, int* all_passed);
LK_API lk_status lk_verify_network(const lk_network* net, const char* options_json,
                                   char** report_json, char** table, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
