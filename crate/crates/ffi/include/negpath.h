#ifndef NEGPATH_H
#define NEGPATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NegpathStatus {
  NegpathOk = 0,
  NegpathNullPointer = 1,
  NegpathOutOfRange = 2,
  NegpathInvalidArgument = 3,
  NegpathUnreachable = 4,
  NegpathInternal = 5,
} NegpathStatus;

typedef struct NegpathGraph NegpathGraph;

typedef struct NegpathResult NegpathResult;

/**
 * Allocates a graph with `n` vertices, ids `0..n`. Free with
 * `negpath_graph_free`.
 */
struct NegpathGraph *negpath_graph_new(uint32_t n);

void negpath_graph_free(struct NegpathGraph *g);

/**
 * Adds a directed edge; parallel edges keep the minimum weight. Weight must
 * be finite.
 */
enum NegpathStatus negpath_graph_add_edge(struct NegpathGraph *g,
                                          uint32_t tail,
                                          uint32_t head,
                                          double weight);

/**
 * Solves single-source shortest paths. `strategy`: 0 reference, 1 simple,
 * 2 bucketed. `base_threshold` 0 picks the automatic cutoff. Returns null on
 * bad arguments; free the result with `negpath_result_free`.
 */
struct NegpathResult *negpath_solve(const struct NegpathGraph *g,
                                    uint32_t source,
                                    uint32_t strategy,
                                    uint32_t base_threshold,
                                    uint64_t seed);

/**
 * 1 when the result is a negative-cycle certificate, 0 for distances,
 * negative on a null handle.
 */
int32_t negpath_result_is_cycle(const struct NegpathResult *r);

/**
 * Writes d(source, v) to `out`. `NegpathUnreachable` leaves `out` untouched;
 * cycle results report `NegpathInvalidArgument`.
 */
enum NegpathStatus negpath_result_distance(const struct NegpathResult *r, uint32_t v, double *out);

/**
 * Number of vertices in the certificate walk (first == last); 0 unless the
 * result is a cycle.
 */
uintptr_t negpath_result_cycle_len(const struct NegpathResult *r);

/**
 * The i-th vertex of the certificate walk; u32::MAX out of range.
 */
uint32_t negpath_result_cycle_vertex(const struct NegpathResult *r, uintptr_t i);

/**
 * Total weight of the certificate walk; NaN when not a cycle result.
 */
double negpath_result_cycle_weight(const struct NegpathResult *r);

void negpath_result_free(struct NegpathResult *r);

#endif /* NEGPATH_H */
