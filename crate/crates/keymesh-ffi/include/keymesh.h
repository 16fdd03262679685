/* keymesh C API: structured key-sharing topology, greedy routing and analysis. */

#ifndef KEYMESH_H
#define KEYMESH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible keymesh call.
 */
typedef enum {
  KEYMESH_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  KEYMESH_STATUS_NULL_POINTER = 1,
  KEYMESH_STATUS_INVALID_CONFIG = 2,
  KEYMESH_STATUS_NODE_OUT_OF_RANGE = 3,
  /**
   * The operation needs two distinct nodes.
   */
  KEYMESH_STATUS_SAME_NODE = 4,
  KEYMESH_STATUS_NOT_AN_EDGE = 5,
  /**
   * The hop bound is only defined for power-of-two sizes of at least 8.
   */
  KEYMESH_STATUS_BOUND_UNDEFINED = 6,
  KEYMESH_STATUS_TOO_MANY_EDGES = 7,
  KEYMESH_STATUS_EMPTY_PLAINTEXT = 8,
  KEYMESH_STATUS_AUTHENTICATION_FAILED = 9,
  /**
   * The caller buffer is too small; `*written` holds the needed length.
   */
  KEYMESH_STATUS_BUFFER_TOO_SMALL = 10,
} KeymeshStatus;

/**
 * Opaque handle to a built key graph.
 */
typedef struct KeymeshGraph KeymeshGraph;

/**
 * Opaque handle to a simulated network with per-key nonce state.
 */
typedef struct KeymeshNetwork KeymeshNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *keymesh_version(void);

/**
 * Release a string returned by any `*_json` function.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library's string
 * functions and not yet freed; NULL is accepted and ignored.
 */
void keymesh_string_free(char *s);

/**
 * Build the structured key graph for `n` nodes from a numeric seed.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle that must
 * be released with [`keymesh_graph_free`].
 */
KeymeshStatus keymesh_graph_build(uint32_t n, uint64_t seed, KeymeshGraph **out);

/**
 * Build the graph from 32 bytes of master seed material.
 *
 * # Safety
 * `master_seed` must point to 32 readable bytes; `out` as in
 * [`keymesh_graph_build`].
 */
KeymeshStatus keymesh_graph_build_with_master_seed(uint32_t n,
                                                   const uint8_t *master_seed,
                                                   KeymeshGraph **out);

/**
 * Release a graph handle; NULL is accepted and ignored.
 *
 * # Safety
 * `graph` must come from a build function and not be used afterwards.
 */
void keymesh_graph_free(KeymeshGraph *graph);

/**
 * Number of nodes, or 0 for a NULL handle.
 *
 * # Safety
 * `graph` must be a live handle or NULL.
 */
uint32_t keymesh_graph_node_count(const KeymeshGraph *graph);

/**
 * Number of key-sharing links, or 0 for a NULL handle.
 *
 * # Safety
 * `graph` must be a live handle or NULL.
 */
uint64_t keymesh_graph_edge_count(const KeymeshGraph *graph);

/**
 * Degree of `node` (the number of keys it stores).
 *
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
KeymeshStatus keymesh_graph_degree(const KeymeshGraph *graph, uint32_t node, uint32_t *out);

/**
 * Sorted direct contacts of `node`.
 *
 * # Safety
 * `graph` must be a live handle; `buffer` must hold `capacity` u32 values;
 * `written` must be a valid pointer.
 */
KeymeshStatus keymesh_graph_neighbors(const KeymeshGraph *graph,
                                      uint32_t node,
                                      uint32_t *buffer,
                                      size_t capacity,
                                      size_t *written);

/**
 * The power-of-two ring offsets used at size `n`.
 *
 * # Safety
 * `buffer` must hold `capacity` u32 values; `written` must be valid.
 */
KeymeshStatus keymesh_finger_offsets(uint32_t n,
                                     uint32_t *buffer,
                                     size_t capacity,
                                     size_t *written);

/**
 * Ring distance between two node ids at size `n`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
KeymeshStatus keymesh_circular_distance(uint32_t a, uint32_t b, uint32_t n, uint32_t *out);

/**
 * Closed-form worst-case hop count for power-of-two `n >= 8`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
KeymeshStatus keymesh_diameter_bound(uint32_t n, uint32_t *out);

/**
 * Greedy next hop from `current` towards `dest`.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
KeymeshStatus keymesh_next_hop(const KeymeshGraph *graph,
                               uint32_t current,
                               uint32_t dest,
                               uint32_t *out);

/**
 * Full greedy route: writes the visited nodes, source first, destination
 * last.
 *
 * # Safety
 * `graph` must be a live handle; `buffer` must hold `capacity` u32 values;
 * `written` must be valid.
 */
KeymeshStatus keymesh_route(const KeymeshGraph *graph,
                            uint32_t src,
                            uint32_t dst,
                            uint32_t *buffer,
                            size_t capacity,
                            size_t *written);

/**
 * Greedy route as a JSON object: src, dst, hops, hop_count, bound.
 *
 * # Safety
 * `graph` must be a live handle; `out` receives a string to free with
 * [`keymesh_string_free`].
 */
KeymeshStatus keymesh_route_json(const KeymeshGraph *graph, uint32_t src, uint32_t dst, char **out);

/**
 * Graph measurements as JSON. `sample_pairs == 0` computes the exact
 * average path; a positive value estimates it from that many sampled pairs.
 *
 * # Safety
 * `graph` must be a live handle; `out` receives a string to free with
 * [`keymesh_string_free`].
 */
KeymeshStatus keymesh_metrics_json(const KeymeshGraph *graph,
                                   uint64_t sample_pairs,
                                   uint64_t seed,
                                   char **out);

/**
 * Capture analysis: how many keys a set of captured nodes reveals.
 *
 * # Safety
 * `graph` must be a live handle; `nodes` must point to `node_count` ids;
 * `out_revealed` and `out_fraction` must be valid pointers.
 */
KeymeshStatus keymesh_capture(const KeymeshGraph *graph,
                              const uint32_t *nodes,
                              size_t node_count,
                              uint64_t *out_revealed,
                              double *out_fraction);

/**
 * Create a simulated network over a freshly built graph.
 *
 * # Safety
 * `out` must be valid; release the handle with [`keymesh_network_free`].
 */
KeymeshStatus keymesh_network_new(uint32_t n, uint64_t seed, KeymeshNetwork **out);

/**
 * Release a network handle; NULL is accepted and ignored.
 *
 * # Safety
 * `network` must come from [`keymesh_network_new`] and not be used after.
 */
void keymesh_network_free(KeymeshNetwork *network);

/**
 * Deliver a message hop by hop; the delivery report comes back as JSON
 * (hops, key ids, plaintext round trip, transmission count).
 *
 * # Safety
 * `network` must be a live handle; `message` must point to `message_len`
 * readable bytes; `out` receives a string to free with
 * [`keymesh_string_free`].
 */
KeymeshStatus keymesh_network_send_json(KeymeshNetwork *network,
                                        uint32_t src,
                                        uint32_t dst,
                                        const uint8_t *message,
                                        size_t message_len,
                                        char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KEYMESH_H */
