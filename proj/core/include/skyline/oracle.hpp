#pragma once

#include <cstdint>
#include <vector>

#include "skyline/bigint.hpp"

namespace sky {

/// Plaintext tuple: m non-negative attribute values.
using PlainTuple = std::vector<uint64_t>;

enum class MapMode { Squared, Absolute };

/// True iff a[j] <= b[j] for all j and a[j] < b[j] for at least one j.
bool dominates(const PlainTuple& a, const PlainTuple& b);

/// Per-attribute distance to the query point: (p[j]-q[j])^2 or |p[j]-q[j]|.
PlainTuple map_query(const PlainTuple& p, const PlainTuple& q, MapMode mode);

/// Iterative skyline: repeatedly select the tuple with the smallest
/// attribute sum (lowest index on ties), append it, drop what it
/// dominates. Returns the pool in selection order.
std::vector<PlainTuple> skyline_iterative(const std::vector<PlainTuple>& points);

/// Independent O(n^2) reference: every point no other point dominates.
/// Duplicate skyline points are all retained, in input order.
std::vector<PlainTuple> skyline_bruteforce(const std::vector<PlainTuple>& points);

/// Indexes (input order) of the points skyline_bruteforce retains.
std::vector<size_t> skyline_bruteforce_indexes(const std::vector<PlainTuple>& points);

/// Dynamic skyline: originals whose mapped forms are skyline around q.
std::vector<PlainTuple> dynamic_skyline(const std::vector<PlainTuple>& points,
                                        const PlainTuple& query, MapMode mode);

}  // namespace sky
