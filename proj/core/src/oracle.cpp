#include "skyline/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace sky {

bool dominates(const PlainTuple& a, const PlainTuple& b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  bool strict = false;
  for (size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
    if (a[j] < b[j]) strict = true;
  }
  return strict;
}

PlainTuple map_query(const PlainTuple& p, const PlainTuple& q, MapMode mode) {
  if (p.size() != q.size()) throw DomainError("dimension mismatch");
  PlainTuple t(p.size());
  for (size_t j = 0; j < p.size(); ++j) {
    uint64_t diff = p[j] > q[j] ? p[j] - q[j] : q[j] - p[j];
    t[j] = mode == MapMode::Squared ? diff * diff : diff;
  }
  return t;
}

std::vector<PlainTuple> skyline_iterative(const std::vector<PlainTuple>& points) {
  std::vector<PlainTuple> pool;
  std::vector<PlainTuple> remaining = points;
  while (!remaining.empty()) {
    size_t best = 0;
    uint64_t best_sum = std::accumulate(remaining[0].begin(), remaining[0].end(), uint64_t{0});
    for (size_t i = 1; i < remaining.size(); ++i) {
      uint64_t s = std::accumulate(remaining[i].begin(), remaining[i].end(), uint64_t{0});
      if (s < best_sum) {
        best_sum = s;
        best = i;
      }
    }
    PlainTuple chosen = remaining[best];
    pool.push_back(chosen);
    std::vector<PlainTuple> next;
    next.reserve(remaining.size());
    for (size_t i = 0; i < remaining.size(); ++i) {
      if (i == best) continue;
      if (!dominates(chosen, remaining[i])) next.push_back(remaining[i]);
    }
    remaining = std::move(next);
  }
  return pool;
}

std::vector<size_t> skyline_bruteforce_indexes(const std::vector<PlainTuple>& points) {
  std::vector<size_t> out;
  for (size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < points.size() && !dominated; ++j)
      if (j != i && dominates(points[j], points[i])) dominated = true;
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<PlainTuple> skyline_bruteforce(const std::vector<PlainTuple>& points) {
  std::vector<PlainTuple> out;
  for (size_t i : skyline_bruteforce_indexes(points)) out.push_back(points[i]);
  return out;
}

std::vector<PlainTuple> dynamic_skyline(const std::vector<PlainTuple>& points,
                                        const PlainTuple& query, MapMode mode) {
  std::vector<PlainTuple> mapped;
  mapped.reserve(points.size());
  for (const auto& p : points) mapped.push_back(map_query(p, query, mode));
  std::vector<PlainTuple> out;
  for (size_t i : skyline_bruteforce_indexes(mapped)) out.push_back(points[i]);
  return out;
}

}  // namespace sky
