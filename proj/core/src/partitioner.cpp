#include "skyline/partitioner.hpp"

#include <cmath>

namespace sky {

namespace {

constexpr double kLn2 = 0.693147180559945309417;

double powi(double base, unsigned e) {
  double r = 1.0;
  while (e--) r *= base;
  return r;
}

// Merge-layer term for layer i at partition exponent v:
//   2^(v-i+1) * (i+u-v)^(m-1) * (i-1+u-v)^(m-1) * ln^(2m-2)2
//     * (log2(2 * (i-1+u-v)^(m-1) * ln^(m-1)2) + m + l)
double layer_term(unsigned u, unsigned v, unsigned m, unsigned l, unsigned i) {
  double a = static_cast<double>(i + u - v);
  double b = static_cast<double>(i - 1 + u - v);
  double in_size = 2.0 * powi(b, m - 1) * powi(kLn2, m - 1);
  return std::exp2(static_cast<double>(v) - i + 1) * powi(a, m - 1) * powi(b, m - 1) *
         powi(kLn2, 2 * m - 2) * (std::log2(in_size) + m + l);
}

}  // namespace

double expected_skyline(uint64_t n, uint64_t m) {
  if (n < 2) throw DomainError("expected_skyline requires n >= 2");
  if (m < 2) throw DomainError("expected_skyline requires m >= 2");
  return powi(std::log(static_cast<double>(n)), static_cast<unsigned>(m - 1));
}

double load_w(unsigned u, unsigned v, unsigned m, unsigned l) {
  if (v < 1 || v >= u) throw DomainError("load_w requires 1 <= v < u");
  double x = static_cast<double>(u - v);
  double w = std::exp2(static_cast<double>(u)) * powi(x, m - 1) * powi(kLn2, m - 1) *
             (x + m + l);
  for (unsigned i = 1; i <= v; ++i) w += layer_term(u, v, m, l, i);
  return w;
}

double f_x(unsigned x, unsigned m, unsigned l) {
  if (x < 1) throw DomainError("f_x requires x >= 1");
  // At x = 1 the (x-1)^(m-1) factors vanish and only the last term
  // survives; the log factor multiplies zero and drops out.
  double merge = 0.0, shrunk = 0.0;
  if (x > 1) {
    double xm = powi(static_cast<double>(x), m - 1);
    double bm = powi(static_cast<double>(x - 1), m - 1);
    merge = std::exp2(1.0 - static_cast<double>(x)) * xm * bm * powi(kLn2, m - 1) *
            (std::log2(2.0 * bm * powi(kLn2, m - 1)) + m + l);
    shrunk = bm * (x - 1.0 + m + l);
  }
  double grown = powi(static_cast<double>(x), m - 1) * (x + static_cast<double>(m) + l);
  return merge + shrunk - grown;
}

PartitionPlan optimal_partitions(uint64_t n, uint64_t m, unsigned l) {
  unsigned u = ceil_log2(n);  // non-powers of two round up for the model
  PartitionPlan plan;
  if (u < 2) {  // too small to split
    plan.s = 1;
    plan.v = 0;
    plan.x_star = u;
    plan.lazy_threshold = uint64_t{1} << u;
    return plan;
  }
  unsigned best_v = 1;
  double best_w = load_w(u, 1, static_cast<unsigned>(m), l);
  for (unsigned v = 2; v < u; ++v) {
    double w = load_w(u, v, static_cast<unsigned>(m), l);
    if (w < best_w) {
      best_w = w;
      best_v = v;
    }
  }
  plan.v = best_v;
  plan.s = uint64_t{1} << best_v;
  plan.x_star = u - best_v;
  plan.lazy_threshold = uint64_t{1} << plan.x_star;
  return plan;
}

unsigned f_x_sign_change(unsigned m, unsigned l, unsigned x_max) {
  unsigned located = 1;
  for (unsigned x = 2; x <= x_max; ++x)
    if (f_x(x, m, l) > 0.0) located = x;
  return located;
}

}  // namespace sky
