#include "skyline/dominance.hpp"

namespace sky {

Ciphertext attribute_sum(const PublicKey& pk, const EncryptedTuple& t) {
  Ciphertext acc = t.attrs.at(0);
  for (size_t j = 1; j < t.attrs.size(); ++j) acc = add(pk, acc, t.attrs[j]);
  return acc;
}

EncryptedBit sdom(TwoPartyContext& ctx, const EncryptedTuple& a, const EncryptedTuple& b) {
  if (a.attrs.size() != b.attrs.size() || a.attrs.empty())
    throw DomainError("sdom: dimension mismatch");
  if (a.width != b.width) throw DomainError("sdom: width mismatch");
  ++ctx.counters().sdom;
  const size_t m = a.attrs.size();

  // all_leq = AND_j Bool(a[j] <= b[j]);  a <= b attribute-wise
  EncryptedBit all_leq = sleq(ctx, a.attrs[0], b.attrs[0], a.width);
  for (size_t j = 1; j < m; ++j)
    all_leq = sand(ctx, all_leq, sleq(ctx, a.attrs[j], b.attrs[j], a.width));

  // Strictness via the attribute sums: if a <= b attribute-wise, then
  // a != b iff sum(a) < sum(b). The sum comparison runs at the widened
  // width so the per-attribute sums cannot overflow it.
  unsigned sum_width = a.width + ceil_log2(m);
  Ciphertext sum_a = attribute_sum(ctx.pk(), a);
  Ciphertext sum_b = attribute_sum(ctx.pk(), b);
  EncryptedBit strict = sless(ctx, sum_a, sum_b, sum_width);

  return sand(ctx, strict, all_leq);
}

}  // namespace sky
