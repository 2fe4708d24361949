#include "skyline/harness.hpp"

#include <algorithm>
#include <sstream>

#include "skyline/storage.hpp"

namespace sky {

Deployment::Deployment(unsigned key_bits, uint64_t seed)
    : keys([&] {
        Rng kr(seed);
        return keygen(key_bits, kr);
      }()),
      c2(keys.pk, keys.sk, Rng(seed ^ 0xc2c2c2c2c2c2c2c2ULL)) {}

std::shared_ptr<Channel> Deployment::connect_c2() {
  return std::make_shared<DirectChannel>([this](const Frame& f) { return c2.handle(f); });
}

TwoPartyContext Deployment::make_context(ProtocolParams params, uint64_t session_seed) {
  return TwoPartyContext(keys.pk, params, connect_c2(), Rng(session_seed));
}

std::string BenchRecord::csv_header() {
  return "protocol,n,m,K,l,s,lazy,workers,computation_time,communication_time,k";
}

std::string BenchRecord::csv_row() const {
  std::ostringstream os;
  os << protocol << ',' << n << ',' << m << ',' << K << ',' << l << ',' << s << ','
     << (lazy ? 1 : 0) << ',' << workers << ',' << computation_time << ',' << communication_time
     << ',' << k;
  return os.str();
}

RunOutcome run_query_inprocess(Deployment& dep, const std::vector<PlainTuple>& data,
                               const PlainTuple& query, const ProtocolParams& base,
                               const QueryOptions& opt, uint64_t seed) {
  Rng owner_rng(seed ^ 0x0011223344556677ULL);
  C1Runtime rt;
  rt.pk = dep.keys.pk;
  rt.params = base;
  rt.data = encrypt_rows(dep.keys.pk, data, base.d, owner_rng);
  rt.connect_c2 = [&dep] { return dep.connect_c2(); };
  rt.seed = seed ^ 0xc1c1c1c1c1c1c1c1ULL;

  Rng client_rng(seed ^ 0x99aabbccddeeff00ULL);
  SessionId token = random_session_id(client_rng);
  std::vector<Ciphertext> neg_q;
  neg_q.reserve(query.size());
  for (uint64_t q : query) {
    Bigint neg = (dep.keys.pk.n - (Bigint(q) % dep.keys.pk.n)) % dep.keys.pk.n;
    neg_q.push_back(encrypt(dep.keys.pk, neg, client_rng));
  }

  QueryExecution ex =
      c1_execute_query(rt, neg_q, opt, token, [&dep] { return dep.c2.busy_seconds(); });

  auto c2_chan = dep.connect_c2();
  RunOutcome out;
  out.result = fetch_result(*c2_chan, token, dep.keys.pk, ex.noise);
  out.counters = ex.counters;
  out.record.protocol = protocol_name(opt.protocol);
  out.record.n = data.size();
  out.record.m = data.empty() ? query.size() : data[0].size();
  out.record.K = base.key_bits;
  out.record.l = base.l;
  out.record.s = opt.partitions;
  out.record.lazy = opt.lazy;
  out.record.workers = opt.workers;
  out.record.computation_time = ex.comp_seconds;
  out.record.communication_time = ex.comm_seconds;
  out.record.k = ex.k;
  return out;
}

std::string format_tuple(const PlainTuple& t) {
  std::ostringstream os;
  os << '(';
  for (size_t j = 0; j < t.size(); ++j) {
    if (j) os << ',';
    os << t[j];
  }
  os << ')';
  return os.str();
}

bool same_result_set(std::vector<PlainTuple> a, std::vector<PlainTuple> b, std::string* diff) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a == b) return true;
  if (diff) {
    std::vector<PlainTuple> only;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(only));
    *diff = only.empty() ? "shape mismatch" : format_tuple(only.front());
  }
  return false;
}

VerifyReport verify_inprocess(Deployment& dep, const std::vector<PlainTuple>& data,
                              const PlainTuple& query, const ProtocolParams& base,
                              const QueryOptions& opt, uint64_t seed) {
  RunOutcome run = run_query_inprocess(dep, data, query, base, opt, seed);
  std::vector<PlainTuple> expected = dynamic_skyline(data, query, MapMode::Squared);
  VerifyReport rep;
  rep.k = run.record.k;
  std::string diff;
  rep.ok = same_result_set(run.result, expected, &diff);
  if (!rep.ok) rep.detail = "first differing tuple: " + diff;
  return rep;
}

}  // namespace sky
