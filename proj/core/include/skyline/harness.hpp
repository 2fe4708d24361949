#pragma once

#include "skyline/dataset.hpp"
#include "skyline/roles.hpp"

namespace sky {

/// In-process assembly of the whole stack: one keypair, the key-holder
/// service, and direct channels into it. Used by tests, verify and bench.
struct Deployment {
  KeyPair keys;
  C2Service c2;

  Deployment(unsigned key_bits, uint64_t seed);

  /// Fresh synchronous channel into the key-holder.
  std::shared_ptr<Channel> connect_c2();
  /// Fresh protocol session over such a channel.
  TwoPartyContext make_context(ProtocolParams params, uint64_t session_seed);
};

/// One measured protocol run, the axes of the evaluation sweeps.
struct BenchRecord {
  std::string protocol;  // BSSP or FSSP
  uint64_t n = 0;
  uint64_t m = 0;
  unsigned K = 0;
  unsigned l = 0;
  uint64_t s = 1;
  bool lazy = false;
  unsigned workers = 1;
  double computation_time = 0;
  double communication_time = 0;
  uint64_t k = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

struct RunOutcome {
  std::vector<PlainTuple> result;
  BenchRecord record;
  ProtocolCounters counters;
};

/// Owner encrypts, client encrypts the query, the servers run the
/// protocol, the client assembles the result. Everything in one process
/// over direct channels.
RunOutcome run_query_inprocess(Deployment& dep, const std::vector<PlainTuple>& data,
                               const PlainTuple& query, const ProtocolParams& base,
                               const QueryOptions& opt, uint64_t seed);

struct VerifyReport {
  bool ok = false;
  uint64_t k = 0;
  std::string detail;  // first differing tuple on mismatch
};

/// Secure protocol vs plaintext reference on the same input.
VerifyReport verify_inprocess(Deployment& dep, const std::vector<PlainTuple>& data,
                              const PlainTuple& query, const ProtocolParams& base,
                              const QueryOptions& opt, uint64_t seed);

std::string format_tuple(const PlainTuple& t);
/// Multiset comparison; fills `diff` with the first tuple present in one
/// side only.
bool same_result_set(std::vector<PlainTuple> a, std::vector<PlainTuple> b,
                     std::string* diff = nullptr);

}  // namespace sky
