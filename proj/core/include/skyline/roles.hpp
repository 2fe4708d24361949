#pragma once

#include <atomic>
#include <thread>

#include "skyline/c2_service.hpp"
#include "skyline/skyline_protocol.hpp"

namespace sky {

struct QueryOptions {
  enum class Protocol { Bssp, Fssp };
  Protocol protocol = Protocol::Fssp;
  uint64_t partitions = 1;  // 1 = unpartitioned
  unsigned workers = 1;
  bool lazy = false;
};

QueryOptions::Protocol protocol_from_name(const std::string& name);
std::string protocol_name(QueryOptions::Protocol p);

/// Everything the computing server needs to run queries.
struct C1Runtime {
  PublicKey pk;
  ProtocolParams params;  // l, d, kappa, key size; n and m derive from the data
  std::vector<EncryptedTuple> data;
  std::function<std::shared_ptr<Channel>()> connect_c2;
  std::function<void(const std::string&)> log;
  uint64_t seed = 0;  // 0 = nondeterministic
};

struct QueryExecution {
  uint64_t k = 0;
  ResultNoise noise;
  double comp_seconds = 0;  // busy time of both servers
  double comm_seconds = 0;  // remaining wall time, spent on the channel
  ProtocolCounters counters;  // summed over all protocol sessions
};

/// Full driver-side query: preprocess, run the chosen protocol
/// (partitioned when asked), ship the blinded result to the key-holder
/// under `token`, and report the noise for the client.
/// `c2_busy_seconds` reads the key-holder's accumulated busy time when it
/// is measurable in-process; pass nullptr otherwise.
QueryExecution c1_execute_query(C1Runtime& rt, const std::vector<Ciphertext>& neg_query,
                                const QueryOptions& opt, const SessionId& token,
                                const std::function<double()>& c2_busy_seconds = {});

/// Client side: encrypts the query attribute-wise, submits it to C1,
/// then assembles the plaintext result from C1's noise and C2's
/// decrypted blinded values.
std::vector<PlainTuple> client_query(Channel& c1, Channel& c2, const PublicKey& pk,
                                     const PlainTuple& query, const QueryOptions& opt, Rng& rng,
                                     uint64_t* k_out = nullptr);

/// Accept loop for the key-holder: one thread per connection, each
/// request answered through the service.
class C2Server {
 public:
  C2Server(C2Service& service, uint16_t port);
  ~C2Server();
  uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  C2Service& service_;
  TcpListener listener_;
  std::thread accept_thread_;
  std::mutex mx_;
  std::vector<std::thread> conns_;
  std::atomic<bool> stopping_{false};
};

/// Accept loop for the computing server: answers QUERY_SUBMIT and
/// RESULT_FETCH_NOISE from clients.
class C1Server {
 public:
  C1Server(C1Runtime runtime, uint16_t port);
  ~C1Server();
  uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  void serve_connection(std::unique_ptr<TcpChannel> chan);

  C1Runtime runtime_;
  TcpListener listener_;
  std::thread accept_thread_;
  std::mutex mx_;
  std::vector<std::thread> conns_;
  std::atomic<bool> stopping_{false};
};

/// Worker side of the partition wire mode: answers ASSIGN frames with
/// RESULT frames until the channel closes.
void serve_partition_worker(Channel& chan,
                            const std::function<std::vector<PlainTuple>(
                                const std::vector<PlainTuple>&)>& skyline_fn);

/// Manager side: ships one partition to a remote worker and waits for
/// its skyline.
std::vector<PlainTuple> assign_partition(Channel& chan, const SessionId& session,
                                         uint64_t partition_id,
                                         const std::vector<PlainTuple>& points);

}  // namespace sky
