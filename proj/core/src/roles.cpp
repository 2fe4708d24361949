#include "skyline/roles.hpp"

#include <chrono>

#include "skyline/partitioner.hpp"

namespace sky {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void merge_counters(ProtocolCounters& into, const ProtocolCounters& from) {
  into.rpcs += from.rpcs;
  into.sm += from.sm;
  into.sbd += from.sbd;
  into.sbd_bits += from.sbd_bits;
  into.snot += from.snot;
  into.sor += from.sor;
  into.sand += from.sand;
  into.sleq += from.sleq;
  into.seq += from.seq;
  into.sless += from.sless;
  into.smin2 += from.smin2;
  into.sdom += from.sdom;
}

}  // namespace

QueryOptions::Protocol protocol_from_name(const std::string& name) {
  if (name == "bssp" || name == "BSSP") return QueryOptions::Protocol::Bssp;
  if (name == "fssp" || name == "FSSP") return QueryOptions::Protocol::Fssp;
  throw DomainError("unknown protocol: " + name);
}

std::string protocol_name(QueryOptions::Protocol p) {
  return p == QueryOptions::Protocol::Bssp ? "BSSP" : "FSSP";
}

QueryExecution c1_execute_query(C1Runtime& rt, const std::vector<Ciphertext>& neg_query,
                                const QueryOptions& opt, const SessionId& token,
                                const std::function<double()>& c2_busy_seconds) {
  auto t0 = Clock::now();
  double c2_busy_before = c2_busy_seconds ? c2_busy_seconds() : 0.0;

  Rng root = rt.seed ? Rng(rt.seed) : Rng();
  std::mutex rng_mx;
  auto split_rng = [&] {
    std::lock_guard lk(rng_mx);
    return root.split();
  };

  std::vector<std::shared_ptr<TimingChannel>> channels;
  std::mutex chan_mx;
  auto open_channel = [&] {
    auto ch = std::make_shared<TimingChannel>(rt.connect_c2());
    std::lock_guard lk(chan_mx);
    channels.push_back(ch);
    return ch;
  };

  QueryExecution out;
  std::mutex counter_mx;

  ProtocolParams base = rt.params;
  base.n = rt.data.size();
  base.m = rt.data.empty() ? neg_query.size() : rt.data[0].attrs.size();
  if (neg_query.size() != base.m) throw DomainError("query dimension mismatch");

  // Preprocessing maps the whole dataset around the query once.
  TwoPartyContext pre_ctx(rt.pk, base, open_channel(), split_rng());
  EncryptedDataset ds = preprocess(pre_ctx, rt.data, neg_query);
  {
    std::lock_guard lk(counter_mx);
    merge_counters(out.counters, pre_ctx.counters());
  }
  if (rt.log)
    rt.log("query accepted protocol=" + protocol_name(opt.protocol) +
           " n=" + std::to_string(base.n) + " m=" + std::to_string(base.m) +
           " s=" + std::to_string(opt.partitions) + " workers=" + std::to_string(opt.workers) +
           (opt.lazy ? " lazy" : ""));

  auto run_instance = [&](const EncryptedDataset& part) -> SkylinePool {
    ProtocolParams params = base;
    params.n = part.mapped.size();
    TwoPartyContext ctx(rt.pk, params, open_channel(), split_rng());
    SkylinePool pool = opt.protocol == QueryOptions::Protocol::Bssp ? bssp(ctx, part)
                                                                    : fssp(ctx, part);
    std::lock_guard lk(counter_mx);
    merge_counters(out.counters, ctx.counters());
    return pool;
  };

  SkylinePool pool;
  if (opt.partitions <= 1 || ds.mapped.size() <= 1) {
    pool = run_instance(ds);
  } else {
    std::vector<PoolEntry> points;
    points.reserve(ds.mapped.size());
    for (size_t i = 0; i < ds.mapped.size(); ++i)
      points.push_back({ds.originals[i], ds.mapped[i]});
    SkylineFn<PoolEntry> engine = [&](const std::vector<PoolEntry>& part) {
      EncryptedDataset sub;
      for (const PoolEntry& e : part) {
        sub.originals.push_back(e.original);
        sub.mapped.push_back(e.mapped);
      }
      return run_instance(sub);
    };
    PartitionPlan plan;
    plan.s = opt.partitions;
    plan.v = ceil_log2(opt.partitions);
    PartitionPlan model = optimal_partitions(ds.mapped.size(), base.m, base.l);
    plan.x_star = model.x_star;
    plan.lazy_threshold = model.lazy_threshold;
    Rng sched_rng = split_rng();
    pool = run_partitioned<PoolEntry>(engine, points, plan, opt.workers, opt.lazy, sched_rng);
  }

  out.k = pool.size();

  // Result return rides a dedicated session keyed by the client's token.
  TwoPartyContext result_ctx(rt.pk, base, open_channel(), split_rng());
  out.noise = send_result(result_ctx, pool, token);
  {
    std::lock_guard lk(counter_mx);
    merge_counters(out.counters, result_ctx.counters());
  }

  double wall = seconds_since(t0);
  double channel_time = 0;
  for (const auto& ch : channels) channel_time += std::chrono::duration<double>(ch->elapsed()).count();
  double c2_busy = c2_busy_seconds ? c2_busy_seconds() - c2_busy_before : 0.0;
  // Busy time of both servers counts as computation; what remains of the
  // time C1 spent blocked on the channel is communication.
  out.comm_seconds = std::max(0.0, channel_time - c2_busy);
  out.comp_seconds = std::max(0.0, wall - out.comm_seconds);
  if (rt.log) rt.log("query done k=" + std::to_string(out.k));
  return out;
}

std::vector<PlainTuple> client_query(Channel& c1, Channel& c2, const PublicKey& pk,
                                     const PlainTuple& query, const QueryOptions& opt, Rng& rng,
                                     uint64_t* k_out) {
  SessionId token = random_session_id(rng);
  ByteWriter w;
  w.u8(opt.protocol == QueryOptions::Protocol::Bssp ? 0 : 1);
  w.u64(opt.partitions);
  w.u32(opt.workers);
  w.u8(opt.lazy ? 1 : 0);
  w.u32(static_cast<uint32_t>(query.size()));
  for (uint64_t q : query) {
    Bigint neg = (pk.n - (Bigint(q) % pk.n)) % pk.n;
    w.bigint(encrypt(pk, neg, rng).value);
  }
  Frame done = rpc(c1, Frame{MsgType::QUERY_SUBMIT, token, w.take()},
                   std::chrono::milliseconds(3'600'000));
  ByteReader dr(done.payload);
  uint64_t k = dr.u64();
  dr.expect_done();
  if (k_out) *k_out = k;

  Frame noise_resp = rpc(c1, Frame{MsgType::RESULT_FETCH_NOISE, token, {}});
  ByteReader nr(noise_resp.payload);
  ResultNoise noise;
  noise.rows = nr.u32();
  noise.cols = nr.u32();
  for (uint32_t i = 0; i < noise.rows * noise.cols; ++i) noise.values.push_back(nr.bigint());
  nr.expect_done();

  return fetch_result(c2, token, pk, noise);
}

C2Server::C2Server(C2Service& service, uint16_t port) : service_(service), listener_(port) {
  accept_thread_ = std::thread([this] {
    for (;;) {
      std::unique_ptr<TcpChannel> chan;
      try {
        chan = listener_.accept();
      } catch (const std::exception&) {
        return;  // listener closed
      }
      std::lock_guard lk(mx_);
      conns_.emplace_back([this, c = std::shared_ptr<TcpChannel>(std::move(chan))] {
        try {
          for (;;) {
            Frame req = c->recv(std::chrono::hours(24));
            c->send(service_.handle(req));
          }
        } catch (const std::exception&) {
          // connection ended
        }
      });
    }
  });
}

C2Server::~C2Server() { stop(); }

void C2Server::stop() {
  if (stopping_.exchange(true)) return;
  listener_.close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lk(mx_);
  for (auto& t : conns_)
    if (t.joinable()) t.join();
}

C1Server::C1Server(C1Runtime runtime, uint16_t port)
    : runtime_(std::move(runtime)), listener_(port) {
  accept_thread_ = std::thread([this] {
    for (;;) {
      std::unique_ptr<TcpChannel> chan;
      try {
        chan = listener_.accept();
      } catch (const std::exception&) {
        return;
      }
      std::lock_guard lk(mx_);
      conns_.emplace_back(
          [this, c = std::shared_ptr<TcpChannel>(std::move(chan))]() mutable {
            try {
              std::map<SessionId, ResultNoise> noise_by_session;
              for (;;) {
                Frame req = c->recv(std::chrono::hours(24));
                try {
                  if (req.type == MsgType::QUERY_SUBMIT) {
                    ByteReader r(req.payload);
                    QueryOptions opt;
                    opt.protocol = r.u8() == 0 ? QueryOptions::Protocol::Bssp
                                               : QueryOptions::Protocol::Fssp;
                    opt.partitions = r.u64();
                    opt.workers = r.u32();
                    opt.lazy = r.u8() == 1;
                    uint32_t m = r.u32();
                    std::vector<Ciphertext> neg_q;
                    neg_q.reserve(m);
                    for (uint32_t j = 0; j < m; ++j)
                      neg_q.push_back(Ciphertext{r.bigint(), runtime_.pk.key_id});
                    r.expect_done();
                    QueryExecution ex = c1_execute_query(runtime_, neg_q, opt, req.session);
                    noise_by_session[req.session] = std::move(ex.noise);
                    ByteWriter w;
                    w.u64(ex.k);
                    c->send(Frame{MsgType::QUERY_DONE, req.session, w.take()});
                  } else if (req.type == MsgType::RESULT_FETCH_NOISE) {
                    auto it = noise_by_session.find(req.session);
                    if (it == noise_by_session.end())
                      throw ProtocolError("no noise stored for this session");
                    ByteWriter w;
                    w.u32(it->second.rows);
                    w.u32(it->second.cols);
                    for (const Bigint& v : it->second.values) w.bigint(v);
                    c->send(Frame{MsgType::RESULT_NOISE, req.session, w.take()});
                    noise_by_session.erase(it);
                  } else {
                    throw ProtocolError("unsupported request at the query server");
                  }
                } catch (const IntegrityError& e) {
                  c->send(make_error_frame(req.session, 2, e.what()));
                } catch (const std::exception& e) {
                  c->send(make_error_frame(req.session, 1, e.what()));
                }
              }
            } catch (const std::exception&) {
              // connection ended
            }
          });
    }
  });
}

C1Server::~C1Server() { stop(); }

void C1Server::stop() {
  if (stopping_.exchange(true)) return;
  listener_.close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lk(mx_);
  for (auto& t : conns_)
    if (t.joinable()) t.join();
}

void serve_partition_worker(Channel& chan,
                            const std::function<std::vector<PlainTuple>(
                                const std::vector<PlainTuple>&)>& skyline_fn) {
  for (;;) {
    Frame req;
    try {
      req = chan.recv(std::chrono::hours(24));
    } catch (const std::exception&) {
      return;
    }
    if (req.type != MsgType::ASSIGN) {
      chan.send(make_error_frame(req.session, 1, "worker only accepts partition assignments"));
      continue;
    }
    ByteReader r(req.payload);
    uint64_t id = r.u64();
    uint32_t count = r.u32();
    uint32_t m = r.u32();
    std::vector<PlainTuple> points;
    points.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
      PlainTuple t(m);
      for (uint32_t j = 0; j < m; ++j) t[j] = r.u64();
      points.push_back(std::move(t));
    }
    r.expect_done();
    std::vector<PlainTuple> result = skyline_fn(points);
    ByteWriter w;
    w.u64(id);
    w.u32(static_cast<uint32_t>(result.size()));
    w.u32(m);
    for (const PlainTuple& t : result)
      for (uint64_t v : t) w.u64(v);
    chan.send(Frame{MsgType::RESULT, req.session, w.take()});
  }
}

std::vector<PlainTuple> assign_partition(Channel& chan, const SessionId& session,
                                         uint64_t partition_id,
                                         const std::vector<PlainTuple>& points) {
  uint32_t m = points.empty() ? 0 : static_cast<uint32_t>(points[0].size());
  ByteWriter w;
  w.u64(partition_id);
  w.u32(static_cast<uint32_t>(points.size()));
  w.u32(m);
  for (const PlainTuple& t : points)
    for (uint64_t v : t) w.u64(v);
  Frame resp = rpc(chan, Frame{MsgType::ASSIGN, session, w.take()});
  ByteReader r(resp.payload);
  uint64_t id = r.u64();
  if (id != partition_id) throw ProtocolError("partition result id mismatch");
  uint32_t count = r.u32();
  uint32_t rm = r.u32();
  std::vector<PlainTuple> result;
  result.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    PlainTuple t(rm);
    for (uint32_t j = 0; j < rm; ++j) t[j] = r.u64();
    result.push_back(std::move(t));
  }
  r.expect_done();
  return result;
}

}  // namespace sky
