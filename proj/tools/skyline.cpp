// Command-line front end for the secure skyline engine: key management,
// dataset generation and encryption, the two server roles, client
// queries, verification against the plaintext reference, and benchmark
// sweeps.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

#include "skyline/harness.hpp"
#include "skyline/partitioner.hpp"
#include "skyline/storage.hpp"

using namespace sky;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 2;
constexpr int kExitProtocol = 3;

std::function<void(const std::string&)> file_logger(const std::string& path,
                                                    const std::string& role) {
  if (path.empty()) return {};
  auto out = std::make_shared<std::ofstream>(path, std::ios::app);
  return [out, role](const std::string& line) {
    *out << '[' << role << "] " << line << '\n';
    out->flush();
  };
}

PlainTuple parse_tuple(const std::string& text) {
  PlainTuple q;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) q.push_back(std::stoull(cell));
  if (q.empty()) throw DomainError("empty tuple literal");
  return q;
}

std::vector<uint64_t> parse_u64_list(const std::string& text) {
  std::vector<uint64_t> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
  return out;
}

struct HostPort {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
};

HostPort parse_hostport(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) return {"127.0.0.1", static_cast<uint16_t>(std::stoi(text))};
  return {text.substr(0, colon), static_cast<uint16_t>(std::stoi(text.substr(colon + 1)))};
}

volatile std::sig_atomic_t g_stop = 0;

void wait_for_signal() {
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure skyline query engine"};
  app.require_subcommand(1);

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a Paillier keypair");
  unsigned key_bits = 512;
  std::string pub_path = "pub.key", priv_path = "priv.key";
  uint64_t key_seed = 0;
  keygen_cmd->add_option("-K,--key-size", key_bits, "key size in bits (512/1024/2048)")
      ->envname("SKY_KEY_SIZE");
  keygen_cmd->add_option("--pub", pub_path, "public key output path")->envname("SKY_PUB");
  keygen_cmd->add_option("--priv", priv_path, "private key output path")->envname("SKY_PRIV");
  keygen_cmd->add_option("--seed", key_seed, "RNG seed (0 = nondeterministic)");

  // gen-data
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
  std::string dist_name = "inde", data_out = "data.csv";
  uint64_t gen_n = 1000, gen_seed = 1;
  unsigned gen_m = 2, gen_d = 8;
  gen_cmd->add_option("--dist", dist_name, "corr | inde | anti")->envname("SKY_DIST");
  gen_cmd->add_option("-n,--count", gen_n, "number of tuples")->envname("SKY_N");
  gen_cmd->add_option("-m,--dims", gen_m, "number of dimensions")->envname("SKY_M");
  gen_cmd->add_option("-d,--domain-bits", gen_d, "attribute domain bits")->envname("SKY_D");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("-o,--out", data_out, "output CSV path");

  // encrypt
  auto* enc_cmd = app.add_subcommand("encrypt", "encrypt a CSV dataset attribute-wise");
  std::string enc_csv = "data.csv", enc_pub = "pub.key", enc_out = "data.sky";
  unsigned enc_d = 8, enc_l = 20;
  enc_cmd->add_option("--data", enc_csv, "input CSV");
  enc_cmd->add_option("--pub", enc_pub, "public key");
  enc_cmd->add_option("-o,--out", enc_out, "encrypted dataset output");
  enc_cmd->add_option("-d,--domain-bits", enc_d, "attribute domain bits")->envname("SKY_D");
  enc_cmd->add_option("-l,--value-bits", enc_l, "protocol value bits")->envname("SKY_L");

  // serve-c2
  auto* c2_cmd = app.add_subcommand("serve-c2", "run the key-holder server");
  std::string c2_priv = "priv.key", c2_log;
  uint16_t c2_port = 7702;
  c2_cmd->add_option("--priv", c2_priv, "private key");
  c2_cmd->add_option("-p,--port", c2_port, "listen port")->envname("SKY_C2_PORT");
  c2_cmd->add_option("--log", c2_log, "log file");

  // serve-c1
  auto* c1_cmd = app.add_subcommand("serve-c1", "run the query server");
  std::string c1_pub = "pub.key", c1_data = "data.sky", c1_c2 = "127.0.0.1:7702", c1_log;
  uint16_t c1_port = 7701;
  unsigned c1_kappa = 80;
  c1_cmd->add_option("--pub", c1_pub, "public key");
  c1_cmd->add_option("--data", c1_data, "encrypted dataset");
  c1_cmd->add_option("--c2", c1_c2, "key-holder address host:port")->envname("SKY_C2_ADDR");
  c1_cmd->add_option("-p,--port", c1_port, "listen port")->envname("SKY_C1_PORT");
  c1_cmd->add_option("--kappa", c1_kappa, "statistical masking bits");
  c1_cmd->add_option("--log", c1_log, "log file");

  // query
  auto* q_cmd = app.add_subcommand("query", "run a skyline query as the client");
  std::string q_c1 = "127.0.0.1:7701", q_c2 = "127.0.0.1:7702", q_pub = "pub.key";
  std::string q_tuple, q_proto = "fssp";
  uint64_t q_parts = 1;
  unsigned q_workers = 1;
  bool q_lazy = false;
  q_cmd->add_option("--c1", q_c1, "query server host:port")->envname("SKY_C1_ADDR");
  q_cmd->add_option("--c2", q_c2, "key-holder host:port")->envname("SKY_C2_ADDR");
  q_cmd->add_option("--pub", q_pub, "public key");
  q_cmd->add_option("-q,--query", q_tuple, "query tuple, e.g. 41,125")->required();
  q_cmd->add_option("--protocol", q_proto, "bssp | fssp")->envname("SKY_PROTOCOL");
  q_cmd->add_option("-s,--partitions", q_parts, "partition count (1 = none)");
  q_cmd->add_option("--workers", q_workers, "worker threads");
  q_cmd->add_flag("--lazy", q_lazy, "lazy merging");

  // verify
  auto* v_cmd = app.add_subcommand("verify", "secure protocol vs plaintext reference");
  std::string v_csv, v_tuple, v_proto = "fssp", v_dist = "inde";
  uint64_t v_n = 100, v_seed = 1, v_parts = 1, v_runs = 1;
  unsigned v_m = 2, v_d = 8, v_l = 20, v_K = 512, v_workers = 1;
  bool v_lazy = false;
  v_cmd->add_option("--data", v_csv, "CSV dataset (otherwise synthesized)");
  v_cmd->add_option("--dist", v_dist, "corr | inde | anti for synthesis");
  v_cmd->add_option("-n,--count", v_n, "synthesized tuple count");
  v_cmd->add_option("-m,--dims", v_m, "dimensions");
  v_cmd->add_option("-d,--domain-bits", v_d, "attribute domain bits");
  v_cmd->add_option("-l,--value-bits", v_l, "protocol value bits");
  v_cmd->add_option("-K,--key-size", v_K, "key size");
  v_cmd->add_option("-q,--query", v_tuple, "query tuple (default: domain midpoint)");
  v_cmd->add_option("--protocol", v_proto, "bssp | fssp");
  v_cmd->add_option("-s,--partitions", v_parts, "partition count");
  v_cmd->add_option("--workers", v_workers, "worker threads");
  v_cmd->add_flag("--lazy", v_lazy, "lazy merging");
  v_cmd->add_option("--seed", v_seed, "seed");
  v_cmd->add_option("--runs", v_runs, "number of random configurations");

  // bench
  auto* b_cmd = app.add_subcommand("bench", "sweep parameters, emit a CSV of measurements");
  std::string b_out = "bench.csv", b_protocols = "fssp", b_dist = "inde";
  std::string b_n = "100", b_m = "2", b_K = "512", b_s = "1", b_workers = "1", b_lazy = "0";
  uint64_t b_seed = 1;
  unsigned b_d = 8, b_l = 20;
  b_cmd->add_option("-o,--out", b_out, "output CSV");
  b_cmd->add_option("--protocols", b_protocols, "comma list: bssp,fssp");
  b_cmd->add_option("--dist", b_dist, "dataset distribution");
  b_cmd->add_option("--n-list", b_n, "comma list of n");
  b_cmd->add_option("--m-list", b_m, "comma list of m");
  b_cmd->add_option("--K-list", b_K, "comma list of key sizes");
  b_cmd->add_option("--s-list", b_s, "comma list of partition counts");
  b_cmd->add_option("--workers-list", b_workers, "comma list of worker counts");
  b_cmd->add_option("--lazy-list", b_lazy, "comma list of 0/1");
  b_cmd->add_option("-d,--domain-bits", b_d, "attribute domain bits");
  b_cmd->add_option("-l,--value-bits", b_l, "protocol value bits");
  b_cmd->add_option("--seed", b_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen_cmd) {
      Rng rng = key_seed ? Rng(key_seed) : Rng();
      KeyPair kp = keygen(key_bits, rng);
      save_public_key(pub_path, kp.pk);
      save_private_key(priv_path, kp.sk);
      std::cout << "wrote " << pub_path << " and " << priv_path << " (K=" << key_bits << ")\n";
      return kExitOk;
    }

    if (*gen_cmd) {
      DatasetSpec spec;
      spec.distribution = distribution_from_name(dist_name);
      spec.n = gen_n;
      spec.m = gen_m;
      spec.d = gen_d;
      spec.seed = gen_seed;
      write_csv(data_out, gen_dataset(spec));
      std::cout << "wrote " << data_out << " (" << gen_n << " x " << gen_m << ", "
                << distribution_name(spec.distribution) << ")\n";
      return kExitOk;
    }

    if (*enc_cmd) {
      PublicKey pk = load_public_key(enc_pub);
      auto rows = read_csv(enc_csv);
      Rng rng;
      auto enc_rows = encrypt_rows(pk, rows, enc_d, rng);
      EncryptedFileHeader h;
      h.key_bits = pk.key_bits;
      h.n = static_cast<uint32_t>(enc_rows.size());
      h.m = enc_rows.empty() ? 0 : static_cast<uint32_t>(enc_rows[0].attrs.size());
      h.d = enc_d;
      h.l = enc_l;
      save_encrypted_dataset(enc_out, h, enc_rows);
      std::cout << "wrote " << enc_out << " (n=" << h.n << " m=" << h.m << ")\n";
      return kExitOk;
    }

    if (*c2_cmd) {
      PrivateKey sk = load_private_key(c2_priv);
      PublicKey pk = PublicKey::from_modulus(sk.key_bits, sk.n);
      C2Service service(pk, sk, Rng{});
      service.set_logger(file_logger(c2_log, "c2"));
      C2Server server(service, c2_port);
      std::cout << "key-holder listening on " << server.port() << std::endl;
      wait_for_signal();
      server.stop();
      return kExitOk;
    }

    if (*c1_cmd) {
      PublicKey pk = load_public_key(c1_pub);
      auto [header, rows] = load_encrypted_dataset(c1_data, pk);
      HostPort c2 = parse_hostport(c1_c2);
      C1Runtime rt;
      rt.pk = pk;
      rt.params.l = header.l;
      rt.params.d = header.d;
      rt.params.kappa = c1_kappa;
      rt.params.key_bits = pk.key_bits;
      rt.data = std::move(rows);
      rt.connect_c2 = [c2] {
        return std::shared_ptr<Channel>(TcpChannel::connect(c2.host, c2.port));
      };
      rt.log = file_logger(c1_log, "c1");
      C1Server server(std::move(rt), c1_port);
      std::cout << "query server listening on " << server.port() << std::endl;
      wait_for_signal();
      server.stop();
      return kExitOk;
    }

    if (*q_cmd) {
      PublicKey pk = load_public_key(q_pub);
      HostPort c1 = parse_hostport(q_c1);
      HostPort c2 = parse_hostport(q_c2);
      auto c1_chan = TcpChannel::connect(c1.host, c1.port);
      auto c2_chan = TcpChannel::connect(c2.host, c2.port);
      QueryOptions opt;
      opt.protocol = protocol_from_name(q_proto);
      opt.partitions = q_parts;
      opt.workers = q_workers;
      opt.lazy = q_lazy;
      Rng rng;
      uint64_t k = 0;
      auto result = client_query(*c1_chan, *c2_chan, pk, parse_tuple(q_tuple), opt, rng, &k);
      std::cout << "skyline of " << k << " tuple(s):\n";
      for (const auto& t : result) std::cout << "  " << format_tuple(t) << "\n";
      return kExitOk;
    }

    if (*v_cmd) {
      ProtocolParams params;
      params.l = v_l;
      params.d = v_d;
      params.key_bits = v_K;
      Deployment dep(v_K, v_seed ^ 0xdeadbeef);
      QueryOptions opt;
      opt.protocol = protocol_from_name(v_proto);
      opt.partitions = v_parts;
      opt.workers = v_workers;
      opt.lazy = v_lazy;
      uint64_t failures = 0;
      for (uint64_t run = 0; run < v_runs; ++run) {
        std::vector<PlainTuple> data;
        if (!v_csv.empty()) {
          data = read_csv(v_csv);
        } else {
          DatasetSpec spec;
          spec.distribution = distribution_from_name(v_dist);
          spec.n = v_n;
          spec.m = v_m;
          spec.d = v_d;
          spec.seed = v_seed + run;
          data = gen_dataset(spec);
        }
        PlainTuple q;
        if (!v_tuple.empty()) {
          q = parse_tuple(v_tuple);
        } else {
          q.assign(data.empty() ? v_m : data[0].size(), uint64_t{1} << (v_d - 1));
        }
        VerifyReport rep = verify_inprocess(dep, data, q, params, opt, v_seed + 1000 * run);
        std::cout << (rep.ok ? "PASS" : "FAIL") << " run=" << run << " k=" << rep.k
                  << (rep.ok ? "" : " " + rep.detail) << "\n";
        if (!rep.ok) ++failures;
      }
      return failures == 0 ? kExitOk : kExitMismatch;
    }

    if (*b_cmd) {
      ProtocolParams params;
      params.d = b_d;
      params.l = b_l;
      std::ofstream out(b_out);
      out << BenchRecord::csv_header() << "\n";
      std::stringstream ps(b_protocols);
      std::string proto;
      std::vector<std::string> protocols;
      while (std::getline(ps, proto, ',')) protocols.push_back(proto);
      uint64_t cell = 0;
      for (unsigned K : parse_u64_list(b_K)) {
        Deployment dep(K, b_seed ^ 0xbadc0ffee);
        for (uint64_t n : parse_u64_list(b_n))
          for (uint64_t m : parse_u64_list(b_m))
            for (uint64_t s : parse_u64_list(b_s))
              for (uint64_t workers : parse_u64_list(b_workers))
                for (uint64_t lazy : parse_u64_list(b_lazy))
                  for (const std::string& p : protocols) {
                    DatasetSpec spec;
                    spec.distribution = distribution_from_name(b_dist);
                    spec.n = n;
                    spec.m = static_cast<unsigned>(m);
                    spec.d = b_d;
                    spec.seed = b_seed + cell;
                    QueryOptions opt;
                    opt.protocol = protocol_from_name(p);
                    opt.partitions = s;
                    opt.workers = static_cast<unsigned>(workers);
                    opt.lazy = lazy != 0;
                    ProtocolParams cell_params = params;
                    cell_params.key_bits = K;
                    PlainTuple q(spec.m, uint64_t{1} << (b_d - 1));
                    try {
                      auto data = gen_dataset(spec);
                      auto outc =
                          run_query_inprocess(dep, data, q, cell_params, opt, b_seed + 77 * cell);
                      out << outc.record.csv_row() << "\n";
                      std::cout << outc.record.csv_row() << std::endl;
                    } catch (const std::exception& e) {
                      std::cout << "cell failed (" << p << " n=" << n << " m=" << m << "): "
                                << e.what() << std::endl;
                      out << p << ',' << n << ',' << m << ',' << K << ',' << b_l << ',' << s << ','
                          << lazy << ',' << workers << ",nan,nan,0\n";
                    }
                    ++cell;
                  }
      }
      std::cout << "wrote " << b_out << "\n";
      return kExitOk;
    }
  } catch (const IntegrityError& e) {
    std::cerr << "protocol-integrity error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
