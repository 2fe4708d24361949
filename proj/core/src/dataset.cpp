#include "skyline/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sky {

Distribution distribution_from_name(const std::string& name) {
  if (name == "corr" || name == "CORR") return Distribution::Correlated;
  if (name == "inde" || name == "INDE") return Distribution::Independent;
  if (name == "anti" || name == "ANTI") return Distribution::Anticorrelated;
  if (name == "csv" || name == "CSV") return Distribution::Csv;
  throw DomainError("unknown distribution: " + name);
}

std::string distribution_name(Distribution d) {
  switch (d) {
    case Distribution::Correlated: return "CORR";
    case Distribution::Independent: return "INDE";
    case Distribution::Anticorrelated: return "ANTI";
    case Distribution::Csv: return "CSV";
  }
  return "?";
}

std::vector<PlainTuple> gen_dataset(const DatasetSpec& spec) {
  if (spec.distribution == Distribution::Csv) return read_csv(spec.csv_path);
  if (spec.m == 0 || spec.d == 0 || spec.d > 30) throw DomainError("bad dataset spec");
  const double domain = std::exp2(spec.d);
  const uint64_t max_value = (uint64_t{1} << spec.d) - 1;
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<uint64_t> uniform_attr(0, max_value);
  std::uniform_real_distribution<double> uniform01(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.05 * domain);
  auto clamp = [&](double v) -> uint64_t {
    if (v < 0.0) return 0;
    if (v > static_cast<double>(max_value)) return max_value;
    return static_cast<uint64_t>(std::llround(v));
  };

  std::vector<PlainTuple> out;
  out.reserve(spec.n);
  for (uint64_t i = 0; i < spec.n; ++i) {
    PlainTuple t(spec.m);
    switch (spec.distribution) {
      case Distribution::Independent:
        for (unsigned j = 0; j < spec.m; ++j) t[j] = uniform_attr(rng);
        break;
      case Distribution::Correlated: {
        // one base value per point, small per-attribute jitter
        double base = uniform01(rng) * domain;
        for (unsigned j = 0; j < spec.m; ++j) t[j] = clamp(std::round(base + jitter(rng)));
        break;
      }
      case Distribution::Anticorrelated: {
        // a point on the constant-sum simplex via normalized
        // exponentials, plus jitter
        double target_sum = spec.m * domain / 2.0;
        std::vector<double> e(spec.m);
        double total = 0.0;
        for (unsigned j = 0; j < spec.m; ++j) {
          e[j] = -std::log(1.0 - uniform01(rng));
          total += e[j];
        }
        for (unsigned j = 0; j < spec.m; ++j)
          t[j] = clamp(std::round(e[j] / total * target_sum + jitter(rng)));
        break;
      }
      case Distribution::Csv:
        break;
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<PlainTuple>& points,
               const std::vector<std::string>& columns) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open for writing: " + path);
  size_t m = points.empty() ? columns.size() : points[0].size();
  for (size_t j = 0; j < m; ++j) {
    if (j) f << ',';
    f << (j < columns.size() ? columns[j] : "a" + std::to_string(j + 1));
  }
  f << '\n';
  for (const PlainTuple& t : points) {
    for (size_t j = 0; j < t.size(); ++j) {
      if (j) f << ',';
      f << t[j];
    }
    f << '\n';
  }
  if (!f) throw DomainError("write failed: " + path);
}

std::vector<PlainTuple> read_csv(const std::string& path, std::vector<std::string>* columns) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DomainError("empty csv: " + path);
  if (columns) {
    columns->clear();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) columns->push_back(cell);
  }
  std::vector<PlainTuple> out;
  size_t m = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    PlainTuple t;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) t.push_back(std::stoull(cell));
    if (m == 0)
      m = t.size();
    else if (t.size() != m)
      throw DomainError("ragged csv row in " + path);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace sky
