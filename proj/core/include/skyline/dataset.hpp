#pragma once

#include <string>

#include "skyline/oracle.hpp"

namespace sky {

enum class Distribution { Correlated, Independent, Anticorrelated, Csv };

struct DatasetSpec {
  Distribution distribution = Distribution::Independent;
  uint64_t n = 1000;
  unsigned m = 2;
  unsigned d = 8;  // attribute values in [0, 2^d)
  uint64_t seed = 1;
  std::string csv_path;  // for Distribution::Csv
};

Distribution distribution_from_name(const std::string& name);
std::string distribution_name(Distribution d);

/// Deterministic under (distribution, n, m, d, seed).
std::vector<PlainTuple> gen_dataset(const DatasetSpec& spec);

void write_csv(const std::string& path, const std::vector<PlainTuple>& points,
               const std::vector<std::string>& columns = {});
/// Any integer table with a header row.
std::vector<PlainTuple> read_csv(const std::string& path, std::vector<std::string>* columns = nullptr);

}  // namespace sky
