#pragma once

// Random packet logs and other generators shared by the property tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mecsim/airlink.hpp"

namespace mecsim::testing {

struct LogShape {
  int n_ul = 200;
  int n_dl = 20;
  Micros span{2'000'000};
  Micros max_delay{60'000};
  double drop_prob = 0.1;
};

inline std::vector<PacketRecord> random_log(std::mt19937_64& rng, int n, Direction dir, const LogShape& s) {
  std::uniform_int_distribution<std::int64_t> t(0, s.span.count() - 1);
  std::uniform_int_distribution<std::int64_t> d(0, s.max_delay.count());
  std::uniform_int_distribution<std::int64_t> bits(1, 20'000);
  std::bernoulli_distribution drop(s.drop_prob);
  std::vector<PacketRecord> out;
  for (int i = 0; i < n; ++i) {
    PacketRecord r;
    r.id = i;
    r.dir = dir;
    r.size_bits = bits(rng);
    r.t_sent = Micros{t(rng)};
    if (!drop(rng)) r.t_delivered = r.t_sent + Micros{d(rng)};
    out.push_back(r);
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("mecsim_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace mecsim::testing
