#include "tactics/league.hpp"
#include "tactics/rng.hpp"

namespace tactics::kernels {

std::vector<MatchRecord> simulate_batch_serial(const GroundTruth& truth, const Roster& roster,
                                               const std::vector<MatchRecord>& fixtures, std::uint64_t seed) {
  std::vector<MatchRecord> out(fixtures.size());
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    out[i] = simulate_match(truth, roster, fixtures[i], derive_seed(seed, i));
  }
  return out;
}

std::vector<MatchRecord> simulate_batch_omp(const GroundTruth& truth, const Roster& roster,
                                            const std::vector<MatchRecord>& fixtures, std::uint64_t seed) {
  std::vector<MatchRecord> out(fixtures.size());
  const auto n = static_cast<long>(fixtures.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    slot.run([&] {
      const auto idx = static_cast<std::size_t>(i);
      out[idx] = simulate_match(truth, roster, fixtures[idx], derive_seed(seed, idx));
    });
  }
  slot.rethrow();
  return out;
}

}  // namespace tactics::kernels
