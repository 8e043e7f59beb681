#include "tactics/prematch.hpp"

namespace tactics::kernels {

std::vector<OutcomeDistribution> predict_outcomes_serial(const PayoffNet& net, const std::vector<FeatureVector>& xs) {
  std::vector<OutcomeDistribution> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict_outcome(net, xs[i]);
  return out;
}

std::vector<OutcomeDistribution> predict_outcomes_omp(const PayoffNet& net, const std::vector<FeatureVector>& xs) {
  std::vector<OutcomeDistribution> out(xs.size());
  const auto n = static_cast<long>(xs.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    slot.run([&] { out[i] = predict_outcome(net, xs[i]); });
  }
  slot.rethrow();
  return out;
}

}  // namespace tactics::kernels
