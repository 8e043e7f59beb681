#include "tactics/clustering.hpp"
#include "tactics/rng.hpp"

namespace tactics::kernels {

std::vector<KMeansRun> kmeans_restarts_serial(const std::vector<Point>& points, std::span<const double> weights,
                                              int k, std::uint64_t seed, int restarts, int max_iterations) {
  std::vector<KMeansRun> runs(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r) {
    runs[r] = lloyd_run(points, weights, k, derive_seed(seed, static_cast<std::uint64_t>(r)), max_iterations);
    runs[r].restart = r;
  }
  return runs;
}

std::vector<KMeansRun> kmeans_restarts_omp(const std::vector<Point>& points, std::span<const double> weights,
                                           int k, std::uint64_t seed, int restarts, int max_iterations) {
  std::vector<KMeansRun> runs(static_cast<std::size_t>(restarts));
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    slot.run([&] {
      runs[r] = lloyd_run(points, weights, k, derive_seed(seed, static_cast<std::uint64_t>(r)), max_iterations);
      runs[r].restart = r;
    });
  }
  slot.rethrow();
  return runs;
}

}  // namespace tactics::kernels
