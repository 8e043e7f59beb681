#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tactics/clustering.hpp"
#include "tactics/io.hpp"

namespace tactics {

struct RbfConfig {
  int n_centers = 40;
  // <= 0 selects the median pairwise distance between centers.
  double sigma = 0.0;
  double ridge = 1e-3;
  bool standardize = false;
  std::uint64_t seed = 0;
  int kmeans_restarts = 3;
};

// Radial basis function network: score_c(x) = sum_i weight[i][c] * phi(|x - center_i|)
// with a Gaussian phi of bandwidth sigma, followed by a softmax whose inverse
// temperature is chosen on the training rows.
class RbfClassifier {
 public:
  std::vector<Point> centers;
  double sigma = 1.0;
  std::vector<std::vector<double>> weights;  // centers x classes
  std::vector<std::string> vocab;            // class labels
  std::optional<Scaler> scaler;
  double softmax_scale = 1.0;
  std::size_t input_dim = 0;
  // Classes seen in training; the softmax runs over these only, so a class
  // without rows has probability 0. Empty means every class was seen.
  std::vector<bool> observed;

  std::size_t num_classes() const { return vocab.size(); }
  std::vector<double> scores(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;
  // Argmax of predict_proba, lowest class index on ties.
  int predict(std::span<const double> x) const;
};

// Centers from weighted k-means over the distinct training inputs, weights
// by ridge-regularized least squares against one-hot targets. Targets index
// into `vocab`; classes without rows are allowed, get zero
// weight and zero probability.
RbfClassifier train_rbf(const std::vector<Point>& inputs, std::span<const int> targets,
                        std::vector<std::string> vocab, const RbfConfig& config = {});

std::vector<double> softmax(std::span<const double> logits, double scale = 1.0);
// Softmax restricted to entries with mask[i] set; the rest get 0. An empty
// mask keeps every entry.
std::vector<double> masked_softmax(std::span<const double> logits, const std::vector<bool>& mask, double scale = 1.0);

void to_json(json& j, const RbfClassifier& c);
void from_json(const json& j, RbfClassifier& c);

}  // namespace tactics
