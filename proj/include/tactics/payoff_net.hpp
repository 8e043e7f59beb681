#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tactics/domain.hpp"
#include "tactics/io.hpp"

namespace tactics {

using FeatureVector = std::vector<double>;

inline constexpr int kOutcomeClasses = 3;

// [one-hot home style | one-hot away style | one-hot home formation |
//  one-hot away formation | strength (p_home, p_draw, p_away)]
// Formations are indexed over all 36 valid formations.
FeatureVector encode_payoff_features(const TacticChoice& home, const TacticChoice& away,
                                     const OutcomeDistribution& strength, int num_styles);
std::size_t payoff_feature_dim(int num_styles);

enum class Activation { kReLU, kIdentity };

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;
};

// Fully connected classifier: hidden layers with `activation`, a linear
// output layer of width 3, softmax on top.
struct PayoffNet {
  std::vector<DenseLayer> layers;
  Activation activation = Activation::kReLU;
  std::vector<double> loss_log;  // entry 0 is the loss before training

  std::size_t input_dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().in); }
  std::size_t num_params() const;
  double& param(std::size_t i);
  double param(std::size_t i) const;

  std::vector<double> logits(std::span<const double> x) const;
};

struct NetConfig {
  std::vector<int> hidden_sizes{32, 16};
  int epochs = 60;
  int batch_size = 32;
  double learning_rate = 0.02;
  std::uint64_t seed = 0;
  Activation activation = Activation::kReLU;
};

// Uniform He-style initialization, U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
PayoffNet init_payoff_net(std::size_t input_dim, const NetConfig& config);

struct LabelledRow {
  FeatureVector x;
  int label = 0;  // MatchResult as int
};

// Mini-batch SGD on mean categorical cross-entropy. Rows are put in a
// canonical order before the seeded shuffle, so the result depends on the
// row multiset and the seed only.
PayoffNet train_payoff_net(const std::vector<LabelledRow>& rows, const NetConfig& config = {});

OutcomeDistribution predict_outcome(const PayoffNet& net, std::span<const double> x);

// -sum_c target_c log p_c for one sample.
double cross_entropy(const PayoffNet& net, std::span<const double> x, std::span<const double> target);

// Analytic gradient of cross_entropy with respect to every parameter, in
// PayoffNet::param order.
std::vector<double> loss_gradient(const PayoffNet& net, std::span<const double> x, std::span<const double> target);

struct GradientSample {
  FeatureVector x;
  std::array<double, kOutcomeClasses> target{};
};

// Max over parameters of |analytic - numeric| / max(|analytic| + |numeric|, 1e-8),
// with central differences of step epsilon.
double gradient_check(const PayoffNet& net, const GradientSample& sample, double epsilon);

double mean_cross_entropy(const PayoffNet& net, const std::vector<LabelledRow>& rows);

void to_json(json& j, const PayoffNet& n);
void from_json(const json& j, PayoffNet& n);
std::string loss_log_csv(const PayoffNet& net);

}  // namespace tactics
