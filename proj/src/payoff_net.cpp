#include "tactics/payoff_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tactics/error.hpp"
#include "tactics/rbf.hpp"
#include "tactics/rng.hpp"

namespace tactics {

std::size_t payoff_feature_dim(int num_styles) {
  return 2 * static_cast<std::size_t>(num_styles) + 2 * kFormationCount + kOutcomeClasses;
}

FeatureVector encode_payoff_features(const TacticChoice& home, const TacticChoice& away,
                                     const OutcomeDistribution& strength, int num_styles) {
  TACTICS_CHECK(home.style >= 0 && home.style < num_styles && away.style >= 0 && away.style < num_styles,
                "payoff features: style index out of range");
  const auto k = static_cast<std::size_t>(num_styles);
  FeatureVector x(payoff_feature_dim(num_styles), 0.0);
  x[static_cast<std::size_t>(home.style)] = 1.0;
  x[k + static_cast<std::size_t>(away.style)] = 1.0;
  x[2 * k + static_cast<std::size_t>(formation_index(home.formation))] = 1.0;
  x[2 * k + kFormationCount + static_cast<std::size_t>(formation_index(away.formation))] = 1.0;
  const std::size_t s = 2 * k + 2 * kFormationCount;
  x[s] = strength.p_home;
  x[s + 1] = strength.p_draw;
  x[s + 2] = strength.p_away;
  return x;
}

std::size_t PayoffNet::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

double& PayoffNet::param(std::size_t i) {
  for (auto& l : layers) {
    if (i < l.weights.size()) return l.weights[i];
    i -= l.weights.size();
    if (i < l.bias.size()) return l.bias[i];
    i -= l.bias.size();
  }
  throw Error("PayoffNet::param: index out of range");
}

double PayoffNet::param(std::size_t i) const { return const_cast<PayoffNet*>(this)->param(i); }

namespace {

// Activations for every layer boundary: acts[0] = input, acts[L] = logits.
// pre[l] holds layer l's affine output before the nonlinearity.
struct Trace {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> pre;
};

Trace forward(const PayoffNet& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw Error("payoff net: feature dimension " + std::to_string(x.size()) + " does not match " +
                std::to_string(net.input_dim()));
  }
  Trace t;
  t.acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& in = t.acts.back();
    std::vector<double> z(static_cast<std::size_t>(layer.out));
    for (int o = 0; o < layer.out; ++o) {
      double s = layer.bias[o];
      const double* row = &layer.weights[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) s += row[i] * in[i];
      z[o] = s;
    }
    t.pre.push_back(z);
    const bool hidden = l + 1 < net.layers.size();
    if (hidden && net.activation == Activation::kReLU) {
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    }
    t.acts.push_back(std::move(z));
  }
  return t;
}

// Accumulates d(loss)/d(param) into `grad` (PayoffNet::param order).
void backward(const PayoffNet& net, const Trace& t, std::span<const double> target, std::vector<double>& grad,
              double scale) {
  const auto p = softmax(t.acts.back());
  std::vector<double> delta(p.size());
  double tsum = 0.0;
  for (double v : target) tsum += v;
  for (std::size_t c = 0; c < p.size(); ++c) delta[c] = tsum * p[c] - target[c];

  std::vector<std::size_t> offset(net.layers.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    offset[l] = off;
    off += net.layers[l].weights.size() + net.layers[l].bias.size();
  }

  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const auto& layer = net.layers[l];
    const auto& in = t.acts[l];
    const std::size_t w0 = offset[l];
    const std::size_t b0 = w0 + layer.weights.size();
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o] * scale;
      if (d == 0.0) continue;
      double* g = &grad[w0 + static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) g[i] += d * in[i];
      grad[b0 + o] += d;
    }
    if (l == 0) break;
    std::vector<double> prev(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* row = &layer.weights[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) prev[i] += row[i] * delta[o];
    }
    if (net.activation == Activation::kReLU) {
      const auto& z = t.pre[l - 1];
      for (int i = 0; i < layer.in; ++i) {
        if (z[i] <= 0.0) prev[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
}

std::array<double, kOutcomeClasses> one_hot(int label) {
  std::array<double, kOutcomeClasses> t{};
  t[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

}  // namespace

std::vector<double> PayoffNet::logits(std::span<const double> x) const { return forward(*this, x).acts.back(); }

PayoffNet init_payoff_net(std::size_t input_dim, const NetConfig& config) {
  TACTICS_CHECK(input_dim > 0, "payoff net: zero input dimension");
  PayoffNet net;
  net.activation = config.activation;
  Rng rng(derive_seed(config.seed, 0x1217));
  std::vector<int> sizes{static_cast<int>(input_dim)};
  for (int h : config.hidden_sizes) {
    TACTICS_CHECK(h > 0, "payoff net: hidden sizes must be positive");
    sizes.push_back(h);
  }
  sizes.push_back(kOutcomeClasses);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    layer.in = sizes[l];
    layer.out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / layer.in);
    layer.weights.resize(static_cast<std::size_t>(layer.in) * layer.out);
    for (auto& w : layer.weights) w = uniform(rng, -limit, limit);
    layer.bias.assign(static_cast<std::size_t>(layer.out), 0.0);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

double mean_cross_entropy(const PayoffNet& net, const std::vector<LabelledRow>& rows) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) {
    const auto t = one_hot(r.label);
    s += cross_entropy(net, r.x, t);
  }
  return s / static_cast<double>(rows.size());
}

PayoffNet train_payoff_net(const std::vector<LabelledRow>& rows, const NetConfig& config) {
  if (rows.empty()) throw Error("train_payoff_net: empty training set");
  const std::size_t dim = rows.front().x.size();
  for (const auto& r : rows) {
    if (r.x.size() != dim) throw Error("train_payoff_net: feature dimension mismatch");
    TACTICS_CHECK(r.label >= 0 && r.label < kOutcomeClasses, "train_payoff_net: label out of range");
  }
  TACTICS_CHECK(config.batch_size >= 1 && config.epochs >= 0, "train_payoff_net: bad batch size or epochs");

  std::vector<LabelledRow> data = rows;
  std::sort(data.begin(), data.end(), [](const LabelledRow& a, const LabelledRow& b) {
    return a.x != b.x ? a.x < b.x : a.label < b.label;
  });

  PayoffNet net = init_payoff_net(dim, config);
  Rng rng(derive_seed(config.seed, 0x5eed));
  net.loss_log.push_back(mean_cross_entropy(net, data));

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.num_params());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const auto& r = data[order[b]];
        const auto t = one_hot(r.label);
        backward(net, forward(net, r.x), t, grad, scale);
      }
      std::size_t i = 0;
      for (auto& layer : net.layers) {
        for (auto& w : layer.weights) w -= config.learning_rate * grad[i++];
        for (auto& b : layer.bias) b -= config.learning_rate * grad[i++];
      }
    }
    const double loss = mean_cross_entropy(net, data);
    if (!std::isfinite(loss)) throw Error("train_payoff_net: non-finite loss (learning rate too large?)");
    net.loss_log.push_back(loss);
  }
  return net;
}

OutcomeDistribution predict_outcome(const PayoffNet& net, std::span<const double> x) {
  const auto p = softmax(net.logits(x));
  return {p[0], p[1], p[2]};
}

double cross_entropy(const PayoffNet& net, std::span<const double> x, std::span<const double> target) {
  const auto z = net.logits(x);
  const double mx = *std::max_element(z.begin(), z.end());
  double lse = 0.0;
  for (double v : z) lse += std::exp(v - mx);
  lse = mx + std::log(lse);
  double loss = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) loss -= target[c] * (z[c] - lse);
  return loss;
}

std::vector<double> loss_gradient(const PayoffNet& net, std::span<const double> x, std::span<const double> target) {
  std::vector<double> grad(net.num_params(), 0.0);
  backward(net, forward(net, x), target, grad, 1.0);
  return grad;
}

double gradient_check(const PayoffNet& net, const GradientSample& sample, double epsilon) {
  TACTICS_CHECK(epsilon > 0.0 && epsilon <= 1e-3, "gradient_check: epsilon must be in (0, 1e-3]");
  const auto analytic = loss_gradient(net, sample.x, sample.target);
  PayoffNet probe = net;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.num_params(); ++i) {
    const double orig = probe.param(i);
    probe.param(i) = orig + epsilon;
    const double up = cross_entropy(probe, sample.x, sample.target);
    probe.param(i) = orig - epsilon;
    const double down = cross_entropy(probe, sample.x, sample.target);
    probe.param(i) = orig;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double err = std::abs(analytic[i] - numeric) / std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-8);
    worst = std::max(worst, err);
  }
  return worst;
}

void to_json(json& j, const PayoffNet& n) {
  json layers = json::array();
  for (const auto& l : n.layers) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
  }
  j = json{{"activation", n.activation == Activation::kReLU ? "relu" : "identity"}, {"layers", layers}};
}

void from_json(const json& j, PayoffNet& n) {
  n.activation = j.at("activation").get<std::string>() == "relu" ? Activation::kReLU : Activation::kIdentity;
  n.layers.clear();
  int prev = -1;
  for (const auto& jl : j.at("layers")) {
    DenseLayer l;
    l.in = jl.at("in").get<int>();
    l.out = jl.at("out").get<int>();
    l.weights = jl.at("weights").get<std::vector<double>>();
    l.bias = jl.at("bias").get<std::vector<double>>();
    if (l.weights.size() != static_cast<std::size_t>(l.in) * l.out || l.bias.size() != static_cast<std::size_t>(l.out)) {
      throw Error("payoff net: layer shape mismatch");
    }
    if (prev >= 0 && prev != l.in) throw Error("payoff net: layer dimensions do not chain");
    prev = l.out;
    n.layers.push_back(std::move(l));
  }
  if (n.layers.empty() || prev != kOutcomeClasses) throw Error("payoff net: output layer must have width 3");
}

std::string loss_log_csv(const PayoffNet& net) {
  std::ostringstream out;
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < net.loss_log.size(); ++e) out << e << ',' << json(net.loss_log[e]).dump() << '\n';
  return out.str();
}

}  // namespace tactics
