#include "byzpg/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace byzpg {

namespace {

struct LayerShape {
  int in = 0;
  int out = 0;
  std::size_t w_ofs = 0;  // row-major (out x in)
  std::size_t b_ofs = 0;
};

// Layers in order: hidden layers, then the logits layer.
std::vector<LayerShape> layout(const PolicySpec& spec) {
  if (spec.input_dim < 1 || spec.action_count < 1)
    throw std::invalid_argument("policy: input_dim and action_count must be positive");
  if (spec.architecture == PolicyArch::linear && !spec.hidden_sizes.empty())
    throw std::invalid_argument("policy: linear architecture takes no hidden layers");
  if (spec.hidden_sizes.size() > 2)
    throw std::invalid_argument("policy: at most two hidden layers are supported");
  std::vector<LayerShape> shapes;
  int in = spec.input_dim;
  std::size_t ofs = 0;
  auto push = [&](int out) {
    LayerShape s;
    s.in = in;
    s.out = out;
    s.w_ofs = ofs;
    ofs += static_cast<std::size_t>(out) * static_cast<std::size_t>(in);
    s.b_ofs = ofs;
    ofs += static_cast<std::size_t>(out);
    shapes.push_back(s);
    in = out;
  };
  if (spec.architecture == PolicyArch::mlp) {
    for (int h : spec.hidden_sizes) {
      if (h < 1) throw std::invalid_argument("policy: hidden sizes must be positive");
      push(h);
    }
  }
  push(spec.action_count);
  return shapes;
}

double activate(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// derivative expressed through the stored activation value
double activate_deriv(Activation act, double a) {
  return act == Activation::relu ? (a > 0.0 ? 1.0 : 0.0) : 1.0 - a * a;
}

struct Forward {
  std::vector<std::vector<double>> acts;  // acts[0] = input, last = output (post out-activation)
  std::vector<double> log_probs;
};

Forward forward_pass(const PolicySpec& spec, const std::vector<LayerShape>& shapes,
                     const ParamVector& theta, const std::vector<double>& state) {
  if (static_cast<int>(state.size()) != spec.input_dim)
    throw std::invalid_argument("policy: state dimension mismatch");
  Forward f;
  f.acts.reserve(shapes.size() + 1);
  f.acts.push_back(state);
  for (std::size_t li = 0; li < shapes.size(); ++li) {
    const LayerShape& L = shapes[li];
    const bool last = li + 1 == shapes.size();
    const auto& x = f.acts.back();
    std::vector<double> y(static_cast<std::size_t>(L.out));
    for (int j = 0; j < L.out; ++j) {
      double z = theta[L.b_ofs + static_cast<std::size_t>(j)];
      const std::size_t row = L.w_ofs + static_cast<std::size_t>(j) * static_cast<std::size_t>(L.in);
      for (int i = 0; i < L.in; ++i) z += theta[row + static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      if (last) {
        y[static_cast<std::size_t>(j)] =
            spec.output_activation == OutputActivation::tanh ? std::tanh(z) : z;
      } else {
        y[static_cast<std::size_t>(j)] = activate(spec.hidden_activation, z);
      }
    }
    f.acts.push_back(std::move(y));
  }
  // stable log-softmax over the output layer
  const auto& logits = f.acts.back();
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  f.log_probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) f.log_probs[i] = logits[i] - lse;
  return f;
}

}  // namespace

int param_count(const PolicySpec& spec) {
  const auto shapes = layout(spec);
  const LayerShape& last = shapes.back();
  return static_cast<int>(last.b_ofs + static_cast<std::size_t>(last.out));
}

ParamVector init_params(const PolicySpec& spec, RngStream& rng) {
  const auto shapes = layout(spec);
  ParamVector theta(static_cast<std::size_t>(param_count(spec)), 0.0);
  for (const LayerShape& L : shapes) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(L.in));
    const std::size_t n = static_cast<std::size_t>(L.out) * static_cast<std::size_t>(L.in);
    for (std::size_t i = 0; i < n; ++i) theta[L.w_ofs + i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return theta;
}

std::vector<double> action_log_probs(const PolicySpec& spec, const ParamVector& theta,
                                     const std::vector<double>& state) {
  const auto shapes = layout(spec);
  if (static_cast<int>(theta.size()) != param_count(spec))
    throw std::invalid_argument("policy: parameter vector length mismatch");
  return forward_pass(spec, shapes, theta, state).log_probs;
}

int sample_action(const PolicySpec& spec, const ParamVector& theta,
                  const std::vector<double>& state, RngStream& rng, double* log_prob_out) {
  const auto lp = action_log_probs(spec, theta, state);
  const double u = rng.uniform01();
  double cum = 0.0;
  int action = static_cast<int>(lp.size()) - 1;
  for (std::size_t a = 0; a < lp.size(); ++a) {
    cum += std::exp(lp[a]);
    if (u < cum) {
      action = static_cast<int>(a);
      break;
    }
  }
  if (log_prob_out) *log_prob_out = lp[static_cast<std::size_t>(action)];
  return action;
}

ParamVector log_prob_gradient(const PolicySpec& spec, const ParamVector& theta,
                              const std::vector<double>& state, int action) {
  const auto shapes = layout(spec);
  if (static_cast<int>(theta.size()) != param_count(spec))
    throw std::invalid_argument("policy: parameter vector length mismatch");
  if (action < 0 || action >= spec.action_count)
    throw std::invalid_argument("policy: action out of range");
  const Forward f = forward_pass(spec, shapes, theta, state);

  ParamVector grad(theta.size(), 0.0);
  // d log softmax_a / d output_j = [j == a] - softmax_j
  const auto& out = f.acts.back();
  std::vector<double> delta(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    delta[j] = (static_cast<int>(j) == action ? 1.0 : 0.0) - std::exp(f.log_probs[j]);
  }
  if (spec.output_activation == OutputActivation::tanh) {
    for (std::size_t j = 0; j < out.size(); ++j) delta[j] *= 1.0 - out[j] * out[j];
  }
  for (std::size_t li = shapes.size(); li-- > 0;) {
    const LayerShape& L = shapes[li];
    const auto& x = f.acts[li];
    for (int j = 0; j < L.out; ++j) {
      const double dj = delta[static_cast<std::size_t>(j)];
      const std::size_t row = L.w_ofs + static_cast<std::size_t>(j) * static_cast<std::size_t>(L.in);
      for (int i = 0; i < L.in; ++i) grad[row + static_cast<std::size_t>(i)] = dj * x[static_cast<std::size_t>(i)];
      grad[L.b_ofs + static_cast<std::size_t>(j)] = dj;
    }
    if (li == 0) break;
    std::vector<double> prev(static_cast<std::size_t>(L.in), 0.0);
    for (int i = 0; i < L.in; ++i) {
      double s = 0.0;
      for (int j = 0; j < L.out; ++j) {
        s += theta[L.w_ofs + static_cast<std::size_t>(j) * static_cast<std::size_t>(L.in) +
                   static_cast<std::size_t>(i)] *
             delta[static_cast<std::size_t>(j)];
      }
      prev[static_cast<std::size_t>(i)] = s * activate_deriv(spec.hidden_activation, x[static_cast<std::size_t>(i)]);
    }
    delta = std::move(prev);
  }
  return grad;
}

}  // namespace byzpg
