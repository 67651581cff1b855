#include "skeleform/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "skeleform/error.hpp"
#include "skeleform/json_util.hpp"
#include "skeleform/rng.hpp"

namespace skeleform {
namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
  }
  return z;
}

double activate_grad(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw Error(ErrorCode::shape,
                std::string(what) + " has length " + std::to_string(got) + ", expected " + std::to_string(want));
}

double round_significant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
std::string_view to_string(ModelKind k) { return k == ModelKind::factor ? "factor" : "completion"; }

void validate(const MlpConfig& config) {
  if (config.layer_sizes.size() < 2) throw Error(ErrorCode::invalid_argument, "an MLP needs at least two layer sizes");
  for (std::size_t s : config.layer_sizes)
    if (s == 0) throw Error(ErrorCode::invalid_argument, "layer sizes must be positive");
}

MlpModel::MlpModel(MlpConfig config, ModelKind kind) : config_(std::move(config)), kind_(kind) {
  validate(config_);
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < config_.layer_sizes.size(); ++l) {
    offsets_.push_back(total);
    total += config_.layer_sizes[l] * config_.layer_sizes[l + 1] + config_.layer_sizes[l + 1];
  }
  params_.assign(total, 0.0);
}

std::span<double> MlpModel::weights(std::size_t layer) {
  return std::span(params_).subspan(weight_offset(layer), fan_in(layer) * fan_out(layer));
}
std::span<const double> MlpModel::weights(std::size_t layer) const {
  return std::span(params_).subspan(weight_offset(layer), fan_in(layer) * fan_out(layer));
}
std::span<double> MlpModel::bias(std::size_t layer) {
  return std::span(params_).subspan(bias_offset(layer), fan_out(layer));
}
std::span<const double> MlpModel::bias(std::size_t layer) const {
  return std::span(params_).subspan(bias_offset(layer), fan_out(layer));
}

MlpModel mlp_init(const MlpConfig& config, ModelKind kind) {
  MlpModel m(config, kind);
  Rng rng(config.seed);
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(m.fan_in(l) + m.fan_out(l)));
    for (double& w : m.weights(l)) w = rng.uniform(-bound, bound);
  }
  return m;
}

std::span<const double> mlp_forward_into(const MlpModel& m, std::span<const double> input, ForwardCache& cache) {
  check_size(input.size(), m.input_size(), "input");
  const std::size_t layers = m.num_layers();
  cache.inputs.resize(layers);
  cache.preactivations.resize(layers);
  cache.inputs[0].assign(input.begin(), input.end());
  const Activation act = m.config().activation;

  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = m.fan_in(l);
    const std::size_t out = m.fan_out(l);
    const double* w = m.weights(l).data();
    const double* b = m.bias(l).data();
    const double* x = cache.inputs[l].data();
    std::vector<double>& z = cache.preactivations[l];
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w + o * in;
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      z[o] = acc + b[o];
    }
    if (l + 1 < layers) {
      std::vector<double>& next = cache.inputs[l + 1];
      next.resize(out);
      for (std::size_t o = 0; o < out; ++o) next[o] = activate(act, z[o]);
    }
  }
  return cache.preactivations.back();
}

ForwardPass mlp_forward(const MlpModel& m, std::span<const double> input) {
  ForwardPass pass;
  const auto out = mlp_forward_into(m, input, pass.cache);
  pass.output.assign(out.begin(), out.end());
  return pass;
}

std::vector<double> mlp_predict(const MlpModel& m, std::span<const double> input) {
  return mlp_forward(m, input).output;
}

void mlp_backward_accumulate(const MlpModel& m, const ForwardCache& cache, std::span<const double> grad_output,
                             std::span<double> grad_params, std::span<double> grad_input) {
  const std::size_t layers = m.num_layers();
  check_size(grad_output.size(), m.output_size(), "grad_output");
  check_size(grad_params.size(), m.parameter_count(), "grad_params");
  if (!grad_input.empty()) check_size(grad_input.size(), m.input_size(), "grad_input");
  if (cache.preactivations.size() != layers || cache.inputs.size() != layers)
    throw Error(ErrorCode::shape, "forward cache does not match the model");
  const Activation act = m.config().activation;

  // delta holds dLoss/dz for the current layer.
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> upstream;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = m.fan_in(l);
    const std::size_t out = m.fan_out(l);
    const double* w = m.weights(l).data();
    const double* x = cache.inputs[l].data();
    double* gw = grad_params.data() + m.weight_offset(l);
    double* gb = grad_params.data() + m.bias_offset(l);

    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* grow = gw + o * in;
#pragma omp simd
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
    }

    const bool need_upstream = l > 0 || !grad_input.empty();
    if (!need_upstream) break;
    upstream.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
#pragma omp simd
      for (std::size_t i = 0; i < in; ++i) upstream[i] += row[i] * d;
    }
    if (l == 0) {
      std::copy(upstream.begin(), upstream.end(), grad_input.begin());
      break;
    }
    const std::vector<double>& z_prev = cache.preactivations[l - 1];
    delta.resize(in);
    for (std::size_t i = 0; i < in; ++i) delta[i] = upstream[i] * activate_grad(act, z_prev[i]);
  }
}

MlpGradients mlp_backward(const MlpModel& m, const ForwardCache& cache, std::span<const double> grad_output) {
  MlpGradients g;
  g.parameters.assign(m.parameter_count(), 0.0);
  g.input.assign(m.input_size(), 0.0);
  mlp_backward_accumulate(m, cache, grad_output, g.parameters, g.input);
  return g;
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

double grad_check(const MlpModel& m, std::span<const double> input, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::invalid_argument, "grad_check step must be positive");
  check_size(input.size(), m.input_size(), "input");

  Rng rng(m.config().seed ^ 0x5eedULL);
  std::vector<double> r(m.output_size());
  for (double& v : r) v = rng.uniform(-1.0, 1.0);
  const auto loss = [&](const MlpModel& model, std::span<const double> x) {
    const std::vector<double> y = mlp_predict(model, x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
    return s;
  };

  const ForwardPass pass = mlp_forward(m, input);
  const MlpGradients g = mlp_backward(m, pass.cache, r);

  double worst = 0.0;
  MlpModel probe = m;
  auto params = probe.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + eps;
    const double up = loss(probe, input);
    params[p] = saved - eps;
    const double down = loss(probe, input);
    params[p] = saved;
    worst = std::max(worst, relative_error(g.parameters[p], (up - down) / (2.0 * eps)));
  }
  std::vector<double> x(input.begin(), input.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = loss(m, x);
    x[i] = saved - eps;
    const double down = loss(m, x);
    x[i] = saved;
    worst = std::max(worst, relative_error(g.input[i], (up - down) / (2.0 * eps)));
  }
  return worst;
}

std::string save_model(const MlpModel& m) {
  nlohmann::ordered_json j;
  j["version"] = MlpModel::kFormatVersion;
  j["kind"] = to_string(m.kind());
  j["layer_sizes"] = m.config().layer_sizes;
  j["activation"] = to_string(m.config().activation);
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    const auto w = m.weights(l);
    for (std::size_t o = 0; o < m.fan_out(l); ++o) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < m.fan_in(l); ++i) row.push_back(round_significant(w[o * m.fan_in(l) + i]));
      rows.push_back(std::move(row));
    }
    nlohmann::ordered_json bias = nlohmann::ordered_json::array();
    for (double b : m.bias(l)) bias.push_back(round_significant(b));
    nlohmann::ordered_json layer;
    layer["w"] = std::move(rows);
    layer["b"] = std::move(bias);
    layers.push_back(std::move(layer));
  }
  j["weights"] = std::move(layers);
  return j.dump();
}

MlpModel load_model(std::string_view text) {
  using json = nlohmann::json;
  const json j = parse_json(text);
  const auto need = [&](const char* key) -> const json& {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::schema, std::string("missing '") + key + "'", key);
    return j.at(key);
  };
  const json& version = need("version");
  if (!version.is_number_integer()) throw Error(ErrorCode::schema, "version must be an integer", "version");
  if (version.get<long long>() != MlpModel::kFormatVersion)
    throw Error(ErrorCode::version, "unsupported model version " + version.dump(), "version");

  const json& kind_j = need("kind");
  ModelKind kind;
  if (kind_j == "factor") kind = ModelKind::factor;
  else if (kind_j == "completion") kind = ModelKind::completion;
  else throw Error(ErrorCode::schema, "kind must be 'factor' or 'completion'", "kind");

  MlpConfig config;
  const json& act = need("activation");
  if (act == "relu") config.activation = Activation::relu;
  else if (act == "tanh") config.activation = Activation::tanh;
  else throw Error(ErrorCode::schema, "unknown activation", "activation");

  const json& sizes = need("layer_sizes");
  if (!sizes.is_array()) throw Error(ErrorCode::schema, "layer_sizes must be an array", "layer_sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!sizes[i].is_number_unsigned() || sizes[i].get<std::size_t>() == 0)
      throw Error(ErrorCode::schema, "layer size must be a positive integer", "layer_sizes[" + std::to_string(i) + "]");
    config.layer_sizes.push_back(sizes[i].get<std::size_t>());
  }
  if (config.layer_sizes.size() < 2) throw Error(ErrorCode::schema, "need at least two layer sizes", "layer_sizes");

  MlpModel m(config, kind);
  const json& layers = need("weights");
  if (!layers.is_array() || layers.size() != m.num_layers())
    throw Error(ErrorCode::schema, "weights must hold one entry per layer", "weights");

  const auto number = [](const json& v, const std::string& path) {
    if (!v.is_number()) throw Error(ErrorCode::schema, "expected a number", path);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorCode::schema, "non-finite weight", path);
    return d;
  };
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    const std::string lp = "weights[" + std::to_string(l) + "]";
    const json& layer = layers[l];
    if (!layer.is_object() || !layer.contains("w") || !layer.contains("b"))
      throw Error(ErrorCode::schema, "layer needs 'w' and 'b'", lp);
    const json& w = layer["w"];
    const json& b = layer["b"];
    if (!w.is_array() || w.size() != m.fan_out(l))
      throw Error(ErrorCode::schema, "weight matrix must have " + std::to_string(m.fan_out(l)) + " rows", lp + ".w");
    if (!b.is_array() || b.size() != m.fan_out(l))
      throw Error(ErrorCode::schema, "bias must have " + std::to_string(m.fan_out(l)) + " entries", lp + ".b");
    auto wv = m.weights(l);
    for (std::size_t o = 0; o < m.fan_out(l); ++o) {
      const std::string rp = lp + ".w[" + std::to_string(o) + "]";
      if (!w[o].is_array() || w[o].size() != m.fan_in(l))
        throw Error(ErrorCode::schema, "weight row must have " + std::to_string(m.fan_in(l)) + " columns", rp);
      for (std::size_t i = 0; i < m.fan_in(l); ++i)
        wv[o * m.fan_in(l) + i] = number(w[o][i], rp + "[" + std::to_string(i) + "]");
    }
    auto bv = m.bias(l);
    for (std::size_t o = 0; o < m.fan_out(l); ++o) bv[o] = number(b[o], lp + ".b[" + std::to_string(o) + "]");
  }
  return m;
}

}  // namespace skeleform
