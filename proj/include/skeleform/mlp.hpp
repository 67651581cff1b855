#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skeleform {

enum class Activation { relu, tanh };
enum class ModelKind { factor, completion };

std::string_view to_string(Activation a);
std::string_view to_string(ModelKind k);

struct MlpConfig {
  std::vector<std::size_t> layer_sizes;  // input, hiddens..., output
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;
};

/// Throws Error(invalid_argument) for fewer than two sizes or a zero size.
void validate(const MlpConfig& config);

/// Dense feed-forward network. Hidden layers apply the configured activation,
/// the output layer is affine. Parameters live in one flat buffer: for each
/// layer, its out x in row-major weight matrix followed by its bias vector.
class MlpModel {
 public:
  static constexpr int kFormatVersion = 1;

  MlpModel() = default;
  /// All-zero parameters.
  explicit MlpModel(MlpConfig config, ModelKind kind = ModelKind::factor);

  const MlpConfig& config() const { return config_; }
  ModelKind kind() const { return kind_; }
  void set_kind(ModelKind kind) { kind_ = kind; }

  std::size_t num_layers() const { return config_.layer_sizes.empty() ? 0 : config_.layer_sizes.size() - 1; }
  std::size_t input_size() const { return config_.layer_sizes.front(); }
  std::size_t output_size() const { return config_.layer_sizes.back(); }
  std::size_t fan_in(std::size_t layer) const { return config_.layer_sizes[layer]; }
  std::size_t fan_out(std::size_t layer) const { return config_.layer_sizes[layer + 1]; }

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  /// Offset of a layer's weight block inside parameters().
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + fan_in(layer) * fan_out(layer); }

  friend bool operator==(const MlpModel& a, const MlpModel& b) {
    return a.config_.layer_sizes == b.config_.layer_sizes && a.config_.activation == b.config_.activation &&
           a.kind_ == b.kind_ && a.params_ == b.params_;
  }

 private:
  MlpConfig config_;
  ModelKind kind_ = ModelKind::factor;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
MlpModel mlp_init(const MlpConfig& config, ModelKind kind = ModelKind::factor);

struct ForwardCache {
  std::vector<std::vector<double>> inputs;          // input seen by each layer
  std::vector<std::vector<double>> preactivations;  // W x + b of each layer
};

struct ForwardPass {
  std::vector<double> output;
  ForwardCache cache;
};

ForwardPass mlp_forward(const MlpModel& m, std::span<const double> input);

/// Forward pass reusing `cache` storage; returns a view of the output
/// (the last preactivation).
std::span<const double> mlp_forward_into(const MlpModel& m, std::span<const double> input, ForwardCache& cache);

/// Output only.
std::vector<double> mlp_predict(const MlpModel& m, std::span<const double> input);

struct MlpGradients {
  std::vector<double> parameters;  // same layout as MlpModel::parameters()
  std::vector<double> input;
};

/// Reverse-mode gradients of dot(output, grad_output).
MlpGradients mlp_backward(const MlpModel& m, const ForwardCache& cache, std::span<const double> grad_output);

/// Adds the gradients into `grad_params`; writes `grad_input` when non-empty.
void mlp_backward_accumulate(const MlpModel& m, const ForwardCache& cache, std::span<const double> grad_output,
                             std::span<double> grad_params, std::span<double> grad_input);

/// Largest relative discrepancy between mlp_backward and central differences
/// with step `eps`, over every parameter and input coordinate, for the scalar
/// loss dot(output, r) with a fixed pseudo-random r.
double grad_check(const MlpModel& m, std::span<const double> input, double eps);

/// Relative error used by every gradient comparison in this project.
double relative_error(double analytic, double numeric);

/// Versioned JSON, 9 significant digits.
std::string save_model(const MlpModel& m);
MlpModel load_model(std::string_view text);

}  // namespace skeleform
