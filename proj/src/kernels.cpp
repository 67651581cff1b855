#include "skeleform/kernels.hpp"

#include <algorithm>
#include <exception>

#include "skeleform/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skeleform::kernels {
namespace {

double sample_gradient(const MlpModel& m, std::size_t index, std::span<const double> input, const LossHead& head,
                       ForwardCache& cache, std::vector<double>& grad_out, std::span<double> grad_params) {
  const auto output = mlp_forward_into(m, input, cache);
  grad_out.assign(output.size(), 0.0);
  const double loss = head(index, output, grad_out);
  std::fill(grad_params.begin(), grad_params.end(), 0.0);
  mlp_backward_accumulate(m, cache, grad_out, grad_params, {});
  return loss;
}

double finish(std::span<const double> losses, std::size_t count, std::vector<double>& grad) {
  double total = 0.0;
  for (double l : losses) total += l;
  const double inv = 1.0 / static_cast<double>(count);
  for (double& g : grad) g *= inv;
  return total * inv;
}

void check_batch(const MlpModel& m, std::span<const std::vector<double>> inputs) {
  if (inputs.empty()) throw Error(ErrorCode::invalid_argument, "empty batch");
  for (const auto& x : inputs)
    if (x.size() != m.input_size()) throw Error(ErrorCode::shape, "batch input does not match the model input size");
}

double gram_entry(const ImageTensor& f, std::size_t i, std::size_t j) {
  const auto a = f.channel(i);
  const auto b = f.channel(j);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void gram_row(const ImageTensor& f, std::size_t i, double norm, Matrix& g) {
  for (std::size_t j = i; j < f.channels(); ++j) {
    const double v = gram_entry(f, i, j) * norm;
    g(i, j) = v;
    g(j, i) = v;
  }
}

void check_factor_batch(std::size_t n, std::size_t p, std::size_t a) {
  if (n != p || n != a) throw Error(ErrorCode::shape, "pose and factor batches differ in length");
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double BatchGradient::run_serial(const MlpModel& m, std::span<const std::vector<double>> inputs, const LossHead& head,
                                 std::vector<double>& grad) {
  check_batch(m, inputs);
  grad.assign(m.parameter_count(), 0.0);
  losses_.assign(inputs.size(), 0.0);
  per_sample_.resize(1);
  per_sample_[0].resize(m.parameter_count());
  ForwardCache cache;
  std::vector<double> grad_out;
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    losses_[b] = sample_gradient(m, b, inputs[b], head, cache, grad_out, per_sample_[0]);
    const std::vector<double>& s = per_sample_[0];
    for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += s[p];
  }
  return finish(losses_, inputs.size(), grad);
}

double BatchGradient::run_parallel(const MlpModel& m, std::span<const std::vector<double>> inputs,
                                   const LossHead& head, std::vector<double>& grad) {
  // Per-sample buffers only pay off with more than one thread.
  if (max_threads() == 1) return run_serial(m, inputs, head, grad);
  check_batch(m, inputs);
  const std::size_t n = inputs.size();
  grad.assign(m.parameter_count(), 0.0);
  losses_.assign(n, 0.0);
  if (per_sample_.size() < n) per_sample_.resize(n);
  for (std::size_t b = 0; b < n; ++b) per_sample_[b].resize(m.parameter_count());

  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel
  {
    ForwardCache cache;
    std::vector<double> grad_out;
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n); ++b) {
      const auto i = static_cast<std::size_t>(b);
      try {
        losses_[i] = sample_gradient(m, i, inputs[i], head, cache, grad_out, per_sample_[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Ordered reduction; parameters are split across threads in blocks, samples
  // are added in index order so the sum matches run_serial exactly.
  constexpr std::size_t kBlock = 2048;
  const std::size_t count = grad.size();
  const auto blocks = static_cast<std::ptrdiff_t>((count + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(count, lo + kBlock);
    double* dst = grad.data();
    for (std::size_t b = 0; b < n; ++b) {
      const double* src = per_sample_[b].data();
      for (std::size_t p = lo; p < hi; ++p) dst[p] += src[p];
    }
  }
  return finish(losses_, n, grad);
}

Matrix gram_serial(const ImageTensor& f) {
  const std::size_t c = f.channels();
  Matrix g(c, c);
  const double norm = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < c; ++i) gram_row(f, i, norm, g);
  return g;
}

Matrix gram_parallel(const ImageTensor& f) {
  const std::size_t c = f.channels();
  Matrix g(c, c);
  const double norm = 1.0 / static_cast<double>(f.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(c); ++i) gram_row(f, static_cast<std::size_t>(i), norm, g);
  return g;
}

std::vector<KeypointSet> deform_batch_serial(std::span<const KeypointSet> poses, std::span<const GroupFactors> tau_p,
                                             std::span<const GroupFactors> tau_a) {
  check_factor_batch(poses.size(), tau_p.size(), tau_a.size());
  std::vector<KeypointSet> out(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) out[i] = deform(poses[i], tau_p[i], tau_a[i]);
  return out;
}

std::vector<KeypointSet> deform_batch_parallel(std::span<const KeypointSet> poses, std::span<const GroupFactors> tau_p,
                                               std::span<const GroupFactors> tau_a) {
  check_factor_batch(poses.size(), tau_p.size(), tau_a.size());
  const std::size_t n = poses.size();
  std::vector<KeypointSet> out(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n); ++b) {
    const auto i = static_cast<std::size_t>(b);
    try {
      out[i] = deform(poses[i], tau_p[i], tau_a[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace skeleform::kernels
