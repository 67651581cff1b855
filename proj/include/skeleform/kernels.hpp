#pragma once

// Data-parallel kernels. Each has a serial reference and an OpenMP variant
// that produce bit-identical results; tests assert the equality and
// bench/ compares their throughput.

#include <functional>
#include <span>
#include <vector>

#include "skeleform/deform.hpp"
#include "skeleform/mlp.hpp"
#include "skeleform/tensor.hpp"

namespace skeleform::kernels {

/// Reads the network output for sample `index`, writes dLoss/dOutput into
/// `grad_output` and returns the sample's loss. Must be safe to call
/// concurrently for different indices.
using LossHead = std::function<double(std::size_t index, std::span<const double> output, std::span<double> grad_output)>;

/// Mean loss and mean parameter gradient over a batch. Per-sample gradients
/// are summed in sample-index order in both variants.
class BatchGradient {
 public:
  double run_serial(const MlpModel& m, std::span<const std::vector<double>> inputs, const LossHead& head,
                    std::vector<double>& grad);
  double run_parallel(const MlpModel& m, std::span<const std::vector<double>> inputs, const LossHead& head,
                      std::vector<double>& grad);

 private:
  std::vector<std::vector<double>> per_sample_;
  std::vector<double> losses_;
};

Matrix gram_serial(const ImageTensor& f);
Matrix gram_parallel(const ImageTensor& f);

/// Retargets many poses; entry i uses tau_p[i] and tau_a[i].
std::vector<KeypointSet> deform_batch_serial(std::span<const KeypointSet> poses, std::span<const GroupFactors> tau_p,
                                             std::span<const GroupFactors> tau_a);
std::vector<KeypointSet> deform_batch_parallel(std::span<const KeypointSet> poses, std::span<const GroupFactors> tau_p,
                                               std::span<const GroupFactors> tau_a);

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace skeleform::kernels
