#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "tame/envsim.hpp"
#include "tame/morphology.hpp"
#include "tame/rng.hpp"

namespace tame {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;

struct ClassifierDims {
  int input_dim = kLineGraphFeatureDim;
  int hidden = 192;
  int layers = 3;
  int classes = kPrimitiveCount;

  bool operator==(const ClassifierDims&) const = default;
};

/// Input width for an environment class: line-graph features plus the
/// terminal state concatenated onto every node.
ClassifierDims classifier_dims_for(EnvClass c, int hidden = 192, int layers = 3);

/// Weights of the graph-convolution classifier, stored in one flat buffer.
/// Per convolution layer l: self weight (hidden x in_l), neighbor weight
/// (hidden x in_l), bias (hidden); then the output weight (classes x hidden)
/// and output bias.
class ClassifierParams {
 public:
  ClassifierParams() = default;
  explicit ClassifierParams(const ClassifierDims& dims);

  const ClassifierDims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  struct Tensor {
    std::size_t offset = 0;
    int rows = 0;
    int cols = 0;
  };
  const std::vector<Tensor>& tensors() const { return tensors_; }

  MatrixView tensor(std::size_t i) { return {data_.data() + tensors_[i].offset, tensors_[i].rows, tensors_[i].cols}; }
  ConstMatrixView tensor(std::size_t i) const {
    return {data_.data() + tensors_[i].offset, tensors_[i].rows, tensors_[i].cols};
  }

  static std::size_t self_weight_index(int layer) { return 3 * static_cast<std::size_t>(layer); }
  static std::size_t neighbor_weight_index(int layer) { return 3 * static_cast<std::size_t>(layer) + 1; }
  static std::size_t bias_index(int layer) { return 3 * static_cast<std::size_t>(layer) + 2; }
  std::size_t output_weight_index() const { return 3 * static_cast<std::size_t>(dims_.layers); }
  std::size_t output_bias_index() const { return 3 * static_cast<std::size_t>(dims_.layers) + 1; }

  bool operator==(const ClassifierParams& o) const { return dims_ == o.dims_ && data_ == o.data_; }
  friend void PrintTo(const ClassifierParams& p, std::ostream* os);

 private:
  ClassifierDims dims_;
  // aligned so Eigen kernels peel the same way on every allocation
  std::vector<double, Eigen::aligned_allocator<double>> data_;
  std::vector<Tensor> tensors_;
};

/// One classifier example: a morphology's line graph, the terminal state, and
/// (for training) the primitive each joint executed.
struct GraphSample {
  std::shared_ptr<const LineGraph> graph;
  std::vector<double> state;
  std::vector<int> labels;
};

GraphSample make_sample(std::shared_ptr<const LineGraph> graph, const EpisodeRecord& episode);

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 128;  // graphs
  int epochs = 15;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-node log-probabilities (node_count x classes) for one graph.
RowMatrix forward(const ClassifierParams& params, const LineGraph& graph, std::span<const double> state);

/// Mean over every labeled node in `batch` of -log q(label).
double loss(const ClassifierParams& params, std::span<const GraphSample> batch);

/// Gradient of loss() with respect to the flat parameter buffer.
std::vector<double> grad(const ClassifierParams& params, std::span<const GraphSample> batch);

/// Loss and gradient in one pass; `gradient` may be empty to skip backprop.
double loss_and_grad(const ClassifierParams& params, std::span<const GraphSample* const> batch,
                     std::span<double> gradient);

/// Glorot-uniform weights, zero biases.
ClassifierParams reset(Rng& rng, const ClassifierDims& dims);

struct FitReport {
  std::vector<double> epoch_loss;  ///< node-weighted mean minibatch loss per epoch
  double final_loss() const { return epoch_loss.empty() ? 0.0 : epoch_loss.back(); }
};

/// Parameters plus Adam moments. The evolution loop owns one instance and is
/// its only writer; fitness evaluation reads params() between fits.
class Classifier {
 public:
  Classifier() = default;
  Classifier(const ClassifierDims& dims, const TrainConfig& config);

  void reset(Rng& rng);
  FitReport fit(std::span<const GraphSample> dataset, Rng& rng, int epochs);
  FitReport fit(std::span<const GraphSample> dataset, Rng& rng) { return fit(dataset, rng, config_.epochs); }

  const ClassifierParams& params() const { return params_; }
  ClassifierParams& params() { return params_; }
  const TrainConfig& config() const { return config_; }

 private:
  void adam_step(std::span<const double> gradient);

  ClassifierParams params_;
  TrainConfig config_;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  long step_ = 0;
};

/// One-shot training from `params` with a fresh optimizer state.
ClassifierParams fit(ClassifierParams params, std::span<const GraphSample> dataset, const TrainConfig& config,
                     Rng& rng, FitReport* report = nullptr);

struct EpisodeLoglik {
  std::vector<double> per_joint;
  double sum = 0.0;
};

/// log q(a_j | s_T, m) for each joint of one labeled sample, and their sum.
EpisodeLoglik predict_episode_loglik(const ClassifierParams& params, const GraphSample& sample);

/// Sum of per-joint log-likelihoods for many samples, batched.
std::vector<double> batch_episode_loglik(const ClassifierParams& params, std::span<const GraphSample> samples,
                                         int batch_size = 512);

// Checkpoint: "TAMEGNN1", u32 version, u32 dims x4, u32 tensor count, then per
// tensor u32 rows, u32 cols, rows*cols little-endian f64 in row-major order.
void save_checkpoint(std::ostream& out, const ClassifierParams& params);
ClassifierParams load_checkpoint(std::istream& in);

}  // namespace tame
