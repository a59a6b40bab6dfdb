#include "tame/gnn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace tame {

ClassifierDims classifier_dims_for(EnvClass c, int hidden, int layers) {
  ClassifierDims d;
  d.input_dim = kLineGraphFeatureDim + state_dim(c);
  d.hidden = hidden;
  d.layers = layers;
  d.classes = kPrimitiveCount;
  return d;
}

ClassifierParams::ClassifierParams(const ClassifierDims& dims) : dims_(dims) {
  if (dims.input_dim <= 0 || dims.hidden <= 0 || dims.layers <= 0 || dims.classes <= 0) {
    throw DimensionError("classifier dimensions must be positive");
  }
  std::size_t offset = 0;
  auto add = [&](int rows, int cols) {
    tensors_.push_back({offset, rows, cols});
    offset += static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  };
  int in = dims.input_dim;
  for (int l = 0; l < dims.layers; ++l) {
    add(dims.hidden, in);  // self
    add(dims.hidden, in);  // neighbor
    add(1, dims.hidden);   // bias
    in = dims.hidden;
  }
  add(dims.classes, dims.hidden);
  add(1, dims.classes);
  data_.assign(offset, 0.0);
}

void PrintTo(const ClassifierParams& p, std::ostream* os) {
  *os << "ClassifierParams{in=" << p.dims_.input_dim << " hidden=" << p.dims_.hidden << " layers=" << p.dims_.layers
      << " size=" << p.size() << "}";
}

GraphSample make_sample(std::shared_ptr<const LineGraph> graph, const EpisodeRecord& episode) {
  GraphSample s;
  s.graph = std::move(graph);
  s.state = episode.state.values;
  s.labels = episode.assignment.primitives;
  return s;
}

namespace {

// Block-diagonal minibatch: node rows of every graph stacked, neighbor lists
// shifted into batch coordinates.
struct Batch {
  RowMatrix x;
  std::vector<int> adj_offset;
  std::vector<int> adj;
  std::vector<double> inv_degree;
  std::vector<int> labels;
  std::vector<int> graph_offset;
  int labeled = 0;
};

Batch assemble(std::span<const GraphSample* const> samples, int input_dim) {
  Batch b;
  int nodes = 0;
  for (const GraphSample* s : samples) {
    const int width = kLineGraphFeatureDim + static_cast<int>(s->state.size());
    if (width != input_dim) {
      throw DimensionError("classifier expects input width " + std::to_string(input_dim) + ", sample has " +
                           std::to_string(width));
    }
    if (!s->labels.empty() && static_cast<int>(s->labels.size()) != s->graph->node_count) {
      throw DimensionError("label count does not match line-graph node count");
    }
    nodes += s->graph->node_count;
  }
  b.x.resize(nodes, input_dim);
  b.adj_offset.reserve(nodes + 1);
  b.adj_offset.push_back(0);
  b.inv_degree.reserve(nodes);
  b.labels.reserve(nodes);
  b.graph_offset.reserve(samples.size() + 1);

  int base = 0;
  for (const GraphSample* s : samples) {
    const LineGraph& g = *s->graph;
    b.graph_offset.push_back(base);
    for (int i = 0; i < g.node_count; ++i) {
      double* row = b.x.row(base + i).data();
      std::copy_n(g.row(i), kLineGraphFeatureDim, row);
      std::copy(s->state.begin(), s->state.end(), row + kLineGraphFeatureDim);
      for (int j : g.neighbors[i]) b.adj.push_back(base + j);
      b.adj_offset.push_back(static_cast<int>(b.adj.size()));
      const auto deg = g.neighbors[i].size();
      b.inv_degree.push_back(deg ? 1.0 / static_cast<double>(deg) : 0.0);
      const int label = s->labels.empty() ? -1 : s->labels[i];
      b.labels.push_back(label);
      if (label >= 0) ++b.labeled;
    }
    base += g.node_count;
  }
  b.graph_offset.push_back(base);
  return b;
}

// out = A h, A the row-normalized adjacency; isolated rows stay zero.
void aggregate(const Batch& b, const RowMatrix& h, RowMatrix& out) {
  out.setZero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const int lo = b.adj_offset[i];
    const int hi = b.adj_offset[i + 1];
    if (lo == hi) continue;
    for (int e = lo; e < hi; ++e) out.row(i) += h.row(b.adj[e]);
    out.row(i) *= b.inv_degree[i];
  }
}

// out = A^T g
void aggregate_transpose(const Batch& b, const RowMatrix& g, RowMatrix& out) {
  out.setZero(g.rows(), g.cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (int e = b.adj_offset[i]; e < b.adj_offset[i + 1]; ++e) out.row(b.adj[e]) += b.inv_degree[i] * g.row(i);
  }
}

struct Activations {
  std::vector<RowMatrix> h;    // layer inputs; h[layers] feeds the output layer
  std::vector<RowMatrix> agg;  // neighbor means of h[l]
  RowMatrix logp;
};

void run_forward(const ClassifierParams& p, const Batch& b, Activations& act) {
  const int layers = p.dims().layers;
  act.h.resize(layers + 1);
  act.agg.resize(layers);
  act.h[0] = b.x;
  for (int l = 0; l < layers; ++l) {
    aggregate(b, act.h[l], act.agg[l]);
    const auto ws = p.tensor(ClassifierParams::self_weight_index(l));
    const auto wn = p.tensor(ClassifierParams::neighbor_weight_index(l));
    const auto bias = p.tensor(ClassifierParams::bias_index(l));
    RowMatrix z(act.h[l].rows(), ws.rows());
    z.noalias() = act.h[l] * ws.transpose();
    z.noalias() += act.agg[l] * wn.transpose();
    z.rowwise() += bias.row(0);
    act.h[l + 1] = z.cwiseMax(0.0);
  }
  const auto wo = p.tensor(p.output_weight_index());
  const auto bo = p.tensor(p.output_bias_index());
  RowMatrix logits(act.h[layers].rows(), wo.rows());
  logits.noalias() = act.h[layers] * wo.transpose();
  logits.rowwise() += bo.row(0);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    logits.row(i).array() -= lse;
  }
  act.logp = std::move(logits);
}

}  // namespace

RowMatrix forward(const ClassifierParams& params, const LineGraph& graph, std::span<const double> state) {
  GraphSample s;
  s.graph = std::shared_ptr<const LineGraph>(&graph, [](const LineGraph*) {});
  s.state.assign(state.begin(), state.end());
  const GraphSample* ptr = &s;
  const Batch b = assemble({&ptr, 1}, params.dims().input_dim);
  Activations act;
  run_forward(params, b, act);
  return act.logp;
}

double loss_and_grad(const ClassifierParams& params, std::span<const GraphSample* const> batch,
                     std::span<double> gradient) {
  const Batch b = assemble(batch, params.dims().input_dim);
  Activations act;
  run_forward(params, b, act);
  if (!gradient.empty()) std::fill(gradient.begin(), gradient.end(), 0.0);
  if (b.labeled == 0) return 0.0;

  const double inv = 1.0 / static_cast<double>(b.labeled);
  double total = 0.0;
  for (std::size_t i = 0; i < b.labels.size(); ++i) {
    if (b.labels[i] >= 0) total -= act.logp(static_cast<Eigen::Index>(i), b.labels[i]);
  }
  if (gradient.empty()) return total * inv;
  if (gradient.size() != params.size()) throw DimensionError("gradient buffer has the wrong size");

  ClassifierParams g(params.dims());
  // d loss / d logits = (softmax - onehot) / labeled, zero on unlabeled rows.
  RowMatrix dlogits = act.logp.array().exp();
  for (std::size_t i = 0; i < b.labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (b.labels[i] < 0) {
      dlogits.row(r).setZero();
    } else {
      dlogits(r, b.labels[i]) -= 1.0;
    }
  }
  dlogits *= inv;

  const int layers = params.dims().layers;
  g.tensor(params.output_weight_index()).noalias() = dlogits.transpose() * act.h[layers];
  g.tensor(params.output_bias_index()).row(0) = dlogits.colwise().sum();
  RowMatrix dh = dlogits * params.tensor(params.output_weight_index());

  RowMatrix spread;
  for (int l = layers - 1; l >= 0; --l) {
    RowMatrix dz = dh.cwiseProduct((act.h[l + 1].array() > 0.0).cast<double>().matrix());
    g.tensor(ClassifierParams::self_weight_index(l)).noalias() = dz.transpose() * act.h[l];
    g.tensor(ClassifierParams::neighbor_weight_index(l)).noalias() = dz.transpose() * act.agg[l];
    g.tensor(ClassifierParams::bias_index(l)).row(0) = dz.colwise().sum();
    if (l == 0) break;
    dh.noalias() = dz * params.tensor(ClassifierParams::self_weight_index(l));
    RowMatrix through = dz * params.tensor(ClassifierParams::neighbor_weight_index(l));
    aggregate_transpose(b, through, spread);
    dh += spread;
  }
  std::copy(g.values().begin(), g.values().end(), gradient.begin());
  return total * inv;
}

namespace {

std::vector<const GraphSample*> pointers(std::span<const GraphSample> samples) {
  std::vector<const GraphSample*> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

}  // namespace

double loss(const ClassifierParams& params, std::span<const GraphSample> batch) {
  const auto ptrs = pointers(batch);
  return loss_and_grad(params, ptrs, {});
}

std::vector<double> grad(const ClassifierParams& params, std::span<const GraphSample> batch) {
  std::vector<double> out(params.size(), 0.0);
  const auto ptrs = pointers(batch);
  loss_and_grad(params, ptrs, out);
  return out;
}

ClassifierParams reset(Rng& rng, const ClassifierDims& dims) {
  ClassifierParams p(dims);
  for (std::size_t t = 0; t < p.tensors().size(); ++t) {
    auto m = p.tensor(t);
    if (m.rows() == 1) continue;  // biases start at zero
    const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -bound, bound);
  }
  return p;
}

Classifier::Classifier(const ClassifierDims& dims, const TrainConfig& config)
    : params_(dims), config_(config), first_moment_(params_.size(), 0.0), second_moment_(params_.size(), 0.0) {}

void Classifier::reset(Rng& rng) {
  params_ = tame::reset(rng, params_.dims());
  std::fill(first_moment_.begin(), first_moment_.end(), 0.0);
  std::fill(second_moment_.begin(), second_moment_.end(), 0.0);
  step_ = 0;
}

void Classifier::adam_step(std::span<const double> gradient) {
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.learning_rate;
  auto w = params_.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = gradient[i];
    first_moment_[i] = b1 * first_moment_[i] + (1.0 - b1) * gi;
    second_moment_[i] = b2 * second_moment_[i] + (1.0 - b2) * gi * gi;
    const double mhat = first_moment_[i] / c1;
    const double vhat = second_moment_[i] / c2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
  }
}

FitReport Classifier::fit(std::span<const GraphSample> dataset, Rng& rng, int epochs) {
  FitReport report;
  if (dataset.empty()) return report;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> gradient(params_.size());
  std::vector<const GraphSample*> batch;
  const auto batch_size = static_cast<std::size_t>(std::max(1, config_.batch_size));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    double nodes = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch.clear();
      double labeled = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(&dataset[order[i]]);
        labeled += static_cast<double>(dataset[order[i]].labels.size());
      }
      const double l = loss_and_grad(params_, batch, gradient);
      adam_step(gradient);
      weighted += l * labeled;
      nodes += labeled;
    }
    report.epoch_loss.push_back(nodes > 0.0 ? weighted / nodes : 0.0);
  }
  return report;
}

ClassifierParams fit(ClassifierParams params, std::span<const GraphSample> dataset, const TrainConfig& config,
                     Rng& rng, FitReport* report) {
  Classifier c(params.dims(), config);
  c.params() = std::move(params);
  FitReport r = c.fit(dataset, rng);
  if (report) *report = std::move(r);
  return c.params();
}

EpisodeLoglik predict_episode_loglik(const ClassifierParams& params, const GraphSample& sample) {
  const RowMatrix logp = forward(params, *sample.graph, sample.state);
  EpisodeLoglik out;
  for (std::size_t j = 0; j < sample.labels.size(); ++j) {
    const double v = logp(static_cast<Eigen::Index>(j), sample.labels[j]);
    out.per_joint.push_back(v);
    out.sum += v;
  }
  return out;
}

std::vector<double> batch_episode_loglik(const ClassifierParams& params, std::span<const GraphSample> samples,
                                         int batch_size) {
  std::vector<double> out;
  out.reserve(samples.size());
  std::vector<const GraphSample*> batch;
  const auto step = static_cast<std::size_t>(std::max(1, batch_size));
  for (std::size_t start = 0; start < samples.size(); start += step) {
    const std::size_t stop = std::min(samples.size(), start + step);
    batch.clear();
    for (std::size_t i = start; i < stop; ++i) batch.push_back(&samples[i]);
    const Batch b = assemble(batch, params.dims().input_dim);
    Activations act;
    run_forward(params, b, act);
    for (std::size_t g = 0; g + 1 < b.graph_offset.size(); ++g) {
      double sum = 0.0;
      for (int i = b.graph_offset[g]; i < b.graph_offset[g + 1]; ++i) {
        if (b.labels[i] >= 0) sum += act.logp(i, b.labels[i]);
      }
      out.push_back(sum);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'T', 'A', 'M', 'E', 'G', 'N', 'N', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint: truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void save_checkpoint(std::ostream& out, const ClassifierParams& params) {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  const auto& d = params.dims();
  put_u32(out, static_cast<std::uint32_t>(d.input_dim));
  put_u32(out, static_cast<std::uint32_t>(d.hidden));
  put_u32(out, static_cast<std::uint32_t>(d.layers));
  put_u32(out, static_cast<std::uint32_t>(d.classes));
  put_u32(out, static_cast<std::uint32_t>(params.tensors().size()));
  for (std::size_t t = 0; t < params.tensors().size(); ++t) {
    const auto m = params.tensor(t);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
  }
}

ClassifierParams load_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error("checkpoint: bad magic");
  if (get_u32(in) != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version");
  ClassifierDims d;
  d.input_dim = static_cast<int>(get_u32(in));
  d.hidden = static_cast<int>(get_u32(in));
  d.layers = static_cast<int>(get_u32(in));
  d.classes = static_cast<int>(get_u32(in));
  ClassifierParams p(d);
  if (get_u32(in) != p.tensors().size()) throw std::runtime_error("checkpoint: tensor count mismatch");
  for (std::size_t t = 0; t < p.tensors().size(); ++t) {
    auto m = p.tensor(t);
    const auto rows = get_u32(in);
    const auto cols = get_u32(in);
    if (rows != m.rows() || cols != m.cols()) throw std::runtime_error("checkpoint: tensor shape mismatch");
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get_f64(in);
  }
  return p;
}

}  // namespace tame
