#include "lobrep/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lobrep/error.hpp"
#include "lobrep/metrics.hpp"

namespace lobrep {

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::Linear ? "linear" : "mlp";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "mlp") return ModelKind::Mlp;
  throw Error(Errc::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

std::string_view to_string(Optimizer opt) noexcept {
  return opt == Optimizer::Adam ? "adam" : "momentum";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "adam") return Optimizer::Adam;
  if (name == "momentum" || name == "sgd") return Optimizer::Momentum;
  throw Error(Errc::InvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// out = in * W + b
void affine(const Matrix& in, const Dense& d, Matrix& out) {
  out = Matrix(in.rows, d.out);
  for (std::size_t r = 0; r < in.rows; ++r) {
    double* o = out.data.data() + r * d.out;
    std::copy(d.bias.begin(), d.bias.end(), o);
    const double* a = in.data.data() + r * d.in;
    for (std::size_t i = 0; i < d.in; ++i) {
      const double ai = a[i];
      if (ai == 0) continue;
      const double* w = d.weight.data() + i * d.out;
      for (std::size_t j = 0; j < d.out; ++j) o[j] += ai * w[j];
    }
  }
}

void relu(Matrix& m) {
  for (auto& v : m.data) v = v > 0 ? v : 0.0;
}

void softmax(Matrix& logits) {
  for (std::size_t r = 0; r < logits.rows; ++r) {
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0;
    for (auto& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (auto& v : row) v /= sum;
  }
}

struct Trace {
  std::vector<Matrix> activations;  // [0] input copy, then post-activation outputs
  Matrix logits;
};

Trace run_forward(const Model& model, const Matrix& x) {
  if (x.cols != model.spec().input_dim) {
    throw Error(Errc::DimMismatch, "input has " + std::to_string(x.cols) + " features, model expects " +
                                       std::to_string(model.spec().input_dim));
  }
  Trace tr;
  const auto& layers = model.layers();
  tr.activations.reserve(layers.size());
  tr.activations.push_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z;
    affine(tr.activations.back(), layers[l], z);
    if (l + 1 < layers.size()) {
      relu(z);
      tr.activations.push_back(std::move(z));
    } else {
      tr.logits = std::move(z);
    }
  }
  return tr;
}

void check_labels(const Matrix& x, std::span<const int> y, std::size_t classes) {
  if (x.rows == 0) throw Error(Errc::EmptyInput, "empty batch");
  if (x.rows != y.size()) throw Error(Errc::DimMismatch, "rows and labels differ in count");
  for (int c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= classes) {
      throw Error(Errc::DimMismatch, "label " + std::to_string(c) + " out of range");
    }
  }
}

}  // namespace

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.input_dim == 0 || spec_.classes < 2) {
    throw Error(Errc::InvalidArgument, "model needs input_dim > 0 and at least two classes");
  }
  std::vector<std::size_t> widths{spec_.input_dim};
  if (spec_.kind == ModelKind::Mlp) {
    for (auto h : spec_.hidden) {
      if (h == 0) throw Error(Errc::InvalidArgument, "hidden layer of width 0");
      widths.push_back(h);
    }
  }
  widths.push_back(spec_.classes);

  std::mt19937_64 rng(spec_.seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Dense d;
    d.in = widths[l];
    d.out = widths[l + 1];
    d.weight.resize(d.in * d.out);
    d.bias.assign(d.out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(d.in));
    for (auto& w : d.weight) w = (2.0 * unit_uniform(rng) - 1.0) * bound;
    layers_.push_back(std::move(d));
  }
}

std::vector<double> Model::forward(std::span<const double> x) const {
  Matrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.data.begin());
  auto p = predict_proba(m);
  return p.data;
}

Matrix Model::predict_proba(const Matrix& x) const {
  auto tr = run_forward(*this, x);
  softmax(tr.logits);
  return std::move(tr.logits);
}

std::vector<int> Model::predict(const Matrix& x) const {
  const auto p = predict_proba(x);
  std::vector<int> out(p.rows);
  for (std::size_t r = 0; r < p.rows; ++r) {
    auto row = p.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::size_t Model::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : layers_) n += d.weight.size() + d.bias.size();
  return n;
}

std::vector<double> Model::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& d : layers_) {
    out.insert(out.end(), d.weight.begin(), d.weight.end());
    out.insert(out.end(), d.bias.begin(), d.bias.end());
  }
  return out;
}

void Model::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw Error(Errc::DimMismatch, "expected " + std::to_string(parameter_count()) +
                                       " parameters, got " + std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (auto& d : layers_) {
    for (auto& w : d.weight) w = values[k++];
    for (auto& b : d.bias) b = values[k++];
  }
}

double loss(const Model& model, const Matrix& x, std::span<const int> y) {
  check_labels(x, y, model.spec().classes);
  auto tr = run_forward(model, x);
  double total = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto row = tr.logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0;
    for (double v : row) sum += std::exp(v - mx);
    total += mx + std::log(sum) - row[static_cast<std::size_t>(y[r])];
  }
  return total / static_cast<double>(x.rows);
}

std::vector<Dense> gradient(const Model& model, const Matrix& x, std::span<const int> y,
                            double* loss_out) {
  check_labels(x, y, model.spec().classes);
  auto tr = run_forward(model, x);
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  if (loss_out) {
    double total = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      auto row = tr.logits.row(r);
      const double mx = *std::max_element(row.begin(), row.end());
      double sum = 0;
      for (double v : row) sum += std::exp(v - mx);
      total += mx + std::log(sum) - row[static_cast<std::size_t>(y[r])];
    }
    *loss_out = total * inv_n;
  }
  softmax(tr.logits);

  // dZ of the output layer: (softmax - onehot) / n
  Matrix dz = std::move(tr.logits);
  for (std::size_t r = 0; r < x.rows; ++r) {
    dz(r, static_cast<std::size_t>(y[r])) -= 1.0;
  }
  for (auto& v : dz.data) v *= inv_n;

  const auto& layers = model.layers();
  std::vector<Dense> grads(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Dense& d = layers[l];
    const Matrix& a = tr.activations[l];
    Dense& g = grads[l];
    g.in = d.in;
    g.out = d.out;
    g.weight.assign(d.weight.size(), 0.0);
    g.bias.assign(d.out, 0.0);
    for (std::size_t r = 0; r < a.rows; ++r) {
      const double* dzr = dz.data.data() + r * d.out;
      const double* ar = a.data.data() + r * d.in;
      for (std::size_t j = 0; j < d.out; ++j) g.bias[j] += dzr[j];
      for (std::size_t i = 0; i < d.in; ++i) {
        const double ai = ar[i];
        if (ai == 0) continue;
        double* gw = g.weight.data() + i * d.out;
        for (std::size_t j = 0; j < d.out; ++j) gw[j] += ai * dzr[j];
      }
    }
    if (l == 0) break;
    // back through the weights and the ReLU of the previous layer
    Matrix prev(a.rows, d.in);
    for (std::size_t r = 0; r < a.rows; ++r) {
      const double* dzr = dz.data.data() + r * d.out;
      const double* ar = a.data.data() + r * d.in;
      double* pr = prev.data.data() + r * d.in;
      for (std::size_t i = 0; i < d.in; ++i) {
        if (ar[i] <= 0) continue;
        const double* w = d.weight.data() + i * d.out;
        double s = 0;
        for (std::size_t j = 0; j < d.out; ++j) s += w[j] * dzr[j];
        pr[i] = s;
      }
    }
    dz = std::move(prev);
  }
  return grads;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw Error(Errc::InvalidArgument, "learning rate must be > 0");
  if (epochs < 1) throw Error(Errc::InvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) throw Error(Errc::InvalidArgument, "batch size must be >= 1");
}

namespace {

class Stepper {
 public:
  Stepper(const TrainConfig& cfg, std::size_t n) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    if (cfg_.optimizer == Optimizer::Adam) {
      constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
      for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1 * m_[i] + (1 - b1) * grad[i];
        v_[i] = b2 * v_[i] + (1 - b2) * grad[i] * grad[i];
        params[i] -= cfg_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
      }
    } else {
      for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = cfg_.momentum * m_[i] + grad[i];
        params[i] -= cfg_.learning_rate * m_[i];
      }
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t t_ = 0;
};

std::vector<double> flatten(const std::vector<Dense>& layers) {
  std::vector<double> out;
  for (const auto& d : layers) {
    out.insert(out.end(), d.weight.begin(), d.weight.end());
    out.insert(out.end(), d.bias.begin(), d.bias.end());
  }
  return out;
}

}  // namespace

TrainResult train(ModelSpec spec, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw Error(Errc::EmptyInput, "empty training set");
  if (spec.input_dim == 0) spec.input_dim = train_set.x.cols;
  check_labels(train_set.x, train_set.y, spec.classes);
  {
    std::vector<bool> seen(spec.classes, false);
    for (int c : train_set.y) seen[static_cast<std::size_t>(c)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
      throw Error(Errc::InvalidArgument, "training labels contain a single class");
    }
  }

  Model model(spec);
  TrainResult result{model, {}};
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  auto params = model.parameters();
  Stepper stepper(cfg, params.size());
  const Dataset& scoring = val_set.size() > 0 ? val_set : train_set;
  std::size_t stale = 0;
  const std::size_t d = train_set.x.cols;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      Matrix xb(b, d);
      std::vector<int> yb(b);
      for (std::size_t i = 0; i < b; ++i) {
        const auto src = train_set.x.row(order[start + i]);
        std::copy(src.begin(), src.end(), xb.row(i).begin());
        yb[i] = train_set.y[order[start + i]];
      }
      double batch_loss = 0;
      const auto grads = gradient(model, xb, yb, &batch_loss);
      if (!std::isfinite(batch_loss)) {
        throw Error(Errc::Diverged, "non-finite loss in epoch " + std::to_string(epoch));
      }
      epoch_loss += batch_loss * static_cast<double>(b);
      stepper.step(params, flatten(grads));
      model.set_parameters(params);
    }
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    const double f = compute_metrics(model.predict(scoring.x), scoring.y).fscore;
    result.history.val_fscore.push_back(f);
    if (f > result.history.best_val_fscore) {
      result.history.best_val_fscore = f;
      result.history.best_epoch = epoch;
      result.model = model;
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace lobrep
