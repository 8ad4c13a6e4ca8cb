// Copyright 2026 The diffnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Regressors from difference features to accuracy deltas: a closed-form
// ridge model and a small rectifier MLP trained by mini-batch Adam. Both are
// deterministic given their configuration and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffnas/doa_dataset.hpp"
#include "diffnas/encoding.hpp"
#include "diffnas/errors.hpp"
#include "diffnas/oracle.hpp"
#include "diffnas/rng.hpp"

namespace diffnas {

enum class Backend { ridge, mlp };

inline std::string_view to_string(Backend b) { return b == Backend::ridge ? "ridge" : "mlp"; }

inline Backend parse_backend(std::string_view s) {
  if (s == "ridge") return Backend::ridge;
  if (s == "mlp") return Backend::mlp;
  throw InvalidArgument("unknown backend '" + std::string(s) + "'");
}

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};

  void check() const {
    if (epochs < 1 || batch_size < 1 || !(learning_rate > 0.0) || !(l2 > 0.0))
      throw InvalidArgument("epochs, batch_size, learning_rate and l2 must be positive");
    for (int h : hidden)
      if (h < 1) throw InvalidArgument("hidden layer widths must be positive");
  }
};

// ---------------------------------------------------------------------------
// Ridge

// Minimizes |y - Xw - b|^2 + lambda |w|^2 with the intercept unpenalized,
// by centering and solving the normal equations.
struct RidgeModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double lambda = 0.0;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + bias;
  }
};

// Rows of `x` are samples.
inline RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  RidgeModel m;
  m.weights = gram.ldlt().solve(xc.transpose() * yc);
  m.bias = y_mean - x_mean.dot(m.weights);
  m.lambda = lambda;
  return m;
}

// ---------------------------------------------------------------------------
// MLP

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Dense layers with rectifier activations between them and a linear scalar
// output. Layer l maps dims[l] -> dims[l + 1]. The network works on
// standardized targets; predict() undoes the standardization.
struct MlpModel {
  std::vector<Eigen::MatrixXd> weights;  // dims[l + 1] x dims[l]
  std::vector<Eigen::VectorXd> biases;
  double l2 = 0.0;
  double target_mean = 0.0;
  double target_scale = 1.0;

  std::size_t layers() const { return weights.size(); }
  Eigen::Index input_dim() const { return weights.front().cols(); }

  std::vector<int> dims() const {
    std::vector<int> d{static_cast<int>(weights.front().cols())};
    for (const auto& w : weights) d.push_back(static_cast<int>(w.rows()));
    return d;
  }

  static MlpModel zeros(const std::vector<int>& dims) {
    MlpModel m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      m.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
      m.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return m;
  }

  // He-uniform hidden layers, Glorot-uniform output layer, zero biases.
  static MlpModel initialized(const std::vector<int>& dims, std::uint64_t seed) {
    MlpModel m = zeros(dims);
    Rng rng(seed);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      const double fan_in = dims[l];
      const double bound = l + 1 == m.weights.size()
                               ? std::sqrt(6.0 / (fan_in + dims[l + 1]))
                               : std::sqrt(6.0 / fan_in);
      auto& w = m.weights[l];
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = bound * (2.0 * rng.uniform() - 1.0);
    }
    return m;
  }

  // Network output in standardized units; columns of `x` are samples.
  Eigen::RowVectorXd forward(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      Eigen::MatrixXd z = (weights[l] * a).colwise() + biases[l];
      a = l + 1 < layers() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a.row(0);
  }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      Eigen::VectorXd z = weights[l] * a + biases[l];
      a = l + 1 < layers() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
    }
    return a(0) * target_scale + target_mean;
  }

  // Objective on a batch (columns of x, standardized targets t):
  //   1/(2B) sum_b (f(x_b) - t_b)^2 + l2/2 sum_l |W_l|^2
  // Fills `grad` when given.
  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, MlpGradients* grad) const {
    const auto batch = static_cast<double>(x.cols());
    std::vector<Eigen::MatrixXd> acts{x};
    std::vector<Eigen::MatrixXd> pre;
    for (std::size_t l = 0; l < layers(); ++l) {
      pre.push_back((weights[l] * acts.back()).colwise() + biases[l]);
      acts.push_back(l + 1 < layers() ? Eigen::MatrixXd(pre.back().cwiseMax(0.0)) : pre.back());
    }
    const Eigen::RowVectorXd residual = acts.back().row(0) - t.transpose();
    double value = 0.5 * residual.squaredNorm() / batch;
    for (const auto& w : weights) value += 0.5 * l2 * w.squaredNorm();
    if (!grad) return value;

    grad->weights.resize(layers());
    grad->biases.resize(layers());
    Eigen::MatrixXd delta = residual / batch;  // d objective / d pre-activation
    for (std::size_t l = layers(); l-- > 0;) {
      grad->weights[l] = delta * acts[l].transpose() + l2 * weights[l];
      grad->biases[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = (weights[l].transpose() * delta).cwiseProduct(
            (pre[l - 1].array() > 0.0).cast<double>().matrix());
      }
    }
    return value;
  }
};

// Adam with the usual constants.
class AdamState {
 public:
  AdamState(const MlpModel& m, double lr) : lr_(lr) {
    for (std::size_t l = 0; l < m.layers(); ++l) {
      mw_.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
      vw_.push_back(mw_.back());
      mb_.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
      vb_.push_back(mb_.back());
    }
  }

  void step(MlpModel& m, const MlpGradients& g) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, t_);
    const double c2 = 1.0 - std::pow(beta2, t_);
    auto update = [&](auto& param, auto& mom, auto& vel, const auto& gr) {
      mom = beta1 * mom + (1.0 - beta1) * gr;
      vel = beta2 * vel + (1.0 - beta2) * gr.cwiseProduct(gr);
      param.array() -= lr_ * (mom.array() / c1) / ((vel.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < m.layers(); ++l) {
      update(m.weights[l], mw_[l], vw_[l], g.weights[l]);
      update(m.biases[l], mb_[l], vb_[l], g.biases[l]);
    }
  }

 private:
  double lr_;
  int t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

// Rows of `x` are samples.
inline MlpModel fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const TrainConfig& cfg) {
  std::vector<int> dims{static_cast<int>(x.cols())};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  MlpModel m = MlpModel::initialized(dims, derive_seed(cfg.seed, 0));
  m.l2 = cfg.l2;
  m.target_mean = y.mean();
  const double sd = std::sqrt((y.array() - m.target_mean).square().mean());
  m.target_scale = sd > 0.0 ? sd : 1.0;
  const Eigen::VectorXd t = (y.array() - m.target_mean) / m.target_scale;
  const Eigen::MatrixXd xt = x.transpose();

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<Eigen::Index> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Eigen::Index>(i);
  AdamState adam(m, cfg.learning_rate);
  MlpGradients grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, 1, epoch));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min<std::size_t>(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(xt.rows(), static_cast<Eigen::Index>(len));
      Eigen::VectorXd tb(static_cast<Eigen::Index>(len));
      for (std::size_t b = 0; b < len; ++b) {
        xb.col(static_cast<Eigen::Index>(b)) = xt.col(order[start + b]);
        tb(static_cast<Eigen::Index>(b)) = t(order[start + b]);
      }
      m.loss(xb, tb, &grad);
      adam.step(m, grad);
    }
  }
  return m;
}

// Largest relative error between the analytic gradient of the single-sample
// objective and its central finite difference with step eps. Entries where
// both magnitudes are below 1e-7 are compared on an absolute scale of 1e-7.
// The data term and the weight penalty are differenced separately; for the
// penalty only the perturbed weight's square changes.
inline double grad_check(const MlpModel& model, const Eigen::VectorXd& x, double target,
                         double eps) {
  const Eigen::MatrixXd xb = x;
  const Eigen::VectorXd tb = Eigen::VectorXd::Constant(1, target);
  MlpGradients analytic;
  model.loss(xb, tb, &analytic);
  MlpModel probe = model;
  probe.l2 = 0.0;
  double worst = 0.0;
  auto compare = [&](double& param, double g, bool penalized) {
    const double saved = param;
    param = saved + eps;
    const double up = probe.loss(xb, tb, nullptr);
    param = saved - eps;
    const double down = probe.loss(xb, tb, nullptr);
    param = saved;
    double numeric = (up - down) / (2.0 * eps);
    if (penalized) {
      const double hi = saved + eps, lo = saved - eps;
      numeric += 0.5 * model.l2 * (hi * hi - lo * lo) / (2.0 * eps);
    }
    const double scale = std::max({std::abs(g), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(g - numeric) / scale);
  };
  for (std::size_t l = 0; l < probe.layers(); ++l) {
    auto& w = probe.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) compare(w(i, j), analytic.weights[l](i, j), true);
    auto& b = probe.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) compare(b(i), analytic.biases[l](i), false);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Backend-independent regressor

struct Regressor {
  Backend backend = Backend::ridge;
  RidgeModel ridge;
  MlpModel mlp;

  Eigen::Index input_dim() const {
    return backend == Backend::ridge ? ridge.weights.size() : mlp.input_dim();
  }

  double predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != input_dim())
      throw DimensionMismatch("input has " + std::to_string(x.size()) + " entries, model expects " +
                              std::to_string(input_dim()));
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return backend == Backend::ridge ? ridge.predict(v) : mlp.predict(v);
  }
};

inline Eigen::MatrixXd rows_to_matrix(const std::vector<FeatureVector>& rows) {
  if (rows.empty()) throw EmptyDataset("no training rows");
  const std::size_t dim = rows.front().size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim)
      throw DimensionMismatch("row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " +
                              std::to_string(dim));
    for (std::size_t j = 0; j < dim; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return x;
}

struct FitResult {
  Regressor regressor;
  double train_mse = 0.0;
};

inline FitResult fit_regressor(const std::vector<FeatureVector>& rows,
                               const std::vector<double>& targets, Backend backend,
                               const TrainConfig& cfg) {
  cfg.check();
  if (rows.size() != targets.size()) throw LengthMismatch("rows and targets differ in length");
  const Eigen::MatrixXd x = rows_to_matrix(rows);
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
  FitResult out;
  out.regressor.backend = backend;
  if (backend == Backend::ridge) {
    out.regressor.ridge = fit_ridge(x, y, cfg.l2);
  } else {
    out.regressor.mlp = fit_mlp(x, y, cfg);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = out.regressor.predict(rows[i]) - targets[i];
    sse += e * e;
  }
  out.train_mse = sse / static_cast<double>(rows.size());
  return out;
}

// ---------------------------------------------------------------------------
// Delta predictor over DoA features

struct PredictorModel {
  FeatureMode mode = FeatureMode::diff_only;
  std::size_t feature_dim = 0;  // length of one DiffFeature
  Regressor regressor;

  Backend backend() const { return regressor.backend; }
  std::size_t input_dim() const {
    return mode == FeatureMode::diff_only ? feature_dim : 2 * feature_dim;
  }
};

inline FeatureVector model_input(FeatureMode mode, const FeatureVector& feature,
                                 const FeatureVector* anchor_feature) {
  if (mode == FeatureMode::diff_only) return feature;
  if (!anchor_feature) throw DimensionMismatch("diff_plus_anchor model needs the anchor encoding");
  FeatureVector in = feature;
  in.insert(in.end(), anchor_feature->begin(), anchor_feature->end());
  return in;
}

inline FeatureVector model_input(FeatureMode mode, const SearchSpaceSpec& spec,
                                 const DoASample& s) {
  if (mode == FeatureMode::diff_only) return s.feature;
  const FeatureVector anchor = encode_onehot(spec, s.anchor);
  return model_input(mode, s.feature, &anchor);
}

struct TrainResult {
  PredictorModel model;
  double train_mse = 0.0;
};

inline TrainResult train(const DoADataset& ds, const TrainConfig& cfg, FeatureMode mode,
                         Backend backend) {
  if (ds.empty()) throw EmptyDataset("DoA dataset has no samples");
  const std::size_t dim = feature_dim(ds.spec);
  std::vector<FeatureVector> rows;
  std::vector<double> targets;
  rows.reserve(ds.size());
  for (const auto& s : ds.samples) {
    if (s.feature.size() != dim)
      throw DimensionMismatch("sample feature has " + std::to_string(s.feature.size()) +
                              " entries, spec implies " + std::to_string(dim));
    rows.push_back(model_input(mode, ds.spec, s));
    targets.push_back(s.delta_acc);
  }
  auto fit = fit_regressor(rows, targets, backend, cfg);
  return {PredictorModel{mode, dim, std::move(fit.regressor)}, fit.train_mse};
}

inline double predict_delta(const PredictorModel& model, const FeatureVector& feature,
                            const FeatureVector* anchor_feature = nullptr) {
  if (feature.size() != model.feature_dim)
    throw DimensionMismatch("feature has " + std::to_string(feature.size()) +
                            " entries, model expects " + std::to_string(model.feature_dim));
  if (anchor_feature && anchor_feature->size() != model.feature_dim)
    throw DimensionMismatch("anchor encoding has wrong length");
  return model.regressor.predict(model_input(model.mode, feature, anchor_feature));
}

// Predicted accuracy change of moving from `from` to `to`.
class DoAPredictor {
 public:
  DoAPredictor(const SearchSpaceSpec& spec, const PredictorModel& model)
      : spec_(&spec), model_(&model) {
    if (model.feature_dim != feature_dim(spec))
      throw SpecMismatch("model was trained for a different search space");
  }

  double predict(const Architecture& from, const Architecture& to) const {
    const FeatureVector f = diff_to_feature(diff(from, to), *spec_);
    if (model_->mode == FeatureMode::diff_only) return predict_delta(*model_, f);
    const FeatureVector anchor = encode_onehot(*spec_, from);
    return predict_delta(*model_, f, &anchor);
  }

 private:
  const SearchSpaceSpec* spec_;
  const PredictorModel* model_;
};

// Exact deltas read from an oracle; the ideal predictor.
template <Oracle O>
class TrueDeltaPredictor {
 public:
  explicit TrueDeltaPredictor(const O& oracle) : oracle_(&oracle) {}
  double predict(const Architecture& from, const Architecture& to) const {
    return oracle_->score(to) - oracle_->score(from);
  }

 private:
  const O* oracle_;
};

template <typename P>
concept DeltaPredictor = requires(const P& p, const Architecture& a) {
  { p.predict(a, a) } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Rank correlation

// Kendall's tau-b: (C - D) / sqrt((N - Tx)(N - Ty)) over all N pairs, where
// Tx and Ty count pairs tied in each list.
inline double kendall_tau(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size())
    throw LengthMismatch(std::to_string(predicted.size()) + " vs " + std::to_string(truth.size()));
  if (predicted.size() < 2) throw LengthMismatch("need at least two observations");
  const std::size_t n = predicted.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int dx = (predicted[i] > predicted[j]) - (predicted[i] < predicted[j]);
      const int dy = (truth[i] > truth[j]) - (truth[i] < truth[j]);
      if (dx == 0) ++ties_x;
      if (dy == 0) ++ties_y;
      if (dx * dy > 0) ++concordant;
      if (dx * dy < 0) ++discordant;
    }
  }
  const long long pairs = static_cast<long long>(n * (n - 1) / 2);
  if (ties_x == pairs || ties_y == pairs)
    throw UndefinedCorrelation("one of the lists is constant");
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
}

// ---------------------------------------------------------------------------
// Model files: a text header followed by every parameter in shortest
// round-trip decimal, so a loaded model predicts bit-identically.

inline void write_values(std::ostream& out, const double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) out << (i ? " " : "") << format_double(data[i]);
  out << '\n';
}

inline void write_model(std::ostream& out, const PredictorModel& m,
                        const std::vector<std::string>& comments = {}) {
  out << "#diffnas-model v1\n";
  for (const auto& c : comments) out << '#' << c << '\n';
  out << "mode " << to_string(m.mode) << '\n';
  out << "backend " << to_string(m.backend()) << '\n';
  out << "feature_dim " << m.feature_dim << '\n';
  const auto& reg = m.regressor;
  if (reg.backend == Backend::ridge) {
    out << "lambda " << format_double(reg.ridge.lambda) << '\n';
    out << "bias " << format_double(reg.ridge.bias) << '\n';
    out << "weights " << reg.ridge.weights.size() << '\n';
    write_values(out, reg.ridge.weights.data(), reg.ridge.weights.size());
    return;
  }
  const auto& mlp = reg.mlp;
  out << "l2 " << format_double(mlp.l2) << '\n';
  out << "target_mean " << format_double(mlp.target_mean) << '\n';
  out << "target_scale " << format_double(mlp.target_scale) << '\n';
  out << "dims";
  for (int d : mlp.dims()) out << ' ' << d;
  out << '\n';
  for (std::size_t l = 0; l < mlp.layers(); ++l) {
    // Eigen stores column-major; the dump follows storage order.
    out << "layer " << l << " weights\n";
    write_values(out, mlp.weights[l].data(), mlp.weights[l].size());
    out << "layer " << l << " biases\n";
    write_values(out, mlp.biases[l].data(), mlp.biases[l].size());
  }
}

namespace detail {

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() == '#') continue;
      std::istringstream fields(line);
      std::string tok;
      while (fields >> tok) tokens_.push_back(tok);
    }
  }

  std::string word() {
    if (pos_ >= tokens_.size()) throw ParseError("model file ends early");
    return tokens_[pos_++];
  }
  void expect(const std::string& w) {
    const auto got = word();
    if (got != w) throw ParseError("model file: expected '" + w + "', got '" + got + "'");
  }
  double number() {
    const auto w = word();
    double v = 0.0;
    if (!parse_double(w, v)) throw ParseError("model file: bad number '" + w + "'");
    return v;
  }
  long integer() {
    const double v = number();
    if (v != std::floor(v) || v < 0) throw ParseError("model file: expected a count");
    return static_cast<long>(v);
  }
  void read_into(double* data, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) data[i] = number();
  }
  bool done() const { return pos_ == tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PredictorModel read_model(std::istream& in) {
  detail::ModelReader rd(in);
  PredictorModel m;
  rd.expect("mode");
  try {
    m.mode = parse_feature_mode(rd.word());
    rd.expect("backend");
    m.regressor.backend = parse_backend(rd.word());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  rd.expect("feature_dim");
  m.feature_dim = static_cast<std::size_t>(rd.integer());
  auto& reg = m.regressor;
  if (reg.backend == Backend::ridge) {
    rd.expect("lambda");
    reg.ridge.lambda = rd.number();
    rd.expect("bias");
    reg.ridge.bias = rd.number();
    rd.expect("weights");
    reg.ridge.weights.resize(rd.integer());
    rd.read_into(reg.ridge.weights.data(), reg.ridge.weights.size());
  } else {
    auto& mlp = reg.mlp;
    rd.expect("l2");
    mlp.l2 = rd.number();
    rd.expect("target_mean");
    mlp.target_mean = rd.number();
    rd.expect("target_scale");
    mlp.target_scale = rd.number();
    rd.expect("dims");
    std::vector<int> dims;
    // dims run until the first "layer" keyword.
    for (;;) {
      const auto w = rd.word();
      if (w == "layer") break;
      double v = 0.0;
      if (!parse_double(w, v) || v < 1) throw ParseError("model file: bad layer width '" + w + "'");
      dims.push_back(static_cast<int>(v));
    }
    if (dims.size() < 2 || dims.back() != 1) throw ParseError("model file: bad dims");
    const double l2 = mlp.l2, mean = mlp.target_mean, scale = mlp.target_scale;
    mlp = MlpModel::zeros(dims);
    mlp.l2 = l2;
    mlp.target_mean = mean;
    mlp.target_scale = scale;
    for (std::size_t l = 0; l < mlp.layers(); ++l) {
      if (l > 0) rd.expect("layer");
      if (rd.integer() != static_cast<long>(l)) throw ParseError("model file: layers out of order");
      rd.expect("weights");
      rd.read_into(mlp.weights[l].data(), mlp.weights[l].size());
      rd.expect("layer");
      rd.integer();
      rd.expect("biases");
      rd.read_into(mlp.biases[l].data(), mlp.biases[l].size());
    }
  }
  if (!rd.done()) throw ParseError("model file: trailing content");
  if (static_cast<std::size_t>(reg.input_dim()) != m.input_dim())
    throw ParseError("model file: input width does not match mode and feature_dim");
  return m;
}

inline void save_model(const std::string& path, const PredictorModel& m,
                       const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_model(out, m, comments);
}

inline PredictorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_model(in);
}

}  // namespace diffnas
