#include "shiftval/autoenc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftval/error.hpp"

namespace shiftval {

namespace {

// Stream ids for the training RNG.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamSplit = 2;
constexpr std::uint64_t kStreamShuffle = 3;

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Scratch space for one forward/backward pass through the network.
struct Workspace {
  std::vector<std::vector<double>> act;    // act[0] = input, act[L] = output
  std::vector<std::vector<double>> delta;  // delta[l] for layer l's outputs

  explicit Workspace(const std::vector<std::size_t>& sizes) {
    for (auto s : sizes) act.emplace_back(s, 0.0);
    for (std::size_t l = 1; l < sizes.size(); ++l) delta.emplace_back(sizes[l], 0.0);
  }
};

void forward(const AutoencoderModel& m, std::span<const double> z, Workspace& ws) {
  const auto& sizes = m.layer_sizes();
  const auto& p = m.params();
  std::copy(z.begin(), z.end(), ws.act[0].begin());
  const std::size_t L = m.num_layers();
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t in = sizes[l], out = sizes[l + 1];
    const double* w = p.data() + m.weight_offset(l);
    const double* b = p.data() + m.bias_offset(l);
    const auto& a = ws.act[l];
    auto& next = ws.act[l + 1];
    const bool hidden = l + 1 < L;
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * a[i];
      next[o] = (hidden && m.activation() == Activation::Tanh) ? std::tanh(s) : s;
    }
  }
}

// Accumulates d(scale * ||out - z||^2)/d(params) into grad; returns the
// squared error of the row.
double backward(const AutoencoderModel& m, std::span<const double> z, Workspace& ws, double scale,
                std::vector<double>& grad) {
  const auto& sizes = m.layer_sizes();
  const auto& p = m.params();
  const std::size_t L = m.num_layers();
  double sq = 0.0;
  auto& top = ws.delta[L - 1];
  for (std::size_t j = 0; j < sizes[L]; ++j) {
    double r = ws.act[L][j] - z[j];
    sq += r * r;
    top[j] = 2.0 * scale * r;
  }
  for (std::size_t l = L; l-- > 0;) {
    const std::size_t in = sizes[l], out = sizes[l + 1];
    const auto& d = ws.delta[l];
    const auto& a = ws.act[l];
    double* gw = grad.data() + m.weight_offset(l);
    double* gb = grad.data() + m.bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      gb[o] += d[o];
      double* gr = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) gr[i] += d[o] * a[i];
    }
    if (l == 0) break;
    const double* w = p.data() + m.weight_offset(l);
    auto& below = ws.delta[l - 1];
    for (std::size_t i = 0; i < in; ++i) {
      double s = 0.0;
      for (std::size_t o = 0; o < out; ++o) s += w[o * in + i] * d[o];
      double deriv = m.activation() == Activation::Tanh ? 1.0 - a[i] * a[i] : 1.0;
      below[i] = s * deriv;
    }
  }
  return sq;
}

double row_error(const AutoencoderModel& m, std::span<const double> z, Workspace& ws) {
  forward(m, z, ws);
  const auto& out = ws.act.back();
  double sq = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    double r = out[j] - z[j];
    sq += r * r;
  }
  return sq / static_cast<double>(z.size());
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "identity"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw DataError("activation: unknown value '" + s + "'");
}

AutoencoderModel::AutoencoderModel(std::vector<std::size_t> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  if (layer_sizes_.size() < 2) throw DataError("autoencoder: need at least two layer sizes");
  if (layer_sizes_.front() != layer_sizes_.back())
    throw DataError("autoencoder: first and last layer sizes must match");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    if (layer_sizes_[l] == 0 || layer_sizes_[l + 1] == 0) throw DataError("autoencoder: zero-width layer");
    offsets_.push_back(total);
    total += layer_sizes_[l] * layer_sizes_[l + 1] + layer_sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  standardizer.means.assign(dims(), 0.0);
  standardizer.scales.assign(dims(), 1.0);
}

void AutoencoderModel::reconstruct(std::span<const double> z, std::span<double> out) const {
  Workspace ws(layer_sizes_);
  forward(*this, z, ws);
  std::copy(ws.act.back().begin(), ws.act.back().end(), out.begin());
}

std::vector<std::size_t> default_layer_sizes(std::size_t d, std::size_t hidden, std::size_t bottleneck) {
  if (hidden == 0) hidden = std::max<std::size_t>(2, ceil_div(d, 2));
  if (bottleneck == 0) bottleneck = std::max<std::size_t>(1, ceil_div(d, 4));
  if (bottleneck >= d) throw DataError("bottleneck not compressive");
  return {d, hidden, bottleneck, hidden, d};
}

AutoencoderModel init_autoencoder(const std::vector<std::size_t>& layer_sizes, Activation activation,
                                  std::uint64_t seed) {
  AutoencoderModel m(layer_sizes, activation);
  RngStream rng(seed, kStreamInit);
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    const std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    double* w = m.params().data() + m.weight_offset(l);
    for (std::size_t k = 0; k < in * out; ++k) w[k] = rng.uniform(-a, a);
  }
  return m;
}

double loss_and_gradient(const AutoencoderModel& model, const Matrix& z, std::vector<double>* grad) {
  if (z.cols() != model.dims()) throw DataError("autoencoder: feature count mismatch");
  if (z.rows() == 0) throw DataError("autoencoder: empty batch");
  Workspace ws(model.layer_sizes());
  const double scale = 1.0 / (static_cast<double>(z.rows()) * static_cast<double>(z.cols()));
  if (grad) grad->assign(model.params().size(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    forward(model, z.row(r), ws);
    if (grad) {
      total += backward(model, z.row(r), ws, scale, *grad);
    } else {
      for (std::size_t j = 0; j < z.cols(); ++j) {
        double e = ws.act.back()[j] - z(r, j);
        total += e * e;
      }
    }
  }
  return total * scale;
}

AutoencoderModel train_autoencoder(const Matrix& x, const TrainConfig& cfg) {
  const std::size_t d = x.cols();
  if (x.rows() == 0 || d == 0) throw DataError("train_autoencoder: empty data");
  if (!x.all_finite()) throw DataError("train_autoencoder: non-finite input");
  if (cfg.epochs == 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0))
    throw DataError("train_autoencoder: epochs, batch size and learning rate must be positive");
  if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 0.5))
    throw DataError("train_autoencoder: validation fraction must lie in [0, 0.5)");
  auto sizes = default_layer_sizes(d, cfg.hidden_size, cfg.bottleneck_size);

  std::vector<std::string> warnings;
  if (x.rows() < 10 * d)
    warnings.push_back("autoencoder trained on " + std::to_string(x.rows()) + " rows for " + std::to_string(d) +
                       " features (fewer than 10 per feature)");

  // Optional validation holdout, reported only.
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(x.rows())));
  if (n_val > 0) {
    RngStream split(cfg.seed, kStreamSplit);
    split.shuffle(order);
  }
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  const Matrix x_train = x.select_rows(train_idx);
  AutoencoderModel model = init_autoencoder(sizes, Activation::Tanh, cfg.seed);
  model.standardizer = fit_standardizer(x_train);
  const Matrix z = model.standardizer.apply(x_train);
  const std::size_t n = z.rows();

  auto& theta = model.params();
  const std::size_t P = theta.size();
  std::vector<double> m1(P, 0.0), m2(P, 0.0), grad(P, 0.0);
  double b1t = 1.0, b2t = 1.0;
  RngStream shuffle(cfg.seed, kStreamShuffle);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Workspace ws(sizes);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle.shuffle(perm);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      const double scale = 1.0 / (static_cast<double>(stop - start) * static_cast<double>(d));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        auto row = z.row(perm[k]);
        forward(model, row, ws);
        backward(model, row, ws, scale, grad);
      }
      b1t *= cfg.beta1;
      b2t *= cfg.beta2;
      const double step = cfg.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
      for (std::size_t k = 0; k < P; ++k) {
        m1[k] = cfg.beta1 * m1[k] + (1.0 - cfg.beta1) * grad[k];
        m2[k] = cfg.beta2 * m2[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
        theta[k] -= step * m1[k] / (std::sqrt(m2[k]) + cfg.epsilon * std::sqrt(1.0 - b2t));
      }
    }
    if (epoch % 10 == 0 || epoch == cfg.epochs) {
      double loss = loss_and_gradient(model, z, nullptr);
      if (!std::isfinite(loss))
        throw NumericError("diverged: training loss is not finite at epoch " + std::to_string(epoch) +
                           "; lower the learning rate");
      if (epoch % 10 == 0) model.meta.loss_history.push_back(loss);
      if (epoch == cfg.epochs) model.meta.final_loss = loss;
    }
  }

  model.meta.epochs = cfg.epochs;
  model.meta.batch_size = cfg.batch_size;
  model.meta.learning_rate = cfg.learning_rate;
  model.meta.seed = cfg.seed;
  model.meta.n_train = n;
  model.meta.warnings = std::move(warnings);
  std::vector<double> errs(n);
  for (std::size_t r = 0; r < n; ++r) errs[r] = row_error(model, z.row(r), ws);
  model.meta.median_training_error = median(errs);
  if (n_val > 0) {
    const Matrix zv = model.standardizer.apply(x.select_rows(val_idx));
    model.meta.validation_loss = loss_and_gradient(model, zv, nullptr);
  }
  for (double t : theta)
    if (!std::isfinite(t)) throw NumericError("diverged: non-finite parameters; lower the learning rate");
  return model;
}

std::vector<double> reconstruction_error(const AutoencoderModel& model, const Matrix& x) {
  if (x.cols() != model.dims())
    throw DataError("reconstruction_error: model expects " + std::to_string(model.dims()) + " features, got " +
                    std::to_string(x.cols()));
  if (!x.all_finite()) throw DataError("reconstruction_error: non-finite input");
  Workspace ws(model.layer_sizes());
  std::vector<double> z(x.cols());
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    model.standardizer.apply_row(x.row(r), z);
    out[r] = row_error(model, z, ws);
  }
  return out;
}

double gradient_check(const AutoencoderModel& model, const Matrix& z_probe) {
  std::vector<double> analytic;
  loss_and_gradient(model, z_probe, &analytic);
  AutoencoderModel probe = model;
  auto& theta = probe.params();
  double worst = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double orig = theta[k];
    const double h = 1e-5 * (1.0 + std::abs(orig));
    theta[k] = orig + h;
    double up = loss_and_gradient(probe, z_probe, nullptr);
    theta[k] = orig - h;
    double down = loss_and_gradient(probe, z_probe, nullptr);
    theta[k] = orig;
    double numeric = (up - down) / (2.0 * h);
    double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

void attach_reference(AutoencoderModel& model, std::span<const double> holdout_scores, const std::string& source) {
  ScoreReference ref;
  ref.source = source;
  ref.n = holdout_scores.size();
  std::vector<double> sorted(holdout_scores.begin(), holdout_scores.end());
  std::sort(sorted.begin(), sorted.end());
  for (int p = 0; p <= 100; ++p) ref.percentiles.push_back(percentile(sorted, p));
  model.reference = std::move(ref);
}

// --- Artifact I/O -----------------------------------------------------------

nlohmann::ordered_json to_json(const AutoencoderModel& model) {
  nlohmann::ordered_json j;
  j["version"] = kAutoencoderArtifactVersion;
  j["layer_sizes"] = model.layer_sizes();
  j["activation"] = to_string(model.activation());
  nlohmann::ordered_json weights = nlohmann::ordered_json::array();
  nlohmann::ordered_json biases = nlohmann::ordered_json::array();
  const auto& sizes = model.layer_sizes();
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    nlohmann::ordered_json block = nlohmann::ordered_json::array();
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      std::vector<double> row(sizes[l]);
      for (std::size_t i = 0; i < sizes[l]; ++i) row[i] = model.weight(l, o, i);
      block.push_back(row);
    }
    weights.push_back(std::move(block));
    std::vector<double> b(sizes[l + 1]);
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) b[o] = model.bias(l, o);
    biases.push_back(b);
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["standardizer"] = {{"means", model.standardizer.means}, {"scales", model.standardizer.scales}};
  const auto& m = model.meta;
  nlohmann::ordered_json meta;
  meta["epochs"] = m.epochs;
  meta["batch_size"] = m.batch_size;
  meta["learning_rate"] = m.learning_rate;
  meta["seed"] = m.seed;
  meta["n_train"] = m.n_train;
  meta["final_loss"] = m.final_loss;
  if (m.validation_loss) meta["validation_loss"] = *m.validation_loss;
  meta["loss_history"] = m.loss_history;
  meta["median_training_error"] = m.median_training_error;
  meta["warnings"] = m.warnings;
  j["training_meta"] = std::move(meta);
  if (model.reference) {
    j["reference"] = {{"source", model.reference->source},
                      {"n", model.reference->n},
                      {"percentiles", model.reference->percentiles}};
  }
  if (model.schema) j["schema"] = to_json(*model.schema);
  return j;
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw DataError("autoencoder artifact: missing field '" + name + "'");
  return j.at(name);
}

double finite_number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw DataError("autoencoder artifact: " + where + " is not a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw DataError("autoencoder artifact: " + where + " is not finite");
  return d;
}

std::vector<double> number_array(const nlohmann::json& v, std::size_t expected, const std::string& where) {
  if (!v.is_array() || v.size() != expected)
    throw DataError("autoencoder artifact: " + where + " must be an array of " + std::to_string(expected) +
                    " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < expected; ++i)
    out.push_back(finite_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

AutoencoderModel autoencoder_from_json(const nlohmann::json& j) {
  const auto& version = field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kAutoencoderArtifactVersion)
    throw DataError("unsupported artifact version");
  const auto& ls = field(j, "layer_sizes");
  if (!ls.is_array() || ls.size() < 2)
    throw DataError("autoencoder artifact: layer_sizes must list at least two sizes");
  std::vector<std::size_t> sizes;
  for (const auto& s : ls) {
    if (!s.is_number_unsigned() || s.get<std::size_t>() == 0)
      throw DataError("autoencoder artifact: layer_sizes must be positive integers");
    sizes.push_back(s.get<std::size_t>());
  }
  if (sizes.front() != sizes.back())
    throw DataError("autoencoder artifact: layer_sizes must start and end with the same width");
  const auto& act = field(j, "activation");
  if (!act.is_string()) throw DataError("autoencoder artifact: activation must be a string");
  AutoencoderModel model(sizes, activation_from_string(act.get<std::string>()));

  const auto& weights = field(j, "weights");
  const auto& biases = field(j, "biases");
  const std::size_t L = sizes.size() - 1;
  if (!weights.is_array() || weights.size() != L)
    throw DataError("autoencoder artifact: weights must hold " + std::to_string(L) + " layers");
  if (!biases.is_array() || biases.size() != L)
    throw DataError("autoencoder artifact: biases must hold " + std::to_string(L) + " layers");
  auto& p = model.params();
  for (std::size_t l = 0; l < L; ++l) {
    const std::string wname = "weights[" + std::to_string(l) + "]";
    const auto& block = weights[l];
    if (!block.is_array() || block.size() != sizes[l + 1])
      throw DataError("autoencoder artifact: " + wname + " must have " + std::to_string(sizes[l + 1]) + " rows");
    for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
      auto row = number_array(block[o], sizes[l], wname + "[" + std::to_string(o) + "]");
      std::copy(row.begin(), row.end(), p.begin() + static_cast<std::ptrdiff_t>(model.weight_offset(l) + o * sizes[l]));
    }
    auto b = number_array(biases[l], sizes[l + 1], "biases[" + std::to_string(l) + "]");
    std::copy(b.begin(), b.end(), p.begin() + static_cast<std::ptrdiff_t>(model.bias_offset(l)));
  }

  const auto& st = field(j, "standardizer");
  model.standardizer.means = number_array(field(st, "means"), sizes.front(), "standardizer.means");
  model.standardizer.scales = number_array(field(st, "scales"), sizes.front(), "standardizer.scales");
  for (double s : model.standardizer.scales)
    if (!(s > 0.0)) throw DataError("autoencoder artifact: standardizer.scales must be positive");

  const auto& meta = field(j, "training_meta");
  try {
    auto& m = model.meta;
    m.epochs = meta.value("epochs", std::size_t{0});
    m.batch_size = meta.value("batch_size", std::size_t{0});
    m.learning_rate = meta.value("learning_rate", 0.0);
    m.seed = meta.value("seed", std::uint64_t{0});
    m.n_train = meta.value("n_train", std::size_t{0});
    m.final_loss = meta.value("final_loss", 0.0);
    if (meta.contains("validation_loss")) m.validation_loss = meta.at("validation_loss").get<double>();
    m.loss_history = meta.value("loss_history", std::vector<double>{});
    m.median_training_error = finite_number(field(meta, "median_training_error"), "training_meta.median_training_error");
    m.warnings = meta.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("autoencoder artifact: training_meta: ") + e.what());
  }
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    ScoreReference ref;
    if (!field(r, "source").is_string()) throw DataError("autoencoder artifact: reference.source must be a string");
    ref.source = r.at("source").get<std::string>();
    if (!field(r, "n").is_number_unsigned()) throw DataError("autoencoder artifact: reference.n must be a count");
    ref.n = r.at("n").get<std::size_t>();
    ref.percentiles = number_array(field(r, "percentiles"), 101, "reference.percentiles");
    model.reference = std::move(ref);
  }
  if (j.contains("schema")) model.schema = schema_from_json(j.at("schema"));
  return model;
}

void save_autoencoder(const AutoencoderModel& model, const std::string& path) {
  write_file_atomic(path, to_json(model).dump(2) + "\n");
}

AutoencoderModel load_autoencoder(const std::string& path) {
  std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("autoencoder artifact '" + path + "': " + e.what());
  }
  return autoencoder_from_json(j);
}

}  // namespace shiftval
