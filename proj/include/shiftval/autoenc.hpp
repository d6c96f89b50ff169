#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftval/dataset.hpp"
#include "shiftval/numstat.hpp"

namespace shiftval {

enum class Activation { Tanh, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::size_t hidden_size = 0;      // 0: max(2, ceil(d/2))
  std::size_t bottleneck_size = 0;  // 0: max(1, ceil(d/4))
  double validation_fraction = 0.0; // reported only, never used to stop
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainingMeta {
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  double final_loss = 0.0;
  std::optional<double> validation_loss;
  // Full training-set loss at epochs 10, 20, ...
  std::vector<double> loss_history;
  // Median per-row reconstruction error on the training rows; the default
  // pseudo-density bandwidth for this artifact.
  double median_training_error = 0.0;
  std::vector<std::string> warnings;
};

// Dissimilarity percentiles of a development holdout (index p = percentile p,
// nearest rank), so an external site can threshold without development data.
struct ScoreReference {
  std::string source = "dev-holdout";
  std::size_t n = 0;
  std::vector<double> percentiles;  // 101 entries
};

// Fully connected autoencoder on standardized inputs. Hidden layers use
// `activation`; the output layer is linear. Layer l maps layer_sizes[l] to
// layer_sizes[l+1] with a row-major (out x in) weight block followed by its
// biases inside `params`.
class AutoencoderModel {
 public:
  AutoencoderModel() = default;
  AutoencoderModel(std::vector<std::size_t> layer_sizes, Activation activation);

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t dims() const { return layer_sizes_.empty() ? 0 : layer_sizes_.front(); }
  std::size_t num_layers() const { return layer_sizes_.size() - 1; }
  Activation activation() const { return activation_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layer_sizes_[layer] * layer_sizes_[layer + 1];
  }
  double weight(std::size_t layer, std::size_t out, std::size_t in) const {
    return params_[weight_offset(layer) + out * layer_sizes_[layer] + in];
  }
  double bias(std::size_t layer, std::size_t out) const { return params_[bias_offset(layer) + out]; }

  // Reconstruction of an already standardized row.
  void reconstruct(std::span<const double> z, std::span<double> out) const;

  Standardizer standardizer;
  TrainingMeta meta;
  std::optional<ScoreReference> reference;
  std::optional<ColumnSchema> schema;

 private:
  std::vector<std::size_t> layer_sizes_;
  Activation activation_ = Activation::Tanh;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

std::vector<std::size_t> default_layer_sizes(std::size_t d, std::size_t hidden = 0, std::size_t bottleneck = 0);

// Glorot-uniform weights, zero biases, identity standardizer.
AutoencoderModel init_autoencoder(const std::vector<std::size_t>& layer_sizes, Activation activation,
                                  std::uint64_t seed);

// Mean squared reconstruction error of a standardized batch, averaged over
// rows and features, and its gradient with respect to params().
double loss_and_gradient(const AutoencoderModel& model, const Matrix& z, std::vector<double>* grad);

// Minimises the mean squared reconstruction error of standardized inputs with
// mini-batch Adam. Deterministic given (x, cfg).
AutoencoderModel train_autoencoder(const Matrix& x, const TrainConfig& cfg);

// Per-row mean squared error between the standardized input and its
// reconstruction.
std::vector<double> reconstruction_error(const AutoencoderModel& model, const Matrix& x);

// Maximum relative discrepancy between analytic gradients and central finite
// differences (step 1e-5 * (1 + |theta|)) on a standardized probe batch.
// Relative error is |a - f| / max(|a|, |f|, 1e-6).
double gradient_check(const AutoencoderModel& model, const Matrix& z_probe);

void attach_reference(AutoencoderModel& model, std::span<const double> holdout_scores,
                      const std::string& source = "dev-holdout");

inline constexpr int kAutoencoderArtifactVersion = 1;

nlohmann::ordered_json to_json(const AutoencoderModel& model);
AutoencoderModel autoencoder_from_json(const nlohmann::json& j);
void save_autoencoder(const AutoencoderModel& model, const std::string& path);
AutoencoderModel load_autoencoder(const std::string& path);

}  // namespace shiftval
