#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plugcast/features.hpp"
#include "plugcast/rng.hpp"

namespace plugcast {

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;

    bool operator==(const DenseLayer& o) const {
        return weight.rows() == o.weight.rows() && weight.cols() == o.weight.cols() &&
               bias.size() == o.bias.size() && weight == o.weight && bias == o.bias;
    }
};

/// Fully connected regression network: ReLU on every hidden layer, linear
/// scalar output.
struct Network {
    std::vector<DenseLayer> layers;

    [[nodiscard]] std::size_t input_width() const { return layers.front().weight.cols(); }
    [[nodiscard]] std::size_t parameter_count() const;
    bool operator==(const Network&) const = default;
};

/// widths = {input, hidden..., 1}. Weights ~ N(0, 2/fan_in), biases zero.
[[nodiscard]] Network make_network(std::span<const int> widths, std::uint64_t seed);

enum class ForwardMode { inference, train };

// Inference is deterministic. Train mode applies inverted dropout after each
// hidden activation: a unit is zeroed with probability `dropout_rate` and
// survivors are scaled by 1/(1 - dropout_rate). Masks come from `rng`, one
// uniform per hidden unit, layer by layer.
[[nodiscard]] double forward(const Network& net, std::span<const double> x);
[[nodiscard]] double forward(const Network& net, std::span<const double> x, ForwardMode mode,
                             double dropout_rate, Rng* rng);

/// Inputs laid out column-per-sample (in x batch).
[[nodiscard]] Eigen::VectorXd forward_batch(const Network& net, const Eigen::MatrixXd& inputs);

// Mean squared error of the batch and its gradient with respect to every
// weight and bias, by backpropagation. Dropout is applied when rng is non-null
// and dropout_rate > 0. `grads` is resized to match `net`.
double mse_gradients(const Network& net, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     double dropout_rate, Rng* rng, Network& grads);

struct AdamHyper {
    double step_size = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    bool operator==(const AdamHyper&) const = default;
};

// One Adam update of a parameter block, in place. `t` is the 1-based step
// count shared by every block updated in the same iteration.
void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
               std::span<double> v, std::int64_t t, const AdamHyper& hyper = {});

enum class MlpVariant { v1, v2, v3 };

[[nodiscard]] const char* variant_name(MlpVariant v) noexcept;  // "nn-v1" ...
/// Lags plus dow one-hot; v2 adds month, v3 adds month and hour.
[[nodiscard]] FeatureSpec variant_spec(MlpVariant v, std::vector<int> lags = {48, 144, 336});

inline constexpr int kHiddenWidth1 = 100;
inline constexpr int kHiddenWidth2 = 50;

struct MlpModel {
    MlpVariant variant = MlpVariant::v1;
    FeatureSpec spec;
    FeatureScaler scaler;
    Network net;
    std::uint64_t seed = 0;

    bool operator==(const MlpModel&) const = default;
};

/// input -> 100 -> 50 -> 1. The scaler starts as the identity.
[[nodiscard]] MlpModel mlp_init(MlpVariant variant, std::uint64_t seed,
                                std::vector<int> lags = {48, 144, 336});

/// Throws Errc::shape if features.size() differs from the input width.
[[nodiscard]] double mlp_forward(const MlpModel& model, std::span<const double> features,
                                 ForwardMode mode = ForwardMode::inference, double dropout_rate = 0.0,
                                 Rng* rng = nullptr);

/// Encodes and scales the row, then runs inference.
[[nodiscard]] double mlp_predict(const MlpModel& model, const FeatureRow& row);

struct TrainConfig {
    int epochs = 1000;
    int batch_size = 100;
    double dropout_rate = 0.2;
    AdamHyper adam;
    std::uint64_t seed = 0;
    // Return the parameters of the epoch with the lowest validation loss
    // rather than those of the last epoch.
    bool keep_best = true;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct TrainHistory {
    std::vector<double> train_loss;       // mean dropout-mode batch MSE
    std::vector<double> validation_loss;  // inference MSE, empty split -> NaN
    int best_epoch = -1;                  // 0-based, -1 when no epochs ran
};

struct TrainResult {
    MlpModel model;
    TrainHistory history;
};

// Fits the scaler on the training split, then runs exactly config.epochs
// epochs of shuffled mini-batch Adam on MSE. Deterministic for a given seed.
// Throws Errc::divergence (with the epoch) if a loss becomes non-finite.
[[nodiscard]] TrainResult mlp_train(MlpModel model, const FeatureMatrix& matrix, const TrainConfig& config);

}  // namespace plugcast
