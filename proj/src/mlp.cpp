#include "plugcast/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "plugcast/error.hpp"

namespace plugcast {

namespace {

void apply_dropout(Eigen::Ref<Eigen::MatrixXd> activations, Eigen::Ref<Eigen::MatrixXd> derivative, double rate,
                   Rng& rng) {
    const double scale = 1.0 / (1.0 - rate);
    for (Eigen::Index c = 0; c < activations.cols(); ++c) {
        for (Eigen::Index r = 0; r < activations.rows(); ++r) {
            const double keep = rng.uniform() >= rate ? scale : 0.0;
            activations(r, c) *= keep;
            derivative(r, c) *= keep;
        }
    }
}

}  // namespace

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Network make_network(std::span<const int> widths, std::uint64_t seed) {
    if (widths.size() < 2) fail(Errc::shape, "a network needs at least an input and an output width");
    for (int w : widths)
        if (w <= 0) fail(Errc::shape, "layer widths must be positive");
    Rng rng(seed);
    Network net;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int in = widths[l];
        const int out = widths[l + 1];
        const double sd = std::sqrt(2.0 / static_cast<double>(in));
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) layer.weight(r, c) = sd * rng.normal();
        net.layers.push_back(std::move(layer));
    }
    return net;
}

double forward(const Network& net, std::span<const double> x) {
    return forward(net, x, ForwardMode::inference, 0.0, nullptr);
}

double forward(const Network& net, std::span<const double> x, ForwardMode mode, double dropout_rate, Rng* rng) {
    if (static_cast<std::size_t>(net.input_width()) != x.size())
        fail(Errc::shape, "network expects " + std::to_string(net.input_width()) + " inputs, got " +
                              std::to_string(x.size()));
    const bool drop = mode == ForwardMode::train && dropout_rate > 0.0;
    if (drop && rng == nullptr) fail(Errc::domain, "train-mode dropout needs a random stream");
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const double scale = drop ? 1.0 / (1.0 - dropout_rate) : 1.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Eigen::VectorXd z = net.layers[l].weight * a + net.layers[l].bias;
        if (l + 1 == net.layers.size()) return z(0);
        a = z.cwiseMax(0.0);
        if (drop)
            for (Eigen::Index u = 0; u < a.size(); ++u) a(u) *= rng->uniform() >= dropout_rate ? scale : 0.0;
    }
    return 0.0;  // unreachable: a network always has an output layer
}

Eigen::VectorXd forward_batch(const Network& net, const Eigen::MatrixXd& inputs) {
    if (inputs.rows() != net.layers.front().weight.cols()) fail(Errc::shape, "batch input width mismatch");
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Eigen::MatrixXd z = net.layers[l].weight * a;
        z.colwise() += net.layers[l].bias;
        if (l + 1 == net.layers.size()) return z.row(0).transpose();
        a = z.cwiseMax(0.0);
    }
    return {};
}

double mse_gradients(const Network& net, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     double dropout_rate, Rng* rng, Network& grads) {
    const std::size_t depth = net.layers.size();
    const Eigen::Index batch = inputs.cols();
    if (inputs.rows() != net.layers.front().weight.cols() || targets.size() != batch || batch == 0)
        fail(Errc::shape, "gradient batch shape mismatch");
    const bool drop = rng != nullptr && dropout_rate > 0.0;

    // activations[l] feeds layer l; derivatives[l] is d activations[l+1] / d z_l.
    std::vector<Eigen::MatrixXd> activations(depth);
    std::vector<Eigen::MatrixXd> derivatives(depth - 1);
    activations[0] = inputs;
    Eigen::MatrixXd z;
    for (std::size_t l = 0; l < depth; ++l) {
        z.noalias() = net.layers[l].weight * activations[l];
        z.colwise() += net.layers[l].bias;
        if (l + 1 == depth) break;
        derivatives[l] = (z.array() > 0.0).cast<double>().matrix();
        activations[l + 1] = z.cwiseMax(0.0);
        if (drop) apply_dropout(activations[l + 1], derivatives[l], dropout_rate, *rng);
    }
    const Eigen::RowVectorXd err = z.row(0) - targets.transpose();
    const double loss = err.squaredNorm() / static_cast<double>(batch);

    if (grads.layers.size() != depth) grads.layers.resize(depth);
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(batch)) * err;
    for (std::size_t l = depth; l-- > 0;) {
        grads.layers[l].weight.noalias() = delta * activations[l].transpose();
        grads.layers[l].bias = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = net.layers[l].weight.transpose() * delta;
        delta = back.cwiseProduct(derivatives[l - 1]);
    }
    return loss;
}

void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m, std::span<double> v,
               std::int64_t t, const AdamHyper& hyper) {
    if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size())
        fail(Errc::shape, "Adam parameter, gradient and moment sizes differ");
    if (t < 1) fail(Errc::domain, "Adam step count starts at 1");
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
        v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        params[i] -= hyper.step_size * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

const char* variant_name(MlpVariant v) noexcept {
    switch (v) {
        case MlpVariant::v1: return "nn-v1";
        case MlpVariant::v2: return "nn-v2";
        case MlpVariant::v3: return "nn-v3";
    }
    return "nn";
}

FeatureSpec variant_spec(MlpVariant v, std::vector<int> lags) {
    FeatureSpec spec;
    spec.lags = std::move(lags);
    spec.use_dow_onehot = true;
    spec.use_month_onehot = v != MlpVariant::v1;
    spec.use_hour_onehot = v == MlpVariant::v3;
    return spec;
}

MlpModel mlp_init(MlpVariant variant, std::uint64_t seed, std::vector<int> lags) {
    MlpModel m;
    m.variant = variant;
    m.spec = variant_spec(variant, std::move(lags));
    m.spec.validate();
    m.seed = seed;
    m.scaler.mean.assign(m.spec.lags.size(), 0.0);
    m.scaler.stddev.assign(m.spec.lags.size(), 1.0);
    const int widths[] = {static_cast<int>(m.spec.input_width()), kHiddenWidth1, kHiddenWidth2, 1};
    m.net = make_network(widths, seed);
    return m;
}

double mlp_forward(const MlpModel& model, std::span<const double> features, ForwardMode mode, double dropout_rate,
                   Rng* rng) {
    return forward(model.net, features, mode, dropout_rate, rng);
}

double mlp_predict(const MlpModel& model, const FeatureRow& row) {
    std::vector<double> x(model.spec.input_width());
    encode_row(row, model.spec, model.scaler, x);
    return forward(model.net, x);
}

void TrainConfig::validate() const {
    if (epochs < 0) fail(Errc::config, "epochs must be non-negative");
    if (batch_size < 1) fail(Errc::config, "batch_size must be at least 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail(Errc::config, "dropout_rate must be in [0, 1)");
    if (!(adam.step_size > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
        !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0))
        fail(Errc::config, "invalid Adam hyperparameters");
}

namespace {

void encode_rows(const FeatureMatrix& matrix, std::span<const std::size_t> idx, const MlpModel& model,
                 Eigen::MatrixXd& x, Eigen::VectorXd& y) {
    const auto width = static_cast<Eigen::Index>(model.spec.input_width());
    x.resize(width, static_cast<Eigen::Index>(idx.size()));
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        encode_row(matrix.rows[idx[i]], model.spec, model.scaler, std::span<double>(x.col(col).data(), x.rows()));
        y(col) = matrix.rows[idx[i]].target;
    }
}

struct Moments {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;

    explicit Moments(const Network& net) {
        for (const auto& l : net.layers) {
            mw.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
            vw.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
            mb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
            vb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
        }
    }
};

std::span<double> span_of(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> cspan_of(const Eigen::MatrixXd& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> cspan_of(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TrainResult mlp_train(MlpModel model, const FeatureMatrix& matrix, const TrainConfig& config) {
    config.validate();
    if (matrix.split.size() != matrix.size()) fail(Errc::config, "training needs a split feature matrix");
    if (matrix.spec.lags != model.spec.lags)
        fail(Errc::artifact_mismatch, "model lags differ from the feature matrix lags");
    if (static_cast<std::size_t>(model.net.input_width()) != model.spec.input_width())
        fail(Errc::shape, "network input width does not match its feature spec");

    const auto train_idx = matrix.indices(Split::train);
    const auto val_idx = matrix.indices(Split::validation);
    if (train_idx.empty()) fail(Errc::too_few_rows, "training split is empty");
    model.scaler = fit_scaler(matrix, train_idx);

    Eigen::MatrixXd x_train, x_val;
    Eigen::VectorXd y_train, y_val;
    encode_rows(matrix, train_idx, model, x_train, y_train);
    encode_rows(matrix, val_idx, model, x_val, y_val);

    TrainResult result;
    result.history.train_loss.reserve(static_cast<std::size_t>(config.epochs));
    result.history.validation_loss.reserve(static_cast<std::size_t>(config.epochs));

    Rng rng(derive_seed(config.seed, 0x7472));
    Moments moments(model.net);
    Network grads;
    Network best = model.net;
    double best_val = std::numeric_limits<double>::infinity();
    std::int64_t t = 0;

    const std::size_t n = train_idx.size();
    const auto bs = static_cast<std::size_t>(config.batch_size);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Eigen::MatrixXd xb(x_train.rows(), static_cast<Eigen::Index>(std::min(bs, n)));
    Eigen::VectorXd yb(xb.cols());

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
        double loss_sum = 0.0;
        for (std::size_t first = 0; first < n; first += bs) {
            const std::size_t count = std::min(bs, n - first);
            xb.resize(x_train.rows(), static_cast<Eigen::Index>(count));
            yb.resize(static_cast<Eigen::Index>(count));
            for (std::size_t j = 0; j < count; ++j) {
                xb.col(static_cast<Eigen::Index>(j)) = x_train.col(static_cast<Eigen::Index>(order[first + j]));
                yb(static_cast<Eigen::Index>(j)) = y_train(static_cast<Eigen::Index>(order[first + j]));
            }
            const double loss = mse_gradients(model.net, xb, yb, config.dropout_rate, &rng, grads);
            if (!std::isfinite(loss))
                fail(Errc::divergence, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
            loss_sum += loss * static_cast<double>(count);
            ++t;
            for (std::size_t l = 0; l < model.net.layers.size(); ++l) {
                auto& layer = model.net.layers[l];
                adam_step(span_of(layer.weight), cspan_of(grads.layers[l].weight), span_of(moments.mw[l]),
                          span_of(moments.vw[l]), t, config.adam);
                adam_step(span_of(layer.bias), cspan_of(grads.layers[l].bias), span_of(moments.mb[l]),
                          span_of(moments.vb[l]), t, config.adam);
            }
        }
        const double train_loss = loss_sum / static_cast<double>(n);
        double val_loss = std::numeric_limits<double>::quiet_NaN();
        if (!val_idx.empty()) {
            val_loss = (forward_batch(model.net, x_val) - y_val).squaredNorm() / static_cast<double>(val_idx.size());
            if (!std::isfinite(val_loss))
                fail(Errc::divergence, "validation loss became non-finite in epoch " + std::to_string(epoch + 1));
        }
        result.history.train_loss.push_back(train_loss);
        result.history.validation_loss.push_back(val_loss);
        if (config.keep_best && !val_idx.empty()) {
            if (val_loss < best_val) {
                best_val = val_loss;
                best = model.net;
                result.history.best_epoch = epoch;
            }
        } else {
            result.history.best_epoch = epoch;
        }
    }
    if (config.keep_best && !val_idx.empty() && config.epochs > 0) model.net = std::move(best);
    result.model = std::move(model);
    return result;
}

}  // namespace plugcast
