#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plugcast/error.hpp"
#include "plugcast/glm.hpp"
#include "plugcast/mlp.hpp"
#include "plugcast/persistence.hpp"
#include "support.hpp"

using namespace plugcast;
using namespace plugcast::test;

namespace {

const Timestamp kMonday = make_timestamp(2017, 1, 2);

PluginSeries random_series(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(rng.below(1000));
    return make_series(kMonday, std::move(v));
}

std::size_t step_of(const PluginSeries& s, Timestamp t) {
    return static_cast<std::size_t>((t - s.start).count() / 30);
}

Network toy_network() {
    // Two inputs, two hidden ReLU units passing each input through, summed.
    Network net;
    DenseLayer hidden;
    hidden.weight = Eigen::MatrixXd::Identity(2, 2);
    hidden.bias = Eigen::VectorXd::Zero(2);
    DenseLayer out;
    out.weight = Eigen::MatrixXd::Ones(1, 2);
    out.bias = Eigen::VectorXd::Constant(1, 0.5);
    net.layers = {hidden, out};
    return net;
}

FeatureMatrix with_validation(FeatureMatrix m, std::size_t every) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (i % every == 0) m.split[i] = Split::validation;
    return m;
}

double validation_rmse(const FeatureMatrix& m, const auto& predict) {
    double s = 0.0;
    std::size_t n = 0;
    for (auto i : m.indices(Split::validation)) {
        const double e = predict(m.rows[i]) - m.rows[i].target;
        s += e * e;
        ++n;
    }
    return std::sqrt(s / static_cast<double>(n));
}

}  // namespace

TEST_CASE("persistence day-of-week cases") {
    const auto s = random_series(1, 48 * 28);
    const Timestamp tue = kMonday + std::chrono::days{8} + std::chrono::hours{10};
    const Timestamp mon = kMonday + std::chrono::days{14} + std::chrono::hours{10};
    const Timestamp sat = kMonday + std::chrono::days{12} + std::chrono::hours{10};
    CHECK(persistence_predict(s, step_of(s, tue)) == s.values[step_of(s, tue - std::chrono::days{1})]);
    CHECK(persistence_predict(s, step_of(s, mon)) == s.values[step_of(s, mon - std::chrono::days{3})]);
    CHECK(persistence_predict(s, step_of(s, sat)) == s.values[step_of(s, sat - std::chrono::days{7})]);
    CHECK(day_of_week(mon - std::chrono::days{3}) == 4);
}

TEST_CASE("persistence equals direct lookup for every step") {
    const auto s = random_series(2, 48 * 35);
    for (std::size_t step = 336; step < s.size(); ++step) {
        const int dow = day_of_week(s.time_at(step));
        const std::size_t back = dow == 0 ? 144 : dow == 5 ? 336 : 48;
        REQUIRE(persistence_predict(s, step) == static_cast<double>(s.values[step - back]));
    }
    // The row form agrees with the series form.
    const auto m = build_matrix(s, FeatureSpec{});
    for (const auto& row : m.rows) REQUIRE(persistence_predict(m.spec, row) == persistence_predict(s, row.step));
}

TEST_CASE("persistence errors") {
    const auto s = random_series(3, 48 * 10);
    CHECK_ERRC(persistence_predict(s, 335), Errc::insufficient_history);
    CHECK_ERRC(persistence_predict(s, s.size()), Errc::domain);
    FeatureSpec spec;
    spec.lags = {48, 336};
    FeatureRow row;
    row.lag_values = {1, 2};
    row.dow = 0;
    CHECK_ERRC(persistence_predict(spec, row), Errc::artifact_mismatch);
}

TEST_CASE("glm recovers a known law") {
    const auto m = linear_law_matrix(5, 7 * 400, uniform_law(0.5, 0.3, 0.2), 0.01);
    const auto model = glm_fit(m);
    CHECK_FALSE(model.intercept);
    for (int d = 0; d < 7; ++d) {
        const auto& c = model.coefficients[static_cast<std::size_t>(d)];
        CHECK(std::abs(c[0] - 0.5) <= 0.02);
        CHECK(std::abs(c[1] - 0.3) <= 0.02);
        CHECK(std::abs(c[2] - 0.2) <= 0.02);
    }
}

TEST_CASE("glm residuals are orthogonal to the design") {
    DayLaw law;
    Rng rng(12);
    for (auto& day : law)
        for (auto& c : day) c = rng.uniform();
    const auto m = linear_law_matrix(6, 7 * 300, law, 0.3);
    const auto model = glm_fit(m);
    for (int d = 0; d < 7; ++d) {
        std::array<double, 3> xtr{}, xty{};
        for (const auto& row : m.rows) {
            if (row.dow != d) continue;
            const double r = row.target - glm_predict(model, row);
            for (int k = 0; k < 3; ++k) {
                xtr[static_cast<std::size_t>(k)] += row.lag_values[static_cast<std::size_t>(k)] * r;
                xty[static_cast<std::size_t>(k)] += row.lag_values[static_cast<std::size_t>(k)] * row.target;
            }
        }
        const double norm_xty = std::sqrt(xty[0] * xty[0] + xty[1] * xty[1] + xty[2] * xty[2]);
        for (double v : xtr) CHECK(std::abs(v) <= 1e-8 * norm_xty);
    }
}

TEST_CASE("glm exact solution") {
    auto m = linear_law_matrix(7, 7 * 20, uniform_law(0, 0, 0), 0.0);
    for (auto& r : m.rows) r.target = r.lag_values[0];
    const auto model = glm_fit(m);
    for (const auto& c : model.coefficients) {
        CHECK(std::abs(c[0] - 1.0) <= 1e-12);
        CHECK(std::abs(c[1]) <= 1e-12);
        CHECK(std::abs(c[2]) <= 1e-12);
    }
}

TEST_CASE("glm fit fails for a day with too few rows") {
    auto m = linear_law_matrix(8, 7 * 10, uniform_law(1, 1, 1), 0.1);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.rows[i].dow == 2 && i > 10) m.split[i] = Split::test;
    try {
        (void)glm_fit(m);
        FAIL("expected fit error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::fit);
        CHECK(std::string(e.what()).find("Wednesday") != std::string::npos);
    }
    auto flat = linear_law_matrix(8, 7 * 10, uniform_law(1, 1, 1), 0.1);
    for (auto& r : flat.rows) r.lag_values[2] = r.lag_values[1];
    CHECK_ERRC(glm_fit(flat), Errc::fit);
}

TEST_CASE("glm intercept option") {
    auto m = linear_law_matrix(9, 7 * 200, uniform_law(0.5, 0.3, 0.2), 0.01);
    for (auto& r : m.rows) r.target += 3.0;
    const auto model = glm_fit(m, true);
    for (int d = 0; d < 7; ++d) CHECK(std::abs(model.intercepts[static_cast<std::size_t>(d)] - 3.0) < 0.02);
}

TEST_CASE("glm predict") {
    GlmModel model;
    Rng rng(10);
    for (auto& c : model.coefficients) c = {rng.normal(), rng.normal(), rng.normal()};
    FeatureRow row;
    row.lag_values = {0, 0, 0};
    CHECK(glm_predict(model, row) == 0.0);

    model.coefficients[3] = {1, 0, 0};
    row.dow = 3;
    row.lag_values = {12, 40, 7};
    CHECK(glm_predict(model, row) == 12.0);

    for (int trial = 0; trial < 50; ++trial) {
        row.dow = static_cast<int>(rng.below(7));
        row.lag_values = {rng.normal(), rng.normal(), rng.normal()};
        const auto& c = model.coefficients[static_cast<std::size_t>(row.dow)];
        const double expect = c[0] * row.lag_values[0] + c[1] * row.lag_values[1] + c[2] * row.lag_values[2];
        CHECK(glm_predict(model, row) == doctest::Approx(expect).epsilon(1e-14));
    }
    row.lag_values = {1, 2};
    CHECK_ERRC(glm_predict(model, row), Errc::shape);
}

TEST_CASE("mlp init") {
    const auto v1 = mlp_init(MlpVariant::v1, 1);
    const auto v2 = mlp_init(MlpVariant::v2, 1);
    const auto v3 = mlp_init(MlpVariant::v3, 1);
    CHECK(v1.net.input_width() == 10);
    CHECK(v2.net.input_width() == 22);
    CHECK(v3.net.input_width() == 46);
    REQUIRE(v3.net.layers.size() == 3);
    CHECK(v3.net.layers[0].weight.rows() == 100);
    CHECK(v3.net.layers[1].weight.rows() == 50);
    CHECK(v3.net.layers[1].weight.cols() == 100);
    CHECK(v3.net.layers[2].weight.rows() == 1);
    CHECK(v3.net.parameter_count() == 46 * 100 + 100 + 100 * 50 + 50 + 50 + 1);
    CHECK(mlp_init(MlpVariant::v3, 1) == v3);
    CHECK_FALSE(mlp_init(MlpVariant::v3, 2) == v3);
    CHECK(std::string(variant_name(MlpVariant::v2)) == "nn-v2");

    for (const auto& layer : v3.net.layers) CHECK(layer.bias.isZero(0.0));
    // He-normal: weight variance 2 / fan_in.
    const auto& w = v3.net.layers[1].weight;
    const double var = w.array().square().mean();
    CHECK(std::abs(var / (2.0 / 100.0) - 1.0) < 0.05);
}

TEST_CASE("forward pass") {
    auto model = mlp_init(MlpVariant::v1, 4);
    std::vector<double> x(10);
    Rng rng(4);
    for (auto& v : x) v = rng.normal();
    CHECK(mlp_forward(model, x) == mlp_forward(model, x));
    CHECK(mlp_forward(model, x) == doctest::Approx(loop_forward(model.net, x)).epsilon(1e-12));
    std::vector<double> short_x(9);
    CHECK_ERRC(mlp_forward(model, short_x), Errc::shape);

    for (auto& layer : model.net.layers) {
        layer.weight.setZero();
        layer.bias.setZero();
    }
    CHECK(mlp_forward(model, x) == 0.0);

    const Network toy = toy_network();
    CHECK(forward(toy, std::vector<double>{3, -2}) == 3.5);
    CHECK(forward(toy, std::vector<double>{-1, -1}) == 0.5);
    CHECK(forward(toy, std::vector<double>{2, 5}) == 7.5);
}

TEST_CASE("dropout") {
    const auto model = mlp_init(MlpVariant::v1, 6);
    std::vector<double> x(10, 0.3);
    Rng rng(1);
    CHECK(forward(model.net, x, ForwardMode::train, 0.0, &rng) == forward(model.net, x));
    CHECK_ERRC(forward(model.net, x, ForwardMode::train, 0.5, nullptr), Errc::domain);

    // With non-negative weights, biases and inputs every pre-activation stays
    // positive, so the output is multilinear in the masks and its expectation
    // is the inference output.
    const int widths[] = {4, 8, 6, 1};
    Network net = make_network(widths, 3);
    for (auto& layer : net.layers) {
        layer.weight = layer.weight.cwiseAbs();
        layer.bias.setConstant(0.1);
    }
    const std::vector<double> in{0.5, 1.0, 0.2, 0.8};
    const double reference = forward(net, in);
    Rng masks(77);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += forward(net, in, ForwardMode::train, 0.2, &masks);
    CHECK(std::abs(sum / n - reference) <= 0.02 * std::abs(reference));
}

TEST_CASE("backprop matches finite differences") {
    const int widths[] = {4, 3, 1};
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = make_network(widths, 100 + static_cast<std::uint64_t>(trial));
        Eigen::MatrixXd x(4, 8);
        Eigen::VectorXd y(8);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
        Network grads;
        const double loss = mse_gradients(net, x, y, 0.0, nullptr, grads);
        CHECK(loss == doctest::Approx(loop_mse(net, x, y)).epsilon(1e-12));
        const auto check = gradient_check(net, x, y, grads);
        CHECK(check.parameters == 4 * 3 + 3 + 3 + 1);
        CHECK(check.max_rel_error <= 1e-4);
    }
}

TEST_CASE("adam single steps") {
    std::vector<double> p{1.0}, g{1.0}, m{0.0}, v{0.0};
    adam_step(p, g, m, v, 1);
    CHECK(p[0] == 1.0 - 1e-3 * 1.0 / (1.0 + 1e-8));
    CHECK(m[0] == doctest::Approx(0.1));
    CHECK(v[0] == doctest::Approx(0.001));

    std::vector<double> q{0.25, -3.0}, zero{0.0, 0.0}, m2{0.0, 0.0}, v2{0.0, 0.0};
    adam_step(q, zero, m2, v2, 1);
    CHECK(q == std::vector<double>{0.25, -3.0});

    std::vector<double> a{2.0}, ma{0.3}, va{0.02};
    std::vector<double> b = a, mb = ma, vb = va;
    const std::vector<double> grad{-0.7};
    adam_step(a, grad, ma, va, 5);
    adam_step(b, grad, mb, vb, 5);
    CHECK(a == b);
    CHECK(ma == mb);
    CHECK(va == vb);

    CHECK_ERRC(adam_step(a, grad, ma, va, 0), Errc::domain);
    std::vector<double> two{1.0, 2.0};
    CHECK_ERRC(adam_step(two, grad, ma, va, 1), Errc::shape);
}

TEST_CASE("adam matches the reference loop on a quadratic") {
    const std::vector<double> c{1.5, -0.25, 3.0, 0.0};
    std::vector<double> theta(c.size(), 0.0), m(c.size(), 0.0), v(c.size(), 0.0), g(c.size());
    for (int t = 1; t <= 200; ++t) {
        for (std::size_t i = 0; i < c.size(); ++i) g[i] = 2.0 * (theta[i] - c[i]);
        adam_step(theta, g, m, v, t);
    }
    const auto ref = reference_adam_quadratic(c, 200);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(theta[i] - ref[i]) <= 1e-10);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.dropout_rate = 1.0;
    CHECK_ERRC(cfg.validate(), Errc::config);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_ERRC(cfg.validate(), Errc::config);
    cfg = {};
    cfg.epochs = -1;
    CHECK_ERRC(cfg.validate(), Errc::config);
}

TEST_CASE("zero epochs leaves the parameters unchanged") {
    const auto m = with_validation(linear_law_matrix(11, 7 * 30, uniform_law(0.5, 0.3, 0.2), 0.01), 5);
    const auto init = mlp_init(MlpVariant::v1, 3);
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto r = mlp_train(init, m, cfg);
    CHECK(r.model.net == init.net);
    CHECK(r.history.train_loss.empty());
    CHECK(r.history.best_epoch == -1);
}

TEST_CASE("training is deterministic") {
    const auto m = with_validation(linear_law_matrix(12, 7 * 40, uniform_law(0.5, 0.3, 0.2), 0.01), 5);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 16;
    cfg.seed = 99;
    const auto a = mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
    const auto b = mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
    CHECK(a.history.train_loss == b.history.train_loss);
    CHECK(a.history.validation_loss == b.history.validation_loss);
    CHECK(a.model == b.model);
    cfg.seed = 100;
    const auto c = mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
    CHECK(c.history.train_loss != a.history.train_loss);
}

TEST_CASE("checkpointing keeps the best validation epoch") {
    const auto m = with_validation(linear_law_matrix(13, 7 * 40, uniform_law(0.5, 0.3, 0.2), 0.5), 4);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 8;
    cfg.adam.step_size = 0.02;
    cfg.seed = 1;
    const auto r = mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
    const auto& val = r.history.validation_loss;
    REQUIRE(val.size() == 30);
    const auto best = static_cast<int>(std::min_element(val.begin(), val.end()) - val.begin());
    CHECK(r.history.best_epoch == best);
    const double rmse = validation_rmse(m, [&](const FeatureRow& row) { return mlp_predict(r.model, row); });
    CHECK(rmse * rmse == doctest::Approx(val[static_cast<std::size_t>(best)]).epsilon(1e-9));

    cfg.keep_best = false;
    const auto last = mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
    CHECK(last.history.best_epoch == 29);
    const double last_rmse = validation_rmse(m, [&](const FeatureRow& row) { return mlp_predict(last.model, row); });
    CHECK(last_rmse * last_rmse == doctest::Approx(val.back()).epsilon(1e-9));
}

TEST_CASE("divergence reports the epoch") {
    const auto m = with_validation(linear_law_matrix(14, 7 * 20, uniform_law(1e300, 1e300, 1e300), 0.0), 5);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 1;
    try {
        (void)mlp_train(mlp_init(MlpVariant::v1, 3), m, cfg);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::divergence);
        CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    }
}

TEST_CASE("mlp approaches the glm on linear data") {
    const auto m = with_validation(linear_law_matrix(15, 7 * 300, uniform_law(0.5, 0.3, 0.2), 0.01), 5);
    const auto glm = glm_fit(m);
    const double glm_rmse = validation_rmse(m, [&](const FeatureRow& row) { return glm_predict(glm, row); });

    TrainConfig cfg;  // default schedule: 1000 epochs, batch 100, dropout 0.2
    cfg.seed = 5;
    const auto r = mlp_train(mlp_init(MlpVariant::v1, 5), m, cfg);
    const double mlp_rmse = validation_rmse(m, [&](const FeatureRow& row) { return mlp_predict(r.model, row); });
    MESSAGE("glm validation rmse " << glm_rmse << ", mlp " << mlp_rmse);
    CHECK(mlp_rmse <= 1.5 * glm_rmse);
}
