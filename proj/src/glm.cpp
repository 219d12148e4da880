#include "plugcast/glm.hpp"

#include <cmath>

#include "plugcast/error.hpp"
#include "plugcast/linalg.hpp"

namespace plugcast {

namespace {

const char* kDayNames[7] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

}  // namespace

GlmModel glm_fit(const FeatureMatrix& matrix, std::span<const std::size_t> rows, bool intercept) {
    const std::size_t k = matrix.spec.lags.size();
    const std::size_t cols = k + (intercept ? 1 : 0);
    std::array<std::vector<std::size_t>, 7> by_day;
    for (std::size_t r : rows) by_day[static_cast<std::size_t>(matrix.rows[r].dow)].push_back(r);

    GlmModel model;
    model.lags = matrix.spec.lags;
    model.intercept = intercept;
    for (int d = 0; d < 7; ++d) {
        const auto& idx = by_day[static_cast<std::size_t>(d)];
        if (idx.size() < cols)
            fail(Errc::fit, std::string("GLM fit for ") + kDayNames[d] + " has " + std::to_string(idx.size()) +
                                " training rows, needs at least " + std::to_string(cols));
        Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(cols));
        Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto& row = matrix.rows[idx[i]];
            const auto ii = static_cast<Eigen::Index>(i);
            for (std::size_t j = 0; j < k; ++j) x(ii, static_cast<Eigen::Index>(j)) = row.lag_values[j];
            if (intercept) x(ii, static_cast<Eigen::Index>(k)) = 1.0;
            y(ii) = row.target;
        }
        LeastSquaresFit fit;
        if (!least_squares(x, y, fit))
            fail(Errc::fit, std::string("GLM design for ") + kDayNames[d] + " is rank deficient");
        auto& coef = model.coefficients[static_cast<std::size_t>(d)];
        coef.assign(fit.coefficients.data(), fit.coefficients.data() + k);
        if (intercept) model.intercepts[static_cast<std::size_t>(d)] = fit.coefficients(static_cast<Eigen::Index>(k));
        for (double c : coef)
            if (!std::isfinite(c)) fail(Errc::fit, std::string("GLM coefficients for ") + kDayNames[d] + " are not finite");
    }
    return model;
}

GlmModel glm_fit(const FeatureMatrix& matrix, bool intercept) {
    if (matrix.split.size() != matrix.size()) fail(Errc::config, "GLM fit needs a split feature matrix");
    const auto train = matrix.indices(Split::train);
    return glm_fit(matrix, train, intercept);
}

double glm_predict(const GlmModel& model, const FeatureRow& row) {
    const auto& coef = model.coefficients[static_cast<std::size_t>(row.dow)];
    if (coef.size() != row.lag_values.size()) fail(Errc::shape, "GLM row has the wrong number of lags");
    double y = model.intercept ? model.intercepts[static_cast<std::size_t>(row.dow)] : 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) y += coef[j] * row.lag_values[j];
    return y;
}

}  // namespace plugcast
