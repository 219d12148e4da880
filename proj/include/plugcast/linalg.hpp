#pragma once

#include <Eigen/Dense>

namespace plugcast {

struct LeastSquaresFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    // (X'X)^-1, needed for standard errors.
    Eigen::MatrixXd xtx_inverse;
};

/// Ordinary least squares through a column-pivoted Householder QR.
/// Returns false if X does not have full column rank.
bool least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, LeastSquaresFit& out);

}  // namespace plugcast
