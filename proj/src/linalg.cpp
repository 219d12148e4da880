#include "plugcast/linalg.hpp"

namespace plugcast {

bool least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, LeastSquaresFit& out) {
    const Eigen::Index k = x.cols();
    if (x.rows() < k || k == 0) return false;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) return false;
    out.coefficients = qr.solve(y);
    out.residuals = y - x * out.coefficients;
    out.ssr = out.residuals.squaredNorm();
    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    out.xtx_inverse = perm * inner * perm.transpose();
    return true;
}

}  // namespace plugcast
