#include "parley/svd.hpp"

#include <algorithm>

#include "parley/errors.hpp"
#include "parley/rng.hpp"

namespace parley {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

TruncatedSvd dense_svd(const SparseRowMatrix& X, int k) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(X),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.U = svd.matrixU().leftCols(k);
    out.S = svd.singularValues().head(k);
    out.V = svd.matrixV().leftCols(k);
    return out;
}

TruncatedSvd randomized_svd(const SparseRowMatrix& X, int k) {
    const long n = X.rows(), m = X.cols();
    const long l = std::min({n, m, static_cast<long>(k) + 10});
    Rng rng(0x5fd1);
    Eigen::MatrixXd omega(m, l);
    for (long c = 0; c < l; ++c)
        for (long r = 0; r < m; ++r) omega(r, c) = rng.normal();

    Eigen::MatrixXd q = thin_q(X * omega);
    for (int it = 0; it < 4; ++it) {
        const Eigen::MatrixXd z = thin_q(X.transpose() * q);
        q = thin_q(X * z);
    }
    const Eigen::MatrixXd b = (X.transpose() * q).transpose();  // l x m
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.U = q * svd.matrixU().leftCols(k);
    out.S = svd.singularValues().head(k);
    out.V = svd.matrixV().leftCols(k);
    return out;
}

}  // namespace

TruncatedSvd truncated_svd(const SparseRowMatrix& X, int k) {
    const long n = X.rows(), m = X.cols();
    if (k < 1) throw InvalidParams("svd rank must be positive");
    if (k > std::min(n, m))
        throw InvalidParams("svd rank exceeds min(rows, cols)");
    if (n * m <= 8'000'000) return dense_svd(X, k);
    return randomized_svd(X, k);
}

}  // namespace parley
