#include "herm/herm_space.hpp"

#include <Eigen/Cholesky>

namespace herm {

std::string HermSpace::check(const Tol& tol) const {
  if (dim() == 0) return {};
  double scale = gram_.norm();
  if (!gram_.allFinite()) return "Gram has non-finite entries";
  double herm_err = (gram_ - gram_.adjoint()).norm() / (scale > 1.0 ? scale : 1.0);
  if (herm_err > tol.chain)
    return "Gram not hermitian (relative error " + std::to_string(herm_err) + ")";
  Eigen::LLT<Mat> llt(0.5 * (gram_ + gram_.adjoint()));
  if (llt.info() != Eigen::Success) return "Gram not positive definite (Cholesky failed)";
  double min_pivot = llt.matrixL().toDenseMatrix().diagonal().real().minCoeff();
  if (min_pivot * min_pivot <= tol.pd)
    return "Gram pivot below positivity tolerance (" + std::to_string(min_pivot * min_pivot) + ")";
  return {};
}

Mat HermSpace::cholesky(const Tol& tol) const {
  std::string err = check(tol);
  if (!err.empty()) throw invalid_input("HermSpace: " + err);
  Eigen::LLT<Mat> llt(0.5 * (gram_ + gram_.adjoint()));
  return llt.matrixL();
}

HermSpace direct_sum(const HermSpace& a, const HermSpace& b) {
  Mat g = Mat::Zero(a.dim() + b.dim(), a.dim() + b.dim());
  g.topLeftCorner(a.dim(), a.dim()) = a.gram();
  g.bottomRightCorner(b.dim(), b.dim()) = b.gram();
  return HermSpace(std::move(g));
}

HermSpace tensor(const HermSpace& a, const HermSpace& b) {
  int n = a.dim(), m = b.dim();
  Mat g = Mat::Zero(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.block(i * m, j * m, m, m) = a.gram()(i, j) * b.gram();
  return HermSpace(std::move(g));
}

HermSpace dual(const HermSpace& a) {
  if (a.dim() == 0) return a;
  Mat inv = a.gram().inverse();
  return HermSpace(inv.transpose());
}

}  // namespace herm
