#pragma once

#include "herm/core.hpp"

namespace herm {

// Finite dimensional complex vector space with a hermitian positive definite
// Gram matrix. The inner product of coordinate vectors is <u,v> = u^H G v.
class HermSpace {
 public:
  HermSpace() : gram_(Mat::Zero(0, 0)) {}
  explicit HermSpace(Mat gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols())
      throw invalid_input("HermSpace: Gram matrix must be square");
  }

  static HermSpace standard(int dim) { return HermSpace(Mat::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Mat& gram() const { return gram_; }

  // Hermitian within tolerance and Cholesky pivots above tol.pd.
  // Returns an empty string on success, else a diagnostic.
  std::string check(const Tol& tol = default_tol()) const;

  // Lower Cholesky factor L with G = L L^H. Throws invalid_input if the
  // Gram fails the positivity check. Coordinates y = L^H x are orthonormal.
  Mat cholesky(const Tol& tol = default_tol()) const;

  double norm(const Vec& x) const {
    return std::sqrt(std::abs((x.adjoint() * gram_ * x)(0, 0).real()));
  }

  bool same_dim(const HermSpace& o) const { return dim() == o.dim(); }

 private:
  Mat gram_;
};

// Orthogonal direct sum: block diagonal Gram.
HermSpace direct_sum(const HermSpace& a, const HermSpace& b);

// Tensor product: Kronecker Gram (PD again).
HermSpace tensor(const HermSpace& a, const HermSpace& b);

// Dual space with the operator-induced metric; in the dual basis the Gram
// is the transposed inverse of the original one.
HermSpace dual(const HermSpace& a);

}  // namespace herm
