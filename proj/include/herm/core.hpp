#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace herm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

// Central numeric knobs. Everything downstream reads these defaults; tests
// pin them explicitly so a future retune cannot silently move the goalposts.
struct Tol {
  double pd = 1e-10;         // smallest acceptable Cholesky pivot (positive definiteness)
  double chain = 1e-9;       // relative Frobenius tolerance for d∘d = 0 and chain-map squares
  double rank_rel = 1e-8;    // rank cut: sigma_j kept iff sigma_j > rank_rel * sigma_max
  double rank_band_lo = 0.1; // singular values inside [lo,hi]*cut get flagged as ambiguous
  double rank_band_hi = 10.0;
  double tau = 1e-8;         // meagerness / class comparisons
};

inline const Tol& default_tol() {
  static const Tol t{};
  return t;
}

// Violated precondition (non-acyclic input to tau, mismatched shapes, ...).
// The CLI maps this to exit code 3.
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally invalid data (non-hermitian Gram, d∘d != 0, bad JSON shape).
// The CLI maps this to exit code 2.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double rel_fro(const Mat& err, double scale) {
  double s = scale > 1.0 ? scale : 1.0;
  return err.norm() / s;
}

}  // namespace herm
