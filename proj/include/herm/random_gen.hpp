#pragma once

#include <cstdint>
#include <random>

#include "herm/ops.hpp"

namespace herm {

// Deterministic generator used by every randomized suite. mt19937_64 drives
// everything; uniform doubles are derived from the top 53 bits and normals
// via Box-Muller, so a seed fully determines the stream across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }           // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive ends
  double normal();
  cplx cnormal() { return cplx(normal(), normal()); }

  Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Mat random_matrix(Rng& rng, int rows, int cols);
Mat random_unitary(Rng& rng, int n);
// U diag(e^{s}) U^H with s uniform in [-spread, spread]; hermitian PD with
// controlled conditioning.
HermSpace random_space(Rng& rng, int dim, double spread = 1.0);

// Acyclic complex via the splitting construction: choose ranks r_i, set
// n_i = r_{i-1} + r_i, pick random unitary frames U_i and positive singular
// values, and let d map the coexact half of frame i onto the exact half of
// frame i+1. Acyclicity and d∘d = 0 hold by construction. Optionally random
// (non-standard) Grams on top.
struct AcyclicSpec {
  int lo = 0;
  int len = 3;          // number of degrees spanned
  int max_rank = 2;     // ranks r_i drawn from [1, max_rank]
  double sigma_spread = 1.5;  // log singular values uniform in [-spread, spread]
  bool random_gram = true;
  double gram_spread = 0.7;
};
HermComplex random_acyclic(Rng& rng, const AcyclicSpec& spec = {});

// Arbitrary bounded complex: random acyclic part plus harmonic padding.
struct ComplexSpec {
  int lo = 0;
  int len = 3;
  int max_rank = 2;
  int max_harmonic = 2;  // extra cohomology dimensions per degree, 0..max
  double sigma_spread = 1.5;
  bool random_gram = true;
  double gram_spread = 0.7;
};
HermComplex random_complex(Rng& rng, const ComplexSpec& spec = {});

// Uniformly random chain map E -> F: a Gaussian element of the kernel of
// f Δ-> d f - f d, computed once per endpoint pair via SVD.
ChainMap random_chain_map(Rng& rng, const HermComplex& e, const HermComplex& f,
                          double scale = 1.0);

// Random degreewise map of degree -1, for building homotopies.
Homotopy random_homotopy(Rng& rng, const HermComplex& e, const HermComplex& f,
                         double scale = 1.0);

// Random quasi-isomorphism E -> F for complexes with equal cohomology
// dimensions: harmonic-skeleton transport plus a null-homotopic perturbation.
ChainMap random_quasi_iso(Rng& rng, const HermComplex& e, const HermComplex& f,
                          double perturbation = 0.5);

// Homotopy-commutative square around a random homotopy h: the bottom map is
// adjusted so that g f' - f g' = dh + hd holds exactly at chain level.
HomotopySquare random_homotopy_square(Rng& rng, const AcyclicSpec& spec = {});

// Orthogonally split short exact sequence with prescribed sub and quotient
// and a random compatible coupling (the middle's differential is upper
// triangular against the splitting).
SplitSes random_split_ses(Rng& rng, const HermComplex& sub, const HermComplex& quot_shifted);

}  // namespace herm
