#pragma once

#include "herm/ops.hpp"

namespace herm {

// Determinant-norm invariant of an acyclic hermitian complex:
//   tau(C) = sum_i (-1)^i log|det D_i|
// with D_i the transition K^i -> B^{i+1} of the Hodge splitting in
// Gram-orthonormal bases. Calibration: tau(generator(a)) = a, and
// tau(C[1]) = -tau(C). Additive over orthogonal sums.
struct TauValue {
  double value = 0.0;
  std::map<int, double> per_degree;  // (-1)^i log|det D_i| contributions
  bool rank_ambiguous = false;
};

TauValue tau(const HermComplex& c, const Tol& tol = default_tol());
double tau_value(const HermComplex& c, const Tol& tol = default_tol());

// Meager = acyclic with vanishing class, i.e. |tau| within tolerance.
bool is_meager(const HermComplex& c, const Tol& tol = default_tol());

// A chain map is tight when its cone is meager. Quasi-isomorphisms only;
// anything else has a non-acyclic cone and is never tight.
bool is_tight(const ChainMap& f, const Tol& tol = default_tol());

// Reduction of an acyclic complex to invertibility generators, following the
// splitting-off procedure: in the lowest nonzero degree n pick the Gram-basis
// vector v of largest norm, record (n, log(|dv|/|v|)), split off the
// two-dimensional subcomplex spanned by v and dv orthogonally, recurse on the
// complement with the induced metric. The alternating sum of the recorded
// exponents recovers tau.
struct GeneratorDecomposition {
  struct Step {
    int degree;
    double a;  // log ratio of norms
  };
  std::vector<Step> steps;

  double alternating_sum() const;
};

GeneratorDecomposition reduce_to_generators(const HermComplex& c,
                                            const Tol& tol = default_tol());

// Tight relatedness of two complexes: connected by a two-leg roof whose legs
// are both tight. Decision at the base point: graded cohomology dimensions
// must agree; for acyclic pairs the classes must agree; otherwise a witness
// quasi-isomorphism is built through the harmonic skeletons, rescaled on one
// harmonic basis vector to absorb the class residue, and verified with
// is_tight on both legs before answering true.
struct TightRelation {
  bool related = false;
  double residual = 0.0;    // |tau| residue of the verified witness legs
  std::string reason;       // populated when not related
};

TightRelation tightly_related(const HermComplex& a, const HermComplex& b,
                              const Tol& tol = default_tol());

}  // namespace herm
