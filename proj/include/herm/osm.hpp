#pragma once

#include "herm/genera.hpp"

namespace herm {
namespace osm {

// Base-point model of a smooth space: just a tangent space with a metric.
struct ToySpace {
  std::string label;
  HermSpace tangent;
};

// Morphism of toy spaces with a hermitian structure on its two-term tangent
// complex [T_X --df--> T_Y], T_X in degree 0. df is arbitrary; injective df
// models an immersion, surjective df a submersion.
struct ToyMorphism {
  ToySpace source;
  ToySpace target;
  Mat df;                   // target.dim x source.dim
  HermStructure tangent;    // structure on the naive tangent complex

  std::string check(const Tol& tol = default_tol()) const;
};

// The naive tangent complex of df with the ambient metrics.
HermComplex tangent_complex(const ToySpace& x, const ToySpace& y, const Mat& df);

// Morphism with the tautological (ambient-metric) structure.
ToyMorphism ambient_morphism(const ToySpace& x, const ToySpace& y, const Mat& df);

// Composite morphism: underlying dg·df; the structure is the hermitian cone
// of the connecting morphism (pullback of g's tangent structure, shifted)
// into f's, transported onto the naive tangent complex of the composite
// through the triangle comparison.
ToyMorphism compose(const ToyMorphism& g, const ToyMorphism& f,
                    const Tol& tol = default_tol());

// Distance between the two bracketings of a triple composite. Near zero.
double associativity_defect(const ToyMorphism& h, const ToyMorphism& g,
                            const ToyMorphism& f, const Tol& tol = default_tol());

struct AssociativityReport {
  int cases = 0;
  double max_defect = 0.0;
  bool pass = false;
};
AssociativityReport verify_associativity(std::uint64_t seed, int cases,
                                         double tol_assoc,
                                         const Tol& tol = default_tol());

// Solves the composition rule for the first factor: given g-bar and a
// structure on the composite, the unique tangent structure for f is the
// shifted hermitian cone of (composite tangent -> pullback of g's),
// transported onto f's naive tangent complex. Round trip with compose is
// the defining property.
HermStructure solve_for_f(const ToyMorphism& g, const ToyMorphism& gf,
                          const Tol& tol = default_tol());

// Todd form of a morphism at the base point: the degree-zero part is 1; the
// report also carries the Euler characteristic of the tangent complex, which
// is what the genus pairs with in higher degree.
struct ToddForm {
  double degree_zero = 1.0;
  int tangent_euler = 0;
};
ToddForm todd_form(const ToyMorphism& f);

}  // namespace osm
}  // namespace herm
