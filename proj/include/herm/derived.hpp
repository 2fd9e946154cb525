#pragma once

#include "herm/acyccalc.hpp"

namespace herm {

// Morphism in the derived category presented by a two-leg roof
//   source <-s- middle -g-> target
// with s a quasi-isomorphism. Both legs are honest chain maps from a common
// middle (s.source == g.source).
struct Roof {
  ChainMap s;  // middle -> source of the represented morphism
  ChainMap g;  // middle -> target

  const HermComplex& middle() const { return s.source; }
  const HermComplex& source() const { return s.target; }
  const HermComplex& target() const { return g.target; }

  std::string check(const Tol& tol = default_tol()) const;

  // Chain map as a roof with identity left leg.
  static Roof lift(const ChainMap& f);
  static Roof identity(const HermComplex& c);
};

// Map induced on cohomology, degreewise in the canonical harmonic bases:
// H(g) ∘ H(s)^{-1}.
std::map<int, Mat> cohomology_map(const Roof& r, const Tol& tol = default_tol());

// Equality of derived morphisms at the base point: same endpoints (graded
// dimensions) and equal induced cohomology maps within tolerance.
bool morphisms_equal(const Roof& a, const Roof& b, const Tol& tol = default_tol());

// Homotopy fiber product middle: given f : A -> C and g : B -> C with g a
// quasi-isomorphism, the complex N = cone(A ⊥ B -> C)[-1] with projections
// to A and B; the projection to A is a quasi-isomorphism and the square over
// C commutes up to an explicit homotopy.
struct FiberProduct {
  HermComplex n;
  ChainMap to_a;
  ChainMap to_b;
};
FiberProduct fiber_product(const ChainMap& f, const ChainMap& g);

// Roof composition: (target roof) ∘ (source roof) through the homotopy fiber
// product of g1 and s2.
Roof compose_roofs(const Roof& first, const Roof& second);

// Formal inverse of an isomorphism roof (both legs quasi-isomorphisms).
Roof inverse(const Roof& r, const Tol& tol = default_tol());

Roof shift(const Roof& r, int k);
Roof negate(const Roof& r);

// Equivalent roof with the middle replaced by its graded cohomology. The
// harmonic embedding is a quasi-isomorphic chain map into the middle, so the
// result represents the same derived morphism (and carries the same class).
// Use after iterated compositions to keep fiber-product middles from growing.
Roof compress(const Roof& r, const Tol& tol = default_tol());

// Class of a derived isomorphism: tau(cone(g)) - tau(cone(s)). Well defined
// on the morphism (independent of the roof) and additive under composition.
double class_of_iso(const Roof& r, const Tol& tol = default_tol());

// Object of the derived category together with a hermitian structure: the
// structure is carried by a metric representative and a structural
// isomorphism roof onto the underlying complex. The underlying complex's own
// Gram plays no role; only its complex structure identifies the object.
struct HermStructure {
  HermComplex underlying;
  HermComplex metric_rep;
  Roof structural;  // metric_rep -> underlying, both legs quasi-isomorphisms

  std::string check(const Tol& tol = default_tol()) const;

  // The tautological structure a hermitian complex carries.
  static HermStructure native(const HermComplex& c);
};

HermStructure shift(const HermStructure& h, int k);

// Torsor action: append an acyclic two-term summand of class a (generator
// placed in degrees 0,1) to the metric representative.
HermStructure torsor_add(const HermStructure& h, double a);

// Signed coordinate difference of two structures on the same underlying
// complex (checked: equal graded data): the class of the identity morphism
// from h2 to h1. structure_distance(torsor_add(h,a), h) = a.
double structure_distance(const HermStructure& h1, const HermStructure& h2,
                          const Tol& tol = default_tol());

// Transport of a structure along a derived isomorphism of underlying objects
// (roof between the underlying complexes, both legs quasi-isomorphisms):
// re-targets the structural roof. Functorial under composition.
HermStructure parallel_transport(const Roof& f, const HermStructure& h,
                                 const Tol& tol = default_tol());

// Hermitian cone of a morphism of structures, the morphism given as a roof r
// between the metric representatives: metric representative
// cone(r.s)[1] ⊥ cone(r.g), underlying the graded cohomology, plus the two
// triangle chain maps out of/into the metric representative.
struct HermCone {
  HermStructure structure;
  ChainMap incl;  // metric_rep(target) -> cone rep
  ChainMap proj;  // cone rep -> metric_rep(source)[1]
};

HermCone herm_cone(const HermStructure& src, const HermStructure& tgt,
                   const Roof& r, const Tol& tol = default_tol());

// Triangle-position data used to compare two cones of the same morphism or a
// cone against a candidate third vertex: graded maps into the object from the
// morphism target's cohomology, and out of it into the shifted source's.
struct TrianglePosition {
  HermStructure object;
  std::map<int, Mat> in;   // H(target of f) -> H(object)
  std::map<int, Mat> out;  // H(object) -> H(source of f)[1]
};

TrianglePosition cone_position(const HermCone& hc, const Tol& tol = default_tol());

// Least-squares comparison between two triangle positions over the same
// morphism: a graded isomorphism A with A∘in1 = in2 and out2∘A = out1,
// realized as a roof between the metric representatives. Throws
// precondition_error when no exact comparison exists within tolerance.
Roof triangle_comparison(const TrianglePosition& from, const TrianglePosition& to,
                         const Tol& tol = default_tol());

// Distance between two hermitian-cone constructions of the same morphism,
// measured along a triangle-compatible comparison. Near zero by the
// well-definedness of the hermitian cone.
double cone_welldefinedness_distance(const HermCone& a, const HermCone& b,
                                     const Tol& tol = default_tol());

// Distinguished triangle candidate on three structures; the roofs connect the
// metric representatives, w landing in the shifted one.
struct HermTriangle {
  HermStructure f, g, h;
  Roof u;  // rep(f) -> rep(g)
  Roof v;  // rep(g) -> rep(h)
  Roof w;  // rep(h) -> rep(f)[1]

  std::string check(const Tol& tol = default_tol()) const;  // exactness of the long sequence
};

// Class of a distinguished triangle: the class of the comparison isomorphism
// from the hermitian cone of u onto the third vertex. Throws
// precondition_error if the candidate is not distinguished.
double class_of_triangle(const HermTriangle& t, const Tol& tol = default_tol());

// Rotation (g, h, f[1]; v, w, -u[1]); the class changes sign.
HermTriangle rotate(const HermTriangle& t, const Tol& tol = default_tol());

// Structure operations induced on tensor, Hom and dual.
HermStructure tensor_structures(const HermStructure& a, const HermStructure& b,
                                const Tol& tol = default_tol());
HermStructure hom_structures(const HermStructure& a, const HermStructure& b,
                             const Tol& tol = default_tol());
HermStructure dual_structure(const HermStructure& a, const Tol& tol = default_tol());

// Class of a bounded complex of objects presented by homological pieces
// F_m, ..., F_l (piece k sits in cohomological degree -k) with connecting
// chain maps d_k : rep(F_k) -> rep(F_{k-1}) composing to zero at chain level.
// Built as the iterated cone over the brutal filtration from the top index
// down. When every piece is concentrated in its own degree the metric
// representative is the totalization with orthogonal-sum metrics.
struct ObjectComplex {
  std::vector<HermStructure> pieces;  // index 0 = homological degree l (rightmost)
  int lowest = 0;                     // homological degree of pieces[0]
  std::vector<ChainMap> connecting;   // connecting[k] : rep(pieces[k+1]) -> rep(pieces[k])

  std::string check(const Tol& tol = default_tol()) const;
};

HermStructure class_of_object_complex(const ObjectComplex& oc,
                                      const Tol& tol = default_tol());

// Structure induced on a complex by metrics on its cohomology spaces. The
// metric representative is the graded cohomology carrying the chosen metrics,
// identified with the complex through its harmonic subspaces. The supplied
// metric space for degree i is read in the canonical harmonic orthonormal
// basis of H^i(C) taken w.r.t. C's own Gram; degrees without an entry keep
// the canonical basis orthonormal.
HermStructure cohomology_induced_structure(const HermComplex& c,
                                           const std::map<int, HermSpace>& metrics,
                                           const Tol& tol = default_tol());

}  // namespace herm
