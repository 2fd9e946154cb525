#pragma once

#include "herm/herm_complex.hpp"

namespace herm {

// --- elementary constructions ------------------------------------------------

// C[k]: shift k steps toward lower degrees, differential scaled by (-1)^k.
HermComplex shift(const HermComplex& c, int k);
ChainMap shift(const ChainMap& f, int k);

HermComplex direct_sum(const HermComplex& a, const HermComplex& b);
// f ⊕ g acting blockwise.
ChainMap direct_sum_map(const ChainMap& f, const ChainMap& g);

// Cone of a chain map f : E -> F. Degree i carries E^{i+1} ⊥ F^i with the
// orthogonal-sum metric and d(x,y) = (-dx, f(x)+dy).
HermComplex cone(const ChainMap& f);
// The companion triangle maps: F -> cone(f) and cone(f) -> E[1].
ChainMap cone_inclusion(const ChainMap& f);
ChainMap cone_projection(const ChainMap& f);
// Embeds a pair of degreewise maps into the cone coordinates. Convenience for
// building maps in and out of cones.
Mat cone_block(const ChainMap& f, int degree, const Mat& e_part, const Mat& f_part);

// Tensor product with the Koszul sign: d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy.
HermComplex tensor(const HermComplex& a, const HermComplex& b);

// Hom complex: Hom(A,B)^n = ⊕_p Hom(A^p, B^{p+n}), d(φ) = d∘φ - (-1)^n φ∘d.
// Metric: operator basis of matrix units, Gram induced from dual(A^p) ⊗ B^{p+n}.
HermComplex hom_complex(const HermComplex& a, const HermComplex& b);

// Dual: Hom(A, unit). Gram per degree is the transposed inverse; the double
// dual equals the original up to the per-degree sign (-1)^n on differentials.
HermComplex dual(const HermComplex& a);

// Totalization of a double complex: Tot^n = ⊥_{p+q=n} E^{p,q},
// d = dh + (-1)^p dv. Commuting squares are a precondition.
HermComplex total(const DoubleComplex& dc);

// --- Hodge splitting ---------------------------------------------------------

// Per-degree data of the orthogonal splitting C^i = B^i ⊥ H^i ⊥ K^i into
// exact, harmonic and coexact parts, computed in Gram-orthonormal coordinates
// (y = L^H x with G = L L^H). The differential restricts to an isomorphism
// D_i : K^i -> B^{i+1} whose matrix in the chosen orthonormal bases drives
// all determinant-norm computations downstream.
struct HodgeDegree {
  int n = 0;            // dim C^i
  Mat L;                // Cholesky factor of the Gram
  Mat dtil;             // differential in orthonormal coordinates, into degree i+1
  int rank = 0;         // numerical rank of dtil
  Mat K;                // n x rank      orthonormal basis of the coexact part
  Mat B;                // n x rank_{i-1} orthonormal basis of the exact part
  Mat H;                // n x h          orthonormal basis of the harmonic part
  Mat D;                // rank x rank    matrix of d : K^i -> B^{i+1}
  bool rank_ambiguous = false;  // a singular value fell inside the decision band
};

struct HodgeData {
  std::map<int, HodgeDegree> deg;

  bool acyclic() const;
  int harmonic_dim(int i) const;
  bool any_rank_ambiguity() const;
  // Orthonormal (w.r.t. the Gram) harmonic basis in original coordinates.
  Mat harmonic_basis_original(int i) const;
};

HodgeData hodge_decompose(const HermComplex& c, const Tol& tol = default_tol());

// Cohomology summary: dimensions plus the canonical harmonic bases.
struct CohomologyInfo {
  std::map<int, int> dims;
  std::map<int, Mat> harmonic_basis;  // original coordinates, orthonormal in the Gram
  bool rank_ambiguous = false;

  int dim(int i) const {
    auto it = dims.find(i);
    return it == dims.end() ? 0 : it->second;
  }
  int euler() const;
  bool all_zero() const;
};

CohomologyInfo cohomology(const HermComplex& c, const Tol& tol = default_tol());

// Maps induced on cohomology, in the canonical harmonic bases of source and
// target. Key degrees where either side has cohomology.
std::map<int, Mat> cohomology_map(const ChainMap& f, const Tol& tol = default_tol());

bool is_quasi_iso(const ChainMap& f, const Tol& tol = default_tol());

// Harmonic projection C -> Hgr(C) and harmonic embedding Hgr(C) -> C, where
// Hgr(C) is the zero-differential complex on the cohomology with standard
// Grams in the harmonic bases. Both are chain maps and quasi-isomorphisms.
HermComplex graded_cohomology(const HermComplex& c, const Tol& tol = default_tol());
ChainMap harmonic_projection(const HermComplex& c, const Tol& tol = default_tol());
ChainMap harmonic_embedding(const HermComplex& c, const Tol& tol = default_tol());

// --- squares and cones of cones ---------------------------------------------

// Homotopy-commutative square
//      E' --f'--> F'
//      |g'        |g          g f' - f g' = dh + hd
//      v          v
//      E  --f-->  F
struct HomotopySquare {
  ChainMap f_top;     // E' -> F'
  ChainMap f_bottom;  // E  -> F
  ChainMap g_left;    // E' -> E
  ChainMap g_right;   // F' -> F
  Homotopy h;         // E' -> F, degree -1

  std::string check(const Tol& tol = default_tol()) const;
};

// The two comparison maps between the four cones and the exact reordering
// isometry cone(phi) -> cone(psi) they induce:
//   psi : cone(f_top)     -> cone(f_bottom),  psi(x',y') = (g'x', gy' + hx')
//   phi : cone(-g_left)   -> cone(g_right),   phi(x',x)  = (-f'x', fx + hx')
// Reordering the interior factors of the iterated cones matches them exactly:
// degreewise (a,b,c,d) -> (a,c,b,d) carries d and Gram of cone(phi) to those
// of cone(psi) with no extra signs.
struct ConeOfSquares {
  ChainMap psi;
  ChainMap phi;
  HermComplex cone_psi;
  HermComplex cone_phi;
  double residual = 0.0;  // max deviation of the reordering isometry
};

ConeOfSquares cone_of_squares(const HomotopySquare& sq, const Tol& tol = default_tol());

// --- split exact rows and the section-to-map dictionary ----------------------

// Degreewise orthogonally split short exact sequence
//   0 -> F -> G -> E[1] -> 0
// presented by the embedding of the sub and a section of the quotient map.
struct SplitSes {
  HermComplex sub;    // F
  HermComplex mid;    // G
  HermComplex quot;   // E[1]  (the complex E is quot shifted back)
  std::map<int, Mat> embed;    // F^i -> G^i
  std::map<int, Mat> section;  // (E[1])^i -> G^i, right inverse of the projection

  std::string check(const Tol& tol = default_tol()) const;
};

// Turns a section into the chain map f_s = d∘s + s∘d : E -> F and verifies
// the induced Gram-preserving isomorphism G ≅ cone(f_s) when the section is
// the orthogonal one.
struct SectionToMap {
  ChainMap f_s;            // E -> F
  double isometry_residual;  // differential + Gram mismatch of G -> cone(f_s)
};

SectionToMap section_to_map(const SplitSes& ses, const Tol& tol = default_tol());

// --- split shape recognition --------------------------------------------------

// True when C is isometric to a direct sum of pieces 0 -> A --Id--> A -> 0.
// Decided via the Hodge splitting: acyclic and every transition K^i -> B^{i+1}
// is a Gram isometry (all singular values 1).
bool is_orthogonally_split(const HermComplex& c, const Tol& tol = default_tol());

// Seed class membership: orthogonally split, or isometric to F ⊥ F[1] with F
// acyclic. The second shape is searched through the canonical scalar
// decomposition; false negatives are acceptable, false positives are not.
bool in_seed_class(const HermComplex& c, const Tol& tol = default_tol());

// Canonical scalar pieces of an acyclic complex: the Hodge splitting plus an
// SVD of each transition decomposes C isometrically into two-term complexes
// 0 -> C -> C -> 0 with map sigma > 0 spanning degrees (i, i+1).
struct ScalarPiece {
  int degree;      // lower degree of the two-term piece
  double log_sigma;
};
std::vector<ScalarPiece> scalar_decomposition(const HermComplex& c,
                                              const Tol& tol = default_tol());

}  // namespace herm
