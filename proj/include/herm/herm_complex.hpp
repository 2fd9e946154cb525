#pragma once

#include <map>
#include <optional>
#include <vector>

#include "herm/herm_space.hpp"

namespace herm {

// Bounded cochain complex of hermitian vector spaces. Storage is sparse in
// the degree: degrees without an entry are zero dimensional. diffs[i] is the
// matrix of d^i : C^i -> C^{i+1}, sized dim(i+1) x dim(i).
class HermComplex {
 public:
  HermComplex() = default;
  HermComplex(std::map<int, HermSpace> spaces, std::map<int, Mat> diffs);

  static HermComplex zero() { return HermComplex(); }

  // Single space sitting in one degree, zero differentials.
  static HermComplex concentrated(const HermSpace& v, int degree);

  // The invertibility generator: 0 -> C -> C -> 0 with standard metrics,
  // the left copy in degree 0 and the map given by multiplication by e^a.
  static HermComplex generator(double a);

  bool is_zero() const { return spaces_.empty(); }
  int lo() const { return spaces_.empty() ? 0 : spaces_.begin()->first; }
  int hi() const { return spaces_.empty() ? -1 : spaces_.rbegin()->first; }

  int dim(int i) const {
    auto it = spaces_.find(i);
    return it == spaces_.end() ? 0 : it->second.dim();
  }
  int total_dim() const;

  const HermSpace& space(int i) const;
  // Always sized dim(i+1) x dim(i); zero when absent.
  Mat diff(int i) const;

  const std::map<int, HermSpace>& spaces() const { return spaces_; }
  const std::map<int, Mat>& stored_diffs() const { return diffs_; }

  // Degrees with nonzero dimension, ascending.
  std::vector<int> degrees() const;

  // Structural validation: Gram checks per degree, differential shapes,
  // d∘d = 0 in relative Frobenius norm. Empty string when fine.
  std::string check(const Tol& tol = default_tol()) const;

  // Same graded dimensions and, degreewise, equal Grams and differentials
  // within an absolute-relative mixed tolerance. Metric-level equality, much
  // stronger than isomorphism.
  bool isometric_equal(const HermComplex& o, double tol) const;

 private:
  std::map<int, HermSpace> spaces_;
  std::map<int, Mat> diffs_;
  void prune();
};

// Degreewise linear map f^i : source^i -> target^i. Not required to commute
// with d on construction; check() decides whether it is a chain map.
struct ChainMap {
  HermComplex source;
  HermComplex target;
  std::map<int, Mat> maps;  // absent degree = zero map

  Mat at(int i) const;
  std::string check(const Tol& tol = default_tol()) const;  // chain-map property

  static ChainMap identity(const HermComplex& c);
  static ChainMap zero(const HermComplex& src, const HermComplex& tgt);
};

// Degree -1 map h^i : source^i -> target^{i-1}.
struct Homotopy {
  HermComplex source;
  HermComplex target;
  std::map<int, Mat> maps;

  Mat at(int i) const;  // sized target.dim(i-1) x source.dim(i)
  // The chain map d∘h + h∘d it bounds.
  ChainMap boundary() const;
};

ChainMap compose(const ChainMap& g, const ChainMap& f);  // g after f
ChainMap add(const ChainMap& f, const ChainMap& g);
ChainMap scale(const cplx& c, const ChainMap& f);

// First-quadrant-free bounded double complex. Entry (p,q) carries a space,
// dh : (p,q)->(p+1,q) and dv : (p,q)->(p,q+1). Squares commute: dh dv = dv dh;
// the Koszul sign enters in total().
struct DoubleComplex {
  std::map<std::pair<int, int>, HermSpace> spaces;
  std::map<std::pair<int, int>, Mat> dh, dv;

  int dim(int p, int q) const;
  const HermSpace& space(int p, int q) const;
  Mat dh_at(int p, int q) const;
  Mat dv_at(int p, int q) const;

  std::string check(const Tol& tol = default_tol()) const;

  std::vector<int> p_range() const;  // sorted distinct p with content
  std::vector<int> q_range() const;

  HermComplex row(int q) const;     // (E^{*,q}, dh)
  HermComplex column(int p) const;  // (E^{p,*}, dv)

  DoubleComplex transpose() const;  // swap (p,q), swap dh/dv
};

}  // namespace herm
