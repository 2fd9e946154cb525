#include "herm/ops.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>

namespace herm {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Offsets of the summands A^p ⊗ B^{n-p} inside Tot^n, p ascending.
struct TensorLayout {
  std::vector<int> ps;       // participating p
  std::vector<int> offsets;  // start of each block
  int dim = 0;
};

TensorLayout tensor_layout(const HermComplex& a, const HermComplex& b, int n) {
  TensorLayout tl;
  for (int p = a.lo(); p <= a.hi(); ++p) {
    int q = n - p;
    int d = a.dim(p) * b.dim(q);
    if (d == 0) continue;
    tl.ps.push_back(p);
    tl.offsets.push_back(tl.dim);
    tl.dim += d;
  }
  return tl;
}

}  // namespace

HermComplex shift(const HermComplex& c, int k) {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  double sign = (k % 2 == 0) ? 1.0 : -1.0;
  for (auto& [i, v] : c.spaces()) sp[i - k] = v;
  for (auto& [i, d] : c.stored_diffs()) df[i - k] = sign * d;
  return HermComplex(std::move(sp), std::move(df));
}

ChainMap shift(const ChainMap& f, int k) {
  ChainMap out{shift(f.source, k), shift(f.target, k), {}};
  for (auto& [i, m] : f.maps) out.maps[i - k] = m;
  return out;
}

HermComplex direct_sum(const HermComplex& a, const HermComplex& b) {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  for (int i = lo; i <= hi; ++i) {
    int n = a.dim(i) + b.dim(i);
    if (n == 0) continue;
    sp[i] = direct_sum(a.space(i), b.space(i));
  }
  for (int i = lo; i <= hi; ++i) {
    if (sp.count(i) == 0 || sp.count(i + 1) == 0) continue;
    Mat d = Mat::Zero(a.dim(i + 1) + b.dim(i + 1), a.dim(i) + b.dim(i));
    d.topLeftCorner(a.dim(i + 1), a.dim(i)) = a.diff(i);
    d.bottomRightCorner(b.dim(i + 1), b.dim(i)) = b.diff(i);
    df[i] = d;
  }
  return HermComplex(std::move(sp), std::move(df));
}

ChainMap direct_sum_map(const ChainMap& f, const ChainMap& g) {
  ChainMap out{direct_sum(f.source, g.source), direct_sum(f.target, g.target), {}};
  int lo = std::min(out.source.lo(), out.target.lo());
  int hi = std::max(out.source.hi(), out.target.hi());
  for (int i = lo; i <= hi; ++i) {
    if (out.source.dim(i) == 0 || out.target.dim(i) == 0) continue;
    Mat m = Mat::Zero(out.target.dim(i), out.source.dim(i));
    m.topLeftCorner(f.target.dim(i), f.source.dim(i)) = f.at(i);
    m.bottomRightCorner(g.target.dim(i), g.source.dim(i)) = g.at(i);
    out.maps[i] = m;
  }
  return out;
}

HermComplex cone(const ChainMap& f) {
  const HermComplex& e = f.source;
  const HermComplex& fc = f.target;
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  int lo = std::min(e.lo() - 1, fc.lo());
  int hi = std::max(e.hi() - 1, fc.hi());
  for (int i = lo; i <= hi; ++i) {
    int n = e.dim(i + 1) + fc.dim(i);
    if (n == 0) continue;
    sp[i] = direct_sum(e.space(i + 1), fc.space(i));
  }
  for (int i = lo; i <= hi; ++i) {
    if (sp.count(i) == 0 || sp.count(i + 1) == 0) continue;
    Mat d = Mat::Zero(e.dim(i + 2) + fc.dim(i + 1), e.dim(i + 1) + fc.dim(i));
    d.topLeftCorner(e.dim(i + 2), e.dim(i + 1)) = -e.diff(i + 1);
    d.bottomLeftCorner(fc.dim(i + 1), e.dim(i + 1)) = f.at(i + 1);
    d.bottomRightCorner(fc.dim(i + 1), fc.dim(i)) = fc.diff(i);
    df[i] = d;
  }
  return HermComplex(std::move(sp), std::move(df));
}

ChainMap cone_inclusion(const ChainMap& f) {
  HermComplex c = cone(f);
  ChainMap out{f.target, c, {}};
  for (int i : f.target.degrees()) {
    Mat m = Mat::Zero(c.dim(i), f.target.dim(i));
    m.bottomRows(f.target.dim(i)) = Mat::Identity(f.target.dim(i), f.target.dim(i));
    out.maps[i] = m;
  }
  return out;
}

ChainMap cone_projection(const ChainMap& f) {
  HermComplex c = cone(f);
  HermComplex e1 = shift(f.source, 1);
  ChainMap out{c, e1, {}};
  for (int i : c.degrees()) {
    int ne = f.source.dim(i + 1);
    if (ne == 0) continue;
    Mat m = Mat::Zero(ne, c.dim(i));
    m.leftCols(ne) = Mat::Identity(ne, ne);
    out.maps[i] = m;
  }
  return out;
}

Mat cone_block(const ChainMap& f, int degree, const Mat& e_part, const Mat& f_part) {
  int ne = f.source.dim(degree + 1), nf = f.target.dim(degree);
  Mat out(ne + nf, e_part.cols() > 0 ? e_part.cols() : f_part.cols());
  if (ne) out.topRows(ne) = e_part;
  if (nf) out.bottomRows(nf) = f_part;
  return out;
}

HermComplex tensor(const HermComplex& a, const HermComplex& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  int lo = a.lo() + b.lo(), hi = a.hi() + b.hi();
  std::map<int, TensorLayout> layouts;
  for (int n = lo; n <= hi; ++n) layouts[n] = tensor_layout(a, b, n);
  for (int n = lo; n <= hi; ++n) {
    const TensorLayout& tl = layouts[n];
    if (tl.dim == 0) continue;
    Mat g = Mat::Zero(tl.dim, tl.dim);
    for (size_t k = 0; k < tl.ps.size(); ++k) {
      int p = tl.ps[k], q = n - p;
      g.block(tl.offsets[k], tl.offsets[k], a.dim(p) * b.dim(q), a.dim(p) * b.dim(q)) =
          kron(a.space(p).gram(), b.space(q).gram());
    }
    sp[n] = HermSpace(std::move(g));
  }
  for (int n = lo; n < hi; ++n) {
    const TensorLayout& src = layouts[n];
    const TensorLayout& dst = layouts[n + 1];
    if (src.dim == 0 || dst.dim == 0) continue;
    Mat d = Mat::Zero(dst.dim, src.dim);
    for (size_t k = 0; k < src.ps.size(); ++k) {
      int p = src.ps[k], q = n - p;
      // dx ⊗ y into block p+1
      for (size_t l = 0; l < dst.ps.size(); ++l) {
        if (dst.ps[l] == p + 1 && a.dim(p + 1) > 0)
          d.block(dst.offsets[l], src.offsets[k], a.dim(p + 1) * b.dim(q), a.dim(p) * b.dim(q)) =
              kron(a.diff(p), Mat::Identity(b.dim(q), b.dim(q)));
        // (-1)^p x ⊗ dy into block p
        if (dst.ps[l] == p && b.dim(q + 1) > 0)
          d.block(dst.offsets[l], src.offsets[k], a.dim(p) * b.dim(q + 1), a.dim(p) * b.dim(q)) =
              ((p % 2 == 0) ? 1.0 : -1.0) *
              kron(Mat::Identity(a.dim(p), a.dim(p)), b.diff(q));
      }
    }
    df[n] = d;
  }
  return HermComplex(std::move(sp), std::move(df));
}

namespace {

struct HomLayout {
  std::vector<int> ps;  // Hom(A^p, B^{p+n}) blocks, p ascending, column-major vec
  std::vector<int> offsets;
  int dim = 0;
};

HomLayout hom_layout(const HermComplex& a, const HermComplex& b, int n) {
  HomLayout hl;
  for (int p = a.lo(); p <= a.hi(); ++p) {
    int d = a.dim(p) * b.dim(p + n);
    if (d == 0) continue;
    hl.ps.push_back(p);
    hl.offsets.push_back(hl.dim);
    hl.dim += d;
  }
  return hl;
}

}  // namespace

HermComplex hom_complex(const HermComplex& a, const HermComplex& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  int lo = b.lo() - a.hi(), hi = b.hi() - a.lo();
  std::map<int, HomLayout> layouts;
  for (int n = lo; n <= hi; ++n) layouts[n] = hom_layout(a, b, n);
  for (int n = lo; n <= hi; ++n) {
    const HomLayout& hl = layouts[n];
    if (hl.dim == 0) continue;
    Mat g = Mat::Zero(hl.dim, hl.dim);
    for (size_t k = 0; k < hl.ps.size(); ++k) {
      int p = hl.ps[k];
      int blk = a.dim(p) * b.dim(p + n);
      // vec is column-major, so the Gram is dual(A^p) ⊗ B^{p+n} in Kronecker order.
      g.block(hl.offsets[k], hl.offsets[k], blk, blk) =
          kron(dual(a.space(p)).gram(), b.space(p + n).gram());
    }
    sp[n] = HermSpace(std::move(g));
  }
  for (int n = lo; n < hi; ++n) {
    const HomLayout& src = layouts[n];
    const HomLayout& dst = layouts[n + 1];
    if (src.dim == 0 || dst.dim == 0) continue;
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    Mat d = Mat::Zero(dst.dim, src.dim);
    for (size_t k = 0; k < src.ps.size(); ++k) {
      int p = src.ps[k];
      for (size_t l = 0; l < dst.ps.size(); ++l) {
        // postcompose: vec(d_B ∘ φ) = (I ⊗ d_B) vec(φ), stays in block p
        if (dst.ps[l] == p && b.dim(p + n + 1) > 0)
          d.block(dst.offsets[l], src.offsets[k], a.dim(p) * b.dim(p + n + 1),
                  a.dim(p) * b.dim(p + n)) =
              kron(Mat::Identity(a.dim(p), a.dim(p)), b.diff(p + n));
        // precompose: vec(φ ∘ d_A) = (d_A^T ⊗ I) vec(φ), drops to block p-1
        if (dst.ps[l] == p - 1 && a.dim(p - 1) > 0)
          d.block(dst.offsets[l], src.offsets[k], a.dim(p - 1) * b.dim(p + n),
                  a.dim(p) * b.dim(p + n)) =
              -sgn * kron(a.diff(p - 1).transpose(),
                          Mat::Identity(b.dim(p + n), b.dim(p + n)));
      }
    }
    df[n] = d;
  }
  return HermComplex(std::move(sp), std::move(df));
}

HermComplex dual(const HermComplex& a) {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  for (auto& [i, v] : a.spaces()) sp[-i] = dual(v);
  for (int n = -a.hi(); n < -a.lo(); ++n) {
    // d(ξ) = -(-1)^n ξ ∘ d_A on (A^{-n})^*; coordinates transpose.
    if (a.dim(-n) == 0 || a.dim(-n - 1) == 0) continue;
    double sgn = (n % 2 == 0) ? -1.0 : 1.0;
    df[n] = sgn * a.diff(-n - 1).transpose();
  }
  return HermComplex(std::move(sp), std::move(df));
}

HermComplex total(const DoubleComplex& dc) {
  std::map<int, std::vector<std::pair<int, int>>> strips;  // n -> [(p,q)...] p ascending
  for (auto& [pq, v] : dc.spaces)
    if (v.dim() > 0) strips[pq.first + pq.second].push_back(pq);
  for (auto& [n, cells] : strips) std::sort(cells.begin(), cells.end());

  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  std::map<int, std::map<std::pair<int, int>, int>> offsets;
  for (auto& [n, cells] : strips) {
    int dim = 0;
    Mat g;
    for (auto& pq : cells) {
      offsets[n][pq] = dim;
      dim += dc.dim(pq.first, pq.second);
    }
    g = Mat::Zero(dim, dim);
    for (auto& pq : cells) {
      int d = dc.dim(pq.first, pq.second);
      g.block(offsets[n][pq], offsets[n][pq], d, d) = dc.space(pq.first, pq.second).gram();
    }
    sp[n] = HermSpace(std::move(g));
  }
  for (auto& [n, cells] : strips) {
    auto next = strips.find(n + 1);
    if (next == strips.end()) continue;
    int rows = 0, cols = 0;
    for (auto& pq : next->second) rows += dc.dim(pq.first, pq.second);
    for (auto& pq : cells) cols += dc.dim(pq.first, pq.second);
    Mat d = Mat::Zero(rows, cols);
    for (auto& pq : cells) {
      auto [p, q] = pq;
      if (dc.dim(p + 1, q) > 0)
        d.block(offsets[n + 1][{p + 1, q}], offsets[n][pq], dc.dim(p + 1, q), dc.dim(p, q)) =
            dc.dh_at(p, q);
      if (dc.dim(p, q + 1) > 0)
        d.block(offsets[n + 1][{p, q + 1}], offsets[n][pq], dc.dim(p, q + 1), dc.dim(p, q)) =
            ((p % 2 == 0) ? 1.0 : -1.0) * dc.dv_at(p, q);
    }
    df[n] = d;
  }
  return HermComplex(std::move(sp), std::move(df));
}

// --- Hodge -------------------------------------------------------------------

bool HodgeData::acyclic() const {
  for (auto& [i, hd] : deg)
    if (hd.H.cols() > 0) return false;
  return true;
}

int HodgeData::harmonic_dim(int i) const {
  auto it = deg.find(i);
  return it == deg.end() ? 0 : static_cast<int>(it->second.H.cols());
}

bool HodgeData::any_rank_ambiguity() const {
  for (auto& [i, hd] : deg)
    if (hd.rank_ambiguous) return true;
  return false;
}

Mat HodgeData::harmonic_basis_original(int i) const {
  auto it = deg.find(i);
  if (it == deg.end()) return Mat::Zero(0, 0);
  const HodgeDegree& hd = it->second;
  Mat linv_h = hd.L.adjoint().triangularView<Eigen::Upper>().solve(hd.H);
  return linv_h;
}

HodgeData hodge_decompose(const HermComplex& c, const Tol& tol) {
  std::string err = c.check(tol);
  if (!err.empty()) throw invalid_input("hodge_decompose: " + err);
  HodgeData out;
  if (c.is_zero()) return out;
  int lo = c.lo(), hi = c.hi();

  std::map<int, Mat> L;
  for (int i = lo; i <= hi; ++i)
    if (c.dim(i) > 0) L[i] = c.space(i).cholesky(tol);

  // Orthonormal-coordinate differentials and their SVDs.
  std::map<int, Eigen::JacobiSVD<Mat>> svds;
  for (int i = lo; i <= hi; ++i) {
    if (c.dim(i) == 0) continue;
    HodgeDegree hd;
    hd.n = c.dim(i);
    hd.L = L[i];
    if (c.dim(i + 1) > 0) {
      Mat linv = L[i].adjoint().triangularView<Eigen::Upper>().solve(
          Mat::Identity(hd.n, hd.n));
      hd.dtil = L[i + 1].adjoint() * c.diff(i) * linv;
    } else {
      hd.dtil = Mat::Zero(0, hd.n);
    }
    out.deg[i] = std::move(hd);
  }

  for (auto& [i, hd] : out.deg) {
    if (hd.dtil.rows() == 0) {
      hd.rank = 0;
      hd.K = Mat::Zero(hd.n, 0);
      continue;
    }
    Eigen::JacobiSVD<Mat> svd(hd.dtil, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double cut = tol.rank_rel * smax;
    int r = 0;
    for (int j = 0; j < svd.singularValues().size(); ++j) {
      double s = svd.singularValues()(j);
      if (s > cut) ++r;
      if (smax > 0 && s > tol.rank_band_lo * cut && s < tol.rank_band_hi * cut)
        hd.rank_ambiguous = true;
    }
    hd.rank = r;
    hd.K = svd.matrixV().leftCols(r);
    svds.emplace(i, std::move(svd));
  }

  for (auto& [i, hd] : out.deg) {
    auto prev = svds.find(i - 1);
    int rprev = (prev != svds.end() && out.deg.count(i - 1)) ? out.deg[i - 1].rank : 0;
    if (prev != svds.end() && rprev > 0)
      hd.B = prev->second.matrixU().leftCols(rprev);
    else
      hd.B = Mat::Zero(hd.n, 0);

    // Harmonic part: kernel of dtil orthogonal to the exact part.
    Mat kern;
    auto it = svds.find(i);
    if (it != svds.end())
      kern = it->second.matrixV().rightCols(hd.n - hd.rank);
    else
      kern = Mat::Identity(hd.n, hd.n);
    int hdim = hd.n - hd.rank - static_cast<int>(hd.B.cols());
    if (hdim < 0)
      throw invalid_input("hodge_decompose: inconsistent ranks (is d∘d = 0?)");
    if (hdim == 0) {
      hd.H = Mat::Zero(hd.n, 0);
    } else if (hd.B.cols() == 0) {
      hd.H = kern.leftCols(hdim);
    } else {
      Mat proj = kern - hd.B * (hd.B.adjoint() * kern);
      Eigen::JacobiSVD<Mat> psvd(proj, Eigen::ComputeFullU);
      hd.H = psvd.matrixU().leftCols(hdim);
    }
  }

  // Transitions K^i -> B^{i+1}.
  for (auto& [i, hd] : out.deg) {
    auto nxt = out.deg.find(i + 1);
    if (hd.rank == 0 || nxt == out.deg.end()) {
      hd.D = Mat::Zero(hd.rank, hd.rank);
      continue;
    }
    hd.D = nxt->second.B.adjoint() * hd.dtil * hd.K;
  }
  return out;
}

int CohomologyInfo::euler() const {
  int e = 0;
  for (auto& [i, d] : dims) e += (i % 2 == 0) ? d : -d;
  return e;
}

bool CohomologyInfo::all_zero() const {
  for (auto& [i, d] : dims)
    if (d != 0) return false;
  return true;
}

CohomologyInfo cohomology(const HermComplex& c, const Tol& tol) {
  HodgeData hd = hodge_decompose(c, tol);
  CohomologyInfo out;
  out.rank_ambiguous = hd.any_rank_ambiguity();
  for (auto& [i, d] : hd.deg) {
    int h = static_cast<int>(d.H.cols());
    if (h > 0) {
      out.dims[i] = h;
      out.harmonic_basis[i] = hd.harmonic_basis_original(i);
    }
  }
  return out;
}

std::map<int, Mat> cohomology_map(const ChainMap& f, const Tol& tol) {
  CohomologyInfo cs = cohomology(f.source, tol);
  CohomologyInfo ct = cohomology(f.target, tol);
  std::map<int, Mat> out;
  std::set<int> degs;
  for (auto& [i, d] : cs.dims) degs.insert(i);
  for (auto& [i, d] : ct.dims) degs.insert(i);
  for (int i : degs) {
    int hs = cs.dim(i), ht = ct.dim(i);
    Mat m = Mat::Zero(ht, hs);
    if (hs > 0 && ht > 0) {
      const Mat& S = cs.harmonic_basis.at(i);
      const Mat& T = ct.harmonic_basis.at(i);
      m = T.adjoint() * f.target.space(i).gram() * f.at(i) * S;
    }
    out[i] = m;
  }
  return out;
}

bool is_quasi_iso(const ChainMap& f, const Tol& tol) {
  auto maps = cohomology_map(f, tol);
  for (auto& [i, m] : maps) {
    if (m.rows() != m.cols()) return false;
    if (m.rows() == 0) continue;
    Eigen::JacobiSVD<Mat> svd(m);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smax <= 0 || smin <= tol.rank_rel * smax) return false;
  }
  return true;
}

HermComplex graded_cohomology(const HermComplex& c, const Tol& tol) {
  CohomologyInfo ci = cohomology(c, tol);
  std::map<int, HermSpace> sp;
  for (auto& [i, d] : ci.dims) sp[i] = HermSpace::standard(d);
  return HermComplex(std::move(sp), {});
}

ChainMap harmonic_projection(const HermComplex& c, const Tol& tol) {
  CohomologyInfo ci = cohomology(c, tol);
  ChainMap out{c, graded_cohomology(c, tol), {}};
  for (auto& [i, basis] : ci.harmonic_basis)
    out.maps[i] = basis.adjoint() * c.space(i).gram();
  return out;
}

ChainMap harmonic_embedding(const HermComplex& c, const Tol& tol) {
  CohomologyInfo ci = cohomology(c, tol);
  ChainMap out{graded_cohomology(c, tol), c, {}};
  for (auto& [i, basis] : ci.harmonic_basis) out.maps[i] = basis;
  return out;
}

// --- squares ------------------------------------------------------------------

std::string HomotopySquare::check(const Tol& tol) const {
  for (auto [m, name] : {std::pair{&f_top, "f_top"}, {&f_bottom, "f_bottom"},
                         {&g_left, "g_left"}, {&g_right, "g_right"}}) {
    std::string err = m->check(tol);
    if (!err.empty()) return std::string(name) + ": " + err;
  }
  // g f' - f g' = dh + hd
  ChainMap lhs = add(compose(g_right, f_top), scale(-1.0, compose(f_bottom, g_left)));
  ChainMap bd = h.boundary();
  int lo = std::min(f_top.source.lo(), f_bottom.target.lo());
  int hi = std::max(f_top.source.hi(), f_bottom.target.hi());
  for (int i = lo; i <= hi; ++i) {
    Mat diff = lhs.at(i) - bd.at(i);
    if (diff.size() == 0) continue;
    if (rel_fro(diff, std::max(1.0, lhs.at(i).norm())) > tol.chain)
      return "homotopy does not bound the defect at degree " + std::to_string(i);
  }
  return {};
}

ConeOfSquares cone_of_squares(const HomotopySquare& sq, const Tol& tol) {
  std::string err = sq.check(tol);
  if (!err.empty()) throw precondition_error("cone_of_squares: " + err);

  const HermComplex& ep = sq.f_top.source;   // E'
  const HermComplex& fp = sq.f_top.target;   // F'
  const HermComplex& e = sq.f_bottom.source;  // E
  const HermComplex& fb = sq.f_bottom.target; // F

  ConeOfSquares out;
  // psi : cone(f_top) -> cone(f_bottom), (x',y') -> (g'x', gy' + hx')
  HermComplex cf_top = cone(sq.f_top);
  HermComplex cf_bot = cone(sq.f_bottom);
  out.psi = ChainMap{cf_top, cf_bot, {}};
  for (int i : cf_top.degrees()) {
    if (cf_bot.dim(i) == 0) continue;
    Mat m = Mat::Zero(cf_bot.dim(i), cf_top.dim(i));
    int re = e.dim(i + 1), rf = fb.dim(i);
    int cep = ep.dim(i + 1), cfp = fp.dim(i);
    if (re && cep) m.topLeftCorner(re, cep) = sq.g_left.at(i + 1);
    if (rf && cep) m.bottomLeftCorner(rf, cep) = sq.h.at(i + 1);
    if (rf && cfp) m.bottomRightCorner(rf, cfp) = sq.g_right.at(i);
    out.psi.maps[i] = m;
  }

  // phi : cone(-g_left) -> cone(g_right), (x',x) -> (-f'x', fx + hx')
  ChainMap neg_gl = scale(-1.0, sq.g_left);
  HermComplex cg_left = cone(neg_gl);
  HermComplex cg_right = cone(sq.g_right);
  out.phi = ChainMap{cg_left, cg_right, {}};
  for (int i : cg_left.degrees()) {
    if (cg_right.dim(i) == 0) continue;
    Mat m = Mat::Zero(cg_right.dim(i), cg_left.dim(i));
    int rfp = fp.dim(i + 1), rf = fb.dim(i);
    int cep = ep.dim(i + 1), ce = e.dim(i);
    if (rfp && cep) m.topLeftCorner(rfp, cep) = -sq.f_top.at(i + 1);
    if (rf && cep) m.bottomLeftCorner(rf, cep) = sq.h.at(i + 1);
    if (rf && ce) m.bottomRightCorner(rf, ce) = sq.f_bottom.at(i);
    out.phi.maps[i] = m;
  }

  std::string perr = out.psi.check(tol);
  if (!perr.empty()) throw invalid_input("cone_of_squares: psi " + perr);
  perr = out.phi.check(tol);
  if (!perr.empty()) throw invalid_input("cone_of_squares: phi " + perr);

  out.cone_psi = cone(out.psi);
  out.cone_phi = cone(out.phi);

  // Reordering isometry cone(phi)^i = E'^{i+2} ⊕ E^{i+1} ⊕ F'^{i+1} ⊕ F^i
  //                  -> cone(psi)^i = E'^{i+2} ⊕ F'^{i+1} ⊕ E^{i+1} ⊕ F^i.
  double resid = 0.0;
  int lo = std::min(out.cone_phi.lo(), out.cone_psi.lo());
  int hi = std::max(out.cone_phi.hi(), out.cone_psi.hi());
  std::map<int, Mat> perm;
  for (int i = lo; i <= hi; ++i) {
    int a = ep.dim(i + 2), b = e.dim(i + 1), cdim = fp.dim(i + 1), d = fb.dim(i);
    int n = a + b + cdim + d;
    if (n == 0) continue;
    Mat p = Mat::Zero(n, n);
    if (a) p.block(0, 0, a, a).setIdentity();
    if (cdim) p.block(a, a + b, cdim, cdim).setIdentity();
    if (b) p.block(a + cdim, a, b, b).setIdentity();
    if (d) p.block(a + b + cdim, a + b + cdim, d, d).setIdentity();
    perm[i] = p;
  }
  for (int i = lo; i <= hi; ++i) {
    if (perm.count(i) == 0) continue;
    const Mat& p = perm[i];
    Mat gdiff = p * out.cone_phi.space(i).gram() * p.adjoint() - out.cone_psi.space(i).gram();
    resid = std::max(resid, rel_fro(gdiff, std::max(1.0, out.cone_psi.space(i).gram().norm())));
    if (perm.count(i + 1)) {
      Mat ddiff = perm[i + 1] * out.cone_phi.diff(i) - out.cone_psi.diff(i) * p;
      resid = std::max(resid, rel_fro(ddiff, std::max(1.0, out.cone_psi.diff(i).norm())));
    }
  }
  out.residual = resid;
  return out;
}

// --- split exact rows ----------------------------------------------------------

std::string SplitSes::check(const Tol& tol) const {
  std::string err = sub.check(tol);
  if (!err.empty()) return "sub: " + err;
  err = mid.check(tol);
  if (!err.empty()) return "mid: " + err;
  err = quot.check(tol);
  if (!err.empty()) return "quot: " + err;
  int lo = mid.lo(), hi = mid.hi();
  for (int i = lo; i <= hi; ++i) {
    int nm = mid.dim(i), ns = sub.dim(i), nq = quot.dim(i);
    if (nm != ns + nq) return "dimensions do not add up at degree " + std::to_string(i);
    if (nm == 0) continue;
    Mat j(nm, nm);
    Mat e = embed.count(i) ? embed.at(i) : Mat::Zero(nm, ns);
    Mat s = section.count(i) ? section.at(i) : Mat::Zero(nm, nq);
    if (e.rows() != nm || e.cols() != ns || s.rows() != nm || s.cols() != nq)
      return "embedding/section shape mismatch at degree " + std::to_string(i);
    j.leftCols(ns) = e;
    j.rightCols(nq) = s;
    Eigen::JacobiSVD<Mat> svd(j);
    if (svd.singularValues()(svd.singularValues().size() - 1) <
        tol.rank_rel * svd.singularValues()(0))
      return "embedding+section do not span at degree " + std::to_string(i);
    // orthogonal splitting: pulled-back Gram is block diagonal with the
    // sub/quot Grams on the diagonal
    Mat g = j.adjoint() * mid.space(i).gram() * j;
    Mat expect = Mat::Zero(nm, nm);
    if (ns) expect.topLeftCorner(ns, ns) = sub.space(i).gram();
    if (nq) expect.bottomRightCorner(nq, nq) = quot.space(i).gram();
    if (rel_fro(g - expect, std::max(1.0, expect.norm())) > tol.chain)
      return "splitting not orthogonal at degree " + std::to_string(i);
  }
  // embedding is a chain map
  ChainMap emb{sub, mid, embed};
  err = emb.check(tol);
  if (!err.empty()) return "embedding: " + err;
  return {};
}

SectionToMap section_to_map(const SplitSes& ses, const Tol& tol) {
  std::string err = ses.check(tol);
  if (!err.empty()) throw precondition_error("section_to_map: " + err);

  // Projection to quot coordinates: rows of [embed section]^{-1}.
  std::map<int, Mat> proj_q, proj_f;
  for (int i : ses.mid.degrees()) {
    int nm = ses.mid.dim(i), ns = ses.sub.dim(i), nq = ses.quot.dim(i);
    Mat j(nm, nm);
    j.leftCols(ns) = ses.embed.count(i) ? ses.embed.at(i) : Mat::Zero(nm, ns);
    j.rightCols(nq) = ses.section.count(i) ? ses.section.at(i) : Mat::Zero(nm, nq);
    Mat jinv = j.inverse();
    proj_f[i] = jinv.topRows(ns);
    proj_q[i] = jinv.bottomRows(nq);
  }

  HermComplex e = shift(ses.quot, -1);
  SectionToMap out;
  out.f_s = ChainMap{e, ses.sub, {}};
  auto sec = [&](int i) {
    return ses.section.count(i) ? ses.section.at(i)
                                : Mat::Zero(ses.mid.dim(i), ses.quot.dim(i));
  };
  for (int j = e.lo(); j <= e.hi(); ++j) {
    // x in E^j = quot^{j-1}: f_s(x) = d_mid(s x) - s(d_quot x), read in sub coords
    int nx = ses.quot.dim(j - 1);
    if (nx == 0 || ses.sub.dim(j) == 0) continue;
    Mat w = ses.mid.diff(j - 1) * sec(j - 1) - sec(j) * ses.quot.diff(j - 1);
    if (proj_f.count(j)) out.f_s.maps[j] = proj_f[j] * w;
  }

  // Isometry G -> cone(f_s): g -> (pi g, sub-coords of g - s pi g).
  HermComplex cn = cone(out.f_s);
  double resid = 0.0;
  std::map<int, Mat> phi;
  for (int i : ses.mid.degrees()) {
    int nm = ses.mid.dim(i);
    Mat m = Mat::Zero(cn.dim(i), nm);
    int nq = ses.quot.dim(i), ns = ses.sub.dim(i);
    Mat pq = proj_q.count(i) ? proj_q[i] : Mat::Zero(nq, nm);
    Mat pf = proj_f.count(i) ? proj_f[i] : Mat::Zero(ns, nm);
    if (nq) m.topRows(nq) = pq;
    if (ns) m.bottomRows(ns) = pf * (Mat::Identity(nm, nm) - sec(i) * pq);
    phi[i] = m;
    Mat gdiff = m.adjoint() * cn.space(i).gram() * m - ses.mid.space(i).gram();
    resid = std::max(resid, rel_fro(gdiff, std::max(1.0, ses.mid.space(i).gram().norm())));
  }
  for (int i : ses.mid.degrees()) {
    if (!phi.count(i) || !phi.count(i + 1)) continue;
    Mat ddiff = phi[i + 1] * ses.mid.diff(i) - cn.diff(i) * phi[i];
    resid = std::max(resid, rel_fro(ddiff, std::max(1.0, ses.mid.diff(i).norm())));
  }
  out.isometry_residual = resid;
  return out;
}

// --- split shapes ---------------------------------------------------------------

bool is_orthogonally_split(const HermComplex& c, const Tol& tol) {
  if (c.is_zero()) return true;
  HodgeData hd = hodge_decompose(c, tol);
  if (!hd.acyclic()) return false;
  for (auto& [i, d] : hd.deg) {
    if (d.rank == 0) continue;
    Eigen::JacobiSVD<Mat> svd(d.D);
    for (int j = 0; j < svd.singularValues().size(); ++j)
      if (std::abs(svd.singularValues()(j) - 1.0) > tol.tau) return false;
  }
  return true;
}

std::vector<ScalarPiece> scalar_decomposition(const HermComplex& c, const Tol& tol) {
  HodgeData hd = hodge_decompose(c, tol);
  if (!hd.acyclic())
    throw precondition_error("scalar_decomposition: complex is not acyclic");
  std::vector<ScalarPiece> out;
  for (auto& [i, d] : hd.deg) {
    if (d.rank == 0) continue;
    Eigen::JacobiSVD<Mat> svd(d.D);
    for (int j = 0; j < svd.singularValues().size(); ++j)
      out.push_back({i, std::log(svd.singularValues()(j))});
  }
  return out;
}

bool in_seed_class(const HermComplex& c, const Tol& tol) {
  if (c.is_zero()) return true;
  HodgeData hd = hodge_decompose(c, tol);
  if (!hd.acyclic()) return false;
  if (is_orthogonally_split(c, tol)) return true;

  // Shape F ⊥ F[1]: the scalar pieces must pair up across adjacent degrees
  // with equal log scales. Greedy nearest-value matching; misses are allowed
  // to come out false, fabricated pairings are not.
  std::map<int, std::vector<double>> pieces;
  for (const ScalarPiece& p : scalar_decomposition(c, tol))
    pieces[p.degree].push_back(p.log_sigma);
  std::map<int, std::vector<bool>> used;
  for (auto& [d, v] : pieces) used[d].assign(v.size(), false);
  for (auto& [d, v] : pieces) {
    for (size_t j = 0; j < v.size(); ++j) {
      if (used[d][j]) continue;
      auto up = pieces.find(d + 1);
      if (up == pieces.end()) return false;
      int best = -1;
      double bestgap = tol.tau * 10 + 1e-12;
      for (size_t k = 0; k < up->second.size(); ++k) {
        if (used[d + 1][k]) continue;
        double gap = std::abs(up->second[k] - v[j]);
        if (gap < bestgap) {
          bestgap = gap;
          best = static_cast<int>(k);
        }
      }
      if (best < 0) return false;
      used[d][j] = true;
      used[d + 1][best] = true;
    }
  }
  return true;
}

}  // namespace herm
