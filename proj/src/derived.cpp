#include "herm/derived.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace herm {

namespace {

// Complex-structure comparison that ignores the Grams: used wherever only the
// underlying object identity matters.
bool same_shape(const HermComplex& a, const HermComplex& b, const Tol& tol) {
  if (a.is_zero() && b.is_zero()) return true;
  if (a.lo() != b.lo() || a.hi() != b.hi()) return false;
  for (int i = a.lo(); i <= a.hi(); ++i) {
    if (a.dim(i) != b.dim(i)) return false;
    if (a.dim(i) == 0 || a.dim(i + 1) == 0) continue;
    if (rel_fro(a.diff(i) - b.diff(i), std::max(1.0, a.diff(i).norm())) > tol.chain)
      return false;
  }
  return true;
}

// Pseudo-inverse with the rank cut anchored at max(1, sigma_max). Inputs are
// induced cohomology maps, so singular values at roundoff level represent
// exact zeros and must be dropped, not inverted into huge spurious entries.
Mat pinv(const Mat& m, const Tol& tol) {
  if (m.rows() == 0 || m.cols() == 0) return Mat::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cut = tol.rank_rel * std::max(1.0, sv(0));
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int j = 0; j < sv.size(); ++j)
    if (sv(j) > cut) inv(j) = 1.0 / sv(j);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Rank of an induced cohomology map. The cut is anchored at max(1, sigma_max):
// these matrices come out of harmonic projections, so a map that is zero in
// exact arithmetic shows up as pure roundoff (~1e-15) and must not be promoted
// to full rank by a cut relative only to its own largest singular value.
int mat_rank(const Mat& m, const Tol& tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  double cut = tol.rank_rel * std::max(1.0, svd.singularValues()(0));
  int r = 0;
  for (int j = 0; j < svd.singularValues().size(); ++j)
    if (svd.singularValues()(j) > cut) ++r;
  return r;
}

}  // namespace

std::string Roof::check(const Tol& tol) const {
  std::string err = s.check(tol);
  if (!err.empty()) return "left leg: " + err;
  err = g.check(tol);
  if (!err.empty()) return "right leg: " + err;
  if (!s.source.isometric_equal(g.source, tol.chain))
    return "legs do not share the middle complex";
  if (!is_quasi_iso(s, tol)) return "left leg is not a quasi-isomorphism";
  return {};
}

Roof Roof::lift(const ChainMap& f) { return {ChainMap::identity(f.source), f}; }

Roof Roof::identity(const HermComplex& c) { return lift(ChainMap::identity(c)); }

std::map<int, Mat> cohomology_map(const Roof& r, const Tol& tol) {
  std::map<int, Mat> hs = cohomology_map(r.s, tol);
  std::map<int, Mat> hg = cohomology_map(r.g, tol);
  std::map<int, Mat> out;
  std::set<int> degs;
  for (auto& [i, m] : hs) degs.insert(i);
  for (auto& [i, m] : hg) degs.insert(i);
  for (int i : degs) {
    Mat ms = hs.count(i) ? hs[i] : Mat::Zero(0, 0);
    Mat mg = hg.count(i) ? hg[i] : Mat::Zero(0, 0);
    if (ms.rows() != ms.cols())
      throw precondition_error("cohomology_map: left leg not invertible at degree " +
                               std::to_string(i));
    if (ms.rows() == 0) {
      out[i] = Mat::Zero(mg.rows(), 0);
      continue;
    }
    Eigen::JacobiSVD<Mat> svd(ms);
    if (svd.singularValues()(ms.rows() - 1) <=
        tol.rank_rel * svd.singularValues()(0))
      throw precondition_error("cohomology_map: left leg singular at degree " +
                               std::to_string(i));
    out[i] = (mg.rows() ? Mat(mg * ms.inverse()) : Mat::Zero(0, ms.cols()));
  }
  return out;
}

bool morphisms_equal(const Roof& a, const Roof& b, const Tol& tol) {
  if (!a.source().isometric_equal(b.source(), tol.chain) ||
      !a.target().isometric_equal(b.target(), tol.chain))
    return false;
  std::map<int, Mat> ha = cohomology_map(a, tol);
  std::map<int, Mat> hb = cohomology_map(b, tol);
  std::set<int> degs;
  for (auto& [i, m] : ha) degs.insert(i);
  for (auto& [i, m] : hb) degs.insert(i);
  for (int i : degs) {
    Mat ma = ha.count(i) ? ha[i] : Mat();
    Mat mb = hb.count(i) ? hb[i] : Mat();
    if (ma.size() == 0 && mb.size() == 0) continue;
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) return false;
    if (rel_fro(ma - mb, std::max(1.0, mb.norm())) > 1e3 * tol.chain) return false;
  }
  return true;
}

FiberProduct fiber_product(const ChainMap& f, const ChainMap& g) {
  Tol tol = default_tol();
  if (!same_shape(f.target, g.target, tol))
    throw invalid_input("fiber_product: maps do not share a target");
  HermComplex ab = direct_sum(f.source, g.source);
  const HermComplex& c = f.target;
  ChainMap phi{ab, c, {}};
  int lo = ab.is_zero() ? 0 : ab.lo(), hi = ab.is_zero() ? -1 : ab.hi();
  for (int i = lo; i <= hi; ++i) {
    if (ab.dim(i) == 0 || c.dim(i) == 0) continue;
    Mat m(c.dim(i), ab.dim(i));
    m.leftCols(f.source.dim(i)) = f.at(i);
    m.rightCols(g.source.dim(i)) = -g.at(i);
    phi.maps[i] = m;
  }
  FiberProduct out;
  out.n = shift(cone(phi), -1);
  out.to_a = ChainMap{out.n, f.source, {}};
  out.to_b = ChainMap{out.n, g.source, {}};
  for (int i = lo; i <= hi; ++i) {
    int na = f.source.dim(i), nb = g.source.dim(i);
    int ncol = out.n.dim(i);
    if (ncol == 0) continue;
    if (na) {
      Mat m = Mat::Zero(na, ncol);
      m.leftCols(na).setIdentity();
      out.to_a.maps[i] = m;
    }
    if (nb) {
      Mat m = Mat::Zero(nb, ncol);
      m.block(0, na, nb, nb).setIdentity();
      out.to_b.maps[i] = m;
    }
  }
  return out;
}

Roof compose_roofs(const Roof& first, const Roof& second) {
  Tol tol = default_tol();
  if (!same_shape(first.target(), second.source(), tol))
    throw invalid_input("compose_roofs: middle endpoints do not match");
  FiberProduct fp = fiber_product(first.g, second.s);
  return Roof{compose(first.s, fp.to_a), compose(second.g, fp.to_b)};
}

Roof inverse(const Roof& r, const Tol& tol) {
  std::string err = r.check(tol);
  if (!err.empty()) throw invalid_input("inverse: " + err);
  if (!is_quasi_iso(r.g, tol))
    throw precondition_error("inverse: right leg is not a quasi-isomorphism");
  return Roof{r.g, r.s};
}

Roof shift(const Roof& r, int k) { return {shift(r.s, k), shift(r.g, k)}; }

Roof negate(const Roof& r) { return {r.s, scale(-1.0, r.g)}; }

Roof compress(const Roof& r, const Tol& tol) {
  ChainMap e = harmonic_embedding(r.middle(), tol);
  return Roof{compose(r.s, e), compose(r.g, e)};
}

double class_of_iso(const Roof& r, const Tol& tol) {
  std::string err = r.check(tol);
  if (!err.empty()) throw invalid_input("class_of_iso: " + err);
  if (!is_quasi_iso(r.g, tol))
    throw precondition_error("class_of_iso: roof is not an isomorphism");
  return tau(cone(r.g), tol).value - tau(cone(r.s), tol).value;
}

std::string HermStructure::check(const Tol& tol) const {
  std::string err = underlying.check(tol);
  if (!err.empty()) return "underlying: " + err;
  err = metric_rep.check(tol);
  if (!err.empty()) return "metric representative: " + err;
  err = structural.check(tol);
  if (!err.empty()) return "structural roof: " + err;
  if (!structural.source().isometric_equal(metric_rep, tol.chain))
    return "structural roof does not start at the metric representative";
  if (!same_shape(structural.target(), underlying, tol))
    return "structural roof does not land on the underlying complex";
  if (!is_quasi_iso(structural.g, tol))
    return "structural roof is not an isomorphism";
  return {};
}

HermStructure HermStructure::native(const HermComplex& c) {
  return {c, c, Roof::identity(c)};
}

HermStructure shift(const HermStructure& h, int k) {
  return {shift(h.underlying, k), shift(h.metric_rep, k), shift(h.structural, k)};
}

HermStructure torsor_add(const HermStructure& h, double a) {
  HermComplex rep2 = direct_sum(h.metric_rep, HermComplex::generator(a));
  ChainMap incl{h.metric_rep, rep2, {}};
  for (int i : rep2.degrees()) {
    int n = h.metric_rep.dim(i);
    if (n == 0) continue;
    Mat m = Mat::Zero(rep2.dim(i), n);
    m.topRows(n).setIdentity();
    incl.maps[i] = m;
  }
  return {h.underlying, rep2, Roof{compose(incl, h.structural.s), h.structural.g}};
}

double structure_distance(const HermStructure& h1, const HermStructure& h2,
                          const Tol& tol) {
  std::string err = h1.check(tol);
  if (!err.empty()) throw invalid_input("structure_distance: first: " + err);
  err = h2.check(tol);
  if (!err.empty()) throw invalid_input("structure_distance: second: " + err);
  if (!same_shape(h1.underlying, h2.underlying, tol))
    throw invalid_input("structure_distance: structures live on different objects");
  Roof id21 = compose_roofs(h2.structural, inverse(h1.structural, tol));
  return class_of_iso(id21, tol);
}

HermStructure parallel_transport(const Roof& f, const HermStructure& h,
                                 const Tol& tol) {
  std::string err = h.check(tol);
  if (!err.empty()) throw invalid_input("parallel_transport: " + err);
  err = f.check(tol);
  if (!err.empty()) throw invalid_input("parallel_transport: roof: " + err);
  if (!same_shape(f.source(), h.underlying, tol))
    throw invalid_input("parallel_transport: roof does not start at the structure");
  if (!is_quasi_iso(f.g, tol))
    throw precondition_error("parallel_transport: roof is not an isomorphism");
  return {f.target(), h.metric_rep, compose_roofs(h.structural, f)};
}

HermCone herm_cone(const HermStructure& src, const HermStructure& tgt,
                   const Roof& r, const Tol& tol) {
  std::string err = src.check(tol);
  if (!err.empty()) throw invalid_input("herm_cone: source: " + err);
  err = tgt.check(tol);
  if (!err.empty()) throw invalid_input("herm_cone: target: " + err);
  err = r.check(tol);
  if (!err.empty()) throw invalid_input("herm_cone: morphism: " + err);
  if (!r.source().isometric_equal(src.metric_rep, tol.chain) ||
      !r.target().isometric_equal(tgt.metric_rep, tol.chain))
    throw invalid_input("herm_cone: roof endpoints are not the metric representatives");

  HermComplex a1 = shift(cone(r.s), 1);
  HermComplex b = cone(r.g);
  HermComplex rep = direct_sum(a1, b);

  // inclusion of the target through the cone of the right leg
  ChainMap cinc = cone_inclusion(r.g);
  ChainMap incl{tgt.metric_rep, rep, {}};
  for (int i : tgt.metric_rep.degrees()) {
    if (rep.dim(i) == 0 || tgt.metric_rep.dim(i) == 0) continue;
    Mat m = Mat::Zero(rep.dim(i), tgt.metric_rep.dim(i));
    m.bottomRows(b.dim(i)) = cinc.at(i);
    incl.maps[i] = m;
  }

  // projection via the middle: cone(g) -> M[1] -> rep(src)[1]
  ChainMap through = compose(shift(r.s, 1), cone_projection(r.g));
  HermComplex src1 = shift(src.metric_rep, 1);
  ChainMap proj{rep, src1, {}};
  for (int i : rep.degrees()) {
    if (src1.dim(i) == 0) continue;
    Mat m = Mat::Zero(src1.dim(i), rep.dim(i));
    if (b.dim(i) > 0) m.rightCols(b.dim(i)) = through.at(i);
    proj.maps[i] = m;
  }

  HermCone out;
  out.structure = HermStructure{
      graded_cohomology(rep, tol), rep,
      Roof{ChainMap::identity(rep), harmonic_projection(rep, tol)}};
  out.incl = std::move(incl);
  out.proj = std::move(proj);
  return out;
}

TrianglePosition cone_position(const HermCone& hc, const Tol& tol) {
  return {hc.structure, cohomology_map(hc.incl, tol), cohomology_map(hc.proj, tol)};
}

Roof triangle_comparison(const TrianglePosition& from, const TrianglePosition& to,
                         const Tol& tol) {
  CohomologyInfo c1 = cohomology(from.object.metric_rep, tol);
  CohomologyInfo c2 = cohomology(to.object.metric_rep, tol);
  std::set<int> degs;
  for (auto& [i, d] : c1.dims) degs.insert(i);
  for (auto& [i, d] : c2.dims) degs.insert(i);

  auto fetch = [](const std::map<int, Mat>& m, int i, int rows, int cols) {
    auto it = m.find(i);
    if (it == m.end()) return Mat(Mat::Zero(rows, cols));
    return it->second;
  };

  const double thresh = 1e3 * tol.chain;
  std::map<int, Mat> askel;
  for (int i : degs) {
    int h1 = c1.dim(i), h2 = c2.dim(i);
    if (h1 != h2)
      throw precondition_error("triangle_comparison: graded dimensions differ at degree " +
                               std::to_string(i));
    if (h1 == 0) continue;
    int tin = 0, tout = 0;
    if (from.in.count(i)) tin = static_cast<int>(from.in.at(i).cols());
    if (to.in.count(i)) tin = std::max(tin, static_cast<int>(to.in.at(i).cols()));
    if (from.out.count(i)) tout = static_cast<int>(from.out.at(i).rows());
    if (to.out.count(i)) tout = std::max(tout, static_cast<int>(to.out.at(i).rows()));
    Mat i1 = fetch(from.in, i, h1, tin), i2 = fetch(to.in, i, h2, tin);
    Mat q1 = fetch(from.out, i, tout, h1), q2 = fetch(to.out, i, tout, h2);

    Mat i1p = pinv(i1, tol);
    Mat pim = i1 * i1p;  // orthogonal projector onto im(in_1)
    Mat a = i2 * i1p + pinv(q2, tol) * q1 * (Mat::Identity(h1, h1) - pim);

    double r1 = tin ? rel_fro(a * i1 - i2, std::max(1.0, i2.norm())) : 0.0;
    double r2 = tout ? rel_fro(q2 * a - q1, std::max(1.0, q1.norm())) : 0.0;
    if (r1 > thresh || r2 > thresh)
      throw precondition_error(
          "triangle_comparison: no compatible comparison at degree " +
          std::to_string(i) + " (residuals " + std::to_string(r1) + ", " +
          std::to_string(r2) + ")");
    Eigen::JacobiSVD<Mat> svd(a);
    if (svd.singularValues()(h1 - 1) <=
        tol.rank_rel * std::max(1.0, svd.singularValues()(0)))
      throw precondition_error("triangle_comparison: comparison not invertible at degree " +
                               std::to_string(i));
    askel[i] = a;
  }

  ChainMap skel{graded_cohomology(from.object.metric_rep, tol),
                graded_cohomology(to.object.metric_rep, tol), {}};
  for (auto& [i, m] : askel) skel.maps[i] = m;
  ChainMap g = compose(harmonic_embedding(to.object.metric_rep, tol),
                       compose(skel, harmonic_projection(from.object.metric_rep, tol)));
  return Roof{ChainMap::identity(from.object.metric_rep), g};
}

double cone_welldefinedness_distance(const HermCone& a, const HermCone& b,
                                     const Tol& tol) {
  Roof cmp = triangle_comparison(cone_position(a, tol), cone_position(b, tol), tol);
  return class_of_iso(cmp, tol);
}

std::string HermTriangle::check(const Tol& tol) const {
  for (auto [st, name] : {std::pair{&f, "f"}, {&g, "g"}, {&h, "h"}}) {
    std::string err = st->check(tol);
    if (!err.empty()) return std::string(name) + ": " + err;
  }
  for (auto [rf, name] : {std::pair{&u, "u"}, {&v, "v"}, {&w, "w"}}) {
    std::string err = rf->check(tol);
    if (!err.empty()) return std::string(name) + ": " + err;
  }
  if (!u.source().isometric_equal(f.metric_rep, tol.chain) ||
      !u.target().isometric_equal(g.metric_rep, tol.chain))
    return "u does not connect rep(f) to rep(g)";
  if (!v.source().isometric_equal(g.metric_rep, tol.chain) ||
      !v.target().isometric_equal(h.metric_rep, tol.chain))
    return "v does not connect rep(g) to rep(h)";
  HermComplex f1 = shift(f.metric_rep, 1);
  if (!w.source().isometric_equal(h.metric_rep, tol.chain) ||
      !w.target().isometric_equal(f1, tol.chain))
    return "w does not connect rep(h) to rep(f)[1]";

  // long sequence ... -> H^i(F) -> H^i(G) -> H^i(H) -> H^{i+1}(F) -> ...
  std::map<int, Mat> mu = cohomology_map(u, tol);
  std::map<int, Mat> mv = cohomology_map(v, tol);
  std::map<int, Mat> mw = cohomology_map(w, tol);
  CohomologyInfo cf = cohomology(f.metric_rep, tol);
  CohomologyInfo cf1 = cohomology(f1, tol);
  CohomologyInfo cg = cohomology(g.metric_rep, tol);
  CohomologyInfo ch = cohomology(h.metric_rep, tol);

  // unitary change from the harmonic basis of rep(f)[1] in degree i to the
  // harmonic basis of rep(f) in degree i+1 (same subspace, same coordinates)
  auto convert = [&](int i) {
    int n = cf1.dim(i);
    if (n == 0 || cf.dim(i + 1) == 0) return Mat(Mat::Zero(cf.dim(i + 1), n));
    return Mat(cf.harmonic_basis.at(i + 1).adjoint() *
               f.metric_rep.space(i + 1).gram() * cf1.harmonic_basis.at(i));
  };

  std::set<int> degs;
  for (auto& [i, d] : cf.dims) degs.insert(i), degs.insert(i - 1);
  for (auto& [i, d] : cg.dims) degs.insert(i);
  for (auto& [i, d] : ch.dims) degs.insert(i);

  auto at = [](const std::map<int, Mat>& m, int i, int rows, int cols) {
    auto it = m.find(i);
    if (it == m.end() || it->second.size() == 0) return Mat(Mat::Zero(rows, cols));
    return it->second;
  };
  const double thresh = 1e3 * tol.chain;
  for (int i : degs) {
    Mat ui = at(mu, i, cg.dim(i), cf.dim(i));
    Mat vi = at(mv, i, ch.dim(i), cg.dim(i));
    Mat wi = at(mw, i, cf1.dim(i), ch.dim(i));
    Mat ui1 = at(mu, i + 1, cg.dim(i + 1), cf.dim(i + 1));
    Mat xw = convert(i) * wi;  // H^i(H) -> H^{i+1}(F)
    if (vi.rows() && ui.cols() && (vi * ui).norm() > thresh * std::max(1.0, ui.norm()))
      return "sequence not a complex at degree " + std::to_string(i) + " (v∘u)";
    if (wi.rows() && vi.cols() && (wi * vi).norm() > thresh * std::max(1.0, vi.norm()))
      return "sequence not a complex at degree " + std::to_string(i) + " (w∘v)";
    if (ui1.rows() && xw.cols() &&
        (ui1 * xw).norm() > thresh * std::max(1.0, wi.norm()))
      return "sequence not a complex at degree " + std::to_string(i) + " (u[1]∘w)";
    if (mat_rank(ui, tol) + mat_rank(vi, tol) != cg.dim(i))
      return "sequence not exact at H^" + std::to_string(i) + " of the middle";
    if (mat_rank(vi, tol) + mat_rank(wi, tol) != ch.dim(i))
      return "sequence not exact at H^" + std::to_string(i) + " of the third vertex";
    if (mat_rank(wi, tol) + mat_rank(ui1, tol) != cf.dim(i + 1))
      return "sequence not exact at H^" + std::to_string(i + 1) + " of the source";
  }
  return {};
}

double class_of_triangle(const HermTriangle& t, const Tol& tol) {
  std::string err = t.check(tol);
  if (!err.empty()) throw precondition_error("class_of_triangle: " + err);
  HermCone hc = herm_cone(t.f, t.g, t.u, tol);
  TrianglePosition pos1 = cone_position(hc, tol);
  TrianglePosition pos2{t.h, cohomology_map(t.v, tol), cohomology_map(t.w, tol)};
  Roof cmp = triangle_comparison(pos1, pos2, tol);
  return class_of_iso(cmp, tol);
}

HermTriangle rotate(const HermTriangle& t, const Tol& tol) {
  std::string err = t.check(tol);
  if (!err.empty()) throw precondition_error("rotate: " + err);
  return HermTriangle{t.g, t.h, shift(t.f, 1), t.v, t.w, negate(shift(t.u, 1))};
}

// --- tensor / hom / dual structures -------------------------------------------

namespace {

struct BlockLayout {
  std::vector<int> ps;
  std::vector<int> offsets;
  int dim = 0;
};

// must match the summand ordering used by tensor()
BlockLayout tensor_layout_of(const HermComplex& a, const HermComplex& b, int n) {
  BlockLayout tl;
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

// must match the summand ordering used by hom_complex()
BlockLayout hom_layout_of(const HermComplex& a, const HermComplex& b, int n) {
  BlockLayout hl;
  for (int p = a.lo(); p <= a.hi(); ++p) {
    int d = a.dim(p) * b.dim(p + n);
    if (d == 0) continue;
    hl.ps.push_back(p);
    hl.offsets.push_back(hl.dim);
    hl.dim += d;
  }
  return hl;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ChainMap tensor_map(const ChainMap& f, const ChainMap& g) {
  HermComplex src = tensor(f.source, g.source);
  HermComplex dst = tensor(f.target, g.target);
  ChainMap out{src, dst, {}};
  if (src.is_zero() || dst.is_zero()) return out;
  for (int n = src.lo(); n <= src.hi(); ++n) {
    if (dst.dim(n) == 0 || src.dim(n) == 0) continue;
    BlockLayout sl = tensor_layout_of(f.source, g.source, n);
    BlockLayout dl = tensor_layout_of(f.target, g.target, n);
    Mat m = Mat::Zero(dl.dim, sl.dim);
    for (size_t k = 0; k < sl.ps.size(); ++k) {
      int p = sl.ps[k], q = n - p;
      for (size_t l = 0; l < dl.ps.size(); ++l) {
        if (dl.ps[l] != p) continue;
        if (f.target.dim(p) == 0 || g.target.dim(q) == 0) continue;
        m.block(dl.offsets[l], sl.offsets[k], f.target.dim(p) * g.target.dim(q),
                f.source.dim(p) * g.source.dim(q)) = kron(f.at(p), g.at(q));
      }
    }
    out.maps[n] = m;
  }
  return out;
}

// postcompose: Hom(X, B) -> Hom(X, B') along a chain map B -> B'
ChainMap hom_post(const HermComplex& x, const ChainMap& f) {
  HermComplex src = hom_complex(x, f.source);
  HermComplex dst = hom_complex(x, f.target);
  ChainMap out{src, dst, {}};
  if (src.is_zero() || dst.is_zero()) return out;
  for (int n = src.lo(); n <= src.hi(); ++n) {
    if (src.dim(n) == 0 || dst.dim(n) == 0) continue;
    BlockLayout sl = hom_layout_of(x, f.source, n);
    BlockLayout dl = hom_layout_of(x, f.target, n);
    Mat m = Mat::Zero(dl.dim, sl.dim);
    for (size_t k = 0; k < sl.ps.size(); ++k) {
      int p = sl.ps[k];
      for (size_t l = 0; l < dl.ps.size(); ++l) {
        if (dl.ps[l] != p) continue;
        if (f.target.dim(p + n) == 0) continue;
        m.block(dl.offsets[l], sl.offsets[k], x.dim(p) * f.target.dim(p + n),
                x.dim(p) * f.source.dim(p + n)) =
            kron(Mat::Identity(x.dim(p), x.dim(p)), f.at(p + n));
      }
    }
    out.maps[n] = m;
  }
  return out;
}

// precompose: Hom(X, B) -> Hom(X', B) along a chain map X' -> X
ChainMap hom_pre(const ChainMap& f, const HermComplex& b) {
  HermComplex src = hom_complex(f.target, b);
  HermComplex dst = hom_complex(f.source, b);
  ChainMap out{src, dst, {}};
  if (src.is_zero() || dst.is_zero()) return out;
  for (int n = src.lo(); n <= src.hi(); ++n) {
    if (src.dim(n) == 0 || dst.dim(n) == 0) continue;
    BlockLayout sl = hom_layout_of(f.target, b, n);
    BlockLayout dl = hom_layout_of(f.source, b, n);
    Mat m = Mat::Zero(dl.dim, sl.dim);
    for (size_t k = 0; k < sl.ps.size(); ++k) {
      int p = sl.ps[k];
      for (size_t l = 0; l < dl.ps.size(); ++l) {
        if (dl.ps[l] != p) continue;
        if (f.source.dim(p) == 0 || b.dim(p + n) == 0) continue;
        m.block(dl.offsets[l], sl.offsets[k], f.source.dim(p) * b.dim(p + n),
                f.target.dim(p) * b.dim(p + n)) =
            kron(f.at(p).transpose(), Mat::Identity(b.dim(p + n), b.dim(p + n)));
      }
    }
    out.maps[n] = m;
  }
  return out;
}

// contravariant dual of a chain map: dual(Y) -> dual(X) for f : X -> Y
ChainMap dual_map(const ChainMap& f) {
  HermComplex src = dual(f.target);
  HermComplex dst = dual(f.source);
  ChainMap out{src, dst, {}};
  for (int n = src.is_zero() ? 1 : src.lo(); n <= (src.is_zero() ? 0 : src.hi());
       ++n) {
    if (f.source.dim(-n) == 0 || f.target.dim(-n) == 0) continue;
    out.maps[n] = f.at(-n).transpose();
  }
  return out;
}

}  // namespace

HermStructure tensor_structures(const HermStructure& a, const HermStructure& b,
                                const Tol& tol) {
  std::string err = a.check(tol);
  if (!err.empty()) throw invalid_input("tensor_structures: first: " + err);
  err = b.check(tol);
  if (!err.empty()) throw invalid_input("tensor_structures: second: " + err);
  return {tensor(a.underlying, b.underlying), tensor(a.metric_rep, b.metric_rep),
          Roof{tensor_map(a.structural.s, b.structural.s),
               tensor_map(a.structural.g, b.structural.g)}};
}

HermStructure hom_structures(const HermStructure& a, const HermStructure& b,
                             const Tol& tol) {
  std::string err = a.check(tol);
  if (!err.empty()) throw invalid_input("hom_structures: first: " + err);
  err = b.check(tol);
  if (!err.empty()) throw invalid_input("hom_structures: second: " + err);
  const HermComplex& ma = a.structural.middle();

  // zigzag Hom(rep_a, rep_b) -> Hom(M_a, rep_b) <- Hom(M_a, M_b)
  //        -> Hom(M_a, und_b) <- Hom(und_a, und_b), roofified by two homotopy
  // fiber products
  ChainMap pre_s = hom_pre(a.structural.s, b.metric_rep);   // Hom(rep_a,rep_b) -> Hom(Ma,rep_b)
  ChainMap post_s = hom_post(ma, b.structural.s);           // Hom(Ma,Mb) -> Hom(Ma,rep_b)
  ChainMap post_g = hom_post(ma, b.structural.g);           // Hom(Ma,Mb) -> Hom(Ma,und_b)
  ChainMap pre_g = hom_pre(a.structural.g, b.underlying);   // Hom(und_a,und_b) -> Hom(Ma,und_b)

  FiberProduct fp1 = fiber_product(pre_s, post_s);
  Roof alpha{fp1.to_a, fp1.to_b};
  FiberProduct fp2 = fiber_product(post_g, pre_g);
  Roof beta{fp2.to_a, fp2.to_b};
  return {hom_complex(a.underlying, b.underlying),
          hom_complex(a.metric_rep, b.metric_rep), compose_roofs(alpha, beta)};
}

HermStructure dual_structure(const HermStructure& a, const Tol& tol) {
  std::string err = a.check(tol);
  if (!err.empty()) throw invalid_input("dual_structure: " + err);
  ChainMap ds = dual_map(a.structural.s);  // dual(rep_a) -> dual(Ma)
  ChainMap dg = dual_map(a.structural.g);  // dual(und_a) -> dual(Ma)
  FiberProduct fp = fiber_product(ds, dg);
  return {dual(a.underlying), dual(a.metric_rep), Roof{fp.to_a, fp.to_b}};
}

// --- complexes of objects -------------------------------------------------------

std::string ObjectComplex::check(const Tol& tol) const {
  if (pieces.empty()) return "no pieces";
  if (connecting.size() + 1 != pieces.size())
    return "wrong number of connecting maps";
  for (size_t k = 0; k < pieces.size(); ++k) {
    std::string err = pieces[k].check(tol);
    if (!err.empty()) return "piece " + std::to_string(k) + ": " + err;
  }
  for (size_t k = 0; k < connecting.size(); ++k) {
    std::string err = connecting[k].check(tol);
    if (!err.empty()) return "connecting " + std::to_string(k) + ": " + err;
    if (!connecting[k].source.isometric_equal(pieces[k + 1].metric_rep, tol.chain) ||
        !connecting[k].target.isometric_equal(pieces[k].metric_rep, tol.chain))
      return "connecting " + std::to_string(k) + " has wrong endpoints";
  }
  for (size_t k = 0; k + 1 < connecting.size(); ++k) {
    ChainMap comp = compose(connecting[k], connecting[k + 1]);
    for (auto& [i, m] : comp.maps)
      if (m.size() && m.norm() > tol.chain * std::max(1.0, connecting[k].at(i).norm()))
        return "composite of connecting maps " + std::to_string(k) + "," +
               std::to_string(k + 1) + " not zero";
  }
  return {};
}

HermStructure class_of_object_complex(const ObjectComplex& oc, const Tol& tol) {
  std::string err = oc.check(tol);
  if (!err.empty()) throw invalid_input("class_of_object_complex: " + err);

  // iterated cone over the filtration by homological degree, bottom up;
  // acc carries the metric representative, incl the first-block embedding of
  // the most recent shifted piece
  HermComplex acc = shift(oc.pieces[0].metric_rep, oc.lowest);
  ChainMap incl = ChainMap::identity(acc);
  for (size_t j = 1; j < oc.pieces.size(); ++j) {
    int kj = oc.lowest + static_cast<int>(j);
    HermComplex piece = shift(oc.pieces[j].metric_rep, kj - 1);
    ChainMap dshift = shift(oc.connecting[j - 1], kj - 1);
    ChainMap cj = compose(incl, dshift);  // piece[k_j - 1] -> acc
    HermComplex next = cone(cj);
    // first block of the new cone carries piece[k_j]
    HermComplex top = shift(oc.pieces[j].metric_rep, kj);
    ChainMap nincl{top, next, {}};
    for (int i : top.degrees()) {
      if (next.dim(i) == 0) continue;
      Mat m = Mat::Zero(next.dim(i), top.dim(i));
      m.topRows(top.dim(i)).setIdentity();
      nincl.maps[i] = m;
    }
    acc = next;
    incl = nincl;
  }
  return {graded_cohomology(acc, tol), acc,
          Roof{ChainMap::identity(acc), harmonic_projection(acc, tol)}};
}

HermStructure cohomology_induced_structure(const HermComplex& c,
                                           const std::map<int, HermSpace>& metrics,
                                           const Tol& tol) {
  std::string err = c.check(tol);
  if (!err.empty()) throw invalid_input("cohomology_induced_structure: " + err);
  CohomologyInfo ci = cohomology(c, tol);
  for (auto& [i, g] : metrics) {
    if (g.dim() != ci.dim(i))
      throw invalid_input(
          "cohomology_induced_structure: metric dimension mismatch at degree " +
          std::to_string(i));
    std::string serr = g.check(tol);
    if (!serr.empty())
      throw invalid_input("cohomology_induced_structure: metric at degree " +
                          std::to_string(i) + ": " + serr);
  }

  // The representative is the graded cohomology carrying the chosen metrics,
  // with zero differentials. Its coordinates are the canonical harmonic
  // orthonormal bases of the H^i(C), so the identification with C embeds the
  // coordinate vectors onto the harmonic subspaces unchanged. The metric data
  // enters only through the Grams of the representative; rescaling a metric
  // therefore moves the structure by the alternating log volume, it is not
  // absorbed by a change of basis.
  std::map<int, HermSpace> hsp;
  for (auto& [i, d] : ci.dims) {
    if (d == 0) continue;
    hsp[i] = metrics.count(i) ? metrics.at(i) : HermSpace::standard(d);
  }
  HermComplex rep(std::move(hsp), {});
  ChainMap emb = harmonic_embedding(c, tol);
  emb.source = rep;
  return HermStructure{c, rep, Roof{ChainMap::identity(rep), emb}};
}

}  // namespace herm
