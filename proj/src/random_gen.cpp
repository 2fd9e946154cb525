#include "herm/random_gen.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace herm {

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) return lo;
  int span = hi - lo + 1;
  int v = lo + static_cast<int>(uniform() * span);
  return std::min(v, hi);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

Mat random_matrix(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.cnormal() / std::sqrt(2.0);
  return m;
}

Mat random_unitary(Rng& rng, int n) {
  if (n == 0) return Mat::Zero(0, 0);
  Mat m = random_matrix(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix phases so the distribution does not depend on the QR convention
  for (int j = 0; j < n; ++j) {
    cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

HermSpace random_space(Rng& rng, int dim, double spread) {
  if (dim == 0) return HermSpace(Mat::Zero(0, 0));
  Mat u = random_unitary(rng, dim);
  Vec ev(dim);
  for (int i = 0; i < dim; ++i) ev(i) = std::exp(rng.uniform(-spread, spread));
  Mat g = u * ev.asDiagonal() * u.adjoint();
  g = 0.5 * (g + Mat(g.adjoint()));
  return HermSpace(std::move(g));
}

HermComplex random_acyclic(Rng& rng, const AcyclicSpec& spec) {
  if (spec.len < 2) return {};
  int lo = spec.lo, hi = spec.lo + spec.len - 1;
  std::map<int, int> rank;  // rank of d_i
  for (int i = lo; i < hi; ++i) rank[i] = rng.uniform_int(1, std::max(1, spec.max_rank));
  auto rk = [&](int i) { return rank.count(i) ? rank[i] : 0; };

  std::map<int, Mat> frame;
  std::map<int, int> n;
  for (int i = lo; i <= hi; ++i) {
    n[i] = rk(i - 1) + rk(i);
    frame[i] = random_unitary(rng, n[i]);
  }
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  for (int i = lo; i <= hi; ++i) {
    if (n[i] == 0) continue;
    sp[i] = spec.random_gram ? random_space(rng, n[i], spec.gram_spread)
                             : HermSpace::standard(n[i]);
  }
  for (int i = lo; i < hi; ++i) {
    if (rk(i) == 0) continue;
    // coexact half of frame i onto the exact half of frame i+1
    Mat coex = frame[i].rightCols(rk(i));
    Mat exact = frame[i + 1].leftCols(rk(i));
    Vec sig(rk(i));
    for (int j = 0; j < rk(i); ++j)
      sig(j) = std::exp(rng.uniform(-spec.sigma_spread, spec.sigma_spread));
    df[i] = exact * sig.asDiagonal() * coex.adjoint();
  }
  return HermComplex(std::move(sp), std::move(df));
}

HermComplex random_complex(Rng& rng, const ComplexSpec& spec) {
  AcyclicSpec as;
  as.lo = spec.lo;
  as.len = spec.len;
  as.max_rank = spec.max_rank;
  as.sigma_spread = spec.sigma_spread;
  as.random_gram = spec.random_gram;
  as.gram_spread = spec.gram_spread;
  HermComplex acyc = random_acyclic(rng, as);

  std::map<int, HermSpace> sp;
  for (int i = spec.lo; i < spec.lo + spec.len; ++i) {
    int h = rng.uniform_int(0, spec.max_harmonic);
    if (h == 0) continue;
    sp[i] = spec.random_gram ? random_space(rng, h, spec.gram_spread)
                             : HermSpace::standard(h);
  }
  HermComplex padding(std::move(sp), {});
  return direct_sum(acyc, padding);
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct MapLayout {
  std::vector<int> degs;
  std::vector<int> offsets;
  std::vector<std::pair<int, int>> shapes;  // rows (target), cols (source)
  int dim = 0;

  int offset_of(int deg) const {
    for (size_t k = 0; k < degs.size(); ++k)
      if (degs[k] == deg) return offsets[k];
    return -1;
  }
};

MapLayout map_layout(const HermComplex& e, const HermComplex& f) {
  MapLayout ml;
  if (e.is_zero() || f.is_zero()) return ml;
  for (int i = std::min(e.lo(), f.lo()); i <= std::max(e.hi(), f.hi()); ++i) {
    int r = f.dim(i), c = e.dim(i);
    if (r == 0 || c == 0) continue;
    ml.degs.push_back(i);
    ml.offsets.push_back(ml.dim);
    ml.shapes.push_back({r, c});
    ml.dim += r * c;
  }
  return ml;
}

ChainMap unpack(const MapLayout& ml, const HermComplex& e, const HermComplex& f,
                const Vec& x) {
  ChainMap out{e, f, {}};
  for (size_t k = 0; k < ml.degs.size(); ++k) {
    auto [r, c] = ml.shapes[k];
    Mat m(r, c);
    for (int j = 0; j < c; ++j) m.col(j) = x.segment(ml.offsets[k] + j * r, r);
    out.maps[ml.degs[k]] = m;
  }
  return out;
}

}  // namespace

ChainMap random_chain_map(Rng& rng, const HermComplex& e, const HermComplex& f,
                          double scale) {
  MapLayout ml = map_layout(e, f);
  if (ml.dim == 0) return ChainMap::zero(e, f);

  // rows: one block per degree i with e.dim(i) > 0 and f.dim(i+1) > 0,
  // expressing d_F φ^i - φ^{i+1} d_E^i = 0 on column-major vectorizations
  int rows = 0;
  std::vector<std::tuple<int, int>> blocks;  // (degree, row offset)
  for (int i = std::min(e.lo(), f.lo()); i <= std::max(e.hi(), f.hi()); ++i) {
    if (e.dim(i) == 0 || f.dim(i + 1) == 0) continue;
    blocks.push_back({i, rows});
    rows += f.dim(i + 1) * e.dim(i);
  }
  Vec coeffs;
  if (rows == 0) {
    coeffs = Vec(ml.dim);
    for (int j = 0; j < ml.dim; ++j) coeffs(j) = rng.cnormal() / std::sqrt(2.0);
    return unpack(ml, e, f, scale * coeffs);
  }
  Mat a = Mat::Zero(rows, ml.dim);
  for (auto [i, off] : blocks) {
    int oi = ml.offset_of(i), oi1 = ml.offset_of(i + 1);
    if (oi >= 0 && f.dim(i) > 0)
      a.block(off, oi, f.dim(i + 1) * e.dim(i), f.dim(i) * e.dim(i)) =
          kron(Mat::Identity(e.dim(i), e.dim(i)), f.diff(i));
    if (oi1 >= 0 && e.dim(i + 1) > 0)
      a.block(off, oi1, f.dim(i + 1) * e.dim(i), f.dim(i + 1) * e.dim(i + 1)) -=
          kron(e.diff(i).transpose(), Mat::Identity(f.dim(i + 1), f.dim(i + 1)));
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int r = 0;
  for (int j = 0; j < svd.singularValues().size(); ++j)
    if (svd.singularValues()(j) > 1e-12 * std::max(smax, 1.0)) ++r;
  int nullity = ml.dim - r;
  if (nullity == 0) return ChainMap::zero(e, f);
  Mat null_basis = svd.matrixV().rightCols(nullity);
  Vec g(nullity);
  for (int j = 0; j < nullity; ++j) g(j) = rng.cnormal() / std::sqrt(2.0);
  return unpack(ml, e, f, scale * (null_basis * g));
}

Homotopy random_homotopy(Rng& rng, const HermComplex& e, const HermComplex& f,
                         double scale) {
  Homotopy h{e, f, {}};
  if (e.is_zero() || f.is_zero()) return h;
  for (int i = e.lo(); i <= e.hi(); ++i) {
    if (e.dim(i) == 0 || f.dim(i - 1) == 0) continue;
    h.maps[i] = scale * random_matrix(rng, f.dim(i - 1), e.dim(i));
  }
  return h;
}

ChainMap random_quasi_iso(Rng& rng, const HermComplex& e, const HermComplex& f,
                          double perturbation) {
  Tol tol = default_tol();
  CohomologyInfo ce = cohomology(e, tol);
  CohomologyInfo cf = cohomology(f, tol);
  std::map<int, Mat> mix;
  for (auto& [i, d] : ce.dims) {
    if (cf.dim(i) != d)
      throw invalid_input("random_quasi_iso: cohomology dimensions differ at degree " +
                          std::to_string(i));
    Mat r;
    for (int attempt = 0; attempt < 16; ++attempt) {
      r = random_matrix(rng, d, d);
      Eigen::JacobiSVD<Mat> svd(r);
      if (svd.singularValues()(d - 1) > 1e-3 * svd.singularValues()(0)) break;
    }
    mix[i] = r;
  }
  for (auto& [i, d] : cf.dims)
    if (ce.dim(i) != d)
      throw invalid_input("random_quasi_iso: cohomology dimensions differ at degree " +
                          std::to_string(i));

  ChainMap proj = harmonic_projection(e, tol);
  ChainMap emb = harmonic_embedding(f, tol);
  ChainMap skel{proj.target, emb.source, {}};
  for (auto& [i, m] : mix) skel.maps[i] = m;
  ChainMap w = compose(emb, compose(skel, proj));
  if (perturbation > 0.0) {
    Homotopy h = random_homotopy(rng, e, f, perturbation);
    w = add(w, h.boundary());
  }
  return w;
}

HomotopySquare random_homotopy_square(Rng& rng, const AcyclicSpec& spec) {
  // Four independent acyclic corners; all chain maps drawn at random. Between
  // bounded acyclic complexes every chain map is null-homotopic, so the
  // homotopy witnessing g f' - f g' ~ 0 exists and is found by least squares.
  HermComplex ep = random_acyclic(rng, spec);
  HermComplex fp = random_acyclic(rng, spec);
  HermComplex e = random_acyclic(rng, spec);
  HermComplex fb = random_acyclic(rng, spec);
  HomotopySquare sq;
  sq.f_top = random_chain_map(rng, ep, fp);
  sq.f_bottom = random_chain_map(rng, e, fb);
  sq.g_left = random_chain_map(rng, ep, e);
  sq.g_right = random_chain_map(rng, fp, fb);

  ChainMap defect =
      add(compose(sq.g_right, sq.f_top), scale(-1.0, compose(sq.f_bottom, sq.g_left)));

  // unknowns: h^i : E'^i -> F^{i-1}; equations: d h + h d = defect
  std::vector<std::tuple<int, int, int, int>> hs;  // (deg, offset, rows, cols)
  int dim = 0;
  for (int i = ep.lo(); i <= ep.hi() + 1; ++i) {
    int r = fb.dim(i - 1), c = ep.dim(i);
    if (r == 0 || c == 0) continue;
    hs.push_back({i, dim, r, c});
    dim += r * c;
  }
  auto offset_of = [&](int deg) {
    for (auto& [d, off, r, c] : hs)
      if (d == deg) return off;
    return -1;
  };
  int rows = 0;
  std::vector<std::pair<int, int>> eq;  // (degree, row offset)
  for (int i = ep.lo(); i <= ep.hi(); ++i) {
    if (ep.dim(i) == 0 || fb.dim(i) == 0) continue;
    eq.push_back({i, rows});
    rows += fb.dim(i) * ep.dim(i);
  }
  Mat a = Mat::Zero(rows, dim);
  Vec b = Vec::Zero(rows);
  for (auto [i, off] : eq) {
    const Mat& d = defect.at(i);
    for (int j = 0; j < d.cols(); ++j) b.segment(off + j * d.rows(), d.rows()) = d.col(j);
    int oi = offset_of(i), oi1 = offset_of(i + 1);
    if (oi >= 0 && fb.dim(i - 1) > 0)
      a.block(off, oi, fb.dim(i) * ep.dim(i), fb.dim(i - 1) * ep.dim(i)) =
          kron(Mat::Identity(ep.dim(i), ep.dim(i)), fb.diff(i - 1));
    if (oi1 >= 0 && ep.dim(i + 1) > 0)
      a.block(off, oi1, fb.dim(i) * ep.dim(i), fb.dim(i) * ep.dim(i + 1)) +=
          kron(ep.diff(i).transpose(), Mat::Identity(fb.dim(i), fb.dim(i)));
  }
  Vec x = dim > 0 ? Vec(a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b))
                  : Vec(0);
  sq.h = Homotopy{ep, fb, {}};
  for (auto& [d, off, r, c] : hs) {
    Mat m(r, c);
    for (int j = 0; j < c; ++j) m.col(j) = x.segment(off + j * r, r);
    sq.h.maps[d] = m;
  }
  return sq;
}

SplitSes random_split_ses(Rng& rng, const HermComplex& sub,
                          const HermComplex& quot_shifted) {
  const HermComplex& q = quot_shifted;
  // coupling: chain map quot -> sub[1], i.e. d_sub γ + γ d_quot = 0
  ChainMap gamma = random_chain_map(rng, q, shift(sub, 1));

  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  int lo = std::min(sub.lo(), q.lo()), hi = std::max(sub.hi(), q.hi());
  for (int i = lo; i <= hi; ++i) {
    int n = sub.dim(i) + q.dim(i);
    if (n == 0) continue;
    sp[i] = direct_sum(sub.space(i), q.space(i));
  }
  for (int i = lo; i < hi; ++i) {
    int nr = sub.dim(i + 1) + q.dim(i + 1), nc = sub.dim(i) + q.dim(i);
    if (nr == 0 || nc == 0) continue;
    Mat d = Mat::Zero(nr, nc);
    if (sub.dim(i + 1) && sub.dim(i)) d.topLeftCorner(sub.dim(i + 1), sub.dim(i)) = sub.diff(i);
    if (sub.dim(i + 1) && q.dim(i)) d.topRightCorner(sub.dim(i + 1), q.dim(i)) = gamma.at(i);
    if (q.dim(i + 1) && q.dim(i)) d.bottomRightCorner(q.dim(i + 1), q.dim(i)) = q.diff(i);
    df[i] = d;
  }
  SplitSes out;
  out.sub = sub;
  out.quot = q;
  out.mid = HermComplex(std::move(sp), std::move(df));
  for (int i = lo; i <= hi; ++i) {
    int ns = sub.dim(i), nq = q.dim(i);
    if (ns + nq == 0) continue;
    Mat e = Mat::Zero(ns + nq, ns);
    e.topRows(ns).setIdentity();
    Mat s = Mat::Zero(ns + nq, nq);
    s.bottomRows(nq).setIdentity();
    out.embed[i] = e;
    out.section[i] = s;
  }
  return out;
}

}  // namespace herm
