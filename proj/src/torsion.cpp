#include "herm/torsion.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <set>

namespace herm {

TauValue tau(const HermComplex& c, const Tol& tol) {
  HodgeData hd = hodge_decompose(c, tol);
  if (!hd.acyclic())
    throw precondition_error("tau: complex is not acyclic");
  TauValue out;
  out.rank_ambiguous = hd.any_rank_ambiguity();
  for (auto& [i, d] : hd.deg) {
    if (d.rank == 0) continue;
    Eigen::JacobiSVD<Mat> svd(d.D);
    double logdet = 0.0;
    for (int j = 0; j < svd.singularValues().size(); ++j) {
      double s = svd.singularValues()(j);
      if (s <= 0.0)
        throw precondition_error("tau: singular transition block at degree " +
                                 std::to_string(i));
      logdet += std::log(s);
    }
    double contrib = ((i % 2 == 0) ? 1.0 : -1.0) * logdet;
    out.per_degree[i] = contrib;
    out.value += contrib;
  }
  return out;
}

double tau_value(const HermComplex& c, const Tol& tol) { return tau(c, tol).value; }

bool is_meager(const HermComplex& c, const Tol& tol) {
  if (c.is_zero()) return true;
  HodgeData hd = hodge_decompose(c, tol);
  if (!hd.acyclic()) return false;
  return std::abs(tau(c, tol).value) <= tol.tau;
}

bool is_tight(const ChainMap& f, const Tol& tol) {
  std::string err = f.check(tol);
  if (!err.empty()) throw invalid_input("is_tight: " + err);
  return is_meager(cone(f), tol);
}

double GeneratorDecomposition::alternating_sum() const {
  double s = 0.0;
  for (const Step& st : steps) s += ((st.degree % 2 == 0) ? 1.0 : -1.0) * st.a;
  return s;
}

namespace {

// Orthogonal complement of a single vector v inside (C^n, G): basis matrix
// whose columns are the projected standard vectors with the one most parallel
// to v dropped.
Mat complement_basis(const Mat& g, const Vec& v) {
  int n = static_cast<int>(v.size());
  double vv = std::real((v.adjoint() * g * v)(0, 0));
  Vec gv = g * v;
  int drop = 0;
  double best = -1.0;
  for (int m = 0; m < n; ++m) {
    double overlap = std::abs(gv(m));
    if (overlap > best) {
      best = overlap;
      drop = m;
    }
  }
  Mat w(n, n - 1);
  int col = 0;
  for (int m = 0; m < n; ++m) {
    if (m == drop) continue;
    Vec e = Vec::Zero(n);
    e(m) = 1.0;
    w.col(col++) = e - (std::conj(gv(m)) / vv) * v;
  }
  return w;
}

}  // namespace

GeneratorDecomposition reduce_to_generators(const HermComplex& c, const Tol& tol) {
  std::string err = c.check(tol);
  if (!err.empty()) throw invalid_input("reduce_to_generators: " + err);

  GeneratorDecomposition out;
  HermComplex cur = c;
  while (!cur.is_zero()) {
    int n = cur.lo();
    int dn = cur.dim(n), dn1 = cur.dim(n + 1);
    if (dn1 == 0)
      throw precondition_error(
          "reduce_to_generators: complex is not acyclic (lowest degree " +
          std::to_string(n) + " cannot map anywhere)");
    const Mat& g0 = cur.space(n).gram();
    const Mat& g1 = cur.space(n + 1).gram();
    const Mat& d = cur.diff(n);

    // largest-norm standard basis vector in the lowest degree
    int j = 0;
    double best = -1.0;
    for (int m = 0; m < dn; ++m) {
      double nm = std::real(g0(m, m));
      if (nm > best) {
        best = nm;
        j = m;
      }
    }
    Vec v = Vec::Zero(dn);
    v(j) = 1.0;
    Vec w = d * v;
    double nv = std::sqrt(std::real((v.adjoint() * g0 * v)(0, 0)));
    double nw = std::sqrt(std::abs(std::real((w.adjoint() * g1 * w)(0, 0))));
    if (!(nw > 0.0) || !std::isfinite(std::log(nw / nv)))
      throw precondition_error(
          "reduce_to_generators: differential kills a lowest-degree vector; "
          "complex is not acyclic");
    out.steps.push_back({n, std::log(nw / nv)});

    // Split off span(v) in degree n and span(dv) in degree n+1, keep the
    // induced metrics on the orthogonal complements and the projected
    // differential.
    std::map<int, HermSpace> sp;
    std::map<int, Mat> df;
    for (auto& [i, s] : cur.spaces())
      if (i != n && i != n + 1) sp[i] = s;
    for (auto& [i, m] : cur.stored_diffs())
      if (i != n && i != n + 1) df[i] = m;

    Mat u, wq;
    if (dn > 1) {
      u = complement_basis(g0, v);
      sp[n] = HermSpace(u.adjoint() * g0 * u);
    }
    double ww = std::real((w.adjoint() * g1 * w)(0, 0));
    if (dn1 > 1) {
      wq = complement_basis(g1, w);
      sp[n + 1] = HermSpace(wq.adjoint() * g1 * wq);
    }
    if (dn > 1 && dn1 > 1) {
      // project d(u_k) off span(w), read in the wq basis
      Mat du = d * u;
      Mat coeff = (w.adjoint() * g1 * du) / ww;  // 1 x (dn-1)
      Mat proj = du - w * coeff;
      Mat gramq = wq.adjoint() * g1 * wq;
      df[n] = gramq.ldlt().solve(wq.adjoint() * g1 * proj);
    }
    if (dn1 > 1 && cur.dim(n + 2) > 0) {
      df[n + 1] = cur.diff(n + 1) * wq;
    }
    cur = HermComplex(std::move(sp), std::move(df));
  }
  return out;
}

TightRelation tightly_related(const HermComplex& a, const HermComplex& b,
                              const Tol& tol) {
  std::string err = a.check(tol);
  if (!err.empty()) throw invalid_input("tightly_related: first argument: " + err);
  err = b.check(tol);
  if (!err.empty()) throw invalid_input("tightly_related: second argument: " + err);

  TightRelation out;
  CohomologyInfo ca = cohomology(a, tol);
  CohomologyInfo cb = cohomology(b, tol);
  std::set<int> degs;
  for (auto& [i, d] : ca.dims) degs.insert(i);
  for (auto& [i, d] : cb.dims) degs.insert(i);
  for (int i : degs) {
    if (ca.dim(i) != cb.dim(i)) {
      out.reason = "cohomology dimensions differ at degree " + std::to_string(i);
      return out;
    }
  }

  if (ca.all_zero()) {
    // acyclic pair: the zero map a -> b has cone a[1] ⊥ b, meager exactly
    // when the classes agree
    double da = a.is_zero() ? 0.0 : tau(a, tol).value;
    double db = b.is_zero() ? 0.0 : tau(b, tol).value;
    out.residual = std::abs(da - db);
    if (out.residual <= tol.tau) {
      out.related = true;
    } else {
      out.reason = "classes differ by " + std::to_string(da - db);
    }
    return out;
  }

  // Witness through the harmonic skeletons: w = embed_b ∘ project_a, then
  // absorb the class of its cone by rescaling one harmonic direction of b.
  ChainMap w = compose(harmonic_embedding(b, tol), harmonic_projection(a, tol));
  double t = tau(cone(w), tol).value;

  int m = 0;
  Mat basis;
  for (auto& [i, hb] : cb.harmonic_basis) {
    m = i;
    basis = hb;
    break;
  }
  Vec v = basis.col(0);  // Gram-orthonormal harmonic vector in degree m

  for (double sign : {1.0, -1.0}) {
    double loglam = sign * ((m % 2 == 0) ? 1.0 : -1.0) * t;
    cplx lam = std::exp(loglam);
    ChainMap sigma = ChainMap::identity(b);
    Mat p = v * (v.adjoint() * b.space(m).gram());
    sigma.maps[m] = Mat::Identity(b.dim(m), b.dim(m)) + (lam - 1.0) * p;
    ChainMap g = compose(sigma, w);
    ChainMap s = ChainMap::identity(a);
    if (is_tight(s, tol) && is_tight(g, tol)) {
      out.related = true;
      out.residual =
          std::max(std::abs(tau(cone(s), tol).value), std::abs(tau(cone(g), tol).value));
      return out;
    }
  }
  out.reason = "witness verification failed";
  return out;
}

}  // namespace herm
