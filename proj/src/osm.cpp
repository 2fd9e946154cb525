#include "herm/osm.hpp"

#include <Eigen/QR>
#include <cmath>

namespace herm {
namespace osm {

namespace {

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

// first map of the tangent triangle, T_f -> T_{gf}: identity on T_X, dg on top
ChainMap triangle_u(const HermComplex& tf, const HermComplex& tgf, const Mat& dg) {
  ChainMap u{tf, tgf, {}};
  if (tf.dim(0) > 0) u.maps[0] = Mat::Identity(tf.dim(0), tf.dim(0));
  if (tf.dim(1) > 0 && tgf.dim(1) > 0) u.maps[1] = dg;
  return u;
}

// second map, T_{gf} -> T_g: df at the bottom, identity on T_Z
ChainMap triangle_v(const HermComplex& tgf, const HermComplex& tg, const Mat& df) {
  ChainMap v{tgf, tg, {}};
  if (tgf.dim(0) > 0 && tg.dim(0) > 0) v.maps[0] = df;
  if (tgf.dim(1) > 0) v.maps[1] = Mat::Identity(tgf.dim(1), tgf.dim(1));
  return v;
}

// Connecting morphism T_g[-1] -> T_f of the tangent triangle, as a roof
// through W = cone(u)[-1]. The composite v∘u is null-homotopic via the
// identity of T_Y; the induced map W -> T_g[-1] is kappa(x, y) = v(y) + h(x)
// and the projection W -> T_f is a chain map since W carries T_f in the first
// block.
Roof connecting_roof(const HermComplex& tf, const HermComplex& tgf,
                     const HermComplex& tg, const Mat& df, const Mat& dg) {
  ChainMap u = triangle_u(tf, tgf, dg);
  HermComplex w = shift(cone(u), -1);  // W^i = T_f^i ⊕ T_{gf}^{i-1}
  HermComplex tgm1 = shift(tg, -1);

  ChainMap kappa{w, tgm1, {}};
  // degree 1: [ Id_{T_Y} | df ] : T_Y ⊕ T_X -> T_Y
  if (tgm1.dim(1) > 0 && w.dim(1) > 0) {
    Mat m = Mat::Zero(tgm1.dim(1), w.dim(1));
    int ty = tf.dim(1);
    if (ty) m.leftCols(ty).setIdentity();
    if (tgf.dim(0)) m.rightCols(tgf.dim(0)) = df;
    kappa.maps[1] = m;
  }
  // degree 2: [ Id_{T_Z} ] : T_{gf}^1 -> T_Z
  if (tgm1.dim(2) > 0 && w.dim(2) > 0)
    kappa.maps[2] = Mat::Identity(tgm1.dim(2), w.dim(2));

  ChainMap pi{w, tf, {}};
  for (int i : tf.degrees()) {
    if (w.dim(i) == 0) continue;
    Mat m = Mat::Zero(tf.dim(i), w.dim(i));
    m.leftCols(tf.dim(i)).setIdentity();
    pi.maps[i] = m;
  }
  return Roof{kappa, pi};
}

}  // namespace

HermComplex tangent_complex(const ToySpace& x, const ToySpace& y, const Mat& df) {
  if (df.rows() != y.tangent.dim() || df.cols() != x.tangent.dim())
    throw invalid_input("tangent_complex: df shape does not match the tangent spaces");
  std::map<int, HermSpace> sp;
  std::map<int, Mat> d;
  if (x.tangent.dim() > 0) sp[0] = x.tangent;
  if (y.tangent.dim() > 0) sp[1] = y.tangent;
  if (x.tangent.dim() > 0 && y.tangent.dim() > 0) d[0] = df;
  return HermComplex(std::move(sp), std::move(d));
}

ToyMorphism ambient_morphism(const ToySpace& x, const ToySpace& y, const Mat& df) {
  HermComplex t = tangent_complex(x, y, df);
  return {x, y, df, HermStructure::native(t)};
}

std::string ToyMorphism::check(const Tol& tol) const {
  if (df.rows() != target.tangent.dim() || df.cols() != source.tangent.dim())
    return "df shape does not match the tangent spaces";
  std::string err = tangent.check(tol);
  if (!err.empty()) return "tangent structure: " + err;
  if (!same_shape(tangent.underlying, tangent_complex(source, target, df), tol))
    return "tangent structure does not live on the tangent complex of df";
  return {};
}

ToyMorphism compose(const ToyMorphism& g, const ToyMorphism& f, const Tol& tol) {
  std::string err = f.check(tol);
  if (!err.empty()) throw invalid_input("compose: first factor: " + err);
  err = g.check(tol);
  if (!err.empty()) throw invalid_input("compose: second factor: " + err);
  if (f.target.tangent.dim() != g.source.tangent.dim() ||
      (f.target.tangent.dim() > 0 &&
       (f.target.tangent.gram() - g.source.tangent.gram()).norm() >
           tol.chain * std::max(1.0, g.source.tangent.gram().norm())))
    throw invalid_input("compose: middle spaces do not match");

  Mat dgf = g.df * f.df;
  HermComplex tgf = tangent_complex(f.source, g.target, dgf);
  const HermComplex& tf = f.tangent.underlying;
  const HermComplex& tg = g.tangent.underlying;

  // connecting morphism and its transport to the metric representatives;
  // compressed so that iterated composition does not inflate the cone
  Roof delta = connecting_roof(tf, tgf, tg, f.df, g.df);
  HermStructure src = shift(g.tangent, -1);
  Roof r = compress(compose_roofs(compose_roofs(src.structural, delta),
                                  inverse(f.tangent.structural, tol)),
                    tol);
  HermCone hc = herm_cone(src, f.tangent, r, tol);

  // land on the tangent complex of the composite through the native triangle
  ChainMap u = triangle_u(tf, tgf, g.df);
  ChainMap v = triangle_v(tgf, tg, f.df);
  TrianglePosition pos1 = cone_position(hc, tol);
  TrianglePosition pos2{
      HermStructure::native(tgf),
      cohomology_map(compose_roofs(f.tangent.structural, Roof::lift(u)), tol),
      cohomology_map(compose_roofs(Roof::lift(v), inverse(g.tangent.structural, tol)),
                     tol)};
  Roof cmp = compress(triangle_comparison(pos1, pos2, tol), tol);

  return {f.source, g.target, dgf,
          HermStructure{tgf, hc.structure.metric_rep, cmp}};
}

double associativity_defect(const ToyMorphism& h, const ToyMorphism& g,
                            const ToyMorphism& f, const Tol& tol) {
  ToyMorphism left = compose(h, compose(g, f, tol), tol);
  ToyMorphism right = compose(compose(h, g, tol), f, tol);
  return std::abs(structure_distance(left.tangent, right.tangent, tol));
}

AssociativityReport verify_associativity(std::uint64_t seed, int cases,
                                         double tol_assoc, const Tol& tol) {
  Rng rng(seed);
  AssociativityReport rep;
  for (int c = 0; c < cases; ++c) {
    int nx = rng.uniform_int(1, 3), ny = rng.uniform_int(1, 3);
    int nz = rng.uniform_int(1, 3), nw = rng.uniform_int(1, 3);
    ToySpace X{"X", random_space(rng, nx)};
    ToySpace Y{"Y", random_space(rng, ny)};
    ToySpace Z{"Z", random_space(rng, nz)};
    ToySpace W{"W", random_space(rng, nw)};
    ToyMorphism f = ambient_morphism(X, Y, random_matrix(rng, ny, nx));
    ToyMorphism g = ambient_morphism(Y, Z, random_matrix(rng, nz, ny));
    ToyMorphism h = ambient_morphism(Z, W, random_matrix(rng, nw, nz));
    // move each structure inside its torsor so the test sees generic data
    f.tangent = torsor_add(f.tangent, rng.uniform(-1.0, 1.0));
    g.tangent = torsor_add(g.tangent, rng.uniform(-1.0, 1.0));
    h.tangent = torsor_add(h.tangent, rng.uniform(-1.0, 1.0));
    double d = associativity_defect(h, g, f, tol);
    rep.max_defect = std::max(rep.max_defect, d);
    ++rep.cases;
  }
  rep.pass = rep.cases > 0 && rep.max_defect <= tol_assoc;
  return rep;
}

HermStructure solve_for_f(const ToyMorphism& g, const ToyMorphism& gf,
                          const Tol& tol) {
  std::string err = g.check(tol);
  if (!err.empty()) throw invalid_input("solve_for_f: second factor: " + err);
  err = gf.check(tol);
  if (!err.empty()) throw invalid_input("solve_for_f: composite: " + err);
  if (gf.target.tangent.dim() != g.target.tangent.dim())
    throw invalid_input("solve_for_f: composite target does not match");

  // recover the underlying factor from dg·df = d(gf); unique when dg is
  // injective, which is the regime this solver is specified for
  Mat df = g.df.completeOrthogonalDecomposition().solve(gf.df);
  if ((g.df * df - gf.df).norm() > 1e3 * tol.chain * std::max(1.0, gf.df.norm()))
    throw precondition_error("solve_for_f: composite does not factor through g");

  HermComplex tf = tangent_complex(gf.source, g.source, df);
  const HermComplex& tgf = gf.tangent.underlying;
  const HermComplex& tg = g.tangent.underlying;

  // T_f[1] is the cone of v : T_{gf} -> T_g; build its hermitian cone and
  // compare against the rotated native triangle
  ChainMap u = triangle_u(tf, tgf, g.df);
  ChainMap v = triangle_v(tgf, tg, df);
  Roof rv = compress(compose_roofs(compose_roofs(gf.tangent.structural, Roof::lift(v)),
                                   inverse(g.tangent.structural, tol)),
                     tol);
  HermCone hc = herm_cone(gf.tangent, g.tangent, rv, tol);

  Roof delta = connecting_roof(tf, tgf, tg, df, g.df);
  HermComplex tf1 = shift(tf, 1);
  TrianglePosition pos1 = cone_position(hc, tol);
  TrianglePosition pos2{
      HermStructure::native(tf1),
      cohomology_map(compose_roofs(g.tangent.structural, shift(delta, 1)), tol),
      cohomology_map(compose_roofs(negate(shift(Roof::lift(u), 1)),
                                   inverse(shift(gf.tangent.structural, 1), tol)),
                     tol)};
  Roof cmp = compress(triangle_comparison(pos1, pos2, tol), tol);

  HermStructure on_shift{tf1, hc.structure.metric_rep, cmp};
  return shift(on_shift, -1);
}

ToddForm todd_form(const ToyMorphism& f) {
  return {1.0, f.source.tangent.dim() - f.target.tangent.dim()};
}

}  // namespace osm
}  // namespace herm
