// Derived morphisms as roofs, structures as a torsor over the reals,
// hermitian cones, distinguished triangles with the ladder and nine-term
// identities, object complexes, and structures induced by cohomology metrics.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "herm/derived.hpp"

using namespace herm;

namespace {

ChainMap first_block_proj(const HermComplex& sum, const HermComplex& first) {
  ChainMap p{sum, first, {}};
  for (int i : first.degrees()) {
    Mat m = Mat::Zero(first.dim(i), sum.dim(i));
    m.leftCols(first.dim(i)).setIdentity();
    p.maps[i] = m;
  }
  return p;
}

ChainMap first_block_incl(const HermComplex& first, const HermComplex& sum) {
  ChainMap p{first, sum, {}};
  for (int i : first.degrees()) {
    Mat m = Mat::Zero(sum.dim(i), first.dim(i));
    m.topRows(first.dim(i)).setIdentity();
    p.maps[i] = m;
  }
  return p;
}

// Same complex structure, fresh random metrics. Cohomology dimensions agree
// with the input by construction.
HermComplex regrammed(Rng& rng, const HermComplex& c) {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  for (int i : c.degrees()) sp[i] = random_space(rng, c.dim(i));
  for (auto& [i, d] : c.stored_diffs()) df[i] = d;
  return HermComplex(std::move(sp), std::move(df));
}

// The chain map f between unpadded complexes, rerouted through torsor pads:
// from_rep = f.source ⊥ pad, to_rep = f.target ⊥ pad.
Roof reroute(const ChainMap& f, const HermComplex& from_rep, const HermComplex& to_rep) {
  return Roof::lift(compose(first_block_incl(f.target, to_rep),
                            compose(f, first_block_proj(from_rep, f.source))));
}

ComplexSpec small_spec(int lo = 0) {
  ComplexSpec s;
  s.lo = lo;
  s.len = 2;
  s.max_rank = 2;
  s.max_harmonic = 1;
  return s;
}

// Strict cone triangle over a chain map.
HermTriangle strict_triangle(const ChainMap& m) {
  return HermTriangle{HermStructure::native(m.source),
                      HermStructure::native(m.target),
                      HermStructure::native(cone(m)),
                      Roof::lift(m),
                      Roof::lift(cone_inclusion(m)),
                      Roof::lift(cone_projection(m))};
}

// Split triangle X -> X ⊥ Y -> Y with explicit structure maps and zero w.
HermTriangle split_triangle(const HermStructure& x, const HermStructure& mid,
                            const HermStructure& y, const Roof& u, const Roof& v) {
  Roof w = Roof::lift(ChainMap::zero(y.metric_rep, shift(x.metric_rep, 1)));
  return HermTriangle{x, mid, y, u, v, w};
}

}  // namespace

TEST_CASE("identity and lifted roofs validate and have the expected class") {
  Rng rng(401);
  HermComplex c = random_complex(rng, small_spec());
  Roof id = Roof::identity(c);
  CHECK_OK(id.check());
  CHECK_CLOSE(class_of_iso(id), 0.0, 1e-12);
  CHECK(morphisms_equal(id, id));

  // Scaling the standard line by r: the source copy lands one degree lower
  // in the cone, so the class is -log r.
  HermComplex line = HermComplex::concentrated(HermSpace::standard(1), 0);
  ChainMap r2{line, line, {{0, 2.0 * Mat::Identity(1, 1)}}};
  CHECK_CLOSE(class_of_iso(Roof::lift(r2)), -std::log(2.0), 1e-10);
  CHECK_FALSE(morphisms_equal(Roof::identity(line), Roof::lift(r2)));
}

TEST_CASE("class of a derived isomorphism does not depend on the roof") {
  Rng rng(402);
  for (int rep = 0; rep < 10; ++rep) {
    HermComplex c = random_complex(rng, small_spec());
    HermComplex d = regrammed(rng, c);
    ChainMap q = random_quasi_iso(rng, c, d);
    Roof direct = Roof::lift(q);

    // Pad the middle and perturb the leg by a boundary.
    HermComplex mid = direct_sum(c, random_acyclic(rng));
    ChainMap p = first_block_proj(mid, c);
    Homotopy hh = random_homotopy(rng, mid, d, 0.4);
    Roof padded{p, add(compose(q, p), hh.boundary())};
    CHECK_OK(padded.check());

    CHECK(morphisms_equal(direct, padded));
    CHECK_CLOSE(class_of_iso(direct), class_of_iso(padded), 1e-9);
  }
}

TEST_CASE("composition adds classes and the inverse negates them") {
  Rng rng(403);
  for (int rep = 0; rep < 10; ++rep) {
    HermComplex c = random_complex(rng, small_spec());
    HermComplex d = regrammed(rng, c);
    HermComplex e = regrammed(rng, c);
    Roof f = Roof::lift(random_quasi_iso(rng, c, d));
    Roof g = Roof::lift(random_quasi_iso(rng, d, e));

    Roof gf = compose_roofs(f, g);
    CHECK_OK(gf.check());
    CHECK_CLOSE(class_of_iso(gf), class_of_iso(f) + class_of_iso(g), 1e-9);

    Roof finv = inverse(f);
    CHECK_CLOSE(class_of_iso(finv), -class_of_iso(f), 1e-9);
    CHECK(morphisms_equal(compose_roofs(f, finv), Roof::identity(c)));
  }
}

TEST_CASE("roof composition is associative on induced maps") {
  Rng rng(404);
  HermComplex c = random_complex(rng, small_spec());
  Roof f = Roof::lift(random_quasi_iso(rng, c, c));
  Roof g = Roof::lift(random_quasi_iso(rng, c, c));
  Roof h = Roof::lift(random_quasi_iso(rng, c, c));
  Roof left = compose_roofs(compose_roofs(f, g), h);
  Roof right = compose_roofs(f, compose_roofs(g, h));
  CHECK(morphisms_equal(left, right));
  CHECK_CLOSE(class_of_iso(left), class_of_iso(right), 1e-9);
}

TEST_CASE("compress keeps the morphism and its class, shrinking the middle") {
  Rng rng(405);
  HermComplex c = random_complex(rng, small_spec());
  Roof f = Roof::lift(random_quasi_iso(rng, c, c));
  Roof g = Roof::lift(random_quasi_iso(rng, c, c));
  Roof big = compose_roofs(f, g);
  Roof small = compress(big);
  CHECK_OK(small.check());
  CHECK(small.middle().total_dim() <= big.middle().total_dim());
  CHECK(morphisms_equal(big, small));
  CHECK_CLOSE(class_of_iso(big), class_of_iso(small), 1e-9);
}

TEST_CASE("shift multiplies the class by the degree sign and negate keeps it") {
  Rng rng(406);
  HermComplex c = random_complex(rng, small_spec());
  HermComplex d = regrammed(rng, c);
  Roof f = Roof::lift(random_quasi_iso(rng, c, d));
  double cls = class_of_iso(f);

  CHECK_CLOSE(class_of_iso(shift(f, 1)), -cls, 1e-9);
  CHECK_CLOSE(class_of_iso(shift(f, 2)), cls, 1e-9);
  CHECK_CLOSE(class_of_iso(negate(f)), cls, 1e-9);
}

TEST_CASE("structure validation rejects a non-invertible structural roof") {
  HermComplex c = HermComplex::concentrated(HermSpace::standard(2), 0);
  HermStructure ok = HermStructure::native(c);
  CHECK_OK(ok.check());

  HermStructure bad{c, c, Roof::lift(ChainMap::zero(c, c))};
  CHECK_FALSE(bad.check().empty());
}

TEST_CASE("torsor action: distances are coordinates") {
  Rng rng(407);
  HermComplex c = random_complex(rng, small_spec());
  HermStructure h = HermStructure::native(c);

  for (double a : {-1.25, 0.0, 2.5}) {
    CHECK_CLOSE(structure_distance(torsor_add(h, a), h), a, 1e-10);
    CHECK_CLOSE(structure_distance(h, torsor_add(h, a)), -a, 1e-10);
  }
  CHECK_CLOSE(structure_distance(torsor_add(h, 1.7), torsor_add(h, 0.4)), 1.3, 1e-10);
}

TEST_CASE("distance is additive around a genuinely different third structure") {
  Rng rng(408);
  // Zero-differential underlying with two degrees.
  HermComplex c({{0, random_space(rng, 2)}, {1, random_space(rng, 2)}}, {});
  HermStructure h2 = HermStructure::native(c);
  HermStructure h1 = torsor_add(h2, 0.9);

  HermComplex rep3({{0, random_space(rng, 2)}, {1, random_space(rng, 2)}}, {});
  HermStructure h3{c, rep3, Roof::lift(random_quasi_iso(rng, rep3, c))};
  CHECK_OK(h3.check());

  double d12 = structure_distance(h1, h2);
  double d23 = structure_distance(h2, h3);
  double d13 = structure_distance(h1, h3);
  CHECK_CLOSE(d13, d12 + d23, 1e-9);
  CHECK_CLOSE(structure_distance(h3, h1), -d13, 1e-9);
}

TEST_CASE("distance refuses structures on different objects") {
  HermComplex a = HermComplex::concentrated(HermSpace::standard(1), 0);
  HermComplex b = HermComplex::concentrated(HermSpace::standard(2), 0);
  CHECK_THROWS_AS(structure_distance(HermStructure::native(a), HermStructure::native(b)),
                  invalid_input);
}

TEST_CASE("parallel transport along the identity does nothing") {
  Rng rng(409);
  HermComplex c = random_complex(rng, small_spec());
  HermStructure h = torsor_add(HermStructure::native(c), 0.7);
  HermStructure moved = parallel_transport(Roof::identity(c), h);
  CHECK_CLOSE(structure_distance(moved, h), 0.0, 1e-10);
}

TEST_CASE("parallel transport is functorial under composition") {
  Rng rng(410);
  for (int rep = 0; rep < 5; ++rep) {
    HermComplex c = random_complex(rng, small_spec());
    HermComplex d = regrammed(rng, c);
    HermComplex e = regrammed(rng, c);
    Roof f = Roof::lift(random_quasi_iso(rng, c, d));
    Roof g = Roof::lift(random_quasi_iso(rng, d, e));
    HermStructure h = torsor_add(HermStructure::native(c), 0.3);

    HermStructure two_steps = parallel_transport(g, parallel_transport(f, h));
    HermStructure one_step = parallel_transport(compose_roofs(f, g), h);
    CHECK_CLOSE(structure_distance(two_steps, one_step), 0.0, 1e-9);
  }
}

TEST_CASE("hermitian cone carries triangle maps with zero composite") {
  Rng rng(411);
  HermComplex a = random_complex(rng, small_spec());
  HermComplex b = random_complex(rng, small_spec());
  ChainMap m = random_chain_map(rng, a, b);
  HermCone hc = herm_cone(HermStructure::native(a), HermStructure::native(b), Roof::lift(m));

  CHECK_OK(hc.structure.check());
  CHECK_OK(hc.incl.check());
  CHECK_OK(hc.proj.check());
  ChainMap comp = compose(hc.proj, hc.incl);
  for (int i = comp.source.lo(); i <= comp.source.hi(); ++i)
    CHECK(comp.at(i).norm() <= 1e-12);
}

TEST_CASE("hermitian cone of an identity is meager") {
  Rng rng(412);
  HermComplex c = random_complex(rng, small_spec());
  HermStructure h = HermStructure::native(c);
  HermCone hc = herm_cone(h, h, Roof::identity(c));
  CHECK(is_meager(hc.structure.metric_rep));
  CHECK(hc.structure.underlying.is_zero());
}

TEST_CASE("cone construction does not depend on the chosen roof") {
  Rng rng(413);
  for (int rep = 0; rep < 10; ++rep) {
    ComplexSpec spec = small_spec();
    HermComplex src = random_complex(rng, spec);
    HermComplex tgt = random_complex(rng, spec);
    AcyclicSpec pad;
    pad.len = 2;
    pad.max_rank = 1;

    HermComplex mid1 = direct_sum(src, random_acyclic(rng, pad));
    Roof r1{first_block_proj(mid1, src), random_chain_map(rng, mid1, tgt)};

    HermComplex mid2 = direct_sum(mid1, random_acyclic(rng, pad));
    ChainMap p2 = first_block_proj(mid2, mid1);
    Homotopy hh = random_homotopy(rng, mid2, tgt, 0.4);
    Roof r2{compose(r1.s, p2), add(compose(r1.g, p2), hh.boundary())};
    CHECK(morphisms_equal(r1, r2));

    HermCone c1 = herm_cone(HermStructure::native(src), HermStructure::native(tgt), r1);
    HermCone c2 = herm_cone(HermStructure::native(src), HermStructure::native(tgt), r2);
    CHECK_CLOSE(cone_welldefinedness_distance(c1, c2), 0.0, 1e-8);
    CHECK_CLOSE(cone_welldefinedness_distance(c1, c1), 0.0, 1e-10);
  }
}

TEST_CASE("triangle comparison of a cone position with itself is neutral") {
  Rng rng(414);
  HermComplex a = random_complex(rng, small_spec());
  HermComplex b = random_complex(rng, small_spec());
  ChainMap m = random_chain_map(rng, a, b);
  HermCone hc = herm_cone(HermStructure::native(a), HermStructure::native(b), Roof::lift(m));
  TrianglePosition tp = cone_position(hc);
  Roof cmp = triangle_comparison(tp, tp);
  CHECK_OK(cmp.check());
  CHECK_CLOSE(class_of_iso(cmp), 0.0, 1e-9);
}

TEST_CASE("strict cone triangles are distinguished with vanishing class") {
  Rng rng(415);
  for (int rep = 0; rep < 5; ++rep) {
    HermComplex a = random_complex(rng, small_spec());
    HermComplex b = random_complex(rng, small_spec());
    HermTriangle t = strict_triangle(random_chain_map(rng, a, b));
    CHECK_OK(t.check());
    CHECK_CLOSE(class_of_triangle(t), 0.0, 1e-8);
  }
}

TEST_CASE("split triangles with orthogonal sums have vanishing class") {
  Rng rng(416);
  HermComplex x = random_complex(rng, small_spec());
  HermComplex y = random_complex(rng, small_spec());
  HermComplex mid = direct_sum(x, y);

  ChainMap incl = first_block_incl(x, mid);
  ChainMap proj{mid, y, {}};
  for (int i : y.degrees()) {
    Mat m = Mat::Zero(y.dim(i), mid.dim(i));
    m.rightCols(y.dim(i)).setIdentity();
    proj.maps[i] = m;
  }
  HermTriangle t = split_triangle(HermStructure::native(x), HermStructure::native(mid),
                                  HermStructure::native(y), Roof::lift(incl), Roof::lift(proj));
  CHECK_OK(t.check());
  CHECK_CLOSE(class_of_triangle(t), 0.0, 1e-8);
}

TEST_CASE("moving the third vertex by the torsor moves the class with it") {
  Rng rng(417);
  HermComplex a = random_complex(rng, small_spec());
  HermComplex b = random_complex(rng, small_spec());
  ChainMap m = random_chain_map(rng, a, b);
  HermTriangle t = strict_triangle(m);

  double c = 0.85;
  HermStructure h2 = torsor_add(t.h, c);
  Roof v2 = reroute(cone_inclusion(m), t.g.metric_rep, h2.metric_rep);
  ChainMap w_chain = compose(cone_projection(m), first_block_proj(h2.metric_rep, t.h.metric_rep));
  HermTriangle t2{t.f, t.g, h2, t.u, v2, Roof::lift(w_chain)};
  CHECK_OK(t2.check());
  CHECK_CLOSE(class_of_triangle(t2), c, 1e-8);
}

TEST_CASE("rotation negates the class and a double rotation restores it") {
  Rng rng(418);
  HermComplex a = random_complex(rng, small_spec());
  HermComplex b = random_complex(rng, small_spec());
  ChainMap m = random_chain_map(rng, a, b);
  HermTriangle t = strict_triangle(m);

  // Give it a nonzero class first.
  double c = -0.6;
  HermStructure h2 = torsor_add(t.h, c);
  Roof v2 = reroute(cone_inclusion(m), t.g.metric_rep, h2.metric_rep);
  ChainMap w_chain = compose(cone_projection(m), first_block_proj(h2.metric_rep, t.h.metric_rep));
  HermTriangle moved{t.f, t.g, h2, t.u, v2, Roof::lift(w_chain)};

  double cls = class_of_triangle(moved);
  CHECK_CLOSE(cls, c, 1e-8);

  HermTriangle rot = rotate(moved);
  CHECK_OK(rot.check());
  CHECK_CLOSE(class_of_triangle(rot), -cls, 1e-8);
  CHECK_CLOSE(class_of_triangle(rotate(rot)), cls, 1e-8);
}

TEST_CASE("ladder: padding all three vertices shifts the class alternately") {
  Rng rng(419);
  for (int rep = 0; rep < 5; ++rep) {
    HermComplex a = random_complex(rng, small_spec());
    HermComplex b = random_complex(rng, small_spec());
    ChainMap m = random_chain_map(rng, a, b);
    HermTriangle t = strict_triangle(m);

    double pa = rng.uniform(-1.5, 1.5);
    double pb = rng.uniform(-1.5, 1.5);
    double pc = rng.uniform(-1.5, 1.5);
    HermStructure f2 = torsor_add(t.f, pa);
    HermStructure g2 = torsor_add(t.g, pb);
    HermStructure h2 = torsor_add(t.h, pc);

    Roof u2 = reroute(m, f2.metric_rep, g2.metric_rep);
    Roof v2 = reroute(cone_inclusion(m), g2.metric_rep, h2.metric_rep);
    ChainMap w_chain =
        compose(shift(first_block_incl(a, f2.metric_rep), 1),
                compose(cone_projection(m), first_block_proj(h2.metric_rep, t.h.metric_rep)));
    HermTriangle t2{f2, g2, h2, u2, v2, Roof::lift(w_chain)};
    CHECK_OK(t2.check());

    // The vertical comparison morphisms carry exactly the pad classes.
    CHECK_CLOSE(class_of_iso(Roof::lift(first_block_incl(a, f2.metric_rep))), pa, 1e-9);
    CHECK_CLOSE(class_of_iso(Roof::lift(first_block_proj(g2.metric_rep, b))), -pb, 1e-9);

    CHECK_CLOSE(class_of_triangle(t2), pa - pb + pc, 1e-8);
  }
}

TEST_CASE("nine-term diagram: row classes and column classes balance") {
  Rng rng(420);
  HermComplex p = random_complex(rng, small_spec());
  HermComplex q = random_complex(rng, small_spec());
  HermComplex r = random_complex(rng, small_spec());
  HermComplex s = random_complex(rng, small_spec());

  // Grid of orthogonal sums; X11 is laid out [P | Q | R | S].
  HermComplex x01 = direct_sum(p, q), x21 = direct_sum(r, s);
  HermComplex x10 = direct_sum(p, r), x12 = direct_sum(q, s);
  HermComplex x11 = direct_sum(x01, x21);
  HermComplex grid[3][3] = {{p, x01, q}, {x10, x11, x12}, {r, x21, s}};

  // Pads for the nine vertices.
  double pad[3][3];
  HermStructure st[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      pad[i][j] = rng.uniform(-1.0, 1.0);
      st[i][j] = torsor_add(HermStructure::native(grid[i][j]), pad[i][j]);
    }

  // Inclusion and projection chain maps per row and per column of the grid.
  auto sum_incl = [](const HermComplex& x, const HermComplex& sum) {
    return first_block_incl(x, sum);
  };
  auto sum_proj = [](const HermComplex& sum, const HermComplex& y) {
    ChainMap m{sum, y, {}};
    for (int i : y.degrees()) {
      Mat blk = Mat::Zero(y.dim(i), sum.dim(i));
      blk.rightCols(y.dim(i)).setIdentity();
      m.maps[i] = blk;
    }
    return m;
  };

  // Row 1 threads P ⊥ R and Q ⊥ S through the interleaved layout of X11.
  ChainMap row1_incl{x10, x11, {}};
  ChainMap row1_proj{x11, x12, {}};
  for (int i = x11.lo(); i <= x11.hi(); ++i) {
    int np = p.dim(i), nq = q.dim(i), nr = r.dim(i), ns = s.dim(i);
    Mat in = Mat::Zero(np + nq + nr + ns, np + nr);
    in.block(0, 0, np, np).setIdentity();
    in.block(np + nq, np, nr, nr).setIdentity();
    row1_incl.maps[i] = in;
    Mat out = Mat::Zero(nq + ns, np + nq + nr + ns);
    out.block(0, np, nq, nq).setIdentity();
    out.block(nq, np + nq + nr, ns, ns).setIdentity();
    row1_proj.maps[i] = out;
  }
  CHECK_OK(row1_incl.check());
  CHECK_OK(row1_proj.check());

  ChainMap row_incl[3] = {sum_incl(p, x01), row1_incl, sum_incl(r, x21)};
  ChainMap row_proj[3] = {sum_proj(x01, q), row1_proj, sum_proj(x21, s)};
  ChainMap col_incl[3] = {sum_incl(p, x10), sum_incl(x01, x11), sum_incl(q, x12)};
  ChainMap col_proj[3] = {sum_proj(x10, r), sum_proj(x11, x21), sum_proj(x12, s)};

  double row_cls[3], col_cls[3];
  for (int i = 0; i < 3; ++i) {
    Roof u = reroute(row_incl[i], st[i][0].metric_rep, st[i][1].metric_rep);
    Roof v = reroute(row_proj[i], st[i][1].metric_rep, st[i][2].metric_rep);
    HermTriangle t = split_triangle(st[i][0], st[i][1], st[i][2], u, v);
    CHECK_OK(t.check());
    row_cls[i] = class_of_triangle(t);
    CHECK_CLOSE(row_cls[i], pad[i][0] - pad[i][1] + pad[i][2], 1e-8);
  }
  for (int j = 0; j < 3; ++j) {
    Roof u = reroute(col_incl[j], st[0][j].metric_rep, st[1][j].metric_rep);
    Roof v = reroute(col_proj[j], st[1][j].metric_rep, st[2][j].metric_rep);
    HermTriangle t = split_triangle(st[0][j], st[1][j], st[2][j], u, v);
    CHECK_OK(t.check());
    col_cls[j] = class_of_triangle(t);
    CHECK_CLOSE(col_cls[j], pad[0][j] - pad[1][j] + pad[2][j], 1e-8);
  }

  double rows_alt = row_cls[0] - row_cls[1] + row_cls[2];
  double cols_alt = col_cls[0] - col_cls[1] + col_cls[2];
  double pads_alt = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pads_alt += (((i + j) % 2 == 0) ? 1.0 : -1.0) * pad[i][j];
  CHECK_CLOSE(rows_alt, cols_alt, 1e-8);
  CHECK_CLOSE(rows_alt, pads_alt, 1e-8);
}

TEST_CASE("tensoring with the unit structure changes nothing") {
  Rng rng(421);
  HermComplex c = random_complex(rng, small_spec());
  HermStructure h = torsor_add(HermStructure::native(c), 0.8);
  HermStructure unit =
      HermStructure::native(HermComplex::concentrated(HermSpace::standard(1), 0));
  HermStructure prod = tensor_structures(h, unit);
  CHECK_OK(prod.check());
  CHECK_CLOSE(structure_distance(prod, h), 0.0, 1e-9);
}

TEST_CASE("dual structure of a scaled line inverts the gram") {
  double c = 1.7;
  Mat g(1, 1);
  g(0, 0) = c * c;
  HermComplex line = HermComplex::concentrated(HermSpace(g), 0);
  HermStructure ds = dual_structure(HermStructure::native(line));
  CHECK_OK(ds.check());
  CHECK_CLOSE(std::real(ds.metric_rep.space(0).gram()(0, 0)), 1.0 / (c * c), 1e-12);
  CHECK_CLOSE(structure_distance(ds, HermStructure::native(dual(line))), 0.0, 1e-9);
}

TEST_CASE("hom of native structures is the native hom") {
  Rng rng(422);
  HermComplex a = random_complex(rng, small_spec());
  HermComplex b = random_complex(rng, small_spec());
  HermStructure hs = hom_structures(HermStructure::native(a), HermStructure::native(b));
  CHECK_OK(hs.check());
  CHECK_CLOSE(structure_distance(hs, HermStructure::native(hom_complex(a, b))), 0.0, 1e-8);
}

TEST_CASE("object complex of a single piece reproduces the piece") {
  Rng rng(423);
  HermComplex c({{0, random_space(rng, 2)}, {1, random_space(rng, 3)}}, {});
  ObjectComplex oc{{HermStructure::native(c)}, 0, {}};
  CHECK_OK(oc.check());
  HermStructure cls = class_of_object_complex(oc);
  CHECK_OK(cls.check());
  CHECK_CLOSE(structure_distance(cls, HermStructure::native(graded_cohomology(c))), 0.0,
              1e-9);
}

TEST_CASE("object complex with an identity connecting map is meager") {
  Rng rng(424);
  HermComplex a = HermComplex::concentrated(random_space(rng, 2), 0);
  ObjectComplex oc{{HermStructure::native(a), HermStructure::native(a)},
                   0,
                   {ChainMap::identity(a)}};
  CHECK_OK(oc.check());
  HermStructure cls = class_of_object_complex(oc);
  CHECK(cls.underlying.is_zero());
  CHECK(is_meager(cls.metric_rep));
}

TEST_CASE("object complex check rejects non-composable connecting data") {
  HermComplex a = HermComplex::concentrated(HermSpace::standard(2), 0);
  ObjectComplex bad{{HermStructure::native(a), HermStructure::native(a),
                     HermStructure::native(a)},
                    0,
                    {ChainMap::identity(a), ChainMap::identity(a)}};
  CHECK_FALSE(bad.check().empty());
}

TEST_CASE("cone of object complexes matches the hermitian cone of totalizations") {
  // Two two-piece object complexes with nilpotent connecting maps, a morphism
  // phi between them, and the three-piece cone complex they span.
  Mat n2 = Mat::Zero(2, 2);
  n2(0, 1) = 1.0;
  HermComplex a = HermComplex::concentrated(HermSpace::standard(2), 0);
  HermComplex b = HermComplex::concentrated(HermSpace::standard(2), 0);

  ChainMap de{a, a, {{0, n2}}};          // connecting of the source complex
  ChainMap dm{b, b, {{0, 0.7 * n2}}};    // connecting of the target complex
  Mat phi1 = n2, phi0 = 0.3 * n2;        // phi0 de = dm phi1 (all products vanish)

  ObjectComplex eps{{HermStructure::native(a), HermStructure::native(a)}, 0, {de}};
  ObjectComplex mu{{HermStructure::native(b), HermStructure::native(b)}, 0, {dm}};
  CHECK_OK(eps.check());
  CHECK_OK(mu.check());
  HermStructure ceps = class_of_object_complex(eps);
  HermStructure cmu = class_of_object_complex(mu);

  // Totalization chain map between the metric representatives.
  ChainMap big{ceps.metric_rep, cmu.metric_rep, {{-1, phi1}, {0, phi0}}};
  CHECK_OK(big.check());
  HermCone hc = herm_cone(ceps, cmu, Roof::lift(big));

  // The same cone as a three-piece object complex B <- B ⊥ A <- A.
  HermComplex ba = direct_sum(b, a);
  Mat d1 = Mat::Zero(2, 4);
  d1.leftCols(2) = 0.7 * n2;
  d1.rightCols(2) = phi0;
  Mat d2 = Mat::Zero(4, 2);
  d2.topRows(2) = phi1;
  d2.bottomRows(2) = -n2;
  ObjectComplex cone_oc{{HermStructure::native(b), HermStructure::native(ba),
                         HermStructure::native(a)},
                        0,
                        {ChainMap{ba, b, {{0, d1}}}, ChainMap{a, ba, {{0, d2}}}}};
  CHECK_OK(cone_oc.check());
  HermStructure iterated = class_of_object_complex(cone_oc);

  CHECK_CLOSE(structure_distance(iterated, hc.structure), 0.0, 1e-8);
}

TEST_CASE("cohomology metrics equal to the complex's own give the native structure") {
  Rng rng(425);
  HermComplex c({{-1, random_space(rng, 2)}, {0, random_space(rng, 3)}}, {});
  std::map<int, HermSpace> metrics;
  for (int i : c.degrees()) metrics[i] = HermSpace::standard(c.dim(i));
  HermStructure ind = cohomology_induced_structure(c, metrics);
  CHECK_OK(ind.check());
  CHECK_CLOSE(structure_distance(ind, HermStructure::native(c)), 0.0, 1e-8);
}

TEST_CASE("cohomology metrics move the structure by the alternating log volume") {
  Rng rng(426);
  for (int rep = 0; rep < 5; ++rep) {
    HermComplex c({{-1, random_space(rng, 2)}, {0, random_space(rng, 2)},
                   {1, random_space(rng, 1)}},
                  {});
    std::map<int, HermSpace> metrics;
    double expected = 0.0;
    for (int i : c.degrees()) {
      HermSpace m = random_space(rng, c.dim(i));
      metrics[i] = m;
      double sign = (i % 2 == 0) ? 1.0 : -1.0;
      expected += -sign * 0.5 * std::log(std::abs(m.gram().determinant()));
    }
    HermStructure ind = cohomology_induced_structure(c, metrics);
    CHECK_CLOSE(structure_distance(ind, HermStructure::native(c)), expected, 1e-8);
  }
}

TEST_CASE("an acyclic complex induces the empty structure") {
  Rng rng(427);
  HermComplex c = random_acyclic(rng);
  HermStructure ind = cohomology_induced_structure(c, {});
  CHECK_OK(ind.check());
  CHECK(ind.metric_rep.is_zero());
}

TEST_CASE("cohomology metrics with differentials in play") {
  Rng rng(428);
  // One nontrivial differential: cohomology in two degrees.
  Mat d(2, 2);
  d.setZero();
  d(0, 0) = 1.3;
  HermComplex c({{0, HermSpace::standard(2)}, {1, HermSpace::standard(2)}}, {{0, d}});
  CohomologyInfo h = cohomology(c);
  REQUIRE(h.dim(0) == 1);
  REQUIRE(h.dim(1) == 1);

  std::map<int, HermSpace> metrics;
  Mat m0(1, 1), m1(1, 1);
  m0(0, 0) = 2.0;
  m1(0, 0) = 5.0;
  metrics[0] = HermSpace(m0);
  metrics[1] = HermSpace(m1);
  HermStructure ind = cohomology_induced_structure(c, metrics);
  CHECK_OK(ind.check());

  std::map<int, HermSpace> own;
  own[0] = HermSpace::standard(1);
  own[1] = HermSpace::standard(1);
  HermStructure base = cohomology_induced_structure(c, own);
  double expected = -0.5 * std::log(2.0) + 0.5 * std::log(5.0);
  CHECK_CLOSE(structure_distance(ind, base), expected, 1e-8);
}

TEST_CASE("transport matches the induced structure of transformed metrics") {
  Rng rng(429);
  // Zero-differential case with an invertible chain map.
  HermComplex c = HermComplex::concentrated(random_space(rng, 2), 0);
  HermComplex e = HermComplex::concentrated(random_space(rng, 2), 0);
  ChainMap f{c, e, {{0, random_matrix(rng, 2, 2) + 3.0 * Mat::Identity(2, 2)}}};
  REQUIRE(is_quasi_iso(f));

  Mat m = random_space(rng, 2).gram();
  Mat atil = cohomology_map(f).at(0);
  Mat atil_inv = atil.inverse();
  Mat nmat = atil_inv.adjoint() * m * atil_inv;

  HermStructure ind_c = cohomology_induced_structure(c, {{0, HermSpace(m)}});
  HermStructure ind_e = cohomology_induced_structure(e, {{0, HermSpace(nmat)}});
  HermStructure moved = parallel_transport(Roof::lift(f), ind_c);
  CHECK_CLOSE(structure_distance(moved, ind_e), 0.0, 1e-8);
}

TEST_CASE("transport matches induced metrics through a quasi-isomorphism") {
  Rng rng(430);
  HermComplex c({{0, random_space(rng, 2)}, {1, random_space(rng, 2)}}, {});
  HermComplex e = regrammed(rng, c);
  ChainMap f = random_quasi_iso(rng, c, e);
  auto amap = cohomology_map(f);

  std::map<int, HermSpace> mc, me;
  for (int i : c.degrees()) {
    Mat m = random_space(rng, c.dim(i)).gram();
    Mat ai = amap.at(i).inverse();
    mc[i] = HermSpace(m);
    me[i] = HermSpace(ai.adjoint() * m * ai);
  }
  HermStructure moved = parallel_transport(Roof::lift(f), cohomology_induced_structure(c, mc));
  HermStructure direct = cohomology_induced_structure(e, me);
  CHECK_CLOSE(structure_distance(moved, direct), 0.0, 1e-8);
}
