// The determinant-norm invariant tau and its calculus on single complexes:
// calibration values, additivity, shift antisymmetry, agreement with an
// analytic-torsion oracle, the generator reduction, and tight relatedness.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "herm/torsion.hpp"

using namespace herm;
using herm_test::ray_singer_tau;

TEST_CASE("tau of the scaling generator is the exponent") {
  for (double a : {-2.0, -0.5, 0.0, 1.0, 3.5})
    CHECK_CLOSE(tau_value(HermComplex::generator(a)), a, 1e-12);
}

TEST_CASE("tau of an orthogonal sum of generators adds the exponents") {
  for (double a : {-1.5, 0.25}) {
    for (double b : {0.75, 2.0}) {
      HermComplex c = direct_sum(HermComplex::generator(a), HermComplex::generator(b));
      CHECK_CLOSE(tau_value(c), a + b, 1e-12);
    }
  }
}

TEST_CASE("tau of the cone of an identity vanishes") {
  Rng rng(201);
  for (int rep = 0; rep < 5; ++rep) {
    HermComplex c = random_complex(rng);
    CHECK_CLOSE(tau_value(cone(ChainMap::identity(c))), 0.0, 1e-10);
  }
}

TEST_CASE("per-degree contributions sum to the value") {
  Rng rng(202);
  for (int rep = 0; rep < 10; ++rep) {
    TauValue t = tau(random_acyclic(rng));
    double s = 0.0;
    for (auto& [i, v] : t.per_degree) s += v;
    CHECK_CLOSE(t.value, s, 1e-12);
    CHECK_FALSE(t.rank_ambiguous);
  }
}

TEST_CASE("tau agrees with the laplacian determinant oracle") {
  Rng rng(203);
  // Sweep lengths, ranks and metric spreads; the oracle computes from
  // Laplacian determinants, the library from the Hodge transition blocks.
  for (int len = 2; len <= 4; ++len) {
    for (int rank = 1; rank <= 2; ++rank) {
      for (double spread : {0.5, 1.5}) {
        AcyclicSpec spec;
        spec.lo = -1;
        spec.len = len;
        spec.max_rank = rank;
        spec.sigma_spread = spread;
        for (int rep = 0; rep < 10; ++rep) {
          HermComplex c = random_acyclic(rng, spec);
          CHECK_CLOSE(tau_value(c), ray_singer_tau(c), 1e-8);
        }
      }
    }
  }
}

TEST_CASE("shift negates tau and orthogonal sum adds it") {
  Rng rng(204);
  for (int rep = 0; rep < 10; ++rep) {
    HermComplex a = random_acyclic(rng);
    HermComplex b = random_acyclic(rng);
    double ta = tau_value(a), tb = tau_value(b);
    CHECK_CLOSE(tau_value(shift(a, 1)), -ta, 1e-10);
    CHECK_CLOSE(tau_value(shift(a, -2)), ta, 1e-10);
    CHECK_CLOSE(tau_value(direct_sum(a, b)), ta + tb, 1e-9);
  }
}

TEST_CASE("tau rejects complexes with cohomology") {
  CHECK_THROWS_AS(tau(HermComplex::concentrated(HermSpace::standard(2), 0)),
                  precondition_error);
  Rng rng(205);
  ComplexSpec spec;
  spec.max_harmonic = 2;
  HermComplex c = random_complex(rng, spec);
  if (!cohomology(c).all_zero()) CHECK_THROWS_AS(tau(c), precondition_error);
}

TEST_CASE("a transition scale inside the rank decision band raises the flag") {
  Mat d(2, 2);
  d.setZero();
  d(0, 0) = 1.0;
  d(1, 1) = 5e-8;  // between the relative cut and the band ceiling
  HermComplex c({{0, HermSpace::standard(2)}, {1, HermSpace::standard(2)}}, {{0, d}});
  TauValue t = tau(c);
  CHECK(t.rank_ambiguous);
}

TEST_CASE("meager means acyclic with vanishing class") {
  Rng rng(206);
  HermComplex f = random_acyclic(rng);
  CHECK(is_meager(direct_sum(f, shift(f, 1))));
  CHECK(is_meager(HermComplex::zero()));
  CHECK(is_meager(cone(ChainMap::identity(random_complex(rng)))));
  CHECK_FALSE(is_meager(HermComplex::generator(0.7)));
  CHECK_FALSE(is_meager(HermComplex::concentrated(HermSpace::standard(1), 0)));
}

TEST_CASE("tightness of chain maps: isometries yes, scalings no") {
  CHECK(is_tight(ChainMap::identity(HermComplex::generator(1.2))));

  // r Id from the standard line to the line with gram 1/r^2 preserves norms.
  double r = 2.0;
  HermComplex src = HermComplex::concentrated(HermSpace::standard(1), 0);
  Mat g(1, 1);
  g(0, 0) = 1.0 / (r * r);
  HermComplex tgt = HermComplex::concentrated(HermSpace(g), 0);
  ChainMap iso{src, tgt, {{0, r * Mat::Identity(1, 1)}}};
  CHECK(is_tight(iso));

  // The same map onto the standard line scales norms and is not tight.
  ChainMap scaled{src, src, {{0, std::exp(0.4) * Mat::Identity(1, 1)}}};
  CHECK_FALSE(is_tight(scaled));

  // Zero map between non-acyclic complexes is not even a quasi-isomorphism.
  CHECK_FALSE(is_tight(ChainMap::zero(src, src)));
}

TEST_CASE("generator reduction of a generator is a single step") {
  GeneratorDecomposition gd = reduce_to_generators(HermComplex::generator(1.7));
  REQUIRE(gd.steps.size() == 1);
  CHECK(gd.steps[0].degree == 0);
  CHECK_CLOSE(gd.steps[0].a, 1.7, 1e-12);
  CHECK_CLOSE(gd.alternating_sum(), 1.7, 1e-12);
}

TEST_CASE("generator reduction of a sum of generators") {
  HermComplex c = direct_sum(HermComplex::generator(0.4), HermComplex::generator(-1.1));
  GeneratorDecomposition gd = reduce_to_generators(c);
  REQUIRE(gd.steps.size() == 2);
  double hand = 0.0;
  for (auto& st : gd.steps) {
    CHECK(st.degree == 0);
    hand += st.a;
  }
  CHECK_CLOSE(hand, 0.4 - 1.1, 1e-10);
}

TEST_CASE("generator reduction recovers tau on random acyclic complexes") {
  Rng rng(207);
  for (int rep = 0; rep < 50; ++rep) {
    AcyclicSpec spec;
    spec.lo = rng.uniform_int(-2, 0);
    spec.len = rng.uniform_int(2, 4);
    spec.max_rank = 2;
    HermComplex c = random_acyclic(rng, spec);
    GeneratorDecomposition gd = reduce_to_generators(c);

    double hand = 0.0;
    for (auto& st : gd.steps) hand += ((st.degree % 2 == 0) ? 1.0 : -1.0) * st.a;
    CHECK_CLOSE(gd.alternating_sum(), hand, 1e-12);
    CHECK_CLOSE(hand, tau_value(c), 1e-8);
  }
}

TEST_CASE("tight relatedness accepts meager padding and class-equal pairs") {
  Rng rng(208);
  HermComplex c = random_complex(rng);
  HermComplex pad = cone(ChainMap::identity(random_acyclic(rng)));
  TightRelation tr = tightly_related(c, direct_sum(c, pad));
  CHECK(tr.related);
  CHECK(tr.residual <= 1e-8);

  // Equal-class acyclic pair of different shapes.
  TightRelation eq =
      tightly_related(HermComplex::generator(0.5), shift(HermComplex::generator(-0.5), 1));
  CHECK(eq.related);

  // A norm-scaled line is related to the standard one through the rescaled witness.
  Mat g(1, 1);
  g(0, 0) = 0.25;
  TightRelation line = tightly_related(HermComplex::concentrated(HermSpace::standard(1), 0),
                                       HermComplex::concentrated(HermSpace(g), 0));
  CHECK(line.related);
}

TEST_CASE("tight relatedness rejects class and dimension mismatches") {
  TightRelation cls = tightly_related(HermComplex::generator(0.3), HermComplex::generator(0.9));
  CHECK_FALSE(cls.related);
  CHECK_FALSE(cls.reason.empty());

  TightRelation dims = tightly_related(HermComplex::concentrated(HermSpace::standard(1), 0),
                                       HermComplex::concentrated(HermSpace::standard(2), 0));
  CHECK_FALSE(dims.related);
  CHECK_FALSE(dims.reason.empty());
}
