// The acyclic cone calculus: class arithmetic, the randomized rule verifier
// (including its sabotage hook, so the verifier itself is under test), the
// universal-factorization checker, and the naive-determinant negative control.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <algorithm>

#include "herm/acyccalc.hpp"

using namespace herm;

namespace {

const std::vector<std::string> kRuleNames = {
    "shift-inverse",  "sum-additivity", "cone-acyclic-src",
    "cone-acyclic-tgt", "square-cones", "composition",
    "ses-additivity", "double-complex", "negative-control"};

const RuleResult* find_rule(const VerifyReport& rep, const std::string& name) {
  for (const RuleResult& r : rep.rules)
    if (r.rule == name) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("class coordinates follow the group structure") {
  CHECK_CLOSE(ka_class(HermComplex::generator(1.25)).coord, 1.25, 1e-12);

  Rng rng(301);
  HermComplex f = random_acyclic(rng);
  CHECK_CLOSE(ka_class(direct_sum(f, shift(f, 1))).coord, 0.0, 1e-10);

  KAClass a{0.5}, b{2.0};
  CHECK_CLOSE((a + b).coord, 2.5, 0.0);
  CHECK_CLOSE((a - b).coord, -1.5, 0.0);
  CHECK_CLOSE((-a).coord, -0.5, 0.0);
}

TEST_CASE("the rule verifier covers every rule and passes cleanly") {
  VerifyOptions opt;
  opt.seed = 7;
  opt.cases = 60;
  VerifyReport rep = verify_calculus(opt);
  CHECK(rep.all_pass());
  CHECK(rep.rules.size() == kRuleNames.size());

  for (const std::string& name : kRuleNames) {
    const RuleResult* r = find_rule(rep, name);
    REQUIRE_MESSAGE(r != nullptr, name);
    CHECK_MESSAGE(r->pass, name << ": " << r->note);
    CHECK(r->cases > 0);
    if (name != "negative-control") CHECK_MESSAGE(r->max_residual <= 1e-8, name);
  }
}

TEST_CASE("the verifier is itself verified: sabotage must be caught") {
  for (const std::string& victim : {std::string("sum-additivity"), std::string("composition")}) {
    VerifyOptions opt;
    opt.seed = 11;
    opt.cases = 30;
    opt.sabotage = victim;
    VerifyReport rep = verify_calculus(opt);
    CHECK_FALSE(rep.all_pass());
    const RuleResult* r = find_rule(rep, victim);
    REQUIRE(r != nullptr);
    CHECK_FALSE(r->pass);
    CHECK_FALSE(r->note.empty());

    // Only the sabotaged rule may fail.
    for (const RuleResult& other : rep.rules)
      if (other.rule != victim) CHECK_MESSAGE(other.pass, other.rule);
  }
}

TEST_CASE("different seeds still pass the full calculus") {
  for (std::uint64_t seed : {1ull, 1234567ull}) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.cases = 25;
    CHECK(verify_calculus(opt).all_pass());
  }
}

TEST_CASE("the determinant-norm invariant satisfies the factorization axioms") {
  AcyclicFunctional phi = [](const HermComplex& c) { return tau_value(c); };
  FactorizationReport rep = universal_factorization(phi, 401, 60, 1e-9);
  CHECK(rep.normalization_ok);
  CHECK(rep.additivity_ok);
  CHECK(rep.factors);
  CHECK(rep.max_normalization_residual <= 1e-9);
  CHECK(rep.max_additivity_residual <= 1e-9);
  CHECK(rep.max_factorization_residual <= 1e-9);
  CHECK(rep.counterexample.empty());
}

TEST_CASE("scalar multiples of the invariant also factor") {
  AcyclicFunctional twice = [](const HermComplex& c) { return 2.0 * tau_value(c); };
  FactorizationReport rep = universal_factorization(twice, 402, 60, 1e-9);
  CHECK(rep.normalization_ok);
  CHECK(rep.additivity_ok);
  CHECK(rep.factors);
}

TEST_CASE("a rank functional fails the normalization axiom with a counterexample") {
  AcyclicFunctional rank = [](const HermComplex& c) {
    return static_cast<double>(c.total_dim());
  };
  FactorizationReport rep = universal_factorization(rank, 403, 60, 1e-9);
  CHECK_FALSE(rep.normalization_ok);
  CHECK_FALSE(rep.counterexample.empty());
}

TEST_CASE("the naive determinant functional matches tau only on acyclic input") {
  Rng rng(302);
  for (int rep = 0; rep < 20; ++rep) {
    HermComplex c = random_acyclic(rng);
    CHECK_CLOSE(naive_determinant_functional(c), tau_value(c), 1e-8);
  }
}

TEST_CASE("negative control: cones of Id and of 0 differ in class but not naively") {
  HermComplex c = HermComplex::concentrated(HermSpace::standard(2), 0);
  HermComplex cone_id = cone(ChainMap::identity(c));
  HermComplex cone_zero = cone(ChainMap::zero(c, c));

  CHECK(is_meager(cone_id));
  CHECK_FALSE(is_meager(cone_zero));
  CHECK_THROWS_AS(tau(cone_zero), precondition_error);

  // The naive extension sees no difference, which is exactly why the calculus
  // is restricted to acyclic complexes.
  double gap = std::abs(naive_determinant_functional(cone_id) -
                        naive_determinant_functional(cone_zero));
  CHECK(gap <= 1e-12);
}
