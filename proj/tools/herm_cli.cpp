// Command line front end: computes determinant-norm invariants of hermitian
// complexes, runs the randomized verification suites, and evaluates classes
// of roofs, triangles and toy morphism chains stored in JSON bundles.
//
// Exit codes: 0 success, 1 a verification failed, 2 invalid input,
// 3 violated precondition (non-acyclic input to tau and friends).

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "herm/json_io.hpp"

namespace {

using namespace herm;

struct Output {
  std::string format = "text";
  std::string out_path;

  void to_file(const json& j) const {
    if (out_path.empty()) return;
    std::ofstream f(out_path);
    if (!f) throw invalid_input("cannot write '" + out_path + "'");
    f << j.dump(2) << "\n";
  }

  // every command builds a json value; text mode renders it shallowly
  void emit(const json& j, bool text_render = true) const {
    to_file(j);
    if (format == "json") {
      std::cout << j.dump(2) << "\n";
      return;
    }
    if (!text_render) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::cout << it.key() << ": ";
      if (it.value().is_number_float())
        std::cout << std::setprecision(15) << it.value().get<double>();
      else
        std::cout << it.value().dump();
      std::cout << "\n";
    }
  }
};

const HermComplex& pick_complex(const Bundle& b, const std::string& name) {
  if (!name.empty()) {
    auto it = b.complexes.find(name);
    if (it == b.complexes.end())
      throw invalid_input("no complex named '" + name + "' in the bundle");
    return it->second;
  }
  if (b.complexes.size() != 1)
    throw invalid_input("bundle has " + std::to_string(b.complexes.size()) +
                        " complexes; pick one with --name");
  return b.complexes.begin()->second;
}

void require_valid(const HermComplex& c, const Tol& tol, const std::string& what) {
  std::string err = c.check(tol);
  if (!err.empty()) throw invalid_input(what + ": " + err);
}

// --- verification suites -------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool pass = false;
  int cases = 0;
  double worst = 0.0;
  std::string note;
};

void print_suite(const SuiteResult& r) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(28) << r.name
            << " cases=" << r.cases << " worst=" << std::setprecision(3)
            << std::scientific << r.worst << std::defaultfloat;
  if (!r.note.empty()) std::cout << "  [" << r.note << "]";
  std::cout << "\n";
}

std::vector<SuiteResult> run_acyclic_calculus(std::uint64_t seed, int cases,
                                              const Tol& tol,
                                              const std::string& sabotage) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.cases = cases;
  opt.tol = tol;
  opt.sabotage = sabotage;
  VerifyReport rep = verify_calculus(opt);
  std::vector<SuiteResult> out;
  for (const RuleResult& r : rep.rules)
    out.push_back({"calculus/" + r.rule, r.pass, r.cases, r.max_residual, r.note});

  // the determinant-norm functional and a scalar multiple must both pass the
  // factorization axioms; the rank functional must fail at normalization
  Tol t2 = tol;
  auto tau_fn = [&](const HermComplex& c) { return tau(c, t2).value; };
  auto tau2_fn = [&](const HermComplex& c) { return 2.0 * tau(c, t2).value; };
  auto rank_fn = [&](const HermComplex& c) {
    double r = 0;
    for (int i : c.degrees()) r += c.dim(i);
    return r;
  };
  FactorizationReport f1 = universal_factorization(tau_fn, seed ^ 0x51u, cases, 1e-9, tol);
  out.push_back({"factorization/tau", f1.normalization_ok && f1.additivity_ok && f1.factors,
                 cases,
                 std::max({f1.max_normalization_residual, f1.max_additivity_residual,
                           f1.max_factorization_residual}),
                 f1.counterexample});
  FactorizationReport f2 = universal_factorization(tau2_fn, seed ^ 0x52u, cases, 1e-9, tol);
  out.push_back({"factorization/2tau", f2.normalization_ok && f2.additivity_ok && f2.factors,
                 cases,
                 std::max({f2.max_normalization_residual, f2.max_additivity_residual,
                           f2.max_factorization_residual}),
                 f2.counterexample});
  FactorizationReport f3 = universal_factorization(rank_fn, seed ^ 0x53u, cases, 1e-9, tol);
  out.push_back({"factorization/rank-rejected", !f3.normalization_ok, cases,
                 f3.max_normalization_residual,
                 f3.normalization_ok ? "rank functional slipped through normalization" : ""});
  return out;
}

// strict cone triangle with native structures; returns the triangle and the
// torsor shift applied to the third vertex
struct TriangleCase {
  HermTriangle t;
  double shift_applied = 0.0;
};

TriangleCase random_strict_triangle(Rng& rng, bool shifted) {
  ComplexSpec spec;
  spec.lo = rng.uniform_int(-1, 0);
  spec.len = rng.uniform_int(2, 3);
  spec.max_rank = 2;
  spec.max_harmonic = 1;
  HermComplex e = random_complex(rng, spec);
  HermComplex fc = random_complex(rng, spec);
  ChainMap m = random_chain_map(rng, e, fc);
  HermComplex cn = cone(m);

  HermTriangle t;
  t.f = HermStructure::native(e);
  t.g = HermStructure::native(fc);
  t.h = HermStructure::native(cn);
  t.u = Roof::lift(m);
  t.v = Roof::lift(cone_inclusion(m));
  t.w = Roof::lift(cone_projection(m));

  TriangleCase out;
  if (shifted) {
    out.shift_applied = rng.uniform(-1.5, 1.5);
    HermStructure h2 = torsor_add(t.h, out.shift_applied);
    // reroute v and w through the padded metric representative
    ChainMap incl{cn, h2.metric_rep, {}};
    ChainMap proj{h2.metric_rep, cn, {}};
    for (int i : h2.metric_rep.degrees()) {
      int n = cn.dim(i);
      if (n == 0) continue;
      Mat mi = Mat::Zero(h2.metric_rep.dim(i), n);
      mi.topRows(n).setIdentity();
      incl.maps[i] = mi;
      proj.maps[i] = mi.adjoint();
    }
    t.v = compose_roofs(t.v, Roof::lift(incl));
    t.w = compose_roofs(Roof::lift(proj), t.w);
    t.h = h2;
  }
  out.t = std::move(t);
  return out;
}

std::vector<SuiteResult> run_triangle_classes(std::uint64_t seed, int cases,
                                              const Tol& tol) {
  Rng master(seed);
  SuiteResult strict{"triangles/strict-cone-zero", false, 0, 0.0, ""};
  SuiteResult torsor{"triangles/torsor-shift", false, 0, 0.0, ""};
  SuiteResult rot{"triangles/rotation-negates", false, 0, 0.0, ""};
  for (int c = 0; c < cases; ++c) {
    Rng rng = master.fork();
    TriangleCase base = random_strict_triangle(rng, false);
    double cls = class_of_triangle(base.t, tol);
    strict.worst = std::max(strict.worst, std::abs(cls));
    ++strict.cases;

    Rng rng2 = master.fork();
    TriangleCase moved = random_strict_triangle(rng2, true);
    double cls2 = class_of_triangle(moved.t, tol);
    torsor.worst = std::max(torsor.worst, std::abs(cls2 - moved.shift_applied));
    ++torsor.cases;

    double cls3 = class_of_triangle(rotate(moved.t, tol), tol);
    rot.worst = std::max(rot.worst, std::abs(cls3 + cls2));
    ++rot.cases;
  }
  strict.pass = strict.cases > 0 && strict.worst <= tol.tau * 10;
  torsor.pass = torsor.cases > 0 && torsor.worst <= tol.tau * 10;
  rot.pass = rot.cases > 0 && rot.worst <= tol.tau * 10;
  return {strict, torsor, rot};
}

std::vector<SuiteResult> run_cone_welldef(std::uint64_t seed, int cases, const Tol& tol) {
  Rng master(seed);
  SuiteResult res{"cones/roof-independence", false, 0, 0.0, ""};
  for (int c = 0; c < cases; ++c) {
    Rng rng = master.fork();
    ComplexSpec spec;
    spec.len = rng.uniform_int(2, 3);
    spec.max_rank = 2;
    spec.max_harmonic = 1;
    HermComplex src = random_complex(rng, spec);
    HermComplex tgt = random_complex(rng, spec);
    AcyclicSpec pad;
    pad.lo = spec.lo;
    pad.len = 2;
    pad.max_rank = 1;

    auto padded_roof = [&](const HermComplex& extra) {
      HermComplex mid = direct_sum(src, extra);
      ChainMap s{mid, src, {}};
      for (int i : src.degrees()) {
        Mat m = Mat::Zero(src.dim(i), mid.dim(i));
        m.leftCols(src.dim(i)).setIdentity();
        s.maps[i] = m;
      }
      ChainMap g = random_chain_map(rng, mid, tgt);
      return Roof{s, g};
    };

    Roof r1 = padded_roof(random_acyclic(rng, pad));
    // same derived morphism: restrict r1 to the unpadded middle, repad with a
    // different acyclic, and add a null-homotopic perturbation to the leg
    HermComplex extra2 = random_acyclic(rng, pad);
    HermComplex mid2 = direct_sum(r1.middle(), extra2);
    ChainMap p2{mid2, r1.middle(), {}};
    for (int i : r1.middle().degrees()) {
      Mat m = Mat::Zero(r1.middle().dim(i), mid2.dim(i));
      m.leftCols(r1.middle().dim(i)).setIdentity();
      p2.maps[i] = m;
    }
    Homotopy hh = random_homotopy(rng, mid2, tgt, 0.4);
    Roof r2{compose(r1.s, p2), add(compose(r1.g, p2), hh.boundary())};

    HermCone c1 = herm_cone(HermStructure::native(src), HermStructure::native(tgt), r1, tol);
    HermCone c2 = herm_cone(HermStructure::native(src), HermStructure::native(tgt), r2, tol);
    double d = cone_welldefinedness_distance(c1, c2, tol);
    res.worst = std::max(res.worst, std::abs(d));
    ++res.cases;
  }
  res.pass = res.cases > 0 && res.worst <= tol.tau * 10;
  return {res};
}

std::vector<SuiteResult> run_osm_assoc(std::uint64_t seed, int cases, const Tol& tol) {
  osm::AssociativityReport rep = osm::verify_associativity(seed, cases, tol.tau * 10, tol);
  return {{"osm/associativity", rep.pass, rep.cases, rep.max_defect, ""}};
}

std::vector<SuiteResult> run_genera(std::uint64_t seed, int cases, const Tol&) {
  Rng rng(seed);
  SuiteResult res{"genera/exact-series", false, 0, 0.0, ""};
  bool ok = true;
  const int order = 12;

  TruncSeries td = todd_series(order);
  // td * (1 - e^{-x})/x == 1 exactly
  TruncSeries denom = TruncSeries::zero(order);
  {
    std::vector<Rational> c(order + 1);
    Rational fact = 1;
    for (int k = 0; k <= order; ++k) {
      fact *= k + 1;
      c[k] = Rational((k % 2) ? -1 : 1) / fact;
    }
    denom = TruncSeries(order, std::move(c));
  }
  if (!(td * denom == TruncSeries::one(order))) {
    ok = false;
    res.note = "todd reciprocal identity failed";
  }
  if (td[0] != 1 || td[1] != Rational(1, 2) || td[2] != Rational(1, 12) ||
      td[3] != 0 || td[4] != Rational(-1, 720)) {
    ok = false;
    res.note = "low todd coefficients wrong";
  }
  // (e^t - 1)/t * t == e^t - 1 exactly
  TruncSeries corr = multiplicative_correction_series(order);
  TruncSeries expm1 = TruncSeries::x(order).exp() - TruncSeries::one(order);
  if (!(corr * TruncSeries::x(order) == expm1)) {
    ok = false;
    res.note = "correction series identity failed";
  }

  for (int c = 0; c < std::max(1, cases / 10); ++c) {
    std::vector<Rational> coeffs(order + 1);
    coeffs[0] = 1;
    for (int k = 1; k <= order; ++k)
      coeffs[k] = Rational(rng.uniform_int(-5, 5), rng.uniform_int(1, 7));
    TruncSeries s(order, coeffs);
    if (!(s.log().exp() == s)) {
      ok = false;
      res.note = "exp(log) round trip failed";
      break;
    }
    GenusSpec mult{s, 1.0};
    KAClass x{rng.uniform(-2.0, 2.0)};
    double a = psi_m_tilde_point(mult, x);
    double b = bott_chern_point(additive_from_multiplicative(mult), x);
    res.worst = std::max(res.worst, std::abs(a - b));
    ++res.cases;
  }
  res.pass = ok && res.worst == 0.0;
  return {res};
}

int run_verify(const std::string& suite, std::uint64_t seed, int cases, const Tol& tol,
               const std::string& sabotage, const Output& out) {
  std::vector<SuiteResult> all;
  auto want = [&](const char* s) { return suite == "all" || suite == s; };
  if (want("acyclic-calculus")) {
    auto r = run_acyclic_calculus(seed, cases, tol, sabotage);
    all.insert(all.end(), r.begin(), r.end());
  }
  if (want("triangle-classes")) {
    auto r = run_triangle_classes(seed + 1, std::max(1, cases / 4), tol);
    all.insert(all.end(), r.begin(), r.end());
  }
  if (want("cone-welldef")) {
    auto r = run_cone_welldef(seed + 2, std::max(1, cases / 4), tol);
    all.insert(all.end(), r.begin(), r.end());
  }
  if (want("osm-assoc")) {
    auto r = run_osm_assoc(seed + 3, std::max(1, cases / 10), tol);
    all.insert(all.end(), r.begin(), r.end());
  }
  if (want("genera")) {
    auto r = run_genera(seed + 4, cases, tol);
    all.insert(all.end(), r.begin(), r.end());
  }
  if (all.empty())
    throw invalid_input("unknown suite '" + suite +
                        "' (acyclic-calculus, triangle-classes, cone-welldef, "
                        "osm-assoc, genera, all)");

  bool pass = true;
  json jr = json::array();
  for (const SuiteResult& r : all) {
    pass = pass && r.pass;
    auto slash = r.name.find('/');
    json line{{"suite", r.name.substr(0, slash)},
              {"rule", slash == std::string::npos ? "" : r.name.substr(slash + 1)},
              {"cases", r.cases}, {"residual", r.worst}, {"pass", r.pass},
              {"seed", seed}};
    if (!r.note.empty()) line["note"] = r.note;
    jr.push_back(line);
    // one record per rule: json mode streams them as JSON lines
    if (out.format == "json")
      std::cout << line.dump() << "\n";
    else
      print_suite(r);
  }
  out.to_file(json{{"suites", jr}, {"pass", pass}});
  if (out.format == "json")
    std::cout << json{{"pass", pass}}.dump() << "\n";
  else
    std::cout << (pass ? "all suites passed" : "some suites FAILED") << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"determinant-norm calculator for hermitian cochain complexes"};
  app.require_subcommand(1);

  std::string in_path, name, format = "text", out_path;
  std::uint64_t seed = 42;
  int cases = 200;
  double class_tol = 1e-8;
  std::string suite = "all", sabotage;

  auto add_io = [&](CLI::App* cmd, bool needs_in) {
    if (needs_in) cmd->add_option("--in", in_path, "input bundle (JSON)")->required();
    cmd->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", out_path, "also write the JSON result to this file");
  };

  CLI::App* tau_cmd = app.add_subcommand("tau", "determinant norm of an acyclic complex");
  add_io(tau_cmd, true);
  tau_cmd->add_option("--name", name, "complex name inside the bundle");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run randomized verification suites");
  add_io(verify_cmd, false);
  verify_cmd->add_option("--suite", suite,
                         "acyclic-calculus, triangle-classes, cone-welldef, osm-assoc, "
                         "genera or all");
  verify_cmd->add_option("--seed", seed, "PRNG seed");
  verify_cmd->add_option("--cases", cases, "cases per rule")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--tol", class_tol, "class comparison tolerance");
  verify_cmd->add_option("--sabotage", sabotage, "corrupt one instance of the named rule")
      ->group("");

  CLI::App* cone_cmd = app.add_subcommand("cone", "cone of a chain map from a bundle");
  add_io(cone_cmd, true);
  cone_cmd->add_option("--map", name, "map name inside the bundle")->required();

  CLI::App* iso_cmd = app.add_subcommand("class-iso", "class of an isomorphism roof");
  add_io(iso_cmd, true);
  iso_cmd->add_option("--roof", name, "roof name inside the bundle")->required();

  CLI::App* tri_cmd = app.add_subcommand("class-triangle", "class of a distinguished triangle");
  // --h names the third vertex, so this subcommand only offers long-form help
  tri_cmd->set_help_flag("--help", "print help");
  add_io(tri_cmd, true);
  std::string tf, tg, th, tu, tv, tw;
  tri_cmd->add_option("--f", tf, "source structure name")->required();
  tri_cmd->add_option("--g", tg, "target structure name")->required();
  tri_cmd->add_option("--h", th, "third vertex structure name")->required();
  tri_cmd->add_option("--u", tu, "roof rep(f) -> rep(g)")->required();
  tri_cmd->add_option("--v", tv, "roof rep(g) -> rep(h)")->required();
  tri_cmd->add_option("--w", tw, "roof rep(h) -> rep(f)[1]")->required();

  CLI::App* dist_cmd = app.add_subcommand("distance", "signed distance of two structures");
  add_io(dist_cmd, true);
  std::string sa, sb;
  dist_cmd->add_option("--a", sa, "first structure name")->required();
  dist_cmd->add_option("--b", sb, "second structure name")->required();

  CLI::App* todd_cmd = app.add_subcommand("todd", "Todd series coefficients");
  add_io(todd_cmd, false);
  int order = 12;
  todd_cmd->add_option("--order", order, "truncation order")->check(CLI::NonNegativeNumber);

  CLI::App* comp_cmd = app.add_subcommand("compose", "compose a toy morphism chain");
  add_io(comp_cmd, true);
  comp_cmd->add_option("--chain", name, "chain name inside the bundle")->required();
  comp_cmd->add_option("--tol", class_tol, "class comparison tolerance");
  bool check_assoc = false;
  comp_cmd->add_flag("--check-assoc", check_assoc,
                     "also compose with the opposite association order and report "
                     "the structure distance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Tol tol;
  tol.tau = class_tol;
  Output out{format, out_path};

  try {
    if (tau_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      const HermComplex& c = pick_complex(b, name);
      require_valid(c, tol, "complex");
      TauValue t = tau(c, tol);
      json per = json::object();
      for (auto& [i, v] : t.per_degree) per[std::to_string(i)] = v;
      json j{{"tau", t.value}, {"per_degree", per}};
      if (out.format == "text") {
        // the value itself is the text contract, fixed twelve decimals
        std::cout << std::fixed << std::setprecision(12) << t.value
                  << std::defaultfloat << "\n";
        out.emit(j, false);
      } else {
        out.emit(j);
      }
      return 0;
    }
    if (verify_cmd->parsed())
      return run_verify(suite, seed, cases, tol, sabotage, out);
    if (cone_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      ChainMap f = make_chain_map(b, name);
      std::string err = f.check(tol);
      if (!err.empty()) throw invalid_input("map '" + name + "': " + err);
      HermComplex cn = cone(f);
      json j{{"cone", to_json(cn)}, {"meager", is_meager(cn, tol)}};
      if (cohomology(cn, tol).all_zero()) j["tau"] = tau(cn, tol).value;
      out.emit(j);
      return 0;
    }
    if (iso_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      Roof r = make_roof(b, name);
      out.emit(json{{"class", class_of_iso(r, tol)}});
      return 0;
    }
    if (tri_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      HermTriangle t{make_structure(b, tf), make_structure(b, tg), make_structure(b, th),
                     make_roof(b, tu), make_roof(b, tv), make_roof(b, tw)};
      out.emit(json{{"class", class_of_triangle(t, tol)}});
      return 0;
    }
    if (dist_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      double d = structure_distance(make_structure(b, sa), make_structure(b, sb), tol);
      out.emit(json{{"distance", d}});
      return 0;
    }
    if (todd_cmd->parsed()) {
      TruncSeries td = todd_series(order);
      json coeffs = json::array(), approx = json::array();
      for (int k = 0; k <= order; ++k) {
        std::ostringstream ss;
        ss << td[k];
        coeffs.push_back(ss.str());
        approx.push_back(td[k].convert_to<double>());
      }
      out.emit(json{{"order", order}, {"coefficients", coeffs}, {"decimal", approx}});
      return 0;
    }
    if (comp_cmd->parsed()) {
      Bundle b = load_bundle(in_path);
      std::vector<osm::ToyMorphism> chain = make_chain(b, name);
      osm::ToyMorphism acc = chain.front();
      for (size_t k = 1; k < chain.size(); ++k) acc = osm::compose(chain[k], acc, tol);
      osm::ToyMorphism ambient = osm::ambient_morphism(acc.source, acc.target, acc.df);
      double d = structure_distance(acc.tangent, ambient.tangent, tol);
      json j{{"source", acc.source.label}, {"target", acc.target.label},
             {"steps", chain.size()},
             {"class_vs_ambient", d}};
      if (check_assoc) {
        // fold from the other end: fully right-nested vs fully left-nested
        osm::ToyMorphism acc2 = chain.back();
        for (size_t k = chain.size() - 1; k-- > 0;)
          acc2 = osm::compose(acc2, chain[k], tol);
        double defect = std::abs(structure_distance(acc.tangent, acc2.tangent, tol));
        j["associativity_residual"] = defect;
        j["associativity_pass"] = defect <= tol.tau;
      }
      out.emit(j);
      return 0;
    }
  } catch (const precondition_error& e) {
    if (format == "json")
      std::cout << json{{"error", e.what()}, {"kind", "precondition"}}.dump() << "\n";
    std::cerr << "precondition: " << e.what() << "\n";
    return 3;
  } catch (const invalid_input& e) {
    if (format == "json")
      std::cout << json{{"error", e.what()}, {"kind", "invalid-input"}}.dump() << "\n";
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (format == "json")
      std::cout << json{{"error", e.what()}, {"kind", "error"}}.dump() << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
