#include "herm/json_io.hpp"

#include <fstream>

namespace herm {

namespace {

json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw invalid_input("json: complex scalar must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

int degree_key(const std::string& k) {
  try {
    size_t pos = 0;
    int v = std::stoi(k, &pos);
    if (pos != k.size()) throw std::invalid_argument(k);
    return v;
  } catch (const std::exception&) {
    throw invalid_input("json: degree key '" + k + "' is not an integer");
  }
}

std::map<int, Mat> mats_from_json(const json& j, const char* what) {
  if (!j.is_object()) throw invalid_input(std::string("json: ") + what + " must be an object");
  std::map<int, Mat> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[degree_key(it.key())] = mat_from_json(it.value());
  return out;
}

json mats_to_json(const std::map<int, Mat>& m) {
  json j = json::object();
  for (auto& [i, mat] : m) j[std::to_string(i)] = to_json(mat);
  return j;
}

const HermComplex& named_complex(const Bundle& b, const std::string& name,
                                 const char* what) {
  auto it = b.complexes.find(name);
  if (it == b.complexes.end())
    throw invalid_input(std::string("bundle: ") + what + " refers to unknown complex '" +
                        name + "'");
  return it->second;
}

void check_map_shapes(const std::map<int, Mat>& maps, const HermComplex& src,
                      const HermComplex& tgt, const std::string& ctx) {
  for (auto& [i, m] : maps) {
    if (m.rows() != tgt.dim(i) || m.cols() != src.dim(i))
      throw invalid_input("bundle: " + ctx + " has a wrongly shaped block at degree " +
                          std::to_string(i));
  }
}

}  // namespace

json to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(cplx_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array()) throw invalid_input("json: matrix must be an array of rows");
  int rows = static_cast<int>(j.size());
  if (rows == 0) return Mat(0, 0);
  if (!j[0].is_array()) throw invalid_input("json: matrix rows must be arrays");
  int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw invalid_input("json: ragged matrix rows");
    for (int k = 0; k < cols; ++k) m(i, k) = cplx_from_json(j[i][k]);
  }
  return m;
}

json to_json(const HermSpace& v) {
  return json{{"dim", v.dim()}, {"gram", to_json(v.gram())}};
}

HermSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("gram"))
    throw invalid_input("json: space must be an object with a gram");
  Mat g = mat_from_json(j["gram"]);
  if (j.contains("dim") && j["dim"].get<int>() != g.rows())
    throw invalid_input("json: space dim does not match its gram");
  if (g.rows() != g.cols()) throw invalid_input("json: gram must be square");
  return HermSpace(g);
}

json to_json(const HermComplex& c) {
  json spaces = json::object(), diffs = json::object();
  for (auto& [i, s] : c.spaces()) spaces[std::to_string(i)] = to_json(s);
  for (auto& [i, d] : c.stored_diffs()) diffs[std::to_string(i)] = to_json(d);
  return json{{"lo", c.lo()}, {"hi", c.hi()}, {"spaces", std::move(spaces)},
              {"diffs", std::move(diffs)}};
}

HermComplex complex_from_json(const json& j) {
  if (!j.is_object() || !j.contains("spaces"))
    throw invalid_input("json: complex must be an object with spaces");
  std::map<int, HermSpace> spaces;
  for (auto it = j["spaces"].begin(); it != j["spaces"].end(); ++it)
    spaces[degree_key(it.key())] = space_from_json(it.value());
  std::map<int, Mat> diffs;
  if (j.contains("diffs"))
    diffs = mats_from_json(j["diffs"], "diffs");
  for (auto& [i, d] : diffs) {
    int rows = spaces.count(i + 1) ? spaces[i + 1].dim() : 0;
    int cols = spaces.count(i) ? spaces[i].dim() : 0;
    if (d.rows() != rows || d.cols() != cols)
      throw invalid_input("json: differential at degree " + std::to_string(i) +
                          " has the wrong shape");
  }
  return HermComplex(std::move(spaces), std::move(diffs));
}

json to_json(const Bundle& b) {
  json j = json::object();
  json cx = json::object();
  for (auto& [name, c] : b.complexes) cx[name] = to_json(c);
  j["complexes"] = std::move(cx);

  json maps = json::object();
  for (auto& [name, e] : b.maps)
    maps[name] = json{{"source", e.source}, {"target", e.target},
                      {"maps", mats_to_json(e.maps)}};
  j["maps"] = std::move(maps);

  auto roof_to_json = [](const Bundle::RoofEntry& e) {
    return json{{"middle", e.middle_complex}, {"source", e.source},
                {"target", e.target}, {"s", mats_to_json(e.s)},
                {"g", mats_to_json(e.g)}};
  };
  json roofs = json::object();
  for (auto& [name, e] : b.roofs) roofs[name] = roof_to_json(e);
  j["roofs"] = std::move(roofs);

  json structures = json::object();
  for (auto& [name, e] : b.structures)
    structures[name] = json{{"underlying", e.underlying},
                            {"metric_rep", e.metric_rep},
                            {"structural", roof_to_json(e.structural)}};
  j["structures"] = std::move(structures);

  json chains = json::object();
  for (auto& [name, e] : b.chains) {
    json tangents = json::array(), dfs = json::array();
    for (auto& t : e.tangents) tangents.push_back(to_json(t));
    for (auto& d : e.dfs) dfs.push_back(to_json(d));
    chains[name] = json{{"labels", e.labels}, {"tangents", std::move(tangents)},
                        {"dfs", std::move(dfs)}};
  }
  j["chains"] = std::move(chains);
  return j;
}

Bundle bundle_from_json(const json& j) {
  if (!j.is_object()) throw invalid_input("json: bundle must be an object");
  Bundle b;
  if (j.contains("complexes"))
    for (auto it = j["complexes"].begin(); it != j["complexes"].end(); ++it)
      b.complexes[it.key()] = complex_from_json(it.value());

  if (j.contains("maps"))
    for (auto it = j["maps"].begin(); it != j["maps"].end(); ++it) {
      const json& e = it.value();
      if (!e.is_object() || !e.contains("source") || !e.contains("target"))
        throw invalid_input("json: map entry '" + it.key() + "' needs source and target");
      Bundle::MapEntry me;
      me.source = e["source"].get<std::string>();
      me.target = e["target"].get<std::string>();
      if (e.contains("maps")) me.maps = mats_from_json(e["maps"], "maps");
      b.maps[it.key()] = std::move(me);
    }

  auto roof_from = [](const json& e, const std::string& name) {
    if (!e.is_object() || !e.contains("middle") || !e.contains("source") ||
        !e.contains("target"))
      throw invalid_input("json: roof entry '" + name + "' needs middle, source, target");
    Bundle::RoofEntry re;
    re.middle_complex = e["middle"].get<std::string>();
    re.source = e["source"].get<std::string>();
    re.target = e["target"].get<std::string>();
    if (e.contains("s")) re.s = mats_from_json(e["s"], "roof legs");
    if (e.contains("g")) re.g = mats_from_json(e["g"], "roof legs");
    return re;
  };
  if (j.contains("roofs"))
    for (auto it = j["roofs"].begin(); it != j["roofs"].end(); ++it)
      b.roofs[it.key()] = roof_from(it.value(), it.key());

  if (j.contains("structures"))
    for (auto it = j["structures"].begin(); it != j["structures"].end(); ++it) {
      const json& e = it.value();
      if (!e.is_object() || !e.contains("underlying") || !e.contains("metric_rep") ||
          !e.contains("structural"))
        throw invalid_input("json: structure entry '" + it.key() +
                            "' needs underlying, metric_rep, structural");
      Bundle::StructureEntry se;
      se.underlying = e["underlying"].get<std::string>();
      se.metric_rep = e["metric_rep"].get<std::string>();
      se.structural = roof_from(e["structural"], it.key() + ".structural");
      b.structures[it.key()] = std::move(se);
    }

  if (j.contains("chains"))
    for (auto it = j["chains"].begin(); it != j["chains"].end(); ++it) {
      const json& e = it.value();
      if (!e.is_object() || !e.contains("tangents") || !e.contains("dfs"))
        throw invalid_input("json: chain entry '" + it.key() + "' needs tangents and dfs");
      Bundle::ChainEntry ce;
      if (e.contains("labels")) ce.labels = e["labels"].get<std::vector<std::string>>();
      for (auto& t : e["tangents"]) ce.tangents.push_back(space_from_json(t));
      for (auto& d : e["dfs"]) ce.dfs.push_back(mat_from_json(d));
      b.chains[it.key()] = std::move(ce);
    }
  return b;
}

Bundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw invalid_input("cannot parse '" + path + "': " + ex.what());
  }
  return bundle_from_json(j);
}

void save_bundle(const Bundle& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot write '" + path + "'");
  out << to_json(b).dump(2) << "\n";
}

ChainMap make_chain_map(const Bundle& b, const std::string& name) {
  auto it = b.maps.find(name);
  if (it == b.maps.end()) throw invalid_input("bundle: no map named '" + name + "'");
  const HermComplex& src = named_complex(b, it->second.source, "map source");
  const HermComplex& tgt = named_complex(b, it->second.target, "map target");
  check_map_shapes(it->second.maps, src, tgt, "map '" + name + "'");
  return ChainMap{src, tgt, it->second.maps};
}

Roof make_roof(const Bundle& b, const Bundle::RoofEntry& e) {
  const HermComplex& mid = named_complex(b, e.middle_complex, "roof middle");
  const HermComplex& src = named_complex(b, e.source, "roof source");
  const HermComplex& tgt = named_complex(b, e.target, "roof target");
  check_map_shapes(e.s, mid, src, "roof left leg");
  check_map_shapes(e.g, mid, tgt, "roof right leg");
  return Roof{ChainMap{mid, src, e.s}, ChainMap{mid, tgt, e.g}};
}

Roof make_roof(const Bundle& b, const std::string& name) {
  auto it = b.roofs.find(name);
  if (it == b.roofs.end()) throw invalid_input("bundle: no roof named '" + name + "'");
  return make_roof(b, it->second);
}

HermStructure make_structure(const Bundle& b, const std::string& name) {
  auto it = b.structures.find(name);
  if (it == b.structures.end())
    throw invalid_input("bundle: no structure named '" + name + "'");
  const HermComplex& und = named_complex(b, it->second.underlying, "structure underlying");
  const HermComplex& rep = named_complex(b, it->second.metric_rep, "structure metric_rep");
  return HermStructure{und, rep, make_roof(b, it->second.structural)};
}

std::vector<osm::ToyMorphism> make_chain(const Bundle& b, const std::string& name) {
  auto it = b.chains.find(name);
  if (it == b.chains.end()) throw invalid_input("bundle: no chain named '" + name + "'");
  const Bundle::ChainEntry& e = it->second;
  if (e.tangents.size() < 2 || e.dfs.size() + 1 != e.tangents.size())
    throw invalid_input("bundle: chain '" + name + "' needs n spaces and n-1 maps");
  std::vector<osm::ToyMorphism> out;
  for (size_t k = 0; k + 1 < e.tangents.size(); ++k) {
    auto label = [&](size_t i) {
      return i < e.labels.size() ? e.labels[i] : "X" + std::to_string(i);
    };
    osm::ToySpace a{label(k), e.tangents[k]};
    osm::ToySpace bspace{label(k + 1), e.tangents[k + 1]};
    out.push_back(osm::ambient_morphism(a, bspace, e.dfs[k]));
  }
  return out;
}

}  // namespace herm
