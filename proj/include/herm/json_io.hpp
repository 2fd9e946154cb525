#pragma once

#include <json.hpp>

#include "herm/osm.hpp"

namespace herm {

// JSON formats. Complex scalars are [re, im] pairs, matrices row-major.
//
// HermComplex:
//   {"lo": int, "hi": int,
//    "spaces": {"<degree>": {"dim": n, "gram": [[[re,im],...],...]}},
//    "diffs":  {"<degree>": [[[re,im],...],...]}}
//
// A bundle file carries named collections so maps and roofs can refer to
// complexes by name:
//   {"complexes": {...}, "maps": {...}, "roofs": {...},
//    "structures": {...}, "chains": {...}}

using json = nlohmann::json;

json to_json(const Mat& m);
Mat mat_from_json(const json& j);

json to_json(const HermSpace& v);
HermSpace space_from_json(const json& j);

json to_json(const HermComplex& c);
HermComplex complex_from_json(const json& j);

struct Bundle {
  std::map<std::string, HermComplex> complexes;
  struct MapEntry {
    std::string source, target;
    std::map<int, Mat> maps;
  };
  std::map<std::string, MapEntry> maps;
  struct RoofEntry {
    std::string middle_complex;  // name in complexes
    std::string source, target;  // names in complexes
    std::map<int, Mat> s, g;     // legs from the middle
  };
  std::map<std::string, RoofEntry> roofs;
  struct StructureEntry {
    std::string underlying, metric_rep;
    RoofEntry structural;
  };
  std::map<std::string, StructureEntry> structures;
  struct ChainEntry {  // toy smooth chain: spaces and df matrices
    std::vector<std::string> labels;
    std::vector<HermSpace> tangents;
    std::vector<Mat> dfs;  // dfs[i] : tangents[i] -> tangents[i+1]
  };
  std::map<std::string, ChainEntry> chains;
};

json to_json(const Bundle& b);
Bundle bundle_from_json(const json& j);

Bundle load_bundle(const std::string& path);
void save_bundle(const Bundle& b, const std::string& path);

// Materialize typed objects from a bundle. Throw invalid_input on dangling
// names or shape mismatches.
ChainMap make_chain_map(const Bundle& b, const std::string& name);
Roof make_roof(const Bundle& b, const Bundle::RoofEntry& e);
Roof make_roof(const Bundle& b, const std::string& name);
HermStructure make_structure(const Bundle& b, const std::string& name);
std::vector<osm::ToyMorphism> make_chain(const Bundle& b, const std::string& name);

}  // namespace herm
