#include "lassocert/cli/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lassocert::cli {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
}

namespace {

using nlohmann::json;

json strings(const ExactVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(to_string(v(i)));
  return arr;
}

}  // namespace

std::string serialize_witness(const NestedRankingWitness& w, std::span<const std::string> vars) {
  json doc;
  doc["kind"] = "nested-ranking";
  doc["vars"] = json(std::vector<std::string>(vars.begin(), vars.end()));
  doc["guard_row"] = w.guard_row;
  doc["h0"] = to_string(w.guard_bound);
  doc["k"] = w.nilpotence_index;
  doc["delta"] = to_string(w.delta);
  json fs = json::array();
  for (const auto& f : w.functions) fs.push_back({{"coeffs", strings(f.coeffs)}, {"constant", to_string(f.constant)}});
  doc["functions"] = fs;
  return doc.dump(2) + "\n";
}

NestedRankingWitness deserialize_witness(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("kind") != "nested-ranking") throw std::invalid_argument("not a nested-ranking witness");
    NestedRankingWitness w;
    w.guard_row = doc.at("guard_row").get<Index>();
    w.guard_bound = parse_rational(doc.at("h0").get<std::string>());
    w.nilpotence_index = doc.at("k").get<Index>();
    w.delta = parse_rational(doc.at("delta").get<std::string>());
    for (const auto& f : doc.at("functions")) {
      const auto& coeffs = f.at("coeffs");
      AffineFunction fn{ExactVector(static_cast<Index>(coeffs.size())),
                        parse_rational(f.at("constant").get<std::string>())};
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        fn.coeffs(static_cast<Index>(i)) = parse_rational(coeffs[i].get<std::string>());
      }
      w.functions.push_back(std::move(fn));
    }
    return w;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed witness document: ") + e.what());
  }
}

}  // namespace lassocert::cli
