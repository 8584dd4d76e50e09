#include "naesdp/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "naesdp/checksum.hpp"
#include "naesdp/error.hpp"

namespace naesdp {

namespace {

using nlohmann::json;

// (c, d) of a base that must be exactly complete_bipartite(c, d).
std::pair<std::size_t, std::size_t> complete_base_degrees(const SignedMultigraph& base) {
  if (!base.bipartition()) throw InvalidArgument("instance base must be bipartite");
  const std::size_t d = base.bipartition()->left;
  const std::size_t c = base.bipartition()->right;
  const SignedMultigraph expected = complete_bipartite(c, d);
  bool same = expected.edge_count() == base.edge_count();
  for (std::size_t e = 0; same && e < base.edge_count(); ++e) {
    const Edge& a = base.edge(e);
    const Edge& b = expected.edge(e);
    same = a.u == b.u && a.v == b.v && a.sign == b.sign;
  }
  if (!same) throw InvalidArgument("only lifts of an unsigned complete bipartite base can be saved");
  return {c, d};
}

template <typename T>
std::uint64_t mix(std::uint64_t state, T value) {
  return fnv1a64(&value, sizeof(value), state);
}

}  // namespace

std::uint64_t instance_checksum(const LiftSpec& spec, std::size_t c, std::size_t d) {
  std::uint64_t h = kFnvOffset;
  h = mix<std::uint64_t>(h, c);
  h = mix<std::uint64_t>(h, d);
  h = mix<std::uint64_t>(h, spec.n);
  h = mix<std::uint64_t>(h, spec.seed);
  for (const auto& perm : spec.permutations) {
    for (std::uint32_t x : perm) h = mix<std::uint32_t>(h, x);
  }
  for (std::int8_t s : spec.signs) h = mix<std::int8_t>(h, s);
  return h;
}

std::string instance_to_json(const LiftSpec& spec) {
  spec.validate();
  const auto [c, d] = complete_base_degrees(spec.base);
  json j;
  j["version"] = kInstanceFormatVersion;
  j["c"] = c;
  j["d"] = d;
  j["n"] = spec.n;
  j["permutations"] = spec.permutations;
  j["signs"] = spec.signs;
  j["seed"] = spec.seed;
  j["checksum"] = instance_checksum(spec, c, d);
  return j.dump();
}

LiftSpec instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("instance file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("instance file must hold a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw FormatError("instance file has no integer version field");
  }
  const int version = j["version"].get<int>();
  if (version != kInstanceFormatVersion) {
    throw FormatError("instance format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kInstanceFormatVersion) + ")");
  }
  static const std::set<std::string> known{"version", "c", "d", "n", "permutations", "signs", "seed", "checksum"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw FormatError("unknown field '" + item.key() + "' in instance format version " +
                        std::to_string(kInstanceFormatVersion));
    }
  }
  for (const auto& key : known) {
    if (!j.contains(key)) throw FormatError("instance file is missing field '" + key + "'");
  }
  LiftSpec spec;
  std::size_t c = 0;
  std::size_t d = 0;
  std::uint64_t checksum = 0;
  try {
    c = j["c"].get<std::size_t>();
    d = j["d"].get<std::size_t>();
    spec.n = j["n"].get<std::size_t>();
    spec.seed = j["seed"].get<std::uint64_t>();
    spec.permutations = j["permutations"].get<std::vector<std::vector<std::uint32_t>>>();
    spec.signs = j["signs"].get<std::vector<std::int8_t>>();
    checksum = j["checksum"].get<std::uint64_t>();
    spec.base = complete_bipartite(c, d);
    spec.validate();
  } catch (const json::exception& e) {
    throw FormatError(std::string("instance file has a field of the wrong type: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("instance file is inconsistent: ") + e.what());
  }
  if (instance_checksum(spec, c, d) != checksum) throw FormatError("instance checksum mismatch");
  return spec;
}

void save_instance(const std::filesystem::path& path, const LiftSpec& spec) {
  const std::string text = instance_to_json(spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text << '\n';
  if (!out) throw FormatError("failed writing " + path.string());
}

LiftSpec load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace naesdp
