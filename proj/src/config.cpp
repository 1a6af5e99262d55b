#include "qcd/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace qcd {

namespace {

using nlohmann::json;

double parse_decimal(std::string_view text, std::string_view field) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(fmt::format("field {}: '{}' is not a number", field, text));
  }
  return value;
}

double read_real(const json& node, std::string_view field) {
  if (node.is_number()) return node.get<double>();
  if (!node.is_string()) throw ConfigError(fmt::format("field {}: expected a number", field));
  const auto text = node.get<std::string>();
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text, field);
  const double num = parse_decimal(std::string_view(text).substr(0, slash), field);
  const double den = parse_decimal(std::string_view(text).substr(slash + 1), field);
  if (den == 0.0) throw ConfigError(fmt::format("field {}: zero denominator", field));
  return num / den;
}

std::size_t read_count(const json& node, std::string_view field) {
  if (!node.is_number_integer() || node.get<long long>() < 0) {
    throw ConfigError(fmt::format("field {}: expected a nonnegative integer", field));
  }
  return node.get<std::size_t>();
}

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(fmt::format("missing field '{}'", key));
  return *it;
}

std::vector<double> read_vector(const json& node, std::string_view field) {
  if (!node.is_array()) throw ConfigError(fmt::format("field {}: expected an array", field));
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(read_real(node[i], fmt::format("{}[{}]", field, i)));
  }
  return out;
}

std::vector<std::vector<double>> read_matrix(const json& node, std::string_view field) {
  if (!node.is_array()) throw ConfigError(fmt::format("field {}: expected an array of rows", field));
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(read_vector(node[i], fmt::format("{}[{}]", field, i)));
  }
  return out;
}

json to_document(const Instance& instance) {
  json doc;
  doc["schema"] = kInstanceSchema;
  doc["name"] = instance.name;
  doc["alphabet_size"] = instance.model.alphabet.size;
  doc["M"] = instance.model.M;
  doc["p0"] = instance.model.p0;
  doc["p"] = instance.model.p;
  doc["nu"] = instance.model.nu;
  doc["f"] = instance.model.f;
  doc["c"] = instance.costs.c;
  doc["a"] = instance.costs.a;
  return doc;
}

}  // namespace

Instance parse_instance(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("instance must be a JSON object");
  const auto& schema = require(doc, "schema");
  if (!schema.is_string() || schema.get<std::string>() != kInstanceSchema) {
    throw ConfigError(fmt::format("unsupported schema, expected '{}'", kInstanceSchema));
  }

  Instance inst;
  if (const auto it = doc.find("name"); it != doc.end() && it->is_string()) inst.name = it->get<std::string>();
  inst.model.alphabet.size = read_count(require(doc, "alphabet_size"), "alphabet_size");
  inst.model.M = read_count(require(doc, "M"), "M");
  inst.model.p0 = read_real(require(doc, "p0"), "p0");
  inst.model.p = read_real(require(doc, "p"), "p");
  inst.model.nu = read_vector(require(doc, "nu"), "nu");
  inst.model.f = read_matrix(require(doc, "f"), "f");
  inst.costs.c = read_real(require(doc, "c"), "c");
  inst.costs.a = read_matrix(require(doc, "a"), "a");
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string to_json(const Instance& instance) { return to_document(instance).dump(2) + "\n"; }

std::string canonical_json(const Instance& instance) { return to_document(instance).dump(); }

std::uint64_t instance_digest(const Instance& instance) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(instance)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace qcd
