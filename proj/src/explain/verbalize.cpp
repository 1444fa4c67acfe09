#include "relexp/explain/verbalize.hpp"

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "relexp/common/error.hpp"

namespace relexp::explain {

std::string_view default_templates_json() {
  return R"({
  "sentence": "This is a {concept} because it {body}.",
  "unconditional": "This is a {concept} in every case.",
  "contains": "contains {blocks}",
  "block": "{var}",
  "block_with": "{var} which is {attributes}",
  "relation": "{subject} is {phrase} {object}",
  "conjunction": " and ",
  "attributes": {
    "has_color": "{value}"
  },
  "relations": {
    "left_of": "left of",
    "right_of": "right of",
    "top_of": "above",
    "bottom_of": "below",
    "on": "directly on",
    "under": "directly under"
  }
}
)";
}

Templates Templates::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("template file: ") + e.what());
  }
  Templates t;
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ConfigError(std::string("template file lacks \"") + key + "\"");
    return j[key].get<std::string>();
  };
  auto table = [&](const char* key) {
    std::map<std::string, std::string> out;
    if (!j.contains(key) || !j[key].is_object()) throw ConfigError(std::string("template file lacks \"") + key + "\"");
    for (const auto& [k, v] : j[key].items()) {
      if (!v.is_string()) throw ConfigError("template \"" + k + "\" is not a string");
      out[k] = v.get<std::string>();
    }
    return out;
  };
  t.sentence = str("sentence");
  t.unconditional = str("unconditional");
  t.contains = str("contains");
  t.block = str("block");
  t.block_with = str("block_with");
  t.relation = str("relation");
  t.conjunction = str("conjunction");
  t.attributes = table("attributes");
  t.phrases = table("relations");
  return t;
}

Templates Templates::defaults() {
  static const Templates t = from_json(default_templates_json());
  return t;
}

namespace {

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string marker = "{" + key + "}";
    for (std::size_t pos = text.find(marker); pos != std::string::npos;
         pos = text.find(marker, pos + value.size()))
      text.replace(pos, marker.size(), value);
  }
  return text;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string verbalize(const ilp::Clause& clause, const Templates& t) {
  const std::string concept_name = clause.head.predicate;
  if (clause.body.empty()) return fill(t.unconditional, {{"concept", concept_name}});

  std::vector<std::string> blocks;
  std::map<std::string, std::vector<std::string>> attrs;
  std::vector<std::string> relations;
  auto note_block = [&](const std::string& v) {
    if (std::find(blocks.begin(), blocks.end(), v) == blocks.end()) blocks.push_back(v);
  };
  for (const ilp::Atom& a : clause.body) {
    if (a.predicate == "contains" && a.args.size() == 2) {
      note_block(a.args[0].name);
    } else if (auto it = t.attributes.find(a.predicate); it != t.attributes.end() && a.args.size() == 2) {
      note_block(a.args[0].name);
      attrs[a.args[0].name].push_back(fill(it->second, {{"value", a.args[1].name}}));
    } else if (auto rel = t.phrases.find(a.predicate); rel != t.phrases.end() && a.args.size() == 2) {
      relations.push_back(
          fill(t.relation, {{"subject", a.args[0].name}, {"phrase", rel->second}, {"object", a.args[1].name}}));
    } else {
      throw ConfigError("no template for predicate " + a.predicate + "/" + std::to_string(a.args.size()));
    }
  }
  std::vector<std::string> parts;
  if (!blocks.empty()) {
    std::vector<std::string> frags;
    for (const auto& v : blocks) {
      auto it = attrs.find(v);
      frags.push_back(it == attrs.end() ? fill(t.block, {{"var", v}})
                                        : fill(t.block_with, {{"var", v}, {"attributes", join(it->second, t.conjunction)}}));
    }
    parts.push_back(fill(t.contains, {{"blocks", join(frags, t.conjunction)}}));
  }
  parts.insert(parts.end(), relations.begin(), relations.end());
  return fill(t.sentence, {{"concept", concept_name}, {"body", join(parts, t.conjunction)}});
}

std::string verbalize(const ilp::Theory& theory, const Templates& t) {
  std::string out;
  for (const auto& c : theory.clauses) out += verbalize(c.clause.clause, t) + "\n";
  return out;
}

}  // namespace relexp::explain
