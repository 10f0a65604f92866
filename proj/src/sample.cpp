#include "mrlcqa/sample.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "Simple Question",       "Logical Reasoning",    "Quantitative Reasoning", "Verification (Boolean)",
    "Comparative Reasoning", "Quantitative (Count)", "Comparative (Count)"};

}  // namespace

std::string_view category_name(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  return std::nullopt;
}

json answer_to_json(const AnswerValue& answer, const KnowledgeBase& kb) {
  if (const auto* s = std::get_if<EntitySet>(&answer)) {
    json names = json::array();
    for (EntityId e : *s) names.push_back(kb.entity_name(e));
    return {{"entities", names}};
  }
  if (const auto* c = std::get_if<Count>(&answer)) return {{"count", c->value}};
  json bools = json::array();
  for (bool b : std::get<BoolList>(answer).values) bools.push_back(b);
  return {{"bools", bools}};
}

AnswerValue answer_from_json(const json& j, const KnowledgeBase& kb) {
  if (j.contains("entities")) {
    EntitySet out;
    for (const auto& n : j.at("entities")) {
      auto e = kb.entity(n.get<std::string>());
      if (!e) throw ParseError("<answer>", 1, "unknown entity '" + n.get<std::string>() + "'");
      out.push_back(*e);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  if (j.contains("count")) return Count{j.at("count").get<std::int64_t>()};
  if (j.contains("bools")) return BoolList{j.at("bools").get<std::vector<bool>>()};
  throw ParseError("<answer>", 1, "answer must have one of 'entities', 'count', 'bools'");
}

json sample_to_json(const Sample& s, const KnowledgeBase& kb) {
  json j;
  j["id"] = s.id;
  j["category"] = std::string(category_name(s.category));
  j["question"] = s.question;
  j["entities"] = s.artifacts.entities;
  j["relations"] = s.artifacts.relations;
  j["types"] = s.artifacts.types;
  j["numbers"] = s.artifacts.numbers;
  j["answer"] = answer_to_json(s.gold, kb);
  if (s.gold_program) {
    std::string text = to_string(*s.gold_program);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    for (auto& ch : text)
      if (ch == '\n') ch = ';';
    j["program"] = text;
  }
  return j;
}

Sample sample_from_json(const json& j, const KnowledgeBase& kb) {
  Sample s;
  s.id = j.at("id").get<std::string>();
  auto cat = category_from_name(j.at("category").get<std::string>());
  if (!cat) throw Error("unknown category '" + j.at("category").get<std::string>() + "'");
  s.category = *cat;
  s.question = j.at("question").get<std::vector<std::string>>();
  s.artifacts.entities = j.value("entities", std::vector<std::string>{});
  s.artifacts.relations = j.value("relations", std::vector<std::string>{});
  s.artifacts.types = j.value("types", std::vector<std::string>{});
  s.artifacts.numbers = j.value("numbers", std::vector<std::int64_t>{});
  s.gold = answer_from_json(j.at("answer"), kb);
  if (j.contains("program")) s.gold_program = parse_program(j.at("program").get<std::string>());
  return s;
}

void write_samples(std::ostream& out, const std::vector<Sample>& samples, const KnowledgeBase& kb) {
  for (const auto& s : samples) out << sample_to_json(s, kb).dump() << '\n';
}

std::vector<Sample> read_samples(std::istream& in, const KnowledgeBase& kb, const std::string& source) {
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(json::parse(line), kb));
    } catch (const std::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

void save_samples(const std::string& path, const std::vector<Sample>& samples, const KnowledgeBase& kb) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_samples(out, samples, kb);
}

std::vector<Sample> load_samples(const std::string& path, const KnowledgeBase& kb) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_samples(in, kb, path);
}

}  // namespace mrlcqa
