#include "mrlcqa/evaluate.hpp"

#include "mrlcqa/error.hpp"

namespace mrlcqa {

using nlohmann::json;

EvalReport summarize(std::vector<QuestionRecord> records) {
  EvalReport r;
  std::map<Category, std::pair<double, int>> sums;
  double total = 0.0;
  for (const auto& q : records) {
    auto& [sum, n] = sums[q.category];
    sum += q.f1;
    ++n;
    total += q.f1;
  }
  for (const auto& [c, s] : sums) r.per_category_f1[c] = s.first / s.second;
  if (!records.empty()) {
    double macro = 0.0;
    for (const auto& [c, f] : r.per_category_f1) macro += f;
    r.macro_f1 = macro / static_cast<double>(r.per_category_f1.size());
    r.micro_f1 = total / static_cast<double>(records.size());
  }
  r.records = std::move(records);
  return r;
}

namespace {

std::string program_text(const std::optional<Program>& p) {
  if (!p) return {};
  std::string text = to_string(*p);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  for (auto& ch : text)
    if (ch == '\n') ch = ';';
  return text;
}

}  // namespace

EvalReport evaluate(const PolicyParameters& theta, std::span<const Sample> test, std::span<const Sample> corpus,
                    const Environment& env, const TrainingConfig& cfg, bool adapted) {
  if (test.empty()) throw Error("evaluate: empty test set");
  std::optional<Retriever> retriever;
  if (adapted) retriever.emplace(corpus, table_embedder(env.input(), theta));
  std::vector<QuestionRecord> records;
  records.reserve(test.size());
  for (const auto& q : test) {
    Inference inf = adapted ? infer(theta, q, *retriever, env, cfg) : infer_frozen(theta, q, env, cfg);
    QuestionRecord rec{q.id, q.category, inf.answer, answer_f1(inf.answer, q.gold), program_text(inf.program),
                       inf.valid, {}};
    for (const auto& m : inf.support) rec.support.emplace_back(corpus[m.index].id, m.score);
    records.push_back(std::move(rec));
  }
  return summarize(std::move(records));
}

json report_to_json(const EvalReport& report, const KnowledgeBase& kb) {
  json j;
  j["macro_f1"] = report.macro_f1;
  j["micro_f1"] = report.micro_f1;
  j["f1_convention"] = "entity sets: precision/recall F1; counts and boolean lists: reward";
  json cats = json::object();
  for (const auto& [c, f] : report.per_category_f1) cats[std::string(category_name(c))] = f;
  j["per_category_f1"] = cats;
  json recs = json::array();
  for (const auto& r : report.records) {
    json support = json::array();
    for (const auto& [id, score] : r.support) support.push_back({{"id", id}, {"score", score}});
    recs.push_back({{"id", r.id},
                    {"category", std::string(category_name(r.category))},
                    {"predicted", answer_to_json(r.predicted, kb)},
                    {"f1", r.f1},
                    {"program", r.program},
                    {"valid", r.valid},
                    {"support", support}});
  }
  j["records"] = recs;
  return j;
}

EvalReport report_from_json(const json& j, const KnowledgeBase& kb) {
  EvalReport r;
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.micro_f1 = j.at("micro_f1").get<double>();
  for (const auto& [name, f] : j.at("per_category_f1").items()) {
    auto c = category_from_name(name);
    if (!c) throw Error("unknown category '" + name + "'");
    r.per_category_f1[*c] = f.get<double>();
  }
  for (const auto& x : j.at("records")) {
    QuestionRecord q;
    q.id = x.at("id").get<std::string>();
    auto c = category_from_name(x.at("category").get<std::string>());
    if (!c) throw Error("unknown category in record '" + q.id + "'");
    q.category = *c;
    q.predicted = answer_from_json(x.at("predicted"), kb);
    q.f1 = x.at("f1").get<double>();
    q.program = x.at("program").get<std::string>();
    q.valid = x.at("valid").get<bool>();
    for (const auto& s : x.at("support")) q.support.emplace_back(s.at("id").get<std::string>(), s.at("score").get<double>());
    r.records.push_back(std::move(q));
  }
  return r;
}

}  // namespace mrlcqa
