#include "mrlcqa/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "mrlcqa/error.hpp"
#include "mrlcqa/interpreter.hpp"
#include "mrlcqa/seed.hpp"

namespace mrlcqa {

namespace {

struct TypeSpec {
  const char* name;
  const char* singular;
  const char* plural;
};

constexpr TypeSpec kTypes[] = {
    {"country", "country", "countries"},  {"river", "river", "rivers"},
    {"city", "city", "cities"},           {"person", "person", "people"},
    {"occupation", "occupation", "occupations"}, {"language", "language", "languages"},
    {"organization", "organization", "organizations"},
};

struct BaseRelation {
  const char* name;
  const char* inverse;
  int subject;  // index into kTypes
  int object;
  int min_objects, max_objects;
  const char* verb;
  const char* inverse_verb;
};

constexpr BaseRelation kBase[] = {
    {"flows_through", "has_river", 1, 0, 1, 3, "flows through", "is crossed by"},
    {"located_in", "has_city", 2, 0, 1, 1, "is located in", "contains"},
    {"citizen_of", "has_citizen", 3, 0, 1, 2, "is a citizen of", "has citizen"},
    {"occupation", "held_by", 3, 4, 1, 2, "works as", "is held by"},
    {"speaks", "spoken_by", 3, 5, 1, 3, "speaks", "is spoken by"},
    {"official_language", "official_in", 0, 5, 1, 2, "has official language", "is official in"},
    {"member_of", "has_member", 3, 6, 0, 2, "is a member of", "has member"},
    {"born_in", "birthplace_of", 3, 2, 1, 1, "was born in", "is the birthplace of"},
};

// A directed relation usable in questions: "<subject> <verb> <object>".
struct Relation {
  std::string name;
  int subject;
  int object;
  std::vector<std::string> verb;
};

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<Relation> relations() {
  std::vector<Relation> out;
  for (const auto& b : kBase) {
    out.push_back({b.name, b.subject, b.object, words(b.verb)});
    out.push_back({b.inverse, b.object, b.subject, words(b.inverse_verb)});
  }
  return out;
}

std::string entity_name(int type, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02d", kTypes[type].name, index + 1);
  return buf;
}

struct Draft {
  std::vector<std::string> question;
  ArtifactTable artifacts;
  Program program;
};

class Writer {
 public:
  Writer(const KnowledgeBase& kb, std::mt19937_64& rng) : kb_(kb), rng_(rng), relations_(relations()) {}

  std::optional<Draft> draft(Category c) {
    switch (c) {
      case Category::SimpleQuestion: return simple();
      case Category::LogicalReasoning: return logical();
      case Category::QuantitativeReasoning: return superlative();
      case Category::Verification: return verification();
      case Category::ComparativeReasoning: return comparative(false);
      case Category::QuantitativeCount: return count();
      case Category::ComparativeCount: return comparative(true);
    }
    return std::nullopt;
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))]; }
  const Relation& pick_relation() { return pick(relations_); }

  // A subject with at least one object for r.
  std::optional<std::string> subject_of(const Relation& r) {
    auto t = kb_.type(kTypes[r.subject].name);
    auto rel = kb_.relation(r.name);
    if (!t || !rel) return std::nullopt;
    std::vector<EntityId> with;
    for (EntityId e : kb_.entities_of_type(*t))
      if (!kb_.objects(e, *rel).empty()) with.push_back(e);
    if (with.empty()) return std::nullopt;
    return kb_.entity_name(pick(with));
  }

  std::string random_entity(int type) {
    const auto& all = kb_.entities_of_type(*kb_.type(kTypes[type].name));
    return kb_.entity_name(pick(all));
  }

  static void append(std::vector<std::string>& q, const std::vector<std::string>& more) {
    q.insert(q.end(), more.begin(), more.end());
  }

  static Action act(Op op, std::initializer_list<Arg> args) { return Action{op, std::vector<Arg>(args)}; }
  static Arg ent(int i) { return Arg::slot_ref(ArgKind::Entity, i); }
  static Arg rel(int i) { return Arg::slot_ref(ArgKind::Relation, i); }
  static Arg typ(int i) { return Arg::slot_ref(ArgKind::Type, i); }

  std::optional<Draft> simple() {
    const Relation& r = pick_relation();
    auto e = subject_of(r);
    if (!e) return std::nullopt;
    Draft d;
    const char* pl = kTypes[r.object].plural;
    switch (uniform(0, 2)) {
      case 0: d.question = {"which", pl}; break;
      case 1: d.question = {"what", pl}; break;
      default: d.question = {"name", "the", pl, "that"}; break;
    }
    d.question.push_back(*e);
    append(d.question, r.verb);
    d.question.push_back("?");
    d.artifacts = {{*e}, {r.name}, {kTypes[r.object].name}, {}};
    d.program.actions = {act(Op::Select, {ent(0), rel(0), typ(0)})};
    return d;
  }

  // Two relations with the same object type; equal half of the time.
  std::pair<const Relation*, const Relation*> relation_pair() {
    const Relation& r1 = pick_relation();
    if (uniform(0, 1) == 0) return {&r1, &r1};
    std::vector<const Relation*> same;
    for (const auto& r : relations_)
      if (r.object == r1.object && r.name != r1.name) same.push_back(&r);
    if (same.empty()) return {&r1, &r1};
    return {&r1, pick(same)};
  }

  // Fills "E1 verb1 <conj> E2 verb2" with artifacts and the leading SELECT.
  std::optional<Draft> two_clauses(const std::vector<std::string>& head, const std::vector<std::string>& conj,
                                   Op combine) {
    auto [r1, r2] = relation_pair();
    auto e1 = subject_of(*r1);
    auto e2 = subject_of(*r2);
    if (!e1 || !e2 || *e1 == *e2) return std::nullopt;
    Draft d;
    d.question = head;
    d.question.push_back(kTypes[r1->object].plural);
    d.question.push_back(*e1);
    append(d.question, r1->verb);
    append(d.question, conj);
    d.question.push_back(*e2);
    append(d.question, r2->verb);
    d.question.push_back("?");
    d.artifacts.entities = {*e1, *e2};
    d.artifacts.relations = {r1->name};
    if (r2 != r1) d.artifacts.relations.push_back(r2->name);
    d.artifacts.types = {kTypes[r1->object].name};
    d.program.actions = {act(Op::Select, {ent(0), rel(0), typ(0)}),
                         act(combine, {ent(1), rel(r2 == r1 ? 0 : 1), typ(0)})};
    return d;
  }

  std::optional<Draft> logical() {
    switch (uniform(0, 2)) {
      case 0: return two_clauses({"which"}, {"and"}, Op::Intersection);
      case 1: return two_clauses({"which"}, {"or"}, Op::Union);
      default: return two_clauses({"which"}, {"but", "not"}, Op::Difference);
    }
  }

  std::optional<Draft> verification() {
    const Relation& r = pick_relation();
    auto e = subject_of(r);
    if (!e) return std::nullopt;
    EntitySet objects = kb_.select(*e, r.name, kTypes[r.object].name);
    auto candidate = [&] {
      if (uniform(0, 1) == 0) return kb_.entity_name(pick(objects));
      return random_entity(r.object);
    };
    const int n = uniform(1, 2);
    std::vector<std::string> checks;
    while (static_cast<int>(checks.size()) < n) {
      std::string c = candidate();
      if (c != *e && std::find(checks.begin(), checks.end(), c) == checks.end()) checks.push_back(c);
    }
    Draft d;
    d.question = uniform(0, 1) == 0 ? std::vector<std::string>{"does"} : std::vector<std::string>{"is", "it", "true", "that"};
    d.question.push_back(*e);
    append(d.question, r.verb);
    d.question.push_back(checks[0]);
    if (n == 2) {
      d.question.push_back("and");
      d.question.push_back(checks[1]);
    }
    d.question.push_back("?");
    d.artifacts.entities = {*e};
    append(d.artifacts.entities, checks);
    d.artifacts.relations = {r.name};
    d.artifacts.types = {kTypes[r.object].name};
    d.program.actions = {act(Op::Select, {ent(0), rel(0), typ(0)})};
    for (int i = 0; i < n; ++i) d.program.actions.push_back(act(Op::Bool, {ent(1 + i)}));
    return d;
  }

  std::optional<Draft> superlative() {
    const Relation& r = pick_relation();
    const bool most = uniform(0, 1) == 0;
    Draft d;
    d.question = {"which", kTypes[r.subject].singular};
    append(d.question, r.verb);
    if (uniform(0, 1) == 0)
      append(d.question, most ? std::vector<std::string>{"the", "most"} : std::vector<std::string>{"the", "fewest"});
    else
      append(d.question, {"the", most ? "maximum" : "minimum", "number", "of"});
    d.question.push_back(kTypes[r.object].plural);
    d.question.push_back("?");
    d.artifacts = {{}, {r.name}, {kTypes[r.subject].name, kTypes[r.object].name}, {}};
    d.program.actions = {act(Op::SelectAll, {typ(0), rel(0), typ(1)}), act(most ? Op::ArgMax : Op::ArgMin, {})};
    return d;
  }

  std::optional<Draft> comparative(bool counted) {
    const Relation& r = pick_relation();
    EntityMap groups = kb_.select_all(kTypes[r.subject].name, r.name, kTypes[r.object].name);
    if (groups.empty()) return std::nullopt;
    std::vector<int> sizes;
    for (const auto& [k, v] : groups) sizes.push_back(static_cast<int>(v.size()));
    const int lo = *std::min_element(sizes.begin(), sizes.end());
    const int hi = *std::max_element(sizes.begin(), sizes.end());
    Op op;
    int n;
    std::vector<std::string> phrase;
    switch (uniform(0, 2)) {
      case 0:
        if (hi == lo) return std::nullopt;
        op = Op::GreaterThan, n = uniform(lo, hi - 1), phrase = {"more", "than"};
        break;
      case 1:
        if (hi == lo) return std::nullopt;
        op = Op::LessThan, n = uniform(lo + 1, hi), phrase = {"fewer", "than"};
        break;
      default:
        op = Op::EqualTo, n = pick(sizes), phrase = {"exactly"};
        break;
    }
    Draft d;
    d.question = counted ? std::vector<std::string>{"how", "many"} : std::vector<std::string>{"which"};
    d.question.push_back(kTypes[r.subject].plural);
    append(d.question, r.verb);
    append(d.question, phrase);
    d.question.push_back(std::to_string(n));
    d.question.push_back(kTypes[r.object].plural);
    d.question.push_back("?");
    d.artifacts = {{}, {r.name}, {kTypes[r.subject].name, kTypes[r.object].name}, {n}};
    d.program.actions = {act(Op::SelectAll, {typ(0), rel(0), typ(1)}),
                         act(op, {Arg::slot_ref(ArgKind::Number, 0)})};
    if (counted) d.program.actions.push_back(act(Op::Count, {}));
    return d;
  }

  std::optional<Draft> count() {
    std::optional<Draft> d;
    switch (uniform(0, 2)) {
      case 0: {
        const Relation& r = pick_relation();
        auto e = subject_of(r);
        if (!e) return std::nullopt;
        d.emplace();
        d->question = {"how", "many", kTypes[r.object].plural, *e};
        append(d->question, r.verb);
        d->question.push_back("?");
        d->artifacts = {{*e}, {r.name}, {kTypes[r.object].name}, {}};
        d->program.actions = {act(Op::Select, {ent(0), rel(0), typ(0)})};
        break;
      }
      case 1: d = two_clauses({"how", "many"}, {"and"}, Op::Intersection); break;
      default: d = two_clauses({"how", "many"}, {"or"}, Op::Union); break;
    }
    if (d) d->program.actions.push_back(act(Op::Count, {}));
    return d;
  }

  const KnowledgeBase& kb_;
  std::mt19937_64& rng_;
  std::vector<Relation> relations_;
};

bool informative(const AnswerValue& a) {
  if (const auto* s = std::get_if<EntitySet>(&a)) return !s->empty();
  if (const auto* c = std::get_if<Count>(&a)) return c->value > 0;
  return true;
}

// Largest-remainder apportionment of `total` by `weights`.
std::vector<int> apportion(int total, const std::array<double, 7>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rest;
  int used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = total * weights[i] / sum;
    out[i] = static_cast<int>(exact);
    used += out[i];
    rest.emplace_back(exact - out[i], i);
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < total; ++i, ++used) ++out[rest[i % rest.size()].second];
  return out;
}

}  // namespace

KnowledgeBase generate_kb(const GeneratorConfig& cfg) {
  if (cfg.entities_per_type < 1) throw Error("generator: entities_per_type must be at least 1");
  std::mt19937_64 rng(derive_seed(cfg.seed, "kb"));
  KnowledgeBase::Builder b;
  const int n = cfg.entities_per_type;
  for (int t = 0; t < static_cast<int>(std::size(kTypes)); ++t)
    for (int i = 0; i < n; ++i) b.add_entity(entity_name(t, i), kTypes[t].name);
  for (const auto& rel : kBase) {
    for (int s = 0; s < n; ++s) {
      std::vector<int> objects(static_cast<std::size_t>(n));
      std::iota(objects.begin(), objects.end(), 0);
      std::shuffle(objects.begin(), objects.end(), rng);
      const int k = std::uniform_int_distribution<int>(rel.min_objects, std::min(rel.max_objects, n))(rng);
      for (int j = 0; j < k; ++j) {
        std::string subject = entity_name(rel.subject, s), object = entity_name(rel.object, objects[j]);
        b.add_triple(subject, rel.name, object);
        b.add_triple(object, rel.inverse, subject);
      }
    }
  }
  return b.build();
}

Dataset generate_dataset(const GeneratorConfig& cfg) {
  if (cfg.train < 0 || cfg.validation < 0 || cfg.test < 0) throw Error("generator: split sizes must be nonnegative");
  if (cfg.max_retries < 1) throw Error("generator: max_retries must be at least 1");
  if (std::any_of(cfg.proportions.begin(), cfg.proportions.end(), [](double w) { return w < 0.0; }) ||
      std::accumulate(cfg.proportions.begin(), cfg.proportions.end(), 0.0) <= 0.0)
    throw Error("generator: category proportions must be nonnegative and not all zero");

  Dataset data{generate_kb(cfg), {}, {}, {}};
  std::mt19937_64 rng(derive_seed(cfg.seed, "questions"));
  Writer writer(data.kb, rng);

  auto split = [&](const char* prefix, int size, std::vector<Sample>& out) {
    auto counts = apportion(size, cfg.proportions);
    std::vector<Category> plan;
    for (std::size_t c = 0; c < counts.size(); ++c) plan.insert(plan.end(), static_cast<std::size_t>(counts[c]), kAllCategories[c]);
    std::shuffle(plan.begin(), plan.end(), rng);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      std::optional<Sample> made;
      for (int attempt = 0; attempt < cfg.max_retries && !made; ++attempt) {
        auto d = writer.draft(plan[i]);
        if (!d) continue;
        AnswerValue gold = execute(d->program, data.kb, d->artifacts);
        if (!informative(gold)) continue;
        char id[64];
        std::snprintf(id, sizeof id, "%s-%05zu", prefix, i + 1);
        made = Sample{id, plan[i], std::move(d->question), std::move(d->artifacts), std::move(gold),
                      std::move(d->program)};
      }
      if (!made)
        throw Error("generator: template '" + std::string(category_name(plan[i])) +
                    "' produced no nonempty answer in " + std::to_string(cfg.max_retries) + " attempts");
      out.push_back(std::move(*made));
    }
  };
  split("train", cfg.train, data.train);
  split("valid", cfg.validation, data.validation);
  split("test", cfg.test, data.test);
  return data;
}

}  // namespace mrlcqa
