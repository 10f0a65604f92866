#include "mrlcqa/answer.hpp"

#include <algorithm>
#include <iterator>

namespace mrlcqa {

namespace {

std::size_t intersection_size(const EntitySet& a, const EntitySet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double non_set_score(const AnswerValue& predicted, const AnswerValue& gold) {
  if (const auto* p = std::get_if<Count>(&predicted)) return *p == std::get<Count>(gold) ? 1.0 : 0.0;
  const auto& p = std::get<BoolList>(predicted).values;
  const auto& g = std::get<BoolList>(gold).values;
  if (p.size() != g.size() || p.empty()) return p == g ? 1.0 : 0.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < p.size(); ++i) same += p[i] == g[i];
  return static_cast<double>(same) / static_cast<double>(p.size());
}

}  // namespace

double reward(const AnswerValue& predicted, const AnswerValue& gold) {
  if (predicted.index() != gold.index()) return 0.0;
  if (const auto* p = std::get_if<EntitySet>(&predicted)) {
    const auto& g = std::get<EntitySet>(gold);
    if (p->empty() && g.empty()) return 1.0;
    std::size_t inter = intersection_size(*p, g);
    std::size_t uni = p->size() + g.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
  }
  return non_set_score(predicted, gold);
}

double answer_f1(const AnswerValue& predicted, const AnswerValue& gold) {
  if (predicted.index() != gold.index()) return 0.0;
  if (const auto* p = std::get_if<EntitySet>(&predicted)) {
    const auto& g = std::get<EntitySet>(gold);
    if (p->empty() && g.empty()) return 1.0;
    std::size_t inter = intersection_size(*p, g);
    if (inter == 0) return 0.0;
    double precision = static_cast<double>(inter) / static_cast<double>(p->size());
    double recall = static_cast<double>(inter) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
  }
  return non_set_score(predicted, gold);
}

std::string to_string(const AnswerValue& answer, const KnowledgeBase& kb) {
  if (const auto* s = std::get_if<EntitySet>(&answer)) {
    std::string out = "{";
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (i) out += ", ";
      out += kb.entity_name((*s)[i]);
    }
    return out + "}";
  }
  if (const auto* c = std::get_if<Count>(&answer)) return std::to_string(c->value);
  const auto& b = std::get<BoolList>(answer).values;
  std::string out = "[";
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ", ";
    out += b[i] ? "true" : "false";
  }
  return out + "]";
}

}  // namespace mrlcqa
