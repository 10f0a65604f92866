#pragma once

#include <random>

#include "mrlcqa/kb.hpp"
#include "mrlcqa/program.hpp"

namespace fixtures {

// Uniformly chooses among the operators permitted in the current state, with
// literal arguments drawn from the KB's names (plus a few unknown names).
inline mrlcqa::Program random_valid_program(const mrlcqa::KnowledgeBase& kb, std::mt19937_64& rng,
                                            int max_len) {
  using namespace mrlcqa;
  std::uniform_int_distribution<int> len_dist(1, max_len);
  const int len = len_dist(rng);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto name_of = [&](ArgKind kind) -> std::string {
    if (pick(40) == 0) return "unknown_name";
    switch (kind) {
      case ArgKind::Entity: return kb.entity_name(static_cast<EntityId>(pick(kb.entity_count())));
      case ArgKind::Relation: return kb.relation_name(static_cast<RelationId>(pick(kb.relation_count())));
      default: return kb.type_name(static_cast<TypeId>(pick(kb.type_count())));
    }
  };
  Program p;
  StateKind state = StateKind::Empty;
  for (int i = 0; i < len && state != StateKind::Terminal; ++i) {
    std::vector<Op> options;
    for (Op op : kAllOps)
      if (next_state(state, op)) options.push_back(op);
    Op op = options[pick(options.size())];
    Action a{op, {}};
    for (ArgKind kind : op_signature(op)) {
      if (kind == ArgKind::Number)
        a.args.push_back(Arg::integer(static_cast<std::int64_t>(pick(5))));
      else
        a.args.push_back(Arg::name(kind, name_of(kind)));
    }
    p.actions.push_back(std::move(a));
    state = *next_state(state, op);
  }
  return p;
}

}  // namespace fixtures
