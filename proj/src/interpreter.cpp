#include "mrlcqa/interpreter.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

namespace mrlcqa {

std::size_t ArtifactTable::count(ArgKind kind) const {
  switch (kind) {
    case ArgKind::Entity: return entities.size();
    case ArgKind::Relation: return relations.size();
    case ArgKind::Type: return types.size();
    case ArgKind::Number: return numbers.size();
  }
  return 0;
}

namespace {

std::int32_t lookup(const KnowledgeBase& kb, ArgKind kind, const std::string& name) {
  std::optional<std::int32_t> id;
  switch (kind) {
    case ArgKind::Entity: id = kb.entity(name); break;
    case ArgKind::Relation: id = kb.relation(name); break;
    case ArgKind::Type: id = kb.type(name); break;
    case ArgKind::Number: break;
  }
  return id.value_or(-1);
}

}  // namespace

BoundAction bind(const Action& action, const ArtifactTable& artifacts, const KnowledgeBase& kb,
                 std::size_t index) {
  BoundAction out{action.op};
  std::int32_t* ids[3] = {&out.a, &out.b, &out.c};
  for (std::size_t k = 0; k < action.args.size() && k < 3; ++k) {
    const Arg& arg = action.args[k];
    if (arg.kind == ArgKind::Number) {
      if (!arg.is_slot()) {
        out.number = arg.number;
      } else if (static_cast<std::size_t>(arg.slot) < artifacts.numbers.size()) {
        out.number = artifacts.numbers[arg.slot];
      } else {
        throw ExecutionError(index, "unresolved slot NUM_" + std::to_string(arg.slot + 1));
      }
      continue;
    }
    if (!arg.is_slot()) {
      *ids[k] = lookup(kb, arg.kind, arg.symbol);
      continue;
    }
    const std::vector<std::string>* table = nullptr;
    switch (arg.kind) {
      case ArgKind::Entity: table = &artifacts.entities; break;
      case ArgKind::Relation: table = &artifacts.relations; break;
      default: table = &artifacts.types; break;
    }
    if (static_cast<std::size_t>(arg.slot) >= table->size())
      throw ExecutionError(index, "unresolved slot " + std::string(slot_prefix(arg.kind)) + "_" +
                                      std::to_string(arg.slot + 1));
    *ids[k] = lookup(kb, arg.kind, (*table)[arg.slot]);
  }
  return out;
}

void Machine::combine(Op op, const EntitySet& selection) {
  EntitySet out;
  switch (op) {
    case Op::Select:
      working_set_ = selection;
      map_active_ = false;
      working_map_.clear();
      state_ = StateKind::Set;
      return;
    case Op::Union:
      std::set_union(working_set_.begin(), working_set_.end(), selection.begin(), selection.end(),
                     std::back_inserter(out));
      break;
    case Op::Intersection:
      std::set_intersection(working_set_.begin(), working_set_.end(), selection.begin(), selection.end(),
                            std::back_inserter(out));
      break;
    case Op::Difference:
      std::set_difference(working_set_.begin(), working_set_.end(), selection.begin(), selection.end(),
                          std::back_inserter(out));
      break;
    default:
      return;
  }
  working_set_ = std::move(out);
}

void Machine::load_map(EntityMap map) {
  working_map_ = std::move(map);
  map_active_ = true;
  state_ = StateKind::Map;
}

void Machine::apply(const BoundAction& action) {
  switch (action.op) {
    case Op::Select:
    case Op::Union:
    case Op::Intersection:
    case Op::Difference: {
      EntitySet selection;
      if (action.a >= 0 && action.b >= 0 && action.c >= 0) selection = kb_->select(action.a, action.b, action.c);
      combine(action.op, selection);
      return;
    }
    case Op::Bool:
      bools_.push_back(action.a >= 0 &&
                       std::binary_search(working_set_.begin(), working_set_.end(), action.a));
      return;
    case Op::Count:
      terminal_ = Count{static_cast<std::int64_t>(map_active_ ? working_map_.size() : working_set_.size())};
      state_ = StateKind::Terminal;
      return;
    case Op::SelectAll: {
      EntityMap map;
      if (action.a >= 0 && action.b >= 0 && action.c >= 0) map = kb_->select_all(action.a, action.b, action.c);
      load_map(std::move(map));
      return;
    }
    case Op::ArgMax:
    case Op::ArgMin: {
      EntitySet out;
      std::size_t best = action.op == Op::ArgMax ? 0 : std::numeric_limits<std::size_t>::max();
      for (const auto& [key, group] : working_map_) {
        bool better = action.op == Op::ArgMax ? group.size() > best : group.size() < best;
        if (better) {
          best = group.size();
          out.clear();
        }
        if (group.size() == best) out.push_back(key);
      }
      working_set_ = std::move(out);
      working_map_.clear();
      map_active_ = false;
      state_ = StateKind::Set;
      return;
    }
    case Op::GreaterThan:
    case Op::LessThan:
    case Op::EqualTo: {
      EntitySet out;
      for (const auto& [key, group] : working_map_) {
        auto n = static_cast<std::int64_t>(group.size());
        bool keep = action.op == Op::GreaterThan ? n > action.number
                    : action.op == Op::LessThan  ? n < action.number
                                                 : n == action.number;
        if (keep) out.push_back(key);
      }
      working_set_ = std::move(out);
      working_map_.clear();
      map_active_ = false;
      state_ = StateKind::Set;
      return;
    }
  }
}

AnswerValue Machine::answer() const {
  if (terminal_) return *terminal_;
  if (!bools_.empty()) return BoolList{bools_};
  return working_set_;
}

AnswerValue execute(const Program& program, const KnowledgeBase& kb, const ArtifactTable& artifacts) {
  if (Validity v = validate(program); !v) throw ExecutionError(v.index, v.reason);
  Machine machine(kb);
  for (std::size_t i = 0; i < program.actions.size(); ++i)
    machine.apply(bind(program.actions[i], artifacts, kb, i));
  return machine.answer();
}

}  // namespace mrlcqa
