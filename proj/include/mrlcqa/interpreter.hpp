#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrlcqa/answer.hpp"
#include "mrlcqa/error.hpp"
#include "mrlcqa/kb.hpp"
#include "mrlcqa/program.hpp"

namespace mrlcqa {

/// KB artifacts mentioned by a question, addressed by slot index.
struct ArtifactTable {
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::vector<std::string> types;
  std::vector<std::int64_t> numbers;

  std::size_t count(ArgKind kind) const;
  bool operator==(const ArtifactTable&) const = default;
};

class ExecutionError : public Error {
 public:
  ExecutionError(std::size_t action_index, const std::string& what)
      : Error("action " + std::to_string(action_index) + ": " + what), action_index_(action_index) {}

  std::size_t action_index() const { return action_index_; }

 private:
  std::size_t action_index_;
};

// An action with every argument bound to a KB id (-1 when the name is not in
// the KB, which selects nothing).
struct BoundAction {
  Op op = Op::Select;
  std::int32_t a = -1, b = -1, c = -1;
  std::int64_t number = 0;
};

// Throws ExecutionError if a slot has no entry in `artifacts`.
BoundAction bind(const Action& action, const ArtifactTable& artifacts, const KnowledgeBase& kb,
                 std::size_t index = 0);

/// Working-set machine. Callers are responsible for only applying actions
/// permitted by next_state().
class Machine {
 public:
  explicit Machine(const KnowledgeBase& kb) : kb_(&kb) {}

  void apply(const BoundAction& action);
  // Same as apply(SELECT/UNION/...) but with the selection already computed.
  void combine(Op op, const EntitySet& selection);
  void load_map(EntityMap map);

  StateKind state() const { return state_; }
  AnswerValue answer() const;

  const EntitySet& working_set() const { return working_set_; }

 private:
  const KnowledgeBase* kb_;
  StateKind state_ = StateKind::Empty;
  EntitySet working_set_;
  EntityMap working_map_;
  bool map_active_ = false;
  std::vector<bool> bools_;
  std::optional<AnswerValue> terminal_;
};

// Runs a valid program. Throws ExecutionError for invalid programs or
// unresolved slot references.
AnswerValue execute(const Program& program, const KnowledgeBase& kb, const ArtifactTable& artifacts = {});

}  // namespace mrlcqa
