#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrlcqa {

// Order matters: breadth-first annotation enumerates operators in this order.
enum class Op : std::uint8_t {
  Select,
  Union,
  Intersection,
  Difference,
  Count,
  Bool,
  SelectAll,
  ArgMax,
  ArgMin,
  GreaterThan,
  LessThan,
  EqualTo,
};

inline constexpr std::array<Op, 12> kAllOps = {
    Op::Select, Op::Union,     Op::Intersection, Op::Difference,  Op::Count,    Op::Bool,
    Op::SelectAll, Op::ArgMax, Op::ArgMin,       Op::GreaterThan, Op::LessThan, Op::EqualTo};

enum class ArgKind : std::uint8_t { Entity, Relation, Type, Number };

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);
std::span<const ArgKind> op_signature(Op op);

// Slot token prefix for a kind: ENT, REL, TYPE, NUM.
std::string_view slot_prefix(ArgKind kind);

/// An operator argument: either a positional slot into the question's
/// artifact table, or a literal (KB name or integer).
struct Arg {
  ArgKind kind = ArgKind::Entity;
  int slot = -1;  // 0-based; -1 for literals
  std::string symbol;
  std::int64_t number = 0;

  static Arg slot_ref(ArgKind kind, int index) { return {kind, index, {}, 0}; }
  static Arg name(ArgKind kind, std::string symbol) { return {kind, -1, std::move(symbol), 0}; }
  static Arg integer(std::int64_t n) { return {ArgKind::Number, -1, {}, n}; }

  bool is_slot() const { return slot >= 0; }
  bool operator==(const Arg&) const = default;
};

struct Action {
  Op op = Op::Select;
  std::vector<Arg> args;

  bool operator==(const Action&) const = default;
};

struct Program {
  std::vector<Action> actions;

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  bool operator==(const Program&) const = default;
};

// Kind of value the machine holds between actions.
enum class StateKind : std::uint8_t { Empty, Set, Map, Terminal };

// State after applying `op` in state `kind`, or nullopt if `op` may not follow it.
std::optional<StateKind> next_state(StateKind kind, Op op);

struct Validity {
  bool ok = true;
  std::size_t index = 0;  // first offending action when !ok
  std::string reason;

  explicit operator bool() const { return ok; }
};

Validity validate(const Program& program);

// `OPERATOR(arg1, arg2, ...)`, one action per line.
std::string to_string(const Action& action);
std::string to_string(const Program& program);
Action parse_action(std::string_view text);
// Accepts newline- or `;`-separated actions; blank lines are skipped.
Program parse_program(std::string_view text);

}  // namespace mrlcqa
