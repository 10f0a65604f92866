#include "mrlcqa/program.hpp"

#include <charconv>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

namespace {

constexpr std::array<std::string_view, 12> kOpNames = {
    "SELECT",     "UNION",  "INTERSECTION", "DIFFERENCE",   "COUNT",     "BOOL",
    "SELECT_ALL", "ARGMAX", "ARGMIN",       "GREATER_THAN", "LESS_THAN", "EQUAL_TO"};

constexpr std::array<ArgKind, 3> kEntityTriple = {ArgKind::Entity, ArgKind::Relation, ArgKind::Type};
constexpr std::array<ArgKind, 3> kTypeTriple = {ArgKind::Type, ArgKind::Relation, ArgKind::Type};
constexpr std::array<ArgKind, 1> kEntityOnly = {ArgKind::Entity};
constexpr std::array<ArgKind, 1> kNumberOnly = {ArgKind::Number};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Arg parse_arg(std::string_view text, ArgKind kind) {
  std::string_view prefix = slot_prefix(kind);
  if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
      text[prefix.size()] == '_') {
    if (auto n = parse_int(text.substr(prefix.size() + 1)); n && *n >= 1)
      return Arg::slot_ref(kind, static_cast<int>(*n - 1));
  }
  if (kind == ArgKind::Number) {
    auto n = parse_int(text);
    if (!n) throw ParseError("<program>", 1, "expected integer or NUM slot, got '" + std::string(text) + "'");
    return Arg::integer(*n);
  }
  if (text.empty()) throw ParseError("<program>", 1, "empty argument");
  return Arg::name(kind, std::string(text));
}

}  // namespace

std::string_view op_name(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i)
    if (kOpNames[i] == name) return static_cast<Op>(i);
  return std::nullopt;
}

std::span<const ArgKind> op_signature(Op op) {
  switch (op) {
    case Op::Select:
    case Op::Union:
    case Op::Intersection:
    case Op::Difference:
      return kEntityTriple;
    case Op::SelectAll:
      return kTypeTriple;
    case Op::Bool:
      return kEntityOnly;
    case Op::GreaterThan:
    case Op::LessThan:
    case Op::EqualTo:
      return kNumberOnly;
    case Op::Count:
    case Op::ArgMax:
    case Op::ArgMin:
      return {};
  }
  return {};
}

std::string_view slot_prefix(ArgKind kind) {
  switch (kind) {
    case ArgKind::Entity: return "ENT";
    case ArgKind::Relation: return "REL";
    case ArgKind::Type: return "TYPE";
    case ArgKind::Number: return "NUM";
  }
  return "";
}

std::optional<StateKind> next_state(StateKind kind, Op op) {
  if (kind == StateKind::Terminal) return std::nullopt;
  switch (op) {
    case Op::Select:
      return StateKind::Set;
    case Op::SelectAll:
      return StateKind::Map;
    case Op::Union:
    case Op::Intersection:
    case Op::Difference:
    case Op::Bool:
      if (kind == StateKind::Set) return StateKind::Set;
      return std::nullopt;
    case Op::Count:
      if (kind == StateKind::Set || kind == StateKind::Map) return StateKind::Terminal;
      return std::nullopt;
    case Op::ArgMax:
    case Op::ArgMin:
    case Op::GreaterThan:
    case Op::LessThan:
    case Op::EqualTo:
      if (kind == StateKind::Map) return StateKind::Set;
      return std::nullopt;
  }
  return std::nullopt;
}

Validity validate(const Program& program) {
  if (program.empty()) return {false, 0, "empty program"};
  StateKind state = StateKind::Empty;
  for (std::size_t i = 0; i < program.actions.size(); ++i) {
    const Action& a = program.actions[i];
    auto sig = op_signature(a.op);
    if (a.args.size() != sig.size())
      return {false, i, std::string(op_name(a.op)) + " expects " + std::to_string(sig.size()) + " arguments"};
    for (std::size_t k = 0; k < sig.size(); ++k)
      if (a.args[k].kind != sig[k])
        return {false, i, std::string(op_name(a.op)) + " argument " + std::to_string(k + 1) + " has wrong kind"};
    if (state == StateKind::Terminal) return {false, i, "action after terminal COUNT"};
    auto next = next_state(state, a.op);
    if (!next) {
      const char* why = state == StateKind::Empty ? "no working set" : "operator does not apply to current state";
      return {false, i, std::string(op_name(a.op)) + ": " + why};
    }
    state = *next;
  }
  return {};
}

std::string to_string(const Action& action) {
  std::string out(op_name(action.op));
  out += '(';
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i) out += ", ";
    const Arg& a = action.args[i];
    if (a.is_slot()) {
      out += slot_prefix(a.kind);
      out += '_';
      out += std::to_string(a.slot + 1);
    } else if (a.kind == ArgKind::Number) {
      out += std::to_string(a.number);
    } else {
      out += a.symbol;
    }
  }
  out += ')';
  return out;
}

std::string to_string(const Program& program) {
  std::string out;
  for (const Action& a : program.actions) {
    out += to_string(a);
    out += '\n';
  }
  return out;
}

Action parse_action(std::string_view text) {
  text = trim(text);
  auto open = text.find('(');
  std::string_view name = trim(open == std::string_view::npos ? text : text.substr(0, open));
  auto op = op_from_name(name);
  if (!op) throw ParseError("<program>", 1, "unknown operator '" + std::string(name) + "'");
  Action action{*op, {}};
  auto sig = op_signature(*op);
  std::vector<std::string_view> raw;
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw ParseError("<program>", 1, "missing ')' in '" + std::string(text) + "'");
    std::string_view inner = trim(text.substr(open + 1, text.size() - open - 2));
    while (!inner.empty()) {
      auto comma = inner.find(',');
      raw.push_back(trim(inner.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      inner = inner.substr(comma + 1);
    }
  }
  if (raw.size() != sig.size())
    throw ParseError("<program>", 1,
                     std::string(name) + " expects " + std::to_string(sig.size()) + " arguments, got " +
                         std::to_string(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) action.args.push_back(parse_arg(raw[i], sig[i]));
  return action;
}

Program parse_program(std::string_view text) {
  Program p;
  std::size_t line = 0;
  while (!text.empty()) {
    auto end = text.find_first_of("\n;");
    std::string_view piece = trim(text.substr(0, end));
    ++line;
    if (!piece.empty()) {
      try {
        p.actions.push_back(parse_action(piece));
      } catch (const ParseError& e) {
        std::string msg = e.what();
        throw ParseError("<program>", line, msg.substr(msg.find(": ") + 2));
      }
    }
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return p;
}

}  // namespace mrlcqa
