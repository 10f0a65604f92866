#include "mrlcqa/vocab.hpp"

#include <algorithm>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

namespace {

constexpr std::array<ArgKind, 4> kSlotKinds = {ArgKind::Entity, ArgKind::Relation, ArgKind::Type,
                                               ArgKind::Number};

std::string slot_name(ArgKind kind, int index) {
  return std::string(slot_prefix(kind)) + "_" + std::to_string(index + 1);
}

}  // namespace

int SlotLimits::of(ArgKind kind) const {
  switch (kind) {
    case ArgKind::Entity: return entities;
    case ArgKind::Relation: return relations;
    case ArgKind::Type: return types;
    case ArgKind::Number: return numbers;
  }
  return 0;
}

OutputVocab::OutputVocab(SlotLimits limits) : limits_(limits) {
  for (Op op : kAllOps) {
    names_.emplace_back(op_name(op));
    slot_kind_.push_back(ArgKind::Entity);
    slot_index_.push_back(-1);
  }
  names_.emplace_back("END");
  slot_kind_.push_back(ArgKind::Entity);
  slot_index_.push_back(-1);
  for (ArgKind kind : kSlotKinds) {
    for (int i = 0; i < limits.of(kind); ++i) {
      names_.push_back(slot_name(kind, i));
      slot_kind_.push_back(kind);
      slot_index_.push_back(i);
    }
  }
  for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], static_cast<int>(i));
}

int OutputVocab::slot_token(ArgKind kind, int index) const {
  if (index < 0 || index >= limits_.of(kind))
    throw Error("slot " + slot_name(kind, index) + " exceeds output vocabulary limits");
  return index_.at(slot_name(kind, index));
}

std::optional<int> OutputVocab::token(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<bool> OutputVocab::mask(const ArtifactTable& artifacts) const {
  std::vector<bool> allowed(names_.size(), true);
  for (std::size_t t = 0; t < names_.size(); ++t)
    if (slot_index_[t] >= 0)
      allowed[t] = static_cast<std::size_t>(slot_index_[t]) < artifacts.count(slot_kind_[t]);
  return allowed;
}

std::vector<int> OutputVocab::encode(const Program& program) const {
  std::vector<int> tokens;
  for (const Action& a : program.actions) {
    tokens.push_back(op_token(a.op));
    for (const Arg& arg : a.args) {
      if (!arg.is_slot()) throw Error("cannot tokenize literal argument in " + to_string(a));
      tokens.push_back(slot_token(arg.kind, arg.slot));
    }
  }
  tokens.push_back(end_token());
  return tokens;
}

std::optional<Program> OutputVocab::decode(std::span<const int> tokens) const {
  Program program;
  std::size_t i = 0;
  auto valid = [&](int t) { return t >= 0 && t < size(); };
  while (i < tokens.size()) {
    int t = tokens[i++];
    if (!valid(t)) return std::nullopt;
    if (t == end_token()) break;
    if (t > end_token()) return std::nullopt;
    Action action{static_cast<Op>(t), {}};
    for (ArgKind kind : op_signature(action.op)) {
      if (i >= tokens.size()) return std::nullopt;
      int s = tokens[i++];
      if (!valid(s) || slot_index_[s] < 0 || slot_kind_[s] != kind) return std::nullopt;
      action.args.push_back(Arg::slot_ref(kind, slot_index_[s]));
    }
    program.actions.push_back(std::move(action));
  }
  return program;
}

InputVocab::InputVocab(SlotLimits limits) : limits_(limits) {
  add("<unk>");
  add("<sep>");
  for (int i = 0; i < limits.entities; ++i) add(slot_name(ArgKind::Entity, i));
  for (int i = 0; i < limits.numbers; ++i) add(slot_name(ArgKind::Number, i));
}

void InputVocab::add(const std::string& word) {
  if (index_.count(word)) return;
  index_.emplace(word, static_cast<int>(words_.size()));
  words_.push_back(word);
}

int InputVocab::id(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnknown : it->second;
}

InputVocab InputVocab::from_words(SlotLimits limits, std::vector<std::string> words) {
  InputVocab vocab(limits);
  if (words.size() < vocab.words_.size() || !std::equal(vocab.words_.begin(), vocab.words_.end(), words.begin()))
    throw Error("input vocabulary does not start with the reserved tokens");
  for (auto& w : words) vocab.add(w);
  if (vocab.words_.size() != words.size()) throw Error("input vocabulary has duplicate words");
  return vocab;
}

std::vector<std::string> serialize_question(const std::vector<std::string>& question,
                                            const ArtifactTable& artifacts) {
  std::vector<std::string> out;
  out.reserve(question.size() + 8);
  for (const std::string& w : question) {
    auto e = std::find(artifacts.entities.begin(), artifacts.entities.end(), w);
    if (e != artifacts.entities.end()) {
      out.push_back(slot_name(ArgKind::Entity, static_cast<int>(e - artifacts.entities.begin())));
      continue;
    }
    auto n = std::find_if(artifacts.numbers.begin(), artifacts.numbers.end(),
                          [&](std::int64_t v) { return std::to_string(v) == w; });
    if (n != artifacts.numbers.end()) {
      out.push_back(slot_name(ArgKind::Number, static_cast<int>(n - artifacts.numbers.begin())));
      continue;
    }
    out.push_back(w);
  }
  out.emplace_back("<sep>");
  for (std::size_t i = 0; i < artifacts.entities.size(); ++i)
    out.push_back(slot_name(ArgKind::Entity, static_cast<int>(i)));
  out.emplace_back("<sep>");
  for (const auto& r : artifacts.relations) out.push_back(r);
  out.emplace_back("<sep>");
  for (const auto& t : artifacts.types) out.push_back(t);
  out.emplace_back("<sep>");
  for (std::size_t i = 0; i < artifacts.numbers.size(); ++i)
    out.push_back(slot_name(ArgKind::Number, static_cast<int>(i)));
  return out;
}

std::vector<std::string> content_tokens(const std::vector<std::string>& question,
                                        const ArtifactTable& artifacts) {
  std::vector<std::string> out;
  auto mentioned = [&](const std::string& w) {
    auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), w) != v.end(); };
    if (in(artifacts.entities) || in(artifacts.relations) || in(artifacts.types)) return true;
    return std::any_of(artifacts.numbers.begin(), artifacts.numbers.end(),
                       [&](std::int64_t v) { return std::to_string(v) == w; });
  };
  for (const auto& w : question)
    if (!mentioned(w)) out.push_back(w);
  return out;
}

}  // namespace mrlcqa
