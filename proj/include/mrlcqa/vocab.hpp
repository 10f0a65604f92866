#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrlcqa/interpreter.hpp"
#include "mrlcqa/program.hpp"

namespace mrlcqa {

// Largest artifact table the output vocabulary can address.
struct SlotLimits {
  int entities = 3;
  int relations = 2;
  int types = 2;
  int numbers = 1;

  int of(ArgKind kind) const;
  bool operator==(const SlotLimits&) const = default;
};

/// Output vocabulary: the twelve operators, END, then positional slot tokens
/// ENT_1.., REL_1.., TYPE_1.., NUM_1.. resolved against a question's artifacts.
class OutputVocab {
 public:
  explicit OutputVocab(SlotLimits limits = {});

  int size() const { return static_cast<int>(names_.size()); }
  int end_token() const { return static_cast<int>(kAllOps.size()); }
  int op_token(Op op) const { return static_cast<int>(op); }
  int slot_token(ArgKind kind, int index) const;
  const std::string& name(int token) const { return names_.at(token); }
  std::optional<int> token(const std::string& name) const;
  const SlotLimits& limits() const { return limits_; }

  // Slot tokens beyond the artifact counts are disallowed.
  std::vector<bool> mask(const ArtifactTable& artifacts) const;

  // Tokens for a slot-form program, terminated by END. Throws if an argument
  // is a literal or its slot is beyond the limits.
  std::vector<int> encode(const Program& program) const;
  // Inverse of encode(); nullopt if the token stream is not a sequence of
  // well-formed actions. Trailing tokens after END are ignored.
  std::optional<Program> decode(std::span<const int> tokens) const;

 private:
  SlotLimits limits_;
  std::vector<std::string> names_;
  std::vector<ArgKind> slot_kind_;  // per token; meaningful for slot tokens only
  std::vector<int> slot_index_;     // -1 for operators and END
  std::unordered_map<std::string, int> index_;
};

/// Input vocabulary: question words, relation and type names, plus reserved
/// markers for entity and number mentions.
class InputVocab {
 public:
  static constexpr int kUnknown = 0;
  static constexpr int kSeparator = 1;

  explicit InputVocab(SlotLimits limits = {});

  void add(const std::string& word);
  int size() const { return static_cast<int>(words_.size()); }
  int id(const std::string& word) const;  // kUnknown when absent
  const std::string& word(int id) const { return words_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  const SlotLimits& limits() const { return limits_; }

  // Reconstruct from a stored word list; the reserved prefix must match.
  static InputVocab from_words(SlotLimits limits, std::vector<std::string> words);

  bool operator==(const InputVocab& other) const { return words_ == other.words_ && limits_ == other.limits_; }

 private:
  SlotLimits limits_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

// Question tokens with entity/number mentions replaced by their markers,
// followed by the serialized artifact table.
std::vector<std::string> serialize_question(const std::vector<std::string>& question,
                                            const ArtifactTable& artifacts);

// Question tokens that are not KB-artifact mentions.
std::vector<std::string> content_tokens(const std::vector<std::string>& question,
                                        const ArtifactTable& artifacts);

}  // namespace mrlcqa
