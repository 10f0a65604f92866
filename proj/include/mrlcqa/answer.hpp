#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mrlcqa/kb.hpp"

namespace mrlcqa {

struct Count {
  std::int64_t value = 0;
  auto operator<=>(const Count&) const = default;
};

struct BoolList {
  std::vector<bool> values;
  bool operator==(const BoolList&) const = default;
};

// Denotation of a program: an entity set, a count, or a list of verdicts.
using AnswerValue = std::variant<EntitySet, Count, BoolList>;

// Partial reward in [0, 1]. Different variants score 0; sets score Jaccard
// (two empty sets score 1); counts score exact match; verdict lists score the
// fraction of agreeing positions when lengths match, else 0.
double reward(const AnswerValue& predicted, const AnswerValue& gold);

// Per-question F1: harmonic mean of precision and recall for entity sets,
// the reward value for counts and verdict lists.
double answer_f1(const AnswerValue& predicted, const AnswerValue& gold);

std::string to_string(const AnswerValue& answer, const KnowledgeBase& kb);

}  // namespace mrlcqa
