#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrlcqa/trainer.hpp"

namespace mrlcqa {

struct QuestionRecord {
  std::string id;
  Category category = Category::SimpleQuestion;
  AnswerValue predicted;
  double f1 = 0.0;
  std::string program;  // empty when the decoded tokens were not a program
  bool valid = false;
  std::vector<std::pair<std::string, double>> support;  // adapted mode only

  bool operator==(const QuestionRecord&) const = default;
};

/// For entity-set answers F1 is the usual precision/recall mean; for counts
/// and boolean lists it is the reward (exact or positional match).
struct EvalReport {
  std::map<Category, double> per_category_f1;  // categories present in the test set
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<QuestionRecord> records;

  bool operator==(const EvalReport&) const = default;
};

// Per-category, macro and micro scores from the records.
EvalReport summarize(std::vector<QuestionRecord> records);

// Frozen mode decodes greedily under theta; adapted mode runs infer() with
// support retrieved from `corpus` using theta's embeddings.
EvalReport evaluate(const PolicyParameters& theta, std::span<const Sample> test, std::span<const Sample> corpus,
                    const Environment& env, const TrainingConfig& cfg, bool adapted);

nlohmann::json report_to_json(const EvalReport& report, const KnowledgeBase& kb);
EvalReport report_from_json(const nlohmann::json& j, const KnowledgeBase& kb);

}  // namespace mrlcqa
