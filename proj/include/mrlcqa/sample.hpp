#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mrlcqa/answer.hpp"
#include "mrlcqa/interpreter.hpp"
#include "mrlcqa/kb.hpp"
#include "mrlcqa/program.hpp"

namespace mrlcqa {

enum class Category : std::uint8_t {
  SimpleQuestion,
  LogicalReasoning,
  QuantitativeReasoning,
  Verification,
  ComparativeReasoning,
  QuantitativeCount,
  ComparativeCount,
};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::SimpleQuestion,       Category::LogicalReasoning,  Category::QuantitativeReasoning,
    Category::Verification,         Category::ComparativeReasoning, Category::QuantitativeCount,
    Category::ComparativeCount};

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

/// One question: tokens, the KB artifacts it mentions, and its denotation.
/// The gold program is known to the generator and used only for checking.
struct Sample {
  std::string id;
  Category category = Category::SimpleQuestion;
  std::vector<std::string> question;
  ArtifactTable artifacts;
  AnswerValue gold;
  std::optional<Program> gold_program;
};

nlohmann::json answer_to_json(const AnswerValue& answer, const KnowledgeBase& kb);
// Throws ParseError for unknown entities or malformed values.
AnswerValue answer_from_json(const nlohmann::json& j, const KnowledgeBase& kb);

nlohmann::json sample_to_json(const Sample& s, const KnowledgeBase& kb);
Sample sample_from_json(const nlohmann::json& j, const KnowledgeBase& kb);

// One JSON object per line.
void write_samples(std::ostream& out, const std::vector<Sample>& samples, const KnowledgeBase& kb);
std::vector<Sample> read_samples(std::istream& in, const KnowledgeBase& kb, const std::string& source = "<samples>");
void save_samples(const std::string& path, const std::vector<Sample>& samples, const KnowledgeBase& kb);
std::vector<Sample> load_samples(const std::string& path, const KnowledgeBase& kb);

}  // namespace mrlcqa
