#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mrlcqa/kb.hpp"
#include "mrlcqa/sample.hpp"

namespace mrlcqa {

struct GeneratorConfig {
  int entities_per_type = 30;
  int train = 3000;
  int validation = 300;
  int test = 700;
  // Relative category frequencies, in kAllCategories order.
  std::array<double, 7> proportions = {462, 93, 99, 43, 41, 122, 42};
  int max_retries = 200;
  std::uint64_t seed = 1;
};

struct Dataset {
  KnowledgeBase kb;
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

// Throws Error for invalid sizes, or naming the template that could not
// produce a nonempty answer within max_retries.
Dataset generate_dataset(const GeneratorConfig& cfg);

// The knowledge base alone; same as generate_dataset(cfg).kb.
KnowledgeBase generate_kb(const GeneratorConfig& cfg);

}  // namespace mrlcqa
