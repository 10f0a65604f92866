#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrlcqa/evaluate.hpp"
#include "mrlcqa/generator.hpp"
#include "mrlcqa/trainer.hpp"

namespace mrlcqa {

struct ExperimentConfig {
  GeneratorConfig generator;
  TrainingConfig training;
  int embed = 50;
  int hidden = 128;
  int bfs_max_len = 3;
  // Disjoint slices of the training split, taken in this order.
  int pretrain_questions = 300;
  int pg_questions = 300;
  int meta_questions = 200;
  std::uint64_t seed = 1;
};

// Copies cfg.seed into the generator and trainer seeds.
ExperimentConfig seeded(ExperimentConfig cfg, std::uint64_t seed);

// Throws Error naming the first invalid field.
void validate(const ExperimentConfig& cfg);

// <dir>/kb.txt, train.jsonl, valid.jsonl, test.jsonl
void save_dataset(const std::string& dir, const Dataset& data);
Dataset load_dataset(const std::string& dir);

nlohmann::json annotated_to_json(const AnnotatedSample& a, const KnowledgeBase& kb);
AnnotatedSample annotated_from_json(const nlohmann::json& j, const KnowledgeBase& kb);
void save_annotated(const std::string& path, const std::vector<AnnotatedSample>& items, const KnowledgeBase& kb);
std::vector<AnnotatedSample> load_annotated(const std::string& path, const KnowledgeBase& kb);

// BFS over samples in order, keeping at most `limit` annotated ones (all when
// limit < 0). `attempted` receives how many samples were searched.
std::vector<AnnotatedSample> annotate(std::span<const Sample> samples, const KnowledgeBase& kb, int max_len,
                                      int limit = -1, std::size_t* attempted = nullptr);

struct AblationResult {
  EvalReport pg_frozen;
  EvalReport meta_frozen;
  EvalReport adapted;
  std::size_t annotated = 0;
  std::size_t annotation_attempts = 0;
  double seconds = 0.0;

  double gain() const { return adapted.macro_f1 - pg_frozen.macro_f1; }
};

using Progress = std::function<void(const std::string&)>;

// Generate, BFS-annotate, pretrain, PG, meta-train, then score the PG model
// frozen and the meta-trained model with per-question adaptation.
AblationResult run_ablation(const ExperimentConfig& cfg, const Progress& progress = {});

}  // namespace mrlcqa
