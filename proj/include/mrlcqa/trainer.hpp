#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "mrlcqa/adam.hpp"
#include "mrlcqa/kb.hpp"
#include "mrlcqa/model.hpp"
#include "mrlcqa/policy.hpp"
#include "mrlcqa/retriever.hpp"
#include "mrlcqa/sample.hpp"
#include "mrlcqa/seed.hpp"

namespace mrlcqa {

enum class OuterUpdate { Reptile, FirstOrderMaml };

struct TrainingConfig {
  double inner_lr = 1e-4;  // eta1, plain ascent for adaptation and meta-test steps
  double outer_lr = 0.1;   // eta2
  int samples = 5;         // K, trajectories per support question
  int meta_samples = 5;    // K', trajectories for the meta-test question
  int support_size = 5;    // N
  double threshold = 0.85;
  int max_decode_len = 16;
  int batch_tasks = 1;

  int pretrain_epochs = 30;
  int pretrain_batch = 8;
  AdamConfig pretrain_adam{1e-3};
  int pg_epochs = 2;
  AdamConfig pg_adam{1e-4};
  bool baseline = false;
  double baseline_decay = 0.9;
  int meta_epochs = 1;
  OuterUpdate outer = OuterUpdate::Reptile;

  std::uint64_t seed = 1;
};

// Throws Error naming the first invalid field.
void validate(const TrainingConfig& cfg);

/// Inputs and scoring shared by every procedure.
class Environment {
 public:
  Environment(const KnowledgeBase& kb, const InputVocab& input, const OutputVocab& output)
      : kb_(&kb), input_(&input), output_(&output) {}
  Environment(const KnowledgeBase& kb, const Model& model) : Environment(kb, model.input, model.output) {}

  const KnowledgeBase& kb() const { return *kb_; }
  const OutputVocab& output() const { return *output_; }
  const InputVocab& input() const { return *input_; }

  InputSequence encode(const Sample& s) const { return encode_input(s, *input_, *output_); }
  // nullopt for token streams that do not decode to an executable program.
  std::optional<AnswerValue> run(const Sample& s, std::span<const int> tokens) const;
  double score(const Sample& s, std::span<const int> tokens) const;

 private:
  const KnowledgeBase* kb_;
  const InputVocab* input_;
  const OutputVocab* output_;
};

struct AnnotatedSample {
  Sample sample;
  Program program;
};

// First reward-1 program in breadth-first canonical order over the sample's
// slots: length, then operator order, then slot indices.
std::optional<AnnotatedSample> bfs_annotate(const Sample& s, const KnowledgeBase& kb, int max_len,
                                            SlotLimits limits = {});

struct PretrainStats {
  std::vector<double> batch_loss;  // mean per-token cross-entropy
  std::vector<double> epoch_loss;
};

PolicyParameters pretrain_teacher_forcing(PolicyParameters theta, std::span<const AnnotatedSample> annotated,
                                          const Environment& env, const TrainingConfig& cfg,
                                          PretrainStats* stats = nullptr);

struct PgStats {
  std::vector<double> epoch_reward;  // mean sampled reward
  long updates = 0;
};

PolicyParameters pg_train(PolicyParameters theta, std::span<const Sample> samples, const Environment& env,
                          const TrainingConfig& cfg, PgStats* stats = nullptr);

// One VPG step of size `lr` on the surrogate; returns the mean sampled reward.
double vpg_step(PolicyParameters& theta, const Sample& s, const Environment& env, int count, double lr,
                int max_len, std::uint64_t seed);

// Sequential VPG steps over the support questions, starting from a copy of theta.
PolicyParameters adapt(const PolicyParameters& theta, std::span<const Sample* const> support,
                       const Environment& env, const TrainingConfig& cfg, std::uint64_t seed,
                       double* mean_reward = nullptr);

struct PseudoTask {
  const Sample* meta_test = nullptr;
  std::vector<const Sample*> support;
  SupportSet scores;
};

// Support sets are retrieved once, with the given parameters' embeddings.
std::vector<PseudoTask> build_tasks(std::span<const Sample> q_meta, std::span<const Sample> corpus,
                                    const PolicyParameters& theta, const Environment& env,
                                    const TrainingConfig& cfg);

struct TaskOutcome {
  PolicyParameters adapted;  // theta'
  PolicyParameters stepped;  // theta'' after one step on the meta-test question
  double inner_reward = 0.0;
  double meta_reward = 0.0;
};

TaskOutcome run_task(const PolicyParameters& theta, const PseudoTask& task, const Environment& env,
                     const TrainingConfig& cfg, std::uint64_t seed);

// Seed meta_train uses for a task within an outer iteration.
std::uint64_t task_seed(const TrainingConfig& cfg, long iteration, std::size_t task);

struct MetaRecord {
  long iteration = 0;
  double meta_reward = 0.0;
  double inner_reward = 0.0;
  double wall_time = 0.0;
};

nlohmann::json to_json(const MetaRecord& r);

// Called after every outer update with the updated parameters.
using MetaLogger = std::function<void(const MetaRecord&, const PolicyParameters&)>;

PolicyParameters meta_train(PolicyParameters theta, std::span<const PseudoTask> tasks, const Environment& env,
                            const TrainingConfig& cfg, const MetaLogger& log = {});
PolicyParameters meta_train(PolicyParameters theta, std::span<const Sample> q_meta, std::span<const Sample> corpus,
                            const Environment& env, const TrainingConfig& cfg, const MetaLogger& log = {});

struct Inference {
  std::vector<int> tokens;
  std::optional<Program> program;
  AnswerValue answer;  // empty set when the program did not run
  bool valid = false;
  SupportSet support;
};

// Greedy decoding under theta without adaptation.
Inference infer_frozen(const PolicyParameters& theta, const Sample& q, const Environment& env,
                       const TrainingConfig& cfg);
// Retrieve support from the retriever's corpus, adapt a copy of theta, decode.
Inference infer(const PolicyParameters& theta, const Sample& q, const Retriever& retriever, const Environment& env,
                const TrainingConfig& cfg);

}  // namespace mrlcqa
