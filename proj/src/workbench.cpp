#include "mrlcqa/workbench.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

using nlohmann::json;

ExperimentConfig seeded(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.generator.seed = seed;
  cfg.training.seed = seed;
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.training);
  auto need = [](bool ok, const char* field) {
    if (!ok) throw Error(std::string("invalid experiment config: ") + field);
  };
  need(cfg.generator.entities_per_type >= 1, "entities_per_type");
  need(cfg.generator.train >= 1, "train");
  need(cfg.generator.test >= 1, "test");
  need(cfg.embed >= 1, "embed");
  need(cfg.hidden >= 1, "hidden");
  need(cfg.bfs_max_len >= 1, "bfs_max_len");
  need(cfg.pretrain_questions >= 1, "pretrain_questions");
  need(cfg.pg_questions >= 1, "pg_questions");
  need(cfg.meta_questions >= 1, "meta_questions");
}

void save_dataset(const std::string& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  data.kb.save(dir + "/kb.txt");
  save_samples(dir + "/train.jsonl", data.train, data.kb);
  save_samples(dir + "/valid.jsonl", data.validation, data.kb);
  save_samples(dir + "/test.jsonl", data.test, data.kb);
}

Dataset load_dataset(const std::string& dir) {
  Dataset d{KnowledgeBase::load(dir + "/kb.txt"), {}, {}, {}};
  d.train = load_samples(dir + "/train.jsonl", d.kb);
  d.validation = load_samples(dir + "/valid.jsonl", d.kb);
  d.test = load_samples(dir + "/test.jsonl", d.kb);
  return d;
}

json annotated_to_json(const AnnotatedSample& a, const KnowledgeBase& kb) {
  json j = sample_to_json(a.sample, kb);
  Sample pseudo;
  pseudo.gold_program = a.program;
  j["pseudo_gold"] = sample_to_json(pseudo, kb).at("program");
  return j;
}

AnnotatedSample annotated_from_json(const json& j, const KnowledgeBase& kb) {
  return AnnotatedSample{sample_from_json(j, kb), parse_program(j.at("pseudo_gold").get<std::string>())};
}

void save_annotated(const std::string& path, const std::vector<AnnotatedSample>& items, const KnowledgeBase& kb) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& a : items) out << annotated_to_json(a, kb).dump() << '\n';
}

std::vector<AnnotatedSample> load_annotated(const std::string& path, const KnowledgeBase& kb) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<AnnotatedSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(annotated_from_json(json::parse(line), kb));
    } catch (const std::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

std::vector<AnnotatedSample> annotate(std::span<const Sample> samples, const KnowledgeBase& kb, int max_len, int limit,
                                      std::size_t* attempted) {
  std::vector<AnnotatedSample> out;
  std::size_t tried = 0;
  for (const auto& s : samples) {
    if (limit >= 0 && out.size() >= static_cast<std::size_t>(limit)) break;
    ++tried;
    if (auto a = bfs_annotate(s, kb, max_len)) out.push_back(std::move(*a));
  }
  if (attempted) *attempted = tried;
  return out;
}

AblationResult run_ablation(const ExperimentConfig& cfg, const Progress& progress) {
  validate(cfg);
  const auto started = std::chrono::steady_clock::now();
  auto say = [&](const std::string& what) {
    if (progress) progress(what);
  };
  AblationResult result;

  Dataset data = generate_dataset(cfg.generator);
  std::span<const Sample> train(data.train);
  say("generated " + std::to_string(data.train.size()) + " train / " + std::to_string(data.test.size()) + " test");

  auto annotated = annotate(train, data.kb, cfg.bfs_max_len, cfg.pretrain_questions, &result.annotation_attempts);
  result.annotated = annotated.size();
  if (annotated.empty()) throw Error("run_ablation: BFS annotated no samples");
  std::size_t offset = result.annotation_attempts;
  auto slice = [&](int count) {
    if (offset + static_cast<std::size_t>(count) > train.size())
      throw Error("run_ablation: training split too small for the requested slices");
    auto s = train.subspan(offset, static_cast<std::size_t>(count));
    offset += static_cast<std::size_t>(count);
    return s;
  };
  auto pg_slice = slice(cfg.pg_questions);
  auto meta_slice = slice(cfg.meta_questions);

  Model model = make_model(build_input_vocab(train), cfg.embed, cfg.hidden, derive_seed(cfg.seed, "init"));
  Environment env(data.kb, model);
  PretrainStats pre;
  PolicyParameters theta = pretrain_teacher_forcing(model.theta, annotated, env, cfg.training, &pre);
  say("pretrained on " + std::to_string(annotated.size()) + " annotated, final loss " +
      std::to_string(pre.epoch_loss.empty() ? 0.0 : pre.epoch_loss.back()));

  PgStats pg_stats;
  PolicyParameters pg = pg_train(theta, pg_slice, env, cfg.training, &pg_stats);
  say("policy gradient on " + std::to_string(pg_slice.size()) + " questions, " +
      std::to_string(pg_stats.updates) + " updates");

  PolicyParameters meta = meta_train(pg, meta_slice, train, env, cfg.training);
  say("meta-trained on " + std::to_string(meta_slice.size()) + " tasks");

  result.pg_frozen = evaluate(pg, data.test, train, env, cfg.training, false);
  say("PG frozen macro F1 " + std::to_string(result.pg_frozen.macro_f1));
  result.meta_frozen = evaluate(meta, data.test, train, env, cfg.training, false);
  result.adapted = evaluate(meta, data.test, train, env, cfg.training, true);
  say("meta adapted macro F1 " + std::to_string(result.adapted.macro_f1));
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace mrlcqa
