#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrlcqa/evaluate.hpp"
#include "mrlcqa/model.hpp"
#include "mrlcqa/retriever.hpp"
#include "mrlcqa/seed.hpp"
#include "mrlcqa/trainer.hpp"
#include "mrlcqa/workbench.hpp"

using namespace mrlcqa;

namespace {

ExperimentConfig g_cfg;

void add_global_options(CLI::App& app) {
  auto& gen = g_cfg.generator;
  auto& tr = g_cfg.training;
  app.add_option("--seed", g_cfg.seed, "Master seed for generation, initialization and training")->capture_default_str();

  app.add_option("--entities-per-type", gen.entities_per_type)->capture_default_str()->group("Data");
  app.add_option("--train-size", gen.train)->capture_default_str()->group("Data");
  app.add_option("--valid-size", gen.validation)->capture_default_str()->group("Data");
  app.add_option("--test-size", gen.test)->capture_default_str()->group("Data");
  app.add_option("--max-retries", gen.max_retries)->capture_default_str()->group("Data");

  app.add_option("--embed", g_cfg.embed, "Word embedding width")->capture_default_str()->group("Model");
  app.add_option("--hidden", g_cfg.hidden, "LSTM hidden width")->capture_default_str()->group("Model");

  app.add_option("--bfs-max-len", g_cfg.bfs_max_len)->capture_default_str()->group("Training");
  app.add_option("--pretrain-questions", g_cfg.pretrain_questions)->capture_default_str()->group("Training");
  app.add_option("--pg-questions", g_cfg.pg_questions)->capture_default_str()->group("Training");
  app.add_option("--meta-questions", g_cfg.meta_questions)->capture_default_str()->group("Training");
  app.add_option("--pretrain-epochs", tr.pretrain_epochs)->capture_default_str()->group("Training");
  app.add_option("--pretrain-batch", tr.pretrain_batch)->capture_default_str()->group("Training");
  app.add_option("--pretrain-lr", tr.pretrain_adam.lr)->capture_default_str()->group("Training");
  app.add_option("--pg-epochs", tr.pg_epochs)->capture_default_str()->group("Training");
  app.add_option("--pg-lr", tr.pg_adam.lr)->capture_default_str()->group("Training");
  app.add_flag("--baseline", tr.baseline, "Subtract a moving-average reward baseline during PG")->group("Training");
  app.add_option("--baseline-decay", tr.baseline_decay)->capture_default_str()->group("Training");
  app.add_option("--inner-lr", tr.inner_lr, "Adaptation step size")->capture_default_str()->group("Meta");
  app.add_option("--outer-lr", tr.outer_lr, "Meta update step size")->capture_default_str()->group("Meta");
  app.add_option("--samples", tr.samples, "Trajectories per support question")->capture_default_str()->group("Meta");
  app.add_option("--meta-samples", tr.meta_samples, "Trajectories for the meta-test question")
      ->capture_default_str()
      ->group("Meta");
  app.add_option("--support-size", tr.support_size)->capture_default_str()->group("Meta");
  app.add_option("--threshold", tr.threshold, "Cosine threshold for word alignment")->capture_default_str()->group("Meta");
  app.add_option("--max-decode-len", tr.max_decode_len)->capture_default_str()->group("Meta");
  app.add_option("--batch-tasks", tr.batch_tasks)->capture_default_str()->group("Meta");
  app.add_option("--meta-epochs", tr.meta_epochs)->capture_default_str()->group("Meta");
  const std::map<std::string, OuterUpdate> outer{{"reptile", OuterUpdate::Reptile},
                                                 {"fomaml", OuterUpdate::FirstOrderMaml}};
  app.add_option("--outer", tr.outer)
      ->transform(CLI::CheckedTransformer(outer, CLI::ignore_case))
      ->default_str("reptile")
      ->group("Meta");
}

ExperimentConfig resolved() {
  ExperimentConfig cfg = seeded(g_cfg, g_cfg.seed);
  validate(cfg);
  return cfg;
}

std::span<const Sample> split_of(const Dataset& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "valid") return d.validation;
  if (name == "test") return d.test;
  throw Error("unknown split '" + name + "'");
}

std::span<const Sample> slice(std::span<const Sample> all, int offset, int count) {
  if (offset < 0 || count < 0 || static_cast<std::size_t>(offset) + count > all.size())
    throw Error("slice [" + std::to_string(offset) + ", +" + std::to_string(count) + ") exceeds split of " +
                std::to_string(all.size()));
  return all.subspan(static_cast<std::size_t>(offset), static_cast<std::size_t>(count));
}

void print_report(const EvalReport& r) {
  for (auto c : kAllCategories) {
    auto it = r.per_category_f1.find(c);
    if (it == r.per_category_f1.end()) continue;
    std::cout << "  " << category_name(c) << '\t' << it->second << '\n';
  }
  std::cout << "macro F1\t" << r.macro_f1 << "\nmicro F1\t" << r.micro_f1 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-learned semantic parsing for complex questions over a toy knowledge base"};
  app.set_config("--config", "", "Read options from a key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  add_global_options(app);

  std::string data_dir, out, model_path, annotated_path, split = "test", report_path, log_path, id;
  int offset = -1, count = -1, limit = -1, checkpoint_every = 0;
  bool frozen = false, adapted = false;
  std::vector<std::uint64_t> seeds{1, 2, 3};

  auto* gen = app.add_subcommand("gen", "Generate a knowledge base and question splits")->fallthrough();
  gen->add_option("--out", out, "Output directory")->required();

  auto* ann = app.add_subcommand("annotate", "Search for pseudo-gold programs by BFS")->fallthrough();
  ann->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  ann->add_option("--split", split, "train, valid or test")->capture_default_str();
  ann->add_option("--limit", limit, "Stop after this many annotated samples (default: pretrain-questions)");
  ann->add_option("--out", out, "Output JSONL")->required();

  auto* pre = app.add_subcommand("pretrain", "Teacher-forced pretraining from a fresh model")->fallthrough();
  pre->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  pre->add_option("--annotated", annotated_path)->required()->check(CLI::ExistingFile);
  pre->add_option("--out", out, "Checkpoint to write")->required();

  auto* pg = app.add_subcommand("pg", "REINFORCE training on a slice of the training split")->fallthrough();
  pg->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  pg->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  pg->add_option("--offset", offset, "First question (default: pretrain-questions)");
  pg->add_option("--count", count, "Number of questions (default: pg-questions)");
  pg->add_option("--out", out, "Checkpoint to write")->required();

  auto* meta = app.add_subcommand("meta", "Meta-train over retrieval-built pseudo-tasks")->fallthrough();
  meta->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  meta->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  meta->add_option("--offset", offset, "First meta question (default: pretrain-questions + pg-questions)");
  meta->add_option("--count", count, "Number of meta questions (default: meta-questions)");
  meta->add_option("--out", out, "Checkpoint to write")->required();
  meta->add_option("--log", log_path, "Write one JSON record per outer update");
  meta->add_option("--checkpoint-every", checkpoint_every, "Also write <out>.<iteration> every N updates");

  auto* ev = app.add_subcommand("eval", "Score a checkpoint on a split")->fallthrough();
  ev->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  ev->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--split", split)->capture_default_str();
  auto* fr = ev->add_flag("--frozen", frozen, "Greedy decoding with fixed parameters");
  ev->add_flag("--adapted", adapted, "Adapt on retrieved support before decoding each question")->excludes(fr);
  ev->add_option("--report", report_path, "Write the per-question report as JSON");

  auto* inf = app.add_subcommand("infer", "Decode a single question")->fallthrough();
  inf->add_option("--data", data_dir)->required()->check(CLI::ExistingDirectory);
  inf->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  inf->add_option("--id", id)->required();
  inf->add_option("--split", split)->capture_default_str();
  inf->add_flag("--adapted", adapted);

  auto* abl = app.add_subcommand("ablation", "End-to-end PG frozen vs meta adapted comparison")->fallthrough();
  abl->add_option("--seeds", seeds)->capture_default_str()->delimiter(',');
  abl->add_option("--report", report_path, "Write a JSON summary");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolved();

    if (*gen) {
      Dataset d = generate_dataset(cfg.generator);
      save_dataset(out, d);
      std::cout << "triples\t" << d.kb.triples().size() << "\ntrain\t" << d.train.size() << "\nvalid\t"
                << d.validation.size() << "\ntest\t" << d.test.size() << '\n';
    } else if (*ann) {
      Dataset d = load_dataset(data_dir);
      std::size_t attempted = 0;
      auto items = annotate(split_of(d, split), d.kb, cfg.bfs_max_len, limit < 0 ? cfg.pretrain_questions : limit,
                            &attempted);
      save_annotated(out, items, d.kb);
      std::cout << "annotated\t" << items.size() << "\nattempted\t" << attempted << '\n';
    } else if (*pre) {
      Dataset d = load_dataset(data_dir);
      auto items = load_annotated(annotated_path, d.kb);
      Model model = make_model(build_input_vocab(d.train), cfg.embed, cfg.hidden, derive_seed(cfg.seed, "init"));
      Environment env(d.kb, model);
      PretrainStats stats;
      model.theta = pretrain_teacher_forcing(model.theta, items, env, cfg.training, &stats);
      save_checkpoint(out, model);
      for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
        std::cout << "epoch " << e + 1 << "\tloss " << stats.epoch_loss[e] << '\n';
    } else if (*pg) {
      Dataset d = load_dataset(data_dir);
      Model model = load_checkpoint(model_path);
      Environment env(d.kb, model);
      auto qs = slice(d.train, offset < 0 ? cfg.pretrain_questions : offset, count < 0 ? cfg.pg_questions : count);
      PgStats stats;
      model.theta = pg_train(model.theta, qs, env, cfg.training, &stats);
      save_checkpoint(out, model);
      for (std::size_t e = 0; e < stats.epoch_reward.size(); ++e)
        std::cout << "epoch " << e + 1 << "\treward " << stats.epoch_reward[e] << '\n';
      std::cout << "updates\t" << stats.updates << '\n';
    } else if (*meta) {
      Dataset d = load_dataset(data_dir);
      Model model = load_checkpoint(model_path);
      Environment env(d.kb, model);
      auto qs = slice(d.train, offset < 0 ? cfg.pretrain_questions + cfg.pg_questions : offset,
                      count < 0 ? cfg.meta_questions : count);
      std::ofstream log;
      if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw Error("cannot write " + log_path);
      }
      Model snapshot = model;
      auto logger = [&](const MetaRecord& r, const PolicyParameters& theta) {
        if (log.is_open()) log << to_json(r).dump() << '\n';
        if (checkpoint_every > 0 && (r.iteration + 1) % checkpoint_every == 0) {
          snapshot.theta = theta;
          save_checkpoint(out + "." + std::to_string(r.iteration + 1), snapshot);
        }
      };
      model.theta = meta_train(model.theta, qs, d.train, env, cfg.training, logger);
      save_checkpoint(out, model);
      std::cout << "meta questions\t" << qs.size() << '\n';
    } else if (*ev) {
      if (!frozen && !adapted) throw Error("eval needs --frozen or --adapted");
      Dataset d = load_dataset(data_dir);
      Model model = load_checkpoint(model_path);
      Environment env(d.kb, model);
      EvalReport r = evaluate(model.theta, split_of(d, split), d.train, env, cfg.training, adapted);
      print_report(r);
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw Error("cannot write " + report_path);
        f << report_to_json(r, d.kb).dump(2) << '\n';
      }
    } else if (*inf) {
      Dataset d = load_dataset(data_dir);
      Model model = load_checkpoint(model_path);
      Environment env(d.kb, model);
      auto qs = split_of(d, split);
      auto it = std::find_if(qs.begin(), qs.end(), [&](const Sample& s) { return s.id == id; });
      if (it == qs.end()) throw Error("no question '" + id + "' in split " + split);
      Inference res;
      if (adapted) {
        Retriever retriever(d.train, table_embedder(model.input, model.theta));
        res = infer(model.theta, *it, retriever, env, cfg.training);
      } else {
        res = infer_frozen(model.theta, *it, env, cfg.training);
      }
      std::string text;
      for (const auto& w : it->question) text += (text.empty() ? "" : " ") + w;
      std::cout << "question\t" << text << "\nprogram\t" << (res.program ? to_string(*res.program) : "<invalid>")
                << "\nanswer\t" << to_string(res.answer, d.kb) << "\ngold\t" << to_string(it->gold, d.kb)
                << "\nreward\t" << reward(res.answer, it->gold) << '\n';
      for (const auto& m : res.support)
        std::cout << "support\t" << d.train[m.index].id << '\t' << m.score << '\n';
    } else if (*abl) {
      nlohmann::json summary = nlohmann::json::array();
      for (auto s : seeds) {
        auto r = run_ablation(seeded(cfg, s), [&](const std::string& msg) { std::cerr << "[seed " << s << "] " << msg << '\n'; });
        std::cout << "seed " << s << "\tPG frozen " << r.pg_frozen.macro_f1 << "\tmeta adapted " << r.adapted.macro_f1
                  << "\tgain " << r.gain() << '\n';
        summary.push_back({{"seed", s},
                           {"pg_frozen_macro_f1", r.pg_frozen.macro_f1},
                           {"adapted_macro_f1", r.adapted.macro_f1},
                           {"gain", r.gain()},
                           {"seconds", r.seconds}});
      }
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw Error("cannot write " + report_path);
        f << summary.dump(2) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
