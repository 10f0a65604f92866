#include "mrlcqa/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

void validate(const TrainingConfig& cfg) {
  auto need = [](bool ok, const char* field) {
    if (!ok) throw Error(std::string("invalid training config: ") + field);
  };
  need(cfg.inner_lr >= 0.0, "inner_lr");
  need(cfg.outer_lr >= 0.0 && cfg.outer_lr <= 1.0, "outer_lr");
  need(cfg.samples >= 1, "samples");
  need(cfg.meta_samples >= 1, "meta_samples");
  need(cfg.support_size >= 0, "support_size");
  need(cfg.threshold >= 0.0 && cfg.threshold <= 1.0, "threshold");
  need(cfg.max_decode_len >= 1, "max_decode_len");
  need(cfg.batch_tasks >= 1, "batch_tasks");
  need(cfg.pretrain_epochs >= 0, "pretrain_epochs");
  need(cfg.pretrain_batch >= 1, "pretrain_batch");
  need(cfg.pg_epochs >= 0, "pg_epochs");
  need(cfg.meta_epochs >= 0, "meta_epochs");
  need(cfg.baseline_decay >= 0.0 && cfg.baseline_decay < 1.0, "baseline_decay");
}

std::optional<AnswerValue> Environment::run(const Sample& s, std::span<const int> tokens) const {
  auto program = output_->decode(tokens);
  if (!program) return std::nullopt;
  try {
    return execute(*program, *kb_, s.artifacts);
  } catch (const ExecutionError&) {
    return std::nullopt;
  }
}

double Environment::score(const Sample& s, std::span<const int> tokens) const {
  auto answer = run(s, tokens);
  return answer ? reward(*answer, s.gold) : 0.0;
}

// ---------------------------------------------------------------------------
// Breadth-first annotation

namespace {

struct Candidate {
  Action action;
  BoundAction bound;
  const EntitySet* selection = nullptr;
  const EntityMap* map = nullptr;
};

class Search {
 public:
  Search(const Sample& s, const KnowledgeBase& kb, SlotLimits limits) : kb_(kb), gold_(s.gold) {
    auto slots = [&](ArgKind kind) {
      return std::min<int>(static_cast<int>(s.artifacts.count(kind)), limits.of(kind));
    };
    const int ne = slots(ArgKind::Entity), nr = slots(ArgKind::Relation), nt = slots(ArgKind::Type),
              nn = slots(ArgKind::Number);
    selections_.reserve(static_cast<std::size_t>(ne * nr * nt));
    maps_.reserve(static_cast<std::size_t>(nt * nr * nt));
    for (Op op : kAllOps) {
      const auto sig = op_signature(op);
      std::vector<int> sizes;
      for (ArgKind k : sig)
        sizes.push_back(k == ArgKind::Entity ? ne : k == ArgKind::Relation ? nr : k == ArgKind::Type ? nt : nn);
      std::vector<int> idx(sig.size(), 0);
      if (std::any_of(sizes.begin(), sizes.end(), [](int n) { return n == 0; })) continue;
      while (true) {
        Action a{op, {}};
        for (std::size_t i = 0; i < sig.size(); ++i) a.args.push_back(Arg::slot_ref(sig[i], idx[i]));
        Candidate c{a, bind(a, s.artifacts, kb), nullptr, nullptr};
        if (op == Op::Select || op == Op::Union || op == Op::Intersection || op == Op::Difference)
          c.selection = &selection(idx[0], idx[1], idx[2], c.bound);
        else if (op == Op::SelectAll)
          c.map = &map(idx[0], idx[1], idx[2], c.bound);
        candidates_.push_back(std::move(c));
        std::size_t i = sig.size();
        while (i > 0 && ++idx[i - 1] == sizes[i - 1]) idx[--i] = 0;
        if (i == 0) break;
      }
    }
  }

  std::optional<Program> run(int max_len) {
    for (int len = 1; len <= max_len; ++len) {
      program_.clear();
      Machine m(kb_);
      if (dfs(m, len)) return Program{program_};
    }
    return std::nullopt;
  }

 private:
  const EntitySet& selection(int e, int r, int t, const BoundAction& b) {
    auto key = std::array<int, 3>{e, r, t};
    for (auto& [k, v] : selection_keys_)
      if (k == key) return selections_[v];
    selection_keys_.emplace_back(key, selections_.size());
    selections_.push_back(kb_.select(b.a, b.b, b.c));
    return selections_.back();
  }

  const EntityMap& map(int t1, int r, int t2, const BoundAction& b) {
    auto key = std::array<int, 3>{t1, r, t2};
    for (auto& [k, v] : map_keys_)
      if (k == key) return maps_[v];
    map_keys_.emplace_back(key, maps_.size());
    maps_.push_back(kb_.select_all(b.a, b.b, b.c));
    return maps_.back();
  }

  bool dfs(const Machine& m, int remaining) {
    for (const auto& c : candidates_) {
      if (!next_state(m.state(), c.action.op)) continue;
      Machine next = m;
      if (c.selection)
        next.combine(c.action.op, *c.selection);
      else if (c.map)
        next.load_map(*c.map);
      else
        next.apply(c.bound);
      program_.push_back(c.action);
      if (remaining == 1) {
        if (reward(next.answer(), gold_) == 1.0) return true;
      } else if (next.state() != StateKind::Terminal && dfs(next, remaining - 1)) {
        return true;
      }
      program_.pop_back();
    }
    return false;
  }

  const KnowledgeBase& kb_;
  const AnswerValue& gold_;
  std::vector<Candidate> candidates_;
  std::vector<EntitySet> selections_;
  std::vector<EntityMap> maps_;
  std::vector<std::pair<std::array<int, 3>, std::size_t>> selection_keys_, map_keys_;
  std::vector<Action> program_;
};

}  // namespace

std::optional<AnnotatedSample> bfs_annotate(const Sample& s, const KnowledgeBase& kb, int max_len,
                                            SlotLimits limits) {
  if (max_len < 1) throw Error("bfs_annotate: max_len must be at least 1");
  auto program = Search(s, kb, limits).run(max_len);
  if (!program) return std::nullopt;
  if (reward(execute(*program, kb, s.artifacts), s.gold) != 1.0)
    throw Error("bfs_annotate: program for '" + s.id + "' does not reproduce the answer");
  return AnnotatedSample{s, std::move(*program)};
}

// ---------------------------------------------------------------------------
// Teacher forcing

PolicyParameters pretrain_teacher_forcing(PolicyParameters theta, std::span<const AnnotatedSample> annotated,
                                          const Environment& env, const TrainingConfig& cfg,
                                          PretrainStats* stats) {
  validate(cfg);
  if (annotated.empty()) throw Error("pretrain_teacher_forcing: no annotated samples");
  std::vector<InputSequence> inputs;
  std::vector<std::vector<int>> targets;
  for (const auto& a : annotated) {
    inputs.push_back(env.encode(a.sample));
    targets.push_back(env.output().encode(a.program));
  }
  Adam adam(static_cast<Eigen::Index>(theta.size()), cfg.pretrain_adam);
  std::mt19937_64 rng(derive_seed(cfg.seed, "pretrain"));
  std::vector<std::size_t> order(annotated.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.pretrain_batch);
  PolicyGradient grad(theta.dims());

  for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::size_t tokens = 0;
      for (std::size_t i = start; i < end; ++i) tokens += targets[order[i]].size();
      const double w = 1.0 / static_cast<double>(tokens);
      grad.values().setZero();
      double loglik = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        WeightedSequence ws{targets[order[i]], w};
        loglik += accumulate_logprob_gradient(theta, inputs[order[i]], std::span(&ws, 1), grad);
      }
      adam.ascend(theta.values(), grad.values());
      if (stats) stats->batch_loss.push_back(-loglik);
      epoch_total += -loglik * static_cast<double>(tokens);
      epoch_tokens += tokens;
    }
    if (stats) stats->epoch_loss.push_back(epoch_total / static_cast<double>(epoch_tokens));
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Policy gradient

PolicyParameters pg_train(PolicyParameters theta, std::span<const Sample> samples, const Environment& env,
                          const TrainingConfig& cfg, PgStats* stats) {
  validate(cfg);
  if (samples.empty()) throw Error("pg_train: no samples");
  Adam adam(static_cast<Eigen::Index>(theta.size()), cfg.pg_adam);
  std::mt19937_64 rng(derive_seed(cfg.seed, "pg"));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const int end = env.output().end_token();
  double baseline = 0.0;
  bool baseline_ready = false;
  std::uint64_t draw = 0;

  for (int epoch = 0; epoch < cfg.pg_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t i : order) {
      const Sample& s = samples[i];
      InputSequence input = env.encode(s);
      auto trajs = sample(theta, input, cfg.samples, cfg.max_decode_len, derive_seed(cfg.seed, "pg-draw", draw++), end);
      double mean = 0.0;
      for (auto& t : trajs) {
        t.reward = env.score(s, t.tokens);
        mean += t.reward;
      }
      mean /= static_cast<double>(trajs.size());
      total += mean;

      std::vector<WeightedSequence> weighted;
      const double b = cfg.baseline && baseline_ready ? baseline : 0.0;
      for (const auto& t : trajs)
        weighted.push_back({t.tokens, (t.reward - b) / static_cast<double>(trajs.size())});
      if (cfg.baseline) {
        baseline = baseline_ready ? cfg.baseline_decay * baseline + (1.0 - cfg.baseline_decay) * mean : mean;
        baseline_ready = true;
      }
      if (std::all_of(weighted.begin(), weighted.end(), [](const auto& w) { return w.weight == 0.0; })) continue;
      PolicyGradient grad(theta.dims());
      accumulate_logprob_gradient(theta, input, weighted, grad);
      adam.ascend(theta.values(), grad.values());
      if (stats) ++stats->updates;
    }
    if (stats) stats->epoch_reward.push_back(total / static_cast<double>(samples.size()));
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Meta-learning

double vpg_step(PolicyParameters& theta, const Sample& s, const Environment& env, int count, double lr, int max_len,
                std::uint64_t seed) {
  InputSequence input = env.encode(s);
  auto trajs = sample(theta, input, count, max_len, seed, env.output().end_token());
  double mean = 0.0;
  for (auto& t : trajs) {
    t.reward = env.score(s, t.tokens);
    mean += t.reward;
  }
  mean /= static_cast<double>(trajs.size());
  if (lr != 0.0 && mean != 0.0) theta.values() += lr * surrogate_grad(theta, input, trajs).values();
  return mean;
}

PolicyParameters adapt(const PolicyParameters& theta, std::span<const Sample* const> support, const Environment& env,
                       const TrainingConfig& cfg, std::uint64_t seed, double* mean_reward) {
  PolicyParameters adapted = theta;
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    total += vpg_step(adapted, *support[i], env, cfg.samples, cfg.inner_lr, cfg.max_decode_len,
                      derive_seed(seed, i));
  if (mean_reward) *mean_reward = support.empty() ? 0.0 : total / static_cast<double>(support.size());
  return adapted;
}

std::vector<PseudoTask> build_tasks(std::span<const Sample> q_meta, std::span<const Sample> corpus,
                                    const PolicyParameters& theta, const Environment& env,
                                    const TrainingConfig& cfg) {
  Retriever retriever(corpus, table_embedder(env.input(), theta));
  std::vector<PseudoTask> tasks;
  tasks.reserve(q_meta.size());
  for (const auto& q : q_meta) {
    PseudoTask t;
    t.meta_test = &q;
    t.scores = retriever.retrieve(q, static_cast<std::size_t>(cfg.support_size), cfg.threshold);
    for (const auto& m : t.scores) t.support.push_back(&corpus[m.index]);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

TaskOutcome run_task(const PolicyParameters& theta, const PseudoTask& task, const Environment& env,
                     const TrainingConfig& cfg, std::uint64_t seed) {
  TaskOutcome out;
  out.adapted = adapt(theta, task.support, env, cfg, seed, &out.inner_reward);
  out.stepped = out.adapted;
  out.meta_reward = vpg_step(out.stepped, *task.meta_test, env, cfg.meta_samples, cfg.inner_lr, cfg.max_decode_len,
                             derive_seed(seed, "meta-test"));
  return out;
}

std::uint64_t task_seed(const TrainingConfig& cfg, long iteration, std::size_t task) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(iteration), task);
}

nlohmann::json to_json(const MetaRecord& r) {
  return {{"iteration", r.iteration},
          {"meta_reward", r.meta_reward},
          {"inner_reward", r.inner_reward},
          {"wall_time", r.wall_time}};
}

PolicyParameters meta_train(PolicyParameters theta, std::span<const PseudoTask> tasks, const Environment& env,
                            const TrainingConfig& cfg, const MetaLogger& log) {
  validate(cfg);
  if (tasks.empty()) return theta;
  const auto started = std::chrono::steady_clock::now();
  std::mt19937_64 rng(derive_seed(cfg.seed, "meta"));
  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.batch_tasks);
  long iteration = 0;

  for (int epoch = 0; epoch < cfg.meta_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double count = static_cast<double>(end - start);
      Eigen::VectorXd target = Eigen::VectorXd::Zero(theta.values().size());
      MetaRecord rec;
      rec.iteration = iteration;
      for (std::size_t i = start; i < end; ++i) {
        TaskOutcome out = run_task(theta, tasks[order[i]], env, cfg, task_seed(cfg, iteration, order[i]));
        rec.meta_reward += out.meta_reward / count;
        rec.inner_reward += out.inner_reward / count;
        if (cfg.outer == OuterUpdate::Reptile)
          target += out.stepped.values() / count;
        else if (cfg.inner_lr > 0.0)
          target += (out.stepped.values() - out.adapted.values()) / (cfg.inner_lr * count);
      }
      if (cfg.outer == OuterUpdate::Reptile) {
        Eigen::VectorXd& v = theta.values();
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = std::lerp(v[k], target[k], cfg.outer_lr);
      } else {
        theta.values() += cfg.outer_lr * target;
      }
      rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      if (log) log(rec, theta);
      ++iteration;
    }
  }
  return theta;
}

PolicyParameters meta_train(PolicyParameters theta, std::span<const Sample> q_meta, std::span<const Sample> corpus,
                            const Environment& env, const TrainingConfig& cfg, const MetaLogger& log) {
  auto tasks = build_tasks(q_meta, corpus, theta, env, cfg);
  return meta_train(std::move(theta), tasks, env, cfg, log);
}

// ---------------------------------------------------------------------------
// Inference

Inference infer_frozen(const PolicyParameters& theta, const Sample& q, const Environment& env,
                       const TrainingConfig& cfg) {
  Inference out;
  out.tokens = greedy_decode(theta, env.encode(q), cfg.max_decode_len, env.output().end_token());
  out.program = env.output().decode(out.tokens);
  auto answer = env.run(q, out.tokens);
  out.valid = answer.has_value();
  out.answer = answer ? std::move(*answer) : AnswerValue{EntitySet{}};
  return out;
}

Inference infer(const PolicyParameters& theta, const Sample& q, const Retriever& retriever, const Environment& env,
                const TrainingConfig& cfg) {
  SupportSet support = retriever.retrieve(q, static_cast<std::size_t>(cfg.support_size), cfg.threshold);
  std::vector<const Sample*> refs;
  for (const auto& m : support) refs.push_back(&retriever.corpus()[m.index]);
  PolicyParameters adapted = adapt(theta, refs, env, cfg, derive_seed(cfg.seed, q.id));
  Inference out = infer_frozen(adapted, q, env, cfg);
  out.support = std::move(support);
  return out;
}

}  // namespace mrlcqa
