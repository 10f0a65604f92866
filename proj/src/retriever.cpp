#include "mrlcqa/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace mrlcqa {

WordEmbedder table_embedder(const InputVocab& vocab, const PolicyParameters& theta) {
  Eigen::MatrixXd table = theta.block(PolicyParameters::kInputEmbedding);
  return [vocab, table = std::move(table)](const std::string& word) -> Eigen::VectorXd {
    int id = vocab.id(word);
    if (id == InputVocab::kUnknown || id >= table.cols()) return Eigen::VectorXd::Zero(table.rows());
    return table.col(id);
  };
}

QuestionProfile make_profile(int entity_count, int relation_count, int type_count,
                             std::vector<std::string> tokens, const WordEmbedder& embed) {
  QuestionProfile p;
  p.entity_count = entity_count;
  p.relation_count = relation_count;
  p.type_count = type_count;
  p.content_tokens = std::move(tokens);
  const auto n = static_cast<Eigen::Index>(p.content_tokens.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = embed(p.content_tokens[static_cast<std::size_t>(i)]);
    if (i == 0) {
      p.embeddings.resize(v.size(), n);
      p.unit.resize(v.size(), n);
    }
    p.embeddings.col(i) = v;
    double norm = v.norm();
    p.unit.col(i) = norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Zero(v.size());
  }
  return p;
}

QuestionProfile make_profile(const Sample& sample, const WordEmbedder& embed) {
  const auto& a = sample.artifacts;
  return make_profile(static_cast<int>(a.entities.size()), static_cast<int>(a.relations.size()),
                      static_cast<int>(a.types.size()), content_tokens(sample.question, a), embed);
}

namespace {

double count_similarity(int c1, int c2) {
  if (c1 == 0 && c2 == 0) return 1.0;
  return 1.0 - static_cast<double>(std::abs(c1 - c2)) / static_cast<double>(std::max(c1, c2));
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace

double artifact_similarity(const QuestionProfile& p1, const QuestionProfile& p2) {
  return count_similarity(p1.entity_count, p2.entity_count) *
         count_similarity(p1.relation_count, p2.relation_count) *
         count_similarity(p1.type_count, p2.type_count);
}

SemanticTerms semantic_terms(const QuestionProfile& p1, const QuestionProfile& p2, double threshold) {
  const Eigen::Index n1 = p1.unit.cols(), n2 = p2.unit.cols();
  SemanticTerms t;
  std::vector<bool> used1(static_cast<std::size_t>(n1), false), used2(static_cast<std::size_t>(n2), false);
  if (n1 > 0 && n2 > 0) {
    Eigen::MatrixXd cos = p1.unit.transpose() * p2.unit;
    for (Eigen::Index m = 0; m < n1; ++m) {
      Eigen::Index best = -1;
      double best_sim = 0.0;
      for (Eigen::Index k = 0; k < n2; ++k) {
        if (used2[static_cast<std::size_t>(k)]) continue;
        if (best < 0 || cos(m, k) > best_sim) {
          best = k;
          best_sim = cos(m, k);
        }
      }
      if (best >= 0 && best_sim > threshold) {
        t.intersection += best_sim;
        used1[static_cast<std::size_t>(m)] = true;
        used2[static_cast<std::size_t>(best)] = true;
      }
    }
  }

  const Eigen::Index rows = std::max(p1.embeddings.rows(), p2.embeddings.rows());
  Eigen::VectorXd sum1 = Eigen::VectorXd::Zero(rows), sum2 = Eigen::VectorXd::Zero(rows);
  std::size_t rest1 = 0, rest2 = 0;
  for (Eigen::Index m = 0; m < n1; ++m)
    if (!used1[static_cast<std::size_t>(m)]) {
      sum1 += p1.embeddings.col(m);
      ++rest1;
    }
  for (Eigen::Index k = 0; k < n2; ++k)
    if (!used2[static_cast<std::size_t>(k)]) {
      sum2 += p2.embeddings.col(k);
      ++rest2;
    }
  if (rest1 > 0 || rest2 > 0)
    t.difference = static_cast<double>(std::max(rest1, rest2)) * (1.0 - cosine(sum1, sum2));

  double denom = t.intersection + t.difference;
  t.similarity = denom > 0.0 ? t.intersection / denom : 0.0;
  return t;
}

double semantic_similarity(const QuestionProfile& p1, const QuestionProfile& p2, double threshold) {
  return semantic_terms(p1, p2, threshold).similarity;
}

Retriever::Retriever(std::span<const Sample> corpus, WordEmbedder embed)
    : corpus_(corpus), embed_(std::move(embed)) {
  profiles_.reserve(corpus.size());
  for (const auto& s : corpus) profiles_.push_back(make_profile(s, embed_));
}

SupportSet Retriever::rank(const Sample& query, double threshold) const {
  QuestionProfile q = profile_of(query);
  SupportSet all;
  all.reserve(corpus_.size());
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    if (corpus_[i].id == query.id) continue;
    all.push_back({i, relevance(q, profiles_[i], threshold)});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const SupportMember& a, const SupportMember& b) { return a.score > b.score; });
  return all;
}

SupportSet Retriever::retrieve(const Sample& query, std::size_t n, double threshold) const {
  SupportSet all = rank(query, threshold);
  if (all.size() > n) all.resize(n);
  return all;
}

SupportSet retrieve(const Sample& query, std::span<const Sample> corpus, std::size_t n, double threshold,
                    const WordEmbedder& embed) {
  return Retriever(corpus, embed).retrieve(query, n, threshold);
}

}  // namespace mrlcqa
