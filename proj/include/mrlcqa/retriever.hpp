#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrlcqa/policy.hpp"
#include "mrlcqa/sample.hpp"
#include "mrlcqa/vocab.hpp"

namespace mrlcqa {

// Maps a word to its embedding; all embeddings must have the same size.
using WordEmbedder = std::function<Eigen::VectorXd(const std::string&)>;

// Reads the programmer's input embedding table. Words outside the vocabulary
// map to the zero vector.
WordEmbedder table_embedder(const InputVocab& vocab, const PolicyParameters& theta);

struct QuestionProfile {
  int entity_count = 0;
  int relation_count = 0;
  int type_count = 0;
  std::vector<std::string> content_tokens;
  Eigen::MatrixXd embeddings;  // one column per content token
  Eigen::MatrixXd unit;        // columns normalized; zero columns stay zero
};

QuestionProfile make_profile(int entity_count, int relation_count, int type_count,
                             std::vector<std::string> tokens, const WordEmbedder& embed);
QuestionProfile make_profile(const Sample& sample, const WordEmbedder& embed);

// Product over entities, relations, types of 1 - |c1 - c2| / max(c1, c2).
double artifact_similarity(const QuestionProfile& p1, const QuestionProfile& p2);

struct SemanticTerms {
  double intersection = 0.0;
  double difference = 0.0;
  double similarity = 0.0;
};

// Greedy alignment in p1's token order; directional.
SemanticTerms semantic_terms(const QuestionProfile& p1, const QuestionProfile& p2, double threshold);
double semantic_similarity(const QuestionProfile& p1, const QuestionProfile& p2, double threshold);

inline double relevance(const QuestionProfile& query, const QuestionProfile& candidate, double threshold) {
  return artifact_similarity(query, candidate) * semantic_similarity(query, candidate, threshold);
}

struct SupportMember {
  std::size_t index = 0;  // position in the corpus
  double score = 0.0;
};

// Sorted by score descending, ties in corpus order.
using SupportSet = std::vector<SupportMember>;

/// Precomputed profiles for a fixed corpus.
class Retriever {
 public:
  Retriever(std::span<const Sample> corpus, WordEmbedder embed);

  // Top n candidates for `query`; corpus entries with the query's id are skipped.
  SupportSet retrieve(const Sample& query, std::size_t n, double threshold) const;
  // Every candidate scored, in ranked order.
  SupportSet rank(const Sample& query, double threshold) const;

  std::span<const Sample> corpus() const { return corpus_; }
  const QuestionProfile& profile(std::size_t i) const { return profiles_.at(i); }
  QuestionProfile profile_of(const Sample& s) const { return make_profile(s, embed_); }

 private:
  std::span<const Sample> corpus_;
  WordEmbedder embed_;
  std::vector<QuestionProfile> profiles_;
};

SupportSet retrieve(const Sample& query, std::span<const Sample> corpus, std::size_t n, double threshold,
                    const WordEmbedder& embed);

}  // namespace mrlcqa
