#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mrlcqa {

struct ModelDims {
  int input_vocab = 0;
  int output_vocab = 0;
  int embed = 50;
  int hidden = 128;

  bool operator==(const ModelDims&) const = default;
};

/// Every programmer weight in one flat vector. Blocks are stored in this
/// order, each column-major:
///
///   input_embedding   embed x input_vocab   (one column per token)
///   encoder_wx        4*hidden x embed      (gate rows: input, forget, output, cell)
///   encoder_wh        4*hidden x hidden
///   encoder_bias      4*hidden
///   output_embedding  embed x output_vocab
///   start_embedding   embed                 (decoder input at the first step)
///   decoder_wx        4*hidden x (embed + hidden)
///   decoder_wh        4*hidden x hidden
///   decoder_bias      4*hidden
///   attention         hidden x hidden       (score_i = g' * A * e_i)
///   output_weight     output_vocab x hidden
///   output_bias       output_vocab
class PolicyParameters {
 public:
  enum Block : int {
    kInputEmbedding,
    kEncoderWx,
    kEncoderWh,
    kEncoderBias,
    kOutputEmbedding,
    kStartEmbedding,
    kDecoderWx,
    kDecoderWh,
    kDecoderBias,
    kAttention,
    kOutputWeight,
    kOutputBias,
    kBlockCount
  };

  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;

  PolicyParameters() = default;
  // All zeros.
  explicit PolicyParameters(ModelDims dims);
  // Uniform in [-scale, scale], seeded.
  static PolicyParameters random(ModelDims dims, std::uint64_t seed, double scale = 0.08);

  const ModelDims& dims() const { return dims_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  MatrixMap block(Block b);
  ConstMatrixMap block(Block b) const;
  std::pair<int, int> shape(Block b) const;
  static const char* block_name(Block b);

  bool all_finite() const { return values_.allFinite(); }
  bool operator==(const PolicyParameters& other) const {
    return dims_ == other.dims_ && values_.size() == other.values_.size() && values_ == other.values_;
  }

 private:
  ModelDims dims_;
  Eigen::VectorXd values_;
  std::array<Eigen::Index, kBlockCount + 1> offsets_{};
};

// Gradients share the parameter layout.
using PolicyGradient = PolicyParameters;

struct InputSequence {
  std::vector<int> tokens;
  // Output tokens the decoder may emit for this input; empty means all.
  std::vector<bool> allowed;
};

struct EncoderStates {
  Eigen::MatrixXd outputs;  // hidden x M, column i is e_i
  Eigen::VectorXd hidden;   // h_M
  Eigen::VectorXd cell;     // c_M

  // Backward-pass caches.
  Eigen::MatrixXd gates;  // 4*hidden x M, post-activation
  Eigen::MatrixXd cells;  // hidden x M
  std::vector<int> tokens;

  int length() const { return static_cast<int>(outputs.cols()); }
};

struct DecoderState {
  Eigen::VectorXd hidden;
  Eigen::VectorXd cell;
};

struct StepResult {
  Eigen::VectorXd dist;      // probabilities over the output vocabulary
  Eigen::VectorXd log_dist;  // log-softmax; -inf for disallowed tokens
  DecoderState next;
};

struct Trajectory {
  std::vector<int> tokens;
  double logprob = 0.0;
  double reward = 0.0;
};

inline constexpr int kStartToken = -1;

EncoderStates encode(const PolicyParameters& theta, std::span<const int> tokens);
DecoderState initial_state(const EncoderStates& enc);

// One decoder step from `prev` (kStartToken at the first step).
StepResult decode_step(const PolicyParameters& theta, int prev, const DecoderState& state,
                       const EncoderStates& enc, const std::vector<bool>& allowed = {});

// Sum of per-step log-probabilities of `tokens`, decoding from the start token.
double sequence_logprob(const PolicyParameters& theta, const InputSequence& input, std::span<const int> tokens);

// K trajectories, each ending with END or at max_len tokens. Deterministic in seed.
std::vector<Trajectory> sample(const PolicyParameters& theta, const InputSequence& input, int count,
                               int max_len, std::uint64_t seed, int end_token);

// Argmax decoding; ties go to the lowest token id.
std::vector<int> greedy_decode(const PolicyParameters& theta, const InputSequence& input, int max_len,
                               int end_token);

struct WeightedSequence {
  std::span<const int> tokens;
  double weight = 0.0;
};

// Gradient of sum_k weight_k * log p(tokens_k | input), accumulated into `grad`.
// Sequences with zero weight contribute nothing. Returns the weighted sum itself,
// with probabilities floored at 1e-12.
double accumulate_logprob_gradient(const PolicyParameters& theta, const InputSequence& input,
                                   std::span<const WeightedSequence> sequences, PolicyGradient& grad);

// Ascent direction of (1/K) sum_k R(tau_k) log p(tau_k).
PolicyGradient surrogate_grad(const PolicyParameters& theta, const InputSequence& input,
                              std::span<const Trajectory> trajectories);

// Value of the surrogate objective above.
double surrogate_value(const PolicyParameters& theta, const InputSequence& input,
                       std::span<const Trajectory> trajectories);

}  // namespace mrlcqa
