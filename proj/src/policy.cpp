#include "mrlcqa/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::pair<int, int> block_shape(const ModelDims& d, PolicyParameters::Block b) {
  const int g = 4 * d.hidden;
  switch (b) {
    case PolicyParameters::kInputEmbedding: return {d.embed, d.input_vocab};
    case PolicyParameters::kEncoderWx: return {g, d.embed};
    case PolicyParameters::kEncoderWh: return {g, d.hidden};
    case PolicyParameters::kEncoderBias: return {g, 1};
    case PolicyParameters::kOutputEmbedding: return {d.embed, d.output_vocab};
    case PolicyParameters::kStartEmbedding: return {d.embed, 1};
    case PolicyParameters::kDecoderWx: return {g, d.embed + d.hidden};
    case PolicyParameters::kDecoderWh: return {g, d.hidden};
    case PolicyParameters::kDecoderBias: return {g, 1};
    case PolicyParameters::kAttention: return {d.hidden, d.hidden};
    case PolicyParameters::kOutputWeight: return {d.output_vocab, d.hidden};
    case PolicyParameters::kOutputBias: return {d.output_vocab, 1};
    case PolicyParameters::kBlockCount: break;
  }
  return {0, 0};
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Lstm {
  PolicyParameters::ConstMatrixMap wx, wh, bias;
};

Lstm encoder_cell(const PolicyParameters& p) {
  return {p.block(PolicyParameters::kEncoderWx), p.block(PolicyParameters::kEncoderWh),
          p.block(PolicyParameters::kEncoderBias)};
}

Lstm decoder_cell(const PolicyParameters& p) {
  return {p.block(PolicyParameters::kDecoderWx), p.block(PolicyParameters::kDecoderWh),
          p.block(PolicyParameters::kDecoderBias)};
}

// gates = [i, f, o, g] post-activation.
void lstm_forward(const Lstm& cell, const VectorXd& x, const VectorXd& h_prev, const VectorXd& c_prev,
                  VectorXd& gates, VectorXd& c, VectorXd& h) {
  const Eigen::Index n = h_prev.size();
  gates.noalias() = cell.wx * x;
  gates.noalias() += cell.wh * h_prev;
  gates += cell.bias.col(0);
  for (Eigen::Index k = 0; k < 3 * n; ++k) gates[k] = sigmoid(gates[k]);
  for (Eigen::Index k = 3 * n; k < 4 * n; ++k) gates[k] = std::tanh(gates[k]);
  c = gates.segment(n, n).cwiseProduct(c_prev) + gates.head(n).cwiseProduct(gates.tail(n));
  h = gates.segment(2 * n, n).cwiseProduct(c.array().tanh().matrix());
}

// Backpropagates (dh, dc) through one cell step. Returns dz (pre-activation
// gate gradient); dc is overwritten with the gradient w.r.t. c_prev.
VectorXd lstm_backward(const VectorXd& gates, const VectorXd& c, const VectorXd& c_prev, const VectorXd& dh,
                       VectorXd& dc) {
  const Eigen::Index n = c.size();
  auto i = gates.head(n).array();
  auto f = gates.segment(n, n).array();
  auto o = gates.segment(2 * n, n).array();
  auto g = gates.tail(n).array();
  Eigen::ArrayXd tc = c.array().tanh();
  Eigen::ArrayXd dct = dc.array() + dh.array() * o * (1.0 - tc * tc);
  VectorXd dz(4 * n);
  dz.head(n) = (dct * g * i * (1.0 - i)).matrix();
  dz.segment(n, n) = (dct * c_prev.array() * f * (1.0 - f)).matrix();
  dz.segment(2 * n, n) = (dh.array() * tc * o * (1.0 - o)).matrix();
  dz.tail(n) = (dct * i * (1.0 - g * g)).matrix();
  dc = (dct * f).matrix();
  return dz;
}

void check_token(int token, int vocab, const char* what) {
  if (token < 0 || token >= vocab)
    throw Error(std::string(what) + " token id " + std::to_string(token) + " out of range [0, " +
                std::to_string(vocab) + ")");
}

struct StepCache {
  int prev = kStartToken;
  int token = 0;
  VectorXd h_prev, c_prev;
  VectorXd u;      // A' * h_prev
  VectorXd alpha;  // attention weights
  VectorXd x;      // [embedding; context]
  VectorXd gates, c, h;
  VectorXd dist;
};

// Shared by decode_step and the traced forward pass.
void decoder_forward(const PolicyParameters& theta, int prev, const VectorXd& h_prev, const VectorXd& c_prev,
                     const EncoderStates& enc, const std::vector<bool>& allowed, StepCache& s,
                     VectorXd* log_dist) {
  const ModelDims& d = theta.dims();
  s.prev = prev;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.u.noalias() = theta.block(PolicyParameters::kAttention).transpose() * h_prev;
  s.x.resize(d.embed + d.hidden);
  if (prev == kStartToken) {
    s.x.head(d.embed) = theta.block(PolicyParameters::kStartEmbedding).col(0);
  } else {
    check_token(prev, d.output_vocab, "output");
    s.x.head(d.embed) = theta.block(PolicyParameters::kOutputEmbedding).col(prev);
  }
  if (enc.length() > 0) {
    VectorXd scores = enc.outputs.transpose() * s.u;
    double m = scores.maxCoeff();
    s.alpha = (scores.array() - m).exp().matrix();
    s.alpha /= s.alpha.sum();
    s.x.tail(d.hidden).noalias() = enc.outputs * s.alpha;
  } else {
    s.alpha.resize(0);
    s.x.tail(d.hidden).setZero();
  }
  lstm_forward(decoder_cell(theta), s.x, h_prev, c_prev, s.gates, s.c, s.h);

  VectorXd logits = theta.block(PolicyParameters::kOutputWeight) * s.h;
  logits += theta.block(PolicyParameters::kOutputBias).col(0);
  const bool masked = !allowed.empty();
  if (masked && allowed.size() != static_cast<std::size_t>(d.output_vocab))
    throw Error("allowed-token mask size does not match output vocabulary");
  double mx = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < d.output_vocab; ++v)
    if (!masked || allowed[v]) mx = std::max(mx, logits[v]);
  if (!std::isfinite(mx)) throw Error("no output token is allowed");
  double sum = 0.0;
  for (int v = 0; v < d.output_vocab; ++v)
    if (!masked || allowed[v]) sum += std::exp(logits[v] - mx);
  const double lse = mx + std::log(sum);
  s.dist.resize(d.output_vocab);
  if (log_dist) log_dist->resize(d.output_vocab);
  for (int v = 0; v < d.output_vocab; ++v) {
    if (!masked || allowed[v]) {
      double lp = logits[v] - lse;
      s.dist[v] = std::exp(lp);
      if (log_dist) (*log_dist)[v] = lp;
    } else {
      s.dist[v] = 0.0;
      if (log_dist) (*log_dist)[v] = -std::numeric_limits<double>::infinity();
    }
  }
}

std::vector<StepCache> trace(const PolicyParameters& theta, const EncoderStates& enc, std::span<const int> tokens,
                             const std::vector<bool>& allowed) {
  std::vector<StepCache> steps(tokens.size());
  VectorXd h = enc.hidden, c = enc.cell;
  int prev = kStartToken;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    check_token(tokens[t], theta.dims().output_vocab, "output");
    decoder_forward(theta, prev, h, c, enc, allowed, steps[t], nullptr);
    steps[t].token = tokens[t];
    h = steps[t].h;
    c = steps[t].c;
    prev = tokens[t];
  }
  return steps;
}

// Gradient sinks for the encoder, accumulated across sequences.
struct EncoderGrad {
  MatrixXd outputs;
  VectorXd hidden, cell;
};

void decoder_backward(const PolicyParameters& theta, const EncoderStates& enc, const std::vector<StepCache>& steps,
                      double weight, PolicyGradient& grad, EncoderGrad& eg) {
  const ModelDims& d = theta.dims();
  auto w_out = theta.block(PolicyParameters::kOutputWeight);
  auto attention = theta.block(PolicyParameters::kAttention);
  Lstm cell = decoder_cell(theta);

  auto g_wout = grad.block(PolicyParameters::kOutputWeight);
  auto g_bout = grad.block(PolicyParameters::kOutputBias);
  auto g_wx = grad.block(PolicyParameters::kDecoderWx);
  auto g_wh = grad.block(PolicyParameters::kDecoderWh);
  auto g_b = grad.block(PolicyParameters::kDecoderBias);
  auto g_att = grad.block(PolicyParameters::kAttention);
  auto g_emb = grad.block(PolicyParameters::kOutputEmbedding);
  auto g_start = grad.block(PolicyParameters::kStartEmbedding);

  VectorXd dh_next = VectorXd::Zero(d.hidden);
  VectorXd dc = VectorXd::Zero(d.hidden);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const StepCache& s = steps[t];
    VectorXd dlogits = -weight * s.dist;
    dlogits[s.token] += weight;
    g_wout.noalias() += dlogits * s.h.transpose();
    g_bout.col(0) += dlogits;
    VectorXd dh = dh_next;
    dh.noalias() += w_out.transpose() * dlogits;

    VectorXd dz = lstm_backward(s.gates, s.c, s.c_prev, dh, dc);
    g_wx.noalias() += dz * s.x.transpose();
    g_wh.noalias() += dz * s.h_prev.transpose();
    g_b.col(0) += dz;
    VectorXd dx = cell.wx.transpose() * dz;
    VectorXd dh_prev = cell.wh.transpose() * dz;

    if (s.prev == kStartToken)
      g_start.col(0) += dx.head(d.embed);
    else
      g_emb.col(s.prev) += dx.head(d.embed);

    if (enc.length() > 0) {
      VectorXd dctx = dx.tail(d.hidden);
      eg.outputs.noalias() += dctx * s.alpha.transpose();
      VectorXd dalpha = enc.outputs.transpose() * dctx;
      VectorXd ds = s.alpha.cwiseProduct((dalpha.array() - s.alpha.dot(dalpha)).matrix());
      VectorXd du = enc.outputs * ds;
      eg.outputs.noalias() += s.u * ds.transpose();
      g_att.noalias() += s.h_prev * du.transpose();
      dh_prev.noalias() += attention * du;
    }
    dh_next = std::move(dh_prev);
  }
  eg.hidden += dh_next;
  eg.cell += dc;
}

void encoder_backward(const PolicyParameters& theta, const EncoderStates& enc, const EncoderGrad& eg,
                      PolicyGradient& grad) {
  const ModelDims& d = theta.dims();
  Lstm cell = encoder_cell(theta);
  auto emb = theta.block(PolicyParameters::kInputEmbedding);
  auto g_wx = grad.block(PolicyParameters::kEncoderWx);
  auto g_wh = grad.block(PolicyParameters::kEncoderWh);
  auto g_b = grad.block(PolicyParameters::kEncoderBias);
  auto g_emb = grad.block(PolicyParameters::kInputEmbedding);

  VectorXd dh_carry = eg.hidden;
  VectorXd dc = eg.cell;
  const VectorXd zero = VectorXd::Zero(d.hidden);
  for (int i = enc.length(); i-- > 0;) {
    VectorXd dh = eg.outputs.col(i) + dh_carry;
    VectorXd c = enc.cells.col(i);
    VectorXd c_prev = i > 0 ? VectorXd(enc.cells.col(i - 1)) : zero;
    VectorXd gates = enc.gates.col(i);
    VectorXd dz = lstm_backward(gates, c, c_prev, dh, dc);
    const int tok = enc.tokens[i];
    g_wx.noalias() += dz * emb.col(tok).transpose();
    if (i > 0) g_wh.noalias() += dz * enc.outputs.col(i - 1).transpose();
    g_b.col(0) += dz;
    g_emb.col(tok).noalias() += cell.wx.transpose() * dz;
    dh_carry.noalias() = cell.wh.transpose() * dz;
  }
}

}  // namespace

PolicyParameters::PolicyParameters(ModelDims dims) : dims_(dims) {
  Eigen::Index offset = 0;
  for (int b = 0; b < kBlockCount; ++b) {
    offsets_[b] = offset;
    auto [r, c] = block_shape(dims, static_cast<Block>(b));
    offset += static_cast<Eigen::Index>(r) * c;
  }
  offsets_[kBlockCount] = offset;
  values_ = VectorXd::Zero(offset);
}

PolicyParameters PolicyParameters::random(ModelDims dims, std::uint64_t seed, double scale) {
  PolicyParameters p(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Eigen::Index i = 0; i < p.values_.size(); ++i) p.values_[i] = u(rng);
  return p;
}

PolicyParameters::MatrixMap PolicyParameters::block(Block b) {
  auto [r, c] = block_shape(dims_, b);
  return MatrixMap(values_.data() + offsets_[b], r, c);
}

PolicyParameters::ConstMatrixMap PolicyParameters::block(Block b) const {
  auto [r, c] = block_shape(dims_, b);
  return ConstMatrixMap(values_.data() + offsets_[b], r, c);
}

std::pair<int, int> PolicyParameters::shape(Block b) const { return block_shape(dims_, b); }

const char* PolicyParameters::block_name(Block b) {
  static constexpr const char* kNames[] = {
      "input_embedding", "encoder_wx", "encoder_wh", "encoder_bias", "output_embedding", "start_embedding",
      "decoder_wx",      "decoder_wh", "decoder_bias", "attention",  "output_weight",    "output_bias"};
  return b >= 0 && b < kBlockCount ? kNames[b] : "?";
}

EncoderStates encode(const PolicyParameters& theta, std::span<const int> tokens) {
  const ModelDims& d = theta.dims();
  const int m = static_cast<int>(tokens.size());
  EncoderStates enc;
  enc.tokens.assign(tokens.begin(), tokens.end());
  enc.outputs.resize(d.hidden, m);
  enc.cells.resize(d.hidden, m);
  enc.gates.resize(4 * d.hidden, m);
  Lstm cell = encoder_cell(theta);
  auto emb = theta.block(PolicyParameters::kInputEmbedding);
  VectorXd h = VectorXd::Zero(d.hidden), c = VectorXd::Zero(d.hidden);
  VectorXd gates, c_new, h_new;
  for (int i = 0; i < m; ++i) {
    check_token(tokens[i], d.input_vocab, "input");
    VectorXd x = emb.col(tokens[i]);
    lstm_forward(cell, x, h, c, gates, c_new, h_new);
    enc.gates.col(i) = gates;
    enc.cells.col(i) = c_new;
    enc.outputs.col(i) = h_new;
    h = h_new;
    c = c_new;
  }
  enc.hidden = h;
  enc.cell = c;
  return enc;
}

DecoderState initial_state(const EncoderStates& enc) { return {enc.hidden, enc.cell}; }

StepResult decode_step(const PolicyParameters& theta, int prev, const DecoderState& state, const EncoderStates& enc,
                       const std::vector<bool>& allowed) {
  StepCache s;
  StepResult out;
  decoder_forward(theta, prev, state.hidden, state.cell, enc, allowed, s, &out.log_dist);
  out.dist = std::move(s.dist);
  out.next = {std::move(s.h), std::move(s.c)};
  return out;
}

double sequence_logprob(const PolicyParameters& theta, const InputSequence& input, std::span<const int> tokens) {
  EncoderStates enc = encode(theta, input.tokens);
  DecoderState state = initial_state(enc);
  double total = 0.0;
  int prev = kStartToken;
  for (int tok : tokens) {
    check_token(tok, theta.dims().output_vocab, "output");
    StepResult r = decode_step(theta, prev, state, enc, input.allowed);
    total += r.log_dist[tok];
    state = std::move(r.next);
    prev = tok;
  }
  return total;
}

std::vector<Trajectory> sample(const PolicyParameters& theta, const InputSequence& input, int count, int max_len,
                               std::uint64_t seed, int end_token) {
  if (count < 1) throw Error("sample count must be at least 1");
  EncoderStates enc = encode(theta, input.tokens);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Trajectory> out(count);
  for (Trajectory& traj : out) {
    DecoderState state = initial_state(enc);
    int prev = kStartToken;
    for (int t = 0; t < max_len; ++t) {
      StepResult r = decode_step(theta, prev, state, enc, input.allowed);
      double u = uniform(rng);
      int pick = -1;
      double acc = 0.0;
      for (int v = 0; v < r.dist.size(); ++v) {
        if (r.dist[v] <= 0.0) continue;
        pick = v;
        acc += r.dist[v];
        if (u < acc) break;
      }
      traj.tokens.push_back(pick);
      traj.logprob += r.log_dist[pick];
      state = std::move(r.next);
      prev = pick;
      if (pick == end_token) break;
    }
  }
  return out;
}

std::vector<int> greedy_decode(const PolicyParameters& theta, const InputSequence& input, int max_len,
                               int end_token) {
  EncoderStates enc = encode(theta, input.tokens);
  DecoderState state = initial_state(enc);
  std::vector<int> tokens;
  int prev = kStartToken;
  for (int t = 0; t < max_len; ++t) {
    StepResult r = decode_step(theta, prev, state, enc, input.allowed);
    int best = 0;
    for (int v = 1; v < r.dist.size(); ++v)
      if (r.dist[v] > r.dist[best]) best = v;
    tokens.push_back(best);
    state = std::move(r.next);
    prev = best;
    if (best == end_token) break;
  }
  return tokens;
}

double accumulate_logprob_gradient(const PolicyParameters& theta, const InputSequence& input,
                                   std::span<const WeightedSequence> sequences, PolicyGradient& grad) {
  if (!(grad.dims() == theta.dims()) || grad.size() != theta.size()) grad = PolicyGradient(theta.dims());
  bool any = false;
  for (const auto& s : sequences) any = any || (s.weight != 0.0 && !s.tokens.empty());
  if (!any) return 0.0;
  const ModelDims& d = theta.dims();
  EncoderStates enc = encode(theta, input.tokens);
  EncoderGrad eg{MatrixXd::Zero(d.hidden, enc.length()), VectorXd::Zero(d.hidden), VectorXd::Zero(d.hidden)};
  double value = 0.0;
  for (const auto& s : sequences) {
    if (s.weight == 0.0 || s.tokens.empty()) continue;
    auto steps = trace(theta, enc, s.tokens, input.allowed);
    double logp = 0.0;
    for (const auto& st : steps) logp += std::log(std::max(st.dist(st.token), 1e-12));
    value += s.weight * logp;
    decoder_backward(theta, enc, steps, s.weight, grad, eg);
  }
  encoder_backward(theta, enc, eg, grad);
  return value;
}

PolicyGradient surrogate_grad(const PolicyParameters& theta, const InputSequence& input,
                              std::span<const Trajectory> trajectories) {
  PolicyGradient grad(theta.dims());
  if (trajectories.empty()) return grad;
  const double k = static_cast<double>(trajectories.size());
  std::vector<WeightedSequence> weighted;
  weighted.reserve(trajectories.size());
  for (const auto& t : trajectories) weighted.push_back({t.tokens, t.reward / k});
  accumulate_logprob_gradient(theta, input, weighted, grad);
  return grad;
}

double surrogate_value(const PolicyParameters& theta, const InputSequence& input,
                       std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : trajectories)
    if (t.reward != 0.0) total += t.reward * sequence_logprob(theta, input, t.tokens);
  return total / static_cast<double>(trajectories.size());
}

}  // namespace mrlcqa
