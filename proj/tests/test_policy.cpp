#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gradcheck.hpp"
#include "mrlcqa/policy.hpp"
#include "reference_policy.hpp"

using namespace mrlcqa;

namespace {

constexpr ModelDims kDims = gradcheck::kTinyDims;
constexpr int kEnd = gradcheck::kTinyEnd;

InputSequence three_tokens() { return {{1, 4, 2}, {}}; }

}  // namespace

TEST_CASE("encode: one output per input position") {
  auto theta = PolicyParameters::random(kDims, 3);
  for (int m : {1, 2, 5}) {
    std::vector<int> tokens(m, 2);
    CHECK(encode(theta, tokens).length() == m);
  }
}

TEST_CASE("encode: zero weights give identical outputs for identical tokens") {
  PolicyParameters theta(kDims);
  auto enc = encode(theta, std::vector<int>{3, 3, 3, 3});
  for (int i = 1; i < enc.length(); ++i) CHECK(enc.outputs.col(i) == enc.outputs.col(0));
}

TEST_CASE("encode: rejects out-of-range tokens") {
  auto theta = PolicyParameters::random(kDims, 1);
  CHECK_THROWS(encode(theta, std::vector<int>{0, kDims.input_vocab}));
  CHECK_THROWS(encode(theta, std::vector<int>{-1}));
}

TEST_CASE("encode and decode_step match the straight-line reference") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    auto theta = PolicyParameters::random(kDims, seed, 0.5);
    auto input = three_tokens();
    auto enc = encode(theta, input.tokens);
    auto r = ref::encode(theta, input.tokens);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < kDims.hidden; ++k) CHECK(enc.outputs(k, i) == doctest::Approx(r.outputs[i][k]).epsilon(1e-10));

    DecoderState state = initial_state(enc);
    ref::Cell rstate = r.final;
    int prev = kStartToken;
    for (int step = 0; step < 3; ++step) {
      auto out = decode_step(theta, prev, state, enc);
      auto expect = ref::decode(theta, prev, rstate, r);
      for (int v = 0; v < kDims.output_vocab; ++v) CHECK(std::abs(out.dist[v] - expect.dist[v]) < 1e-10);
      for (int k = 0; k < kDims.hidden; ++k) CHECK(std::abs(out.next.hidden[k] - expect.next.h[k]) < 1e-10);
      state = out.next;
      rstate = expect.next;
      prev = step;
    }
  }
}

TEST_CASE("decode_step: zero output projection gives the uniform distribution") {
  auto theta = PolicyParameters::random(kDims, 9);
  theta.block(PolicyParameters::kOutputWeight).setZero();
  theta.block(PolicyParameters::kOutputBias).setZero();
  auto enc = encode(theta, three_tokens().tokens);
  auto out = decode_step(theta, kStartToken, initial_state(enc), enc);
  for (int v = 0; v < kDims.output_vocab; ++v) CHECK(out.dist[v] == doctest::Approx(1.0 / kDims.output_vocab));
}

TEST_CASE("decode_step: valid probability vector, masked tokens get zero") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto theta = PolicyParameters::random(kDims, seed, 1.0);
    auto enc = encode(theta, three_tokens().tokens);
    auto out = decode_step(theta, kStartToken, initial_state(enc), enc);
    CHECK(std::abs(out.dist.sum() - 1.0) < 1e-9);
    CHECK(out.dist.minCoeff() > 0.0);

    std::vector<bool> allowed = {true, false, true, true, false, true};
    auto masked = decode_step(theta, 2, initial_state(enc), enc, allowed);
    CHECK(std::abs(masked.dist.sum() - 1.0) < 1e-9);
    CHECK(masked.dist[1] == 0.0);
    CHECK(masked.dist[4] == 0.0);
    CHECK(std::isinf(masked.log_dist[1]));
  }
  auto theta = PolicyParameters::random(kDims, 1);
  auto enc = encode(theta, three_tokens().tokens);
  CHECK_THROWS(decode_step(theta, kDims.output_vocab, initial_state(enc), enc));
}

TEST_CASE("sequence_logprob") {
  PolicyParameters zero(kDims);
  std::vector<int> one = {2};
  CHECK(sequence_logprob(zero, three_tokens(), one) == doctest::Approx(std::log(1.0 / kDims.output_vocab)));

  auto theta = PolicyParameters::random(kDims, 4, 0.5);
  auto input = three_tokens();
  std::vector<int> tau = {0, 3, 1, kEnd};
  double lp = sequence_logprob(theta, input, tau);
  CHECK(lp <= 0.0);

  // Step-by-step accumulation of log dist entries.
  auto enc = encode(theta, input.tokens);
  DecoderState state = initial_state(enc);
  double acc = 0.0;
  int prev = kStartToken;
  for (int tok : tau) {
    auto r = decode_step(theta, prev, state, enc);
    acc += std::log(r.dist[tok]);
    state = r.next;
    prev = tok;
  }
  CHECK(std::abs(lp - acc) < 1e-12);
  CHECK(std::exp(lp) > 0.0);
  CHECK(std::exp(lp) <= 1.0);
}

TEST_CASE("sample: seeded, terminated, logprob consistent") {
  auto theta = PolicyParameters::random(kDims, 8, 0.5);
  auto input = three_tokens();
  auto a = sample(theta, input, 10, 6, 42, kEnd);
  auto b = sample(theta, input, 10, 6, 42, kEnd);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].logprob == b[i].logprob);
    CHECK((a[i].tokens.back() == kEnd || a[i].tokens.size() == 6));
    CHECK(a[i].logprob == doctest::Approx(sequence_logprob(theta, input, a[i].tokens)).epsilon(1e-12));
  }
  CHECK_THROWS(sample(theta, input, 0, 6, 1, kEnd));
}

TEST_CASE("sample: first-step frequencies agree with decode_step within 3 sigma") {
  auto theta = PolicyParameters::random(kDims, 21, 1.0);
  auto input = three_tokens();
  auto enc = encode(theta, input.tokens);
  auto dist = decode_step(theta, kStartToken, initial_state(enc), enc).dist;
  const int n = 100000;
  auto draws = sample(theta, input, n, 1, 77, kEnd);
  std::vector<int> counts(kDims.output_vocab, 0);
  for (const auto& t : draws) ++counts[t.tokens.front()];
  for (int v = 0; v < kDims.output_vocab; ++v) {
    double sigma = std::sqrt(n * dist[v] * (1 - dist[v]));
    CHECK(std::abs(counts[v] - n * dist[v]) <= 3.0 * sigma);
  }
}

TEST_CASE("sample never emits masked tokens") {
  auto theta = PolicyParameters::random(kDims, 2, 1.0);
  InputSequence input{{1, 2, 3}, {true, true, false, true, true, true}};
  for (const auto& t : sample(theta, input, 200, 5, 3, kEnd))
    for (int tok : t.tokens) CHECK(tok != 2);
}

TEST_CASE("greedy_decode: deterministic and bounded") {
  auto theta = PolicyParameters::random(kDims, 13, 0.5);
  auto input = three_tokens();
  auto a = greedy_decode(theta, input, 4, kEnd);
  CHECK(a == greedy_decode(theta, input, 4, kEnd));
  CHECK(a.size() <= 4);
  // With the output layer zeroed every step is a tie: lowest id wins.
  theta.block(PolicyParameters::kOutputWeight).setZero();
  theta.block(PolicyParameters::kOutputBias).setZero();
  CHECK(greedy_decode(theta, input, 3, kEnd) == std::vector<int>{0, 0, 0});
}

TEST_CASE("surrogate_grad: zero rewards give a zero gradient") {
  auto p = gradcheck::make_tiny_problem(1);
  for (auto& t : p.trajectories) t.reward = 0.0;
  auto g = surrogate_grad(p.theta, p.input, p.trajectories);
  CHECK(g.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("surrogate_grad: linear in the rewards") {
  auto p = gradcheck::make_tiny_problem(2);
  auto g1 = surrogate_grad(p.theta, p.input, p.trajectories);
  for (auto& t : p.trajectories) t.reward *= 0.25;
  auto g2 = surrogate_grad(p.theta, p.input, p.trajectories);
  CHECK(((g1.values() * 0.25) - g2.values()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("surrogate_grad matches central finite differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto p = gradcheck::make_tiny_problem(seed);
    auto res = gradcheck::check(p);
    INFO("seed " << seed << " max relative error " << res.max_relative_error);
    CHECK(res.max_relative_error < 1e-4);
  }
}

TEST_CASE("one ascent step increases the surrogate") {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    auto p = gradcheck::make_tiny_problem(seed);
    double before = surrogate_value(p.theta, p.input, p.trajectories);
    auto g = surrogate_grad(p.theta, p.input, p.trajectories);
    PolicyParameters next = p.theta;
    next.values() += 1e-3 * g.values();
    CHECK(surrogate_value(next, p.input, p.trajectories) > before);
  }
}

TEST_CASE("parameter layout") {
  PolicyParameters p(ModelDims{10, 21, 50, 128});
  std::size_t total = 0;
  for (int b = 0; b < PolicyParameters::kBlockCount; ++b) {
    auto [r, c] = p.shape(static_cast<PolicyParameters::Block>(b));
    total += static_cast<std::size_t>(r) * c;
  }
  CHECK(total == p.size());
  CHECK(p.all_finite());
}
