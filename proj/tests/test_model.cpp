#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "mrlcqa/adam.hpp"
#include "mrlcqa/generator.hpp"
#include "mrlcqa/model.hpp"

using namespace mrlcqa;

TEST_CASE("checkpoint round trip is bit-exact") {
  GeneratorConfig g;
  g.entities_per_type = 6;
  g.train = 40;
  g.validation = 0;
  g.test = 0;
  auto data = generate_dataset(g);
  Model m = make_model(build_input_vocab(data.train), 6, 10, 3);
  m.theta.values()[0] = std::nextafter(1.0, 2.0);
  m.theta.values()[1] = -0.0;
  m.theta.values()[2] = 1e-310;

  std::stringstream io;
  write_checkpoint(io, m);
  Model back = read_checkpoint(io);
  CHECK(back == m);
  CHECK(std::memcmp(back.theta.values().data(), m.theta.values().data(), m.theta.size() * sizeof(double)) == 0);
  CHECK(back.input.words() == m.input.words());
  CHECK(back.output.size() == m.output.size());

  std::stringstream again;
  write_checkpoint(again, back);
  std::stringstream first;
  write_checkpoint(first, m);
  CHECK(again.str() == first.str());

  SUBCASE("corrupt input") {
    std::string bytes = first.str();
    std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_checkpoint(truncated), Error);
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream wrong(bad);
    CHECK_THROWS_AS(read_checkpoint(wrong), Error);
  }
}

TEST_CASE("encode_input") {
  auto kb = KnowledgeBase::Builder().add_entity("France", "country").add_entity("Seine", "river").build();
  Sample s;
  s.question = {"which", "rivers", "flow", "through", "France", "?"};
  s.artifacts = {{"France"}, {"flows"}, {"river"}, {}};
  std::vector<Sample> v = {s};
  InputVocab vocab = build_input_vocab(v);
  OutputVocab out(vocab.limits());
  auto seq = encode_input(s, vocab, out);
  std::vector<std::string> words;
  for (int t : seq.tokens) words.push_back(vocab.word(t));
  CHECK(words == serialize_question(s.question, s.artifacts));
  CHECK(seq.allowed == out.mask(s.artifacts));
  s.question[1] = "streams";
  CHECK(encode_input(s, vocab, out).tokens[1] == InputVocab::kUnknown);
}

TEST_CASE("adam") {
  SUBCASE("first step moves each coordinate by lr along the gradient sign") {
    Adam adam(3, {0.1, 0.9, 0.999, 1e-8});
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd g(3);
    g << 2.0, -0.5, 0.0;
    adam.ascend(x, g);
    CHECK(x[0] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(x[1] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(x[2] == 0.0);
    CHECK(adam.steps() == 1);
  }

  SUBCASE("two steps against a hand-rolled update") {
    AdamConfig c{0.01, 0.8, 0.9, 1e-8};
    Adam adam(1, c);
    Eigen::VectorXd x(1);
    x << 1.0;
    double m = 0, v = 0, ref = 1.0;
    for (int t = 1; t <= 2; ++t) {
      double g = 3.0 * t;
      m = c.beta1 * m + (1 - c.beta1) * g;
      v = c.beta2 * v + (1 - c.beta2) * g * g;
      ref += c.lr * (m / (1 - std::pow(c.beta1, t))) / (std::sqrt(v / (1 - std::pow(c.beta2, t))) + c.eps);
      Eigen::VectorXd gv(1);
      gv << g;
      adam.ascend(x, gv);
    }
    CHECK(x[0] == doctest::Approx(ref).epsilon(1e-14));
  }

  SUBCASE("minimizes a quadratic") {
    Adam adam(2, {0.05});
    Eigen::VectorXd x(2);
    x << 3.0, -2.0;
    for (int i = 0; i < 2000; ++i) adam.descend(x, 2.0 * x);
    CHECK(x.norm() < 1e-3);
  }
}
