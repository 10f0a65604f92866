#include "mrlcqa/model.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'R', 'L', 'C', 'Q', 'A', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("checkpoint truncated");
  return v;
}

}  // namespace

InputVocab build_input_vocab(std::span<const Sample> samples, SlotLimits limits) {
  InputVocab vocab(limits);
  for (const auto& s : samples)
    for (const auto& w : serialize_question(s.question, s.artifacts)) vocab.add(w);
  return vocab;
}

Model make_model(InputVocab input, int embed, int hidden, std::uint64_t seed, double scale) {
  OutputVocab output(input.limits());
  ModelDims dims{input.size(), output.size(), embed, hidden};
  return Model{std::move(input), std::move(output), PolicyParameters::random(dims, seed, scale)};
}

InputSequence encode_input(const Sample& sample, const InputVocab& input, const OutputVocab& output) {
  InputSequence seq;
  for (const auto& w : serialize_question(sample.question, sample.artifacts)) seq.tokens.push_back(input.id(w));
  seq.allowed = output.mask(sample.artifacts);
  return seq;
}

void write_checkpoint(std::ostream& out, const Model& model) {
  const ModelDims& d = model.theta.dims();
  const SlotLimits& l = model.input.limits();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  for (int v : {d.input_vocab, d.output_vocab, d.embed, d.hidden}) put<std::int32_t>(out, v);
  for (int v : {l.entities, l.relations, l.types, l.numbers}) put<std::int32_t>(out, v);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.input.words().size()));
  for (const auto& w : model.input.words()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  const Eigen::VectorXd& values = model.theta.values();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(values.size()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw Error("checkpoint write failed");
}

Model read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not a checkpoint");
  if (auto v = get<std::uint32_t>(in); v != kVersion) throw Error("unsupported checkpoint version " + std::to_string(v));
  ModelDims d;
  d.input_vocab = get<std::int32_t>(in);
  d.output_vocab = get<std::int32_t>(in);
  d.embed = get<std::int32_t>(in);
  d.hidden = get<std::int32_t>(in);
  SlotLimits l;
  l.entities = get<std::int32_t>(in);
  l.relations = get<std::int32_t>(in);
  l.types = get<std::int32_t>(in);
  l.numbers = get<std::int32_t>(in);
  if (d.embed <= 0 || d.hidden <= 0 || d.input_vocab <= 0 || d.output_vocab <= 0) throw Error("bad checkpoint dims");

  std::vector<std::string> words(get<std::uint32_t>(in));
  for (auto& w : words) {
    w.resize(get<std::uint32_t>(in));
    if (!in.read(w.data(), static_cast<std::streamsize>(w.size()))) throw Error("checkpoint truncated");
  }
  InputVocab input = InputVocab::from_words(l, std::move(words));
  OutputVocab output(l);
  if (input.size() != d.input_vocab || output.size() != d.output_vocab)
    throw Error("checkpoint vocabulary does not match its dims");

  PolicyParameters theta(d);
  auto n = get<std::uint64_t>(in);
  if (n != theta.size()) throw Error("checkpoint parameter count mismatch");
  if (!in.read(reinterpret_cast<char*>(theta.values().data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw Error("checkpoint truncated");
  return Model{std::move(input), std::move(output), std::move(theta)};
}

void save_checkpoint(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_checkpoint(out, model);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace mrlcqa
