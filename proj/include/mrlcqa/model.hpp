#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "mrlcqa/policy.hpp"
#include "mrlcqa/sample.hpp"
#include "mrlcqa/vocab.hpp"

namespace mrlcqa {

/// Vocabularies plus the weights that index them.
struct Model {
  InputVocab input;
  OutputVocab output;
  PolicyParameters theta;

  ModelDims dims() const { return theta.dims(); }
  bool operator==(const Model& other) const {
    return input == other.input && output.limits() == other.output.limits() && theta == other.theta;
  }
};

// Every word of every serialized question.
InputVocab build_input_vocab(std::span<const Sample> samples, SlotLimits limits = {});

// Fresh model with uniformly initialized weights.
Model make_model(InputVocab input, int embed, int hidden, std::uint64_t seed, double scale = 0.08);

InputSequence encode_input(const Sample& sample, const InputVocab& input, const OutputVocab& output);
inline InputSequence encode_input(const Sample& sample, const Model& model) {
  return encode_input(sample, model.input, model.output);
}

// Binary checkpoint, native little-endian:
//   "MRLCQA\0\0" u32 version
//   i32 input_vocab output_vocab embed hidden
//   i32 entity/relation/type/number slot limits
//   u32 word count, then per word u32 length + bytes
//   u64 value count, then the flat parameter vector as f64
void write_checkpoint(std::ostream& out, const Model& model);
Model read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

}  // namespace mrlcqa
