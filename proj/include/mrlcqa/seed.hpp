#pragma once

#include <cstdint>
#include <string_view>

namespace mrlcqa {

// Derives an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t b = 0);

}  // namespace mrlcqa
