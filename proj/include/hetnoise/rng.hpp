#pragma once

#include <cstdint>
#include <random>

namespace hetnoise::rng {

/// Independent purposes drawing from the same run seed.
enum class Stream : std::uint32_t { Noise = 1, Jitter = 2, Phase = 3 };

/// Engine for substream `index` of `stream` under `seed`. The state depends
/// only on (seed, stream, index), never on how work is split across threads.
std::mt19937_64 substream(std::uint64_t seed, Stream stream, std::uint64_t index);

} // namespace hetnoise::rng
