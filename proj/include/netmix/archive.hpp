#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netmix/sampler.hpp"

namespace netmix {

inline constexpr char kArchiveMagic[8] = {'N', 'M', 'X', 'D', 'R', 'A', 'W', 'S'};
inline constexpr std::uint32_t kArchiveVersion = 1;

/// Little-endian binary image of the draws, ending in a CRC-32 of all preceding bytes.
std::vector<std::uint8_t> encode_archive(const PosteriorDraws& draws);
/// Throws NetmixError(Archive) on a bad magic, version, length or CRC.
PosteriorDraws decode_archive(const std::vector<std::uint8_t>& bytes);

void write_archive(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws read_archive(const std::filesystem::path& path);

/// One row per kept draw: iteration, pY1, T, nu0, nu1 and every lambda.
std::string draws_csv(const PosteriorDraws& draws);
void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws);

}  // namespace netmix
