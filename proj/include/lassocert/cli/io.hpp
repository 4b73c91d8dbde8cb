#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "lassocert/spectrum.hpp"

namespace lassocert::cli {

/// Throws std::runtime_error when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// {"kind":"nested-ranking","vars":[...],"guard_row":r,"h0":"...","k":k,
///  "delta":"...","functions":[{"coeffs":[...],"constant":"..."},...]}
std::string serialize_witness(const NestedRankingWitness& w, std::span<const std::string> vars = {});
NestedRankingWitness deserialize_witness(const std::string& text);

}  // namespace lassocert::cli
