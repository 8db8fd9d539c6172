#pragma once

#include "persfit/field.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace persfit {

/// Binary field container. Layout, all little-endian:
///   bytes 0..7   magic "PFLD0001"
///   u32 width, u32 height, u32 flags (bit 0: confidence grids present)
///   float32 grids, row-major: up_x, up_y, latitude, [conf_up, conf_lat]
/// The file length must match the header exactly; no trailing bytes.
struct PfldHeader {
    static constexpr char kMagic[9] = "PFLD0001";
    static constexpr std::uint32_t kFlagConfidences = 1u;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t flags = 0;
};

/// Serializes the field (float32). Returns the number of bytes written.
std::size_t write_field(const PerspectiveField &field, std::ostream &sink,
                        bool with_confidences = true);

/// Parses and validates a field: checks the magic, the exact payload
/// length, unit up-vectors (+/- 1e-3), the latitude range and confidence
/// bounds. Throws BadMagicError, TruncatedFileError or
/// InvariantViolationError (naming the offending pixel index).
PerspectiveField read_field(std::istream &source);

std::size_t save_field(const PerspectiveField &field, const std::string &path,
                       bool with_confidences = true);
PerspectiveField load_field(const std::string &path);

} // namespace persfit
