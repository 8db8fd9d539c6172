#include "persfit/fieldio.hpp"

#include "persfit/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace persfit {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char *p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32(std::string &out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u32(out, bits);
}

float get_f32(const unsigned char *p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void append_grid(std::string &out, const std::vector<double> &grid) {
    for (double v : grid)
        put_f32(out, static_cast<float>(v));
}

} // namespace

std::size_t write_field(const PerspectiveField &field, std::ostream &sink,
                        bool with_confidences) {
    field.validate();
    std::string buf;
    const std::size_t n = field.size();
    buf.reserve(20 + n * 4 * (with_confidences ? 5 : 3));
    buf.append(PfldHeader::kMagic, 8);
    put_u32(buf, static_cast<std::uint32_t>(field.width));
    put_u32(buf, static_cast<std::uint32_t>(field.height));
    put_u32(buf, with_confidences ? PfldHeader::kFlagConfidences : 0u);
    append_grid(buf, field.up_x);
    append_grid(buf, field.up_y);
    append_grid(buf, field.latitude);
    if (with_confidences) {
        append_grid(buf, field.conf_up);
        append_grid(buf, field.conf_lat);
    }
    sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!sink)
        throw FileFormatError("field write failed");
    return buf.size();
}

PerspectiveField read_field(std::istream &source) {
    std::string data((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
    const auto *bytes = reinterpret_cast<const unsigned char *>(data.data());

    if (data.size() < 8 || std::memcmp(data.data(), PfldHeader::kMagic, 8) != 0)
        throw BadMagicError("not a PFLD0001 file");
    if (data.size() < 20)
        throw TruncatedFileError("field header truncated: expected 20 bytes, got " +
                                 std::to_string(data.size()));

    const std::uint32_t width = get_u32(bytes + 8);
    const std::uint32_t height = get_u32(bytes + 12);
    const std::uint32_t flags = get_u32(bytes + 16);
    if (width == 0 || height == 0)
        throw InvariantViolationError("field header declares an empty grid");
    if (flags & ~PfldHeader::kFlagConfidences)
        throw InvariantViolationError("field header has unknown flags");

    const std::size_t n = static_cast<std::size_t>(width) * height;
    const std::size_t grids = (flags & PfldHeader::kFlagConfidences) ? 5 : 3;
    const std::size_t expected = 20 + n * 4 * grids;
    if (data.size() < expected)
        throw TruncatedFileError("field payload truncated: expected " + std::to_string(expected) +
                                 " bytes, got " + std::to_string(data.size()));
    if (data.size() > expected)
        throw InvariantViolationError("field file has " +
                                      std::to_string(data.size() - expected) + " trailing bytes");

    PerspectiveField f = make_field(static_cast<int>(width), static_cast<int>(height));
    auto read_grid = [&](std::vector<double> &grid, std::size_t grid_idx) {
        const unsigned char *base = bytes + 20 + grid_idx * n * 4;
        for (std::size_t i = 0; i < n; ++i)
            grid[i] = static_cast<double>(get_f32(base + i * 4));
    };
    read_grid(f.up_x, 0);
    read_grid(f.up_y, 1);
    read_grid(f.latitude, 2);
    if (flags & PfldHeader::kFlagConfidences) {
        read_grid(f.conf_up, 3);
        read_grid(f.conf_lat, 4);
    }

    constexpr double kHalfPi = M_PI / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = std::hypot(f.up_x[i], f.up_y[i]);
        if (std::abs(norm - 1.0) > 1e-3)
            throw InvariantViolationError("up-vector at pixel " + std::to_string(i) +
                                          " is not unit (norm " + std::to_string(norm) + ")");
        if (std::abs(f.latitude[i]) > kHalfPi + 1e-6)
            throw InvariantViolationError("latitude out of range at pixel " + std::to_string(i));
        f.latitude[i] = std::clamp(f.latitude[i], -kHalfPi, kHalfPi);
        if (f.conf_up[i] < 0.0 || f.conf_up[i] > 1.0 || f.conf_lat[i] < 0.0 ||
            f.conf_lat[i] > 1.0)
            throw InvariantViolationError("confidence out of range at pixel " +
                                          std::to_string(i));
    }
    return f;
}

std::size_t save_field(const PerspectiveField &field, const std::string &path,
                       bool with_confidences) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FileFormatError("cannot open for writing: " + path);
    const std::size_t bytes = write_field(field, out, with_confidences);
    out.close();
    if (!out)
        throw FileFormatError("write failed: " + path);
    return bytes;
}

PerspectiveField load_field(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileFormatError("cannot open: " + path);
    return read_field(in);
}

} // namespace persfit
