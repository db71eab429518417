#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rotsiam/features.hpp"

namespace rotsiam {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (in.gcount() != 4) throw std::runtime_error("feature map: truncated record");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
double get_f32(std::istream& in) { return static_cast<double>(std::bit_cast<float>(get_u32(in))); }

}  // namespace

void write_feature_map(std::ostream& out, const FeatureMap& map) {
    out.write("FMAP", 4);
    put_u32(out, static_cast<std::uint32_t>(map.channels()));
    put_u32(out, static_cast<std::uint32_t>(map.height()));
    put_u32(out, static_cast<std::uint32_t>(map.width()));
    put_f32(out, map.stride());
    for (double v : map.data()) put_f32(out, v);
}

FeatureMap read_feature_map(std::istream& in) {
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "FMAP", 4) != 0) throw std::runtime_error("feature map: bad magic");
    const std::uint32_t c = get_u32(in), h = get_u32(in), w = get_u32(in);
    if (c == 0 || h == 0 || w == 0 || c > 65536 || h > 65536 || w > 65536) {
        throw std::runtime_error("feature map: bad dimensions");
    }
    const double stride = get_f32(in);
    std::vector<double> data(static_cast<std::size_t>(c) * h * w);
    for (auto& v : data) {
        v = get_f32(in);
        if (!std::isfinite(v)) throw std::runtime_error("feature map: non-finite value");
    }
    return FeatureMap(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w), stride, std::move(data));
}

void write_feature_file(const std::filesystem::path& path, const FeaturePair& pair) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("feature file " + path.string() + ": cannot write");
    write_feature_map(out, pair.lo);
    write_feature_map(out, pair.hi);
}

FeaturePair read_feature_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("feature file " + path.string() + ": cannot open");
    FeaturePair p;
    p.lo = read_feature_map(in);
    p.hi = read_feature_map(in);
    return p;
}

}  // namespace rotsiam
