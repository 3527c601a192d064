#include "cbvh/format.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"

namespace cbvh {

std::vector<std::uint8_t> serialize(const CompressedBvh& bvh)
{
    using namespace detail;
    std::vector<std::uint8_t> out;
    std::size_t total = kCbvhHeaderBytes + 4 * bvh.triangle_order.size();
    for (const auto& t : bvh.treelets)
        total += t.bytes.size();
    out.reserve(total);

    for (const char c : {'C', 'B', 'V', 'H'})
        put_u8(out, static_cast<std::uint8_t>(c));
    put_u16(out, kCbvhVersion);
    put_u8(out, static_cast<std::uint8_t>(bvh.layout));
    put_u8(out, static_cast<std::uint8_t>(bvh.k));
    put_u8(out, static_cast<std::uint8_t>(bvh.branching_factor));
    put_u8(out, static_cast<std::uint8_t>(bvh.residual_bits));
    put_u16(out, 0);
    put_u32(out, bvh.budget_bytes);
    put_f32(out, bvh.scale);
    put_u32(out, static_cast<std::uint32_t>(bvh.treelets.size()));
    put_u32(out, bvh.root_treelet);
    put_u32(out, bvh.node_count);
    put_u32(out, static_cast<std::uint32_t>(bvh.triangle_order.size()));
    for (const auto& t : bvh.treelets)
        out.insert(out.end(), t.bytes.begin(), t.bytes.end());
    for (auto idx : bvh.triangle_order)
        put_u32(out, idx);
    return out;
}

CompressedBvh deserialize(std::span<const std::uint8_t> bytes)
{
    using namespace detail;
    if (bytes.size() < kCbvhHeaderBytes)
        throw FormatError("CBVH: truncated header");
    const std::uint8_t* p = bytes.data();
    if (p[0] != 'C' || p[1] != 'B' || p[2] != 'V' || p[3] != 'H')
        throw FormatError("CBVH: bad magic");
    if (get_u16(p + 4) != kCbvhVersion)
        throw FormatError("CBVH: unsupported version " + std::to_string(get_u16(p + 4)));

    CompressedBvh bvh;
    if (p[6] > static_cast<std::uint8_t>(Layout::delta))
        throw FormatError("CBVH: unknown layout tag " + std::to_string(p[6]));
    bvh.layout = static_cast<Layout>(p[6]);
    bvh.k = p[7];
    if (!AxisSet::supported(bvh.k))
        throw FormatError("CBVH: unsupported k " + std::to_string(bvh.k));
    bvh.branching_factor = p[8];
    bvh.residual_bits = p[9];
    if (bvh.residual_bits < kMinResidualBits || bvh.residual_bits > kMaxResidualBits)
        throw FormatError("CBVH: residual bits out of range");
    bvh.budget_bytes = get_u32(p + 12);
    bvh.scale = get_f32(p + 16);
    const std::uint32_t treelet_count = get_u32(p + 20);
    bvh.root_treelet = get_u32(p + 24);
    bvh.node_count = get_u32(p + 28);
    const std::uint32_t triangle_count = get_u32(p + 32);
    if (treelet_count == 0 || bvh.root_treelet >= treelet_count)
        throw FormatError("CBVH: bad treelet count or root");

    std::size_t pos = kCbvhHeaderBytes;
    bvh.treelets.resize(treelet_count);
    for (auto& t : bvh.treelets) {
        if (pos + kTreeletHeaderBytes > bytes.size())
            throw FormatError("CBVH: truncated treelet header");
        const std::uint32_t size = get_u32(p + pos);
        if (size < kTreeletHeaderBytes || pos + size > bytes.size())
            throw FormatError("CBVH: treelet size out of bounds");
        t.bytes.assign(p + pos, p + pos + size);
        pos += size;
    }
    if (pos + std::size_t{4} * triangle_count != bytes.size())
        throw FormatError("CBVH: triangle order size mismatch");
    bvh.triangle_order.resize(triangle_count);
    for (auto& idx : bvh.triangle_order) {
        idx = get_u32(p + pos);
        pos += 4;
    }
    return bvh;
}

void write_cbvh_file(const std::string& path, const CompressedBvh& bvh)
{
    const auto bytes = serialize(bvh);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

CompressedBvh read_cbvh_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize(bytes);
}

} // namespace cbvh
