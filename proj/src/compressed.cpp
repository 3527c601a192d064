#include "cbvh/compressed.hpp"

#include <deque>
#include <stdexcept>
#include <string>

#include "byte_io.hpp"

namespace cbvh {

using detail::get_f32;
using detail::get_u16;
using detail::get_u32;

std::string_view layout_name(Layout layout)
{
    switch (layout) {
    case Layout::uncompressed:
        return "uncompressed";
    case Layout::half:
        return "half";
    case Layout::delta:
        return "delta";
    }
    return "unknown";
}

std::optional<Layout> parse_layout(std::string_view name)
{
    if (name == "u" || name == "uncompressed")
        return Layout::uncompressed;
    if (name == "h" || name == "half")
        return Layout::half;
    if (name == "d" || name == "delta")
        return Layout::delta;
    return std::nullopt;
}

std::uint32_t Treelet::node_count() const { return bytes.size() >= 8 ? get_u32(bytes.data() + 4) : 0; }

std::size_t CompressedBvh::descriptor_bytes(bool absolute) const
{
    if (!absolute)
        return delta_code_bytes(k, residual_bits);
    return layout == Layout::uncompressed ? 4u * static_cast<std::size_t>(k) : 2u * static_cast<std::size_t>(k);
}

NodeRecord CompressedBvh::record(NodeRef ref) const
{
    if (ref.treelet >= treelets.size())
        throw std::out_of_range("node reference to missing treelet " + std::to_string(ref.treelet));
    const auto& bytes = treelets[ref.treelet].bytes;
    if (ref.offset < kTreeletHeaderBytes || std::size_t{ref.offset} + 2 > bytes.size())
        throw std::out_of_range("node offset " + std::to_string(ref.offset) + " outside treelet");
    const std::uint8_t* p = bytes.data() + ref.offset;
    NodeRecord rec;
    rec.leaf = (p[0] & 1u) != 0;
    rec.absolute = (p[0] & 2u) != 0;
    rec.child_count = p[1];
    std::size_t pos = 2;
    if (rec.leaf) {
        if (std::size_t{ref.offset} + pos + 8 > bytes.size())
            throw std::out_of_range("truncated leaf record");
        rec.first_triangle = get_u32(p + pos);
        rec.triangle_count = get_u32(p + pos + 4);
        pos += 8;
    } else {
        rec.child_refs = p + pos;
        pos += 4u * rec.child_count;
    }
    const std::size_t desc = descriptor_bytes(rec.absolute);
    if (std::size_t{ref.offset} + pos + desc > bytes.size())
        throw std::out_of_range("truncated node record");
    rec.descriptor = {p + pos, desc};
    rec.record_bytes = static_cast<std::uint32_t>(pos + desc);
    return rec;
}

NodeRef CompressedBvh::child(NodeRef parent, const NodeRecord& rec, int i) const
{
    const std::uint32_t ref = get_u32(rec.child_refs + 4 * i);
    if (ref & kExternalRefBit)
        return {ref & ~kExternalRefBit, kTreeletHeaderBytes};
    return {parent.treelet, ref};
}

bool operator==(const CompressedBvh& a, const CompressedBvh& b)
{
    if (a.layout != b.layout || a.k != b.k || a.branching_factor != b.branching_factor ||
        a.residual_bits != b.residual_bits || a.budget_bytes != b.budget_bytes || a.scale != b.scale ||
        a.root_treelet != b.root_treelet || a.node_count != b.node_count || a.triangle_order != b.triangle_order ||
        a.treelets.size() != b.treelets.size())
        return false;
    for (std::size_t i = 0; i < a.treelets.size(); ++i)
        if (a.treelets[i].bytes != b.treelets[i].bytes)
            return false;
    return true;
}

namespace {

std::uint32_t topology_bytes(const BvhNode& node)
{
    return 2u + (node.is_leaf() ? 8u : 4u * static_cast<std::uint32_t>(node.children.size()));
}

void write_absolute(std::vector<std::uint8_t>& out, const BoundingVolume& bv, const CompressedBvh& c, bool nearest,
                    BoundingVolume& decoded)
{
    if (c.layout == Layout::uncompressed) {
        for (int i = 0; i < bv.slabs(); ++i)
            detail::put_f32(out, bv.lo[i]);
        for (int i = 0; i < bv.slabs(); ++i)
            detail::put_f32(out, bv.hi[i]);
        decoded = bv;
        return;
    }
    const QuantizedBv q = quantize_bv(bv, c.scale, nearest);
    for (int i = 0; i < q.slabs(); ++i)
        detail::put_u16(out, q.lo[i].bits);
    for (int i = 0; i < q.slabs(); ++i)
        detail::put_u16(out, q.hi[i].bits);
    decoded = dequantize_bv(q, c.scale);
}

} // namespace

CompressedBvh build_treelets(const BvhTree& tree, const CompressOptions& options)
{
    if (tree.nodes.empty())
        throw std::invalid_argument("build_treelets: empty tree");
    if (options.residual_bits < kMinResidualBits || options.residual_bits > kMaxResidualBits)
        throw std::invalid_argument("build_treelets: residual bits must be in [2, 16]");
    if (options.nearest_half && options.layout != Layout::half)
        throw std::invalid_argument("build_treelets: nearest rounding is only available for the half layout");

    CompressedBvh out;
    out.layout = options.layout;
    out.k = tree.k;
    out.branching_factor = tree.branching_factor;
    out.residual_bits = options.residual_bits;
    out.budget_bytes = options.budget_bytes;
    out.node_count = static_cast<std::uint32_t>(tree.nodes.size());
    out.triangle_order = tree.triangle_order;
    if (options.prescale && options.layout != Layout::uncompressed)
        out.scale = choose_prescale(tree.nodes[0].bv);

    const std::size_t n = tree.nodes.size();
    const auto root_desc = static_cast<std::uint32_t>(out.descriptor_bytes(true));
    const auto inner_desc = static_cast<std::uint32_t>(out.descriptor_bytes(options.layout != Layout::delta));

    std::vector<std::uint32_t> parent(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const BvhNode& node = tree.nodes[i];
        if (node.children.size() > 255)
            throw std::invalid_argument("build_treelets: node has more than 255 children");
        if (kTreeletHeaderBytes + topology_bytes(node) + root_desc > options.budget_bytes)
            throw std::invalid_argument("build_treelets: budget of " + std::to_string(options.budget_bytes) +
                                        " bytes cannot hold a single node record");
        for (auto c : node.children)
            parent[c] = static_cast<std::uint32_t>(i);
    }

    // Membership and byte offsets first, so cross-treelet references are
    // known before anything is serialized.
    std::vector<std::uint32_t> treelet_of(n, 0);
    std::vector<std::uint32_t> offset_of(n, 0);
    std::vector<std::vector<std::uint32_t>> members;
    std::deque<std::uint32_t> pending{0};
    while (!pending.empty()) {
        const std::uint32_t root = pending.front();
        pending.pop_front();
        const auto t = static_cast<std::uint32_t>(members.size());
        members.push_back({root});
        auto& group = members.back();
        treelet_of[root] = t;
        offset_of[root] = kTreeletHeaderBytes;
        std::uint32_t size = kTreeletHeaderBytes + topology_bytes(tree.nodes[root]) + root_desc;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (auto c : tree.nodes[group[i]].children) {
                const std::uint32_t rec = topology_bytes(tree.nodes[c]) + inner_desc;
                if (size + rec <= options.budget_bytes) {
                    treelet_of[c] = t;
                    offset_of[c] = size;
                    size += rec;
                    group.push_back(c);
                } else {
                    pending.push_back(c);
                }
            }
        }
    }

    std::vector<BoundingVolume> decoded(n);
    out.treelets.resize(members.size());
    for (std::uint32_t t = 0; t < members.size(); ++t) {
        auto& bytes = out.treelets[t].bytes;
        detail::put_u32(bytes, 0);
        detail::put_u32(bytes, static_cast<std::uint32_t>(members[t].size()));
        for (auto id : members[t]) {
            const BvhNode& node = tree.nodes[id];
            const bool absolute = id == members[t].front() || options.layout != Layout::delta;
            detail::put_u8(bytes, static_cast<std::uint8_t>((node.is_leaf() ? 1u : 0u) | (absolute ? 2u : 0u)));
            detail::put_u8(bytes, static_cast<std::uint8_t>(node.children.size()));
            if (node.is_leaf()) {
                detail::put_u32(bytes, node.first_triangle);
                detail::put_u32(bytes, node.triangle_count);
            } else {
                for (auto c : node.children)
                    detail::put_u32(bytes, treelet_of[c] == t ? offset_of[c] : (kExternalRefBit | treelet_of[c]));
            }
            if (absolute) {
                write_absolute(bytes, node.bv, out, options.nearest_half, decoded[id]);
            } else {
                const BoundingVolume& p = decoded[parent[id]];
                const DeltaCode code = encode_delta(node.bv, p, options.residual_bits);
                const std::size_t at = bytes.size();
                bytes.resize(at + inner_desc);
                pack_delta(code, options.residual_bits, std::span<std::uint8_t>(bytes).subspan(at));
                decoded[id] = decode_delta(code, p, options.residual_bits);
            }
        }
        detail::set_u32(bytes.data(), static_cast<std::uint32_t>(bytes.size()));
    }
    return out;
}

BoundingVolume node_bv(const CompressedBvh& bvh, NodeRef node, const NodeRecord& rec, const BoundingVolume* parent_decoded)
{
    const int slabs = bvh.k / 2;
    const std::uint8_t* d = rec.descriptor.data();
    if (rec.absolute) {
        if (bvh.layout == Layout::uncompressed) {
            BoundingVolume bv;
            bv.k = static_cast<std::uint8_t>(bvh.k);
            for (int i = 0; i < slabs; ++i) {
                bv.lo[i] = get_f32(d + 4 * i);
                bv.hi[i] = get_f32(d + 4 * (slabs + i));
            }
            return bv;
        }
        QuantizedBv q;
        q.k = static_cast<std::uint8_t>(bvh.k);
        for (int i = 0; i < slabs; ++i) {
            q.lo[i].bits = get_u16(d + 2 * i);
            q.hi[i].bits = get_u16(d + 2 * (slabs + i));
        }
        return dequantize_bv(q, bvh.scale);
    }
    if (parent_decoded == nullptr)
        throw std::invalid_argument("node_bv: node at treelet " + std::to_string(node.treelet) + " offset " +
                                    std::to_string(node.offset) + " needs its decoded parent");
    return decode_delta(unpack_delta(rec.descriptor, bvh.k, bvh.residual_bits), *parent_decoded, bvh.residual_bits);
}

BoundingVolume node_bv(const CompressedBvh& bvh, NodeRef node, const BoundingVolume* parent_decoded)
{
    return node_bv(bvh, node, bvh.record(node), parent_decoded);
}

std::vector<DecodedNode> decode_all(const CompressedBvh& bvh)
{
    std::vector<DecodedNode> out;
    out.reserve(bvh.node_count);
    out.push_back({bvh.root(), node_bv(bvh, bvh.root(), nullptr), -1, 0});
    for (std::size_t i = 0; i < out.size(); ++i) {
        const NodeRef ref = out[i].ref;
        const NodeRecord rec = bvh.record(ref);
        for (int c = 0; c < rec.child_count; ++c) {
            const NodeRef child = bvh.child(ref, rec, c);
            const BoundingVolume bv = node_bv(bvh, child, &out[i].bv);
            out.push_back({child, bv, static_cast<std::int64_t>(i), out[i].depth + 1});
        }
    }
    return out;
}

MemoryReport memory_report(const CompressedBvh& bvh)
{
    MemoryReport r;
    r.layout = bvh.layout;
    r.treelet_count = bvh.treelets.size();
    for (std::uint32_t t = 0; t < bvh.treelets.size(); ++t) {
        const auto& treelet = bvh.treelets[t];
        r.total_bytes += treelet.byte_size();
        std::uint32_t offset = kTreeletHeaderBytes;
        while (offset < treelet.byte_size()) {
            const NodeRecord rec = bvh.record({t, offset});
            const bool treelet_root = offset == kTreeletHeaderBytes;
            ++r.node_count;
            if (rec.absolute)
                ++r.absolute_nodes;
            r.descriptor_bytes += rec.descriptor.size();
            if (!treelet_root) {
                ++r.interior_nodes;
                r.interior_descriptor_bytes += rec.descriptor.size();
            }
            offset += rec.record_bytes;
        }
    }
    r.topology_bytes = r.total_bytes - r.descriptor_bytes;
    return r;
}

MemoryReport memory_report(const BvhTree& tree)
{
    MemoryReport r;
    r.layout = Layout::uncompressed;
    r.node_count = tree.nodes.size();
    r.absolute_nodes = r.node_count;
    r.interior_nodes = r.node_count ? r.node_count - 1 : 0;
    const std::size_t per_node = 4u * static_cast<std::size_t>(tree.k);
    r.descriptor_bytes = per_node * r.node_count;
    r.interior_descriptor_bytes = per_node * r.interior_nodes;
    for (const auto& node : tree.nodes)
        r.topology_bytes += topology_bytes(node);
    r.total_bytes = r.descriptor_bytes + r.topology_bytes;
    return r;
}

} // namespace cbvh
