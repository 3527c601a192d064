#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbvh/bounding_volume.hpp"
#include "cbvh/bvh.hpp"
#include "cbvh/delta.hpp"
#include "cbvh/quantize.hpp"

namespace cbvh {

enum class Layout : std::uint8_t { uncompressed = 0, half = 1, delta = 2 };

std::string_view layout_name(Layout layout);
/// Accepts "u"/"uncompressed", "h"/"half", "d"/"delta".
std::optional<Layout> parse_layout(std::string_view name);

struct CompressOptions {
    Layout layout = Layout::delta;
    std::uint32_t budget_bytes = 4096;
    int residual_bits = 8;
    /// Scale the model by a power of two into [-1024, 1024] before half
    /// quantization.
    bool prescale = true;
    /// Round halves to nearest instead of outward. Not conservative; for
    /// footprint and timing comparisons only.
    bool nearest_half = false;
};

/*
 * Treelet blob, little endian:
 *
 *   u32 byte_size, u32 node_count, then node records back to back.
 *
 * Node record:
 *   u8 flags        bit 0: leaf, bit 1: absolute descriptor
 *   u8 child_count  0 for leaves
 *   leaf:     u32 first_triangle, u32 triangle_count
 *   internal: child_count x u32 child reference. Bit 31 set: the child is the
 *             root of treelet (ref & 0x7fffffff); clear: byte offset of the
 *             child's record in this blob.
 *   descriptor:
 *     absolute, uncompressed layout: f32 lo[k/2], f32 hi[k/2]
 *     absolute, half/delta layout:   u16 lo[k/2], u16 hi[k/2] (binary16, pre-scaled)
 *     delta interior:                k residuals of b bits, LSB first (see pack_delta)
 *
 * The first record (offset 8) is the treelet root and is always absolute.
 */
inline constexpr std::uint32_t kTreeletHeaderBytes = 8;
inline constexpr std::uint32_t kExternalRefBit = 0x80000000u;

struct Treelet {
    std::vector<std::uint8_t> bytes;

    std::uint32_t byte_size() const { return static_cast<std::uint32_t>(bytes.size()); }
    std::uint32_t node_count() const;
};

struct NodeRef {
    std::uint32_t treelet = 0;
    std::uint32_t offset = kTreeletHeaderBytes;

    std::uint64_t id() const noexcept { return (std::uint64_t{treelet} << 32) | offset; }
    friend bool operator==(NodeRef, NodeRef) = default;
};

/// Parsed view of one node record.
struct NodeRecord {
    bool leaf = false;
    bool absolute = false;
    std::uint8_t child_count = 0;
    std::uint32_t first_triangle = 0;
    std::uint32_t triangle_count = 0;
    const std::uint8_t* child_refs = nullptr;
    std::span<const std::uint8_t> descriptor;
    std::uint32_t record_bytes = 0;
};

struct CompressedBvh {
    Layout layout = Layout::delta;
    int k = 6;
    int branching_factor = 2;
    int residual_bits = 8;
    std::uint32_t budget_bytes = 4096;
    float scale = 1.0f;
    std::uint32_t root_treelet = 0;
    std::uint32_t node_count = 0;
    std::vector<Treelet> treelets;
    std::vector<std::uint32_t> triangle_order;

    NodeRef root() const { return {root_treelet, kTreeletHeaderBytes}; }
    NodeRecord record(NodeRef ref) const;
    NodeRef child(NodeRef parent, const NodeRecord& rec, int i) const;
    std::span<const std::uint32_t> leaf_triangles(const NodeRecord& rec) const
    {
        return std::span<const std::uint32_t>(triangle_order).subspan(rec.first_triangle, rec.triangle_count);
    }
    std::size_t descriptor_bytes(bool absolute) const;

    friend bool operator==(const CompressedBvh& a, const CompressedBvh& b);
};

/// Greedy breadth-first packing into treelets of at most budget_bytes. Each
/// treelet root is stored absolutely; in the delta layout every other node
/// stores residuals against its parent's decoded volume. Throws
/// std::invalid_argument if a single root record does not fit the budget.
CompressedBvh build_treelets(const BvhTree& tree, const CompressOptions& options = {});

/// Decoded volume of a node. Interior delta nodes need the decoded parent;
/// absolute nodes ignore it. Throws std::invalid_argument when a required
/// parent is missing.
BoundingVolume node_bv(const CompressedBvh& bvh, NodeRef node, const BoundingVolume* parent_decoded);
BoundingVolume node_bv(const CompressedBvh& bvh, NodeRef node, const NodeRecord& rec,
                       const BoundingVolume* parent_decoded);

struct DecodedNode {
    NodeRef ref;
    BoundingVolume bv;
    std::int64_t parent = -1; // index into the decode_all result
    int depth = 0;
};

/// Walks the whole structure breadth first (children in stored order) and
/// decodes every node. For trees from build() the result is in source node
/// order.
std::vector<DecodedNode> decode_all(const CompressedBvh& bvh);

struct MemoryReport {
    Layout layout = Layout::uncompressed;
    std::size_t node_count = 0;
    std::size_t treelet_count = 0;
    std::size_t absolute_nodes = 0; // treelet roots, or every node without residual coding
    std::size_t interior_nodes = 0; // nodes that are not treelet roots
    std::size_t descriptor_bytes = 0;
    std::size_t interior_descriptor_bytes = 0;
    std::size_t topology_bytes = 0;
    std::size_t total_bytes = 0;

    double bytes_per_node() const { return node_count ? double(total_bytes) / double(node_count) : 0.0; }
    double descriptor_bytes_per_node() const { return node_count ? double(descriptor_bytes) / double(node_count) : 0.0; }
    double interior_descriptor_bytes_per_node() const
    {
        return interior_nodes ? double(interior_descriptor_bytes) / double(interior_nodes) : 0.0;
    }
};

/// Byte accounting of the node storage. The uncompressed tree is counted as
/// k floats per node plus the same topology fields a treelet record carries.
MemoryReport memory_report(const CompressedBvh& bvh);
MemoryReport memory_report(const BvhTree& tree);

} // namespace cbvh
