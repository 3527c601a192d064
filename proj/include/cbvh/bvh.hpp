#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbvh/bounding_volume.hpp"
#include "cbvh/mesh.hpp"

namespace cbvh {

struct BvhNode {
    BoundingVolume bv;
    std::vector<std::uint32_t> children;
    // Range into BvhTree::triangle_order; leaves only.
    std::uint32_t first_triangle = 0;
    std::uint32_t triangle_count = 0;

    bool is_leaf() const noexcept { return children.empty(); }
};

struct BuildOptions {
    int k = 6;
    int branching_factor = 4;
    int leaf_capacity = 4;
};

/// Uncompressed hierarchy. Node 0 is the root; nodes are stored breadth
/// first, so siblings are contiguous.
struct BvhTree {
    std::vector<BvhNode> nodes;
    int branching_factor = 2;
    int leaf_capacity = 1;
    int k = 6;
    std::vector<std::uint32_t> triangle_order;

    const AxisSet& axes() const { return AxisSet::standard(k); }
    std::span<const std::uint32_t> leaf_triangles(const BvhNode& n) const
    {
        return std::span<const std::uint32_t>(triangle_order).subspan(n.first_triangle, n.triangle_count);
    }
    /// Number of levels (a single leaf root has depth 1).
    int depth() const;
    std::size_t leaf_count() const;
};

/// Top-down equal-count split: triangles are ordered by centroid along the
/// longest extent of their centroid box (ties by triangle index) and cut into
/// branching_factor parts until a node holds at most leaf_capacity triangles.
BvhTree build(const Mesh& mesh, const BuildOptions& options = {});

struct Violation {
    std::uint32_t node;
    std::string what;
};

/// Every structural and containment invariant of `tree` against `mesh`;
/// empty when valid.
std::vector<Violation> validate(const BvhTree& tree, const Mesh& mesh);

} // namespace cbvh
