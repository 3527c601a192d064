#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cbvh/bvh.hpp"
#include "cbvh/compressed.hpp"
#include "cbvh/mesh.hpp"

namespace cbvh {

struct QueryStats {
    std::uint64_t bv_tests = 0;
    std::uint64_t primitive_tests = 0;
    /// Node volumes decoded; every decode is one visit.
    std::uint64_t nodes_visited = 0;
    std::uint64_t treelets_touched = 0;
    std::uint64_t descriptor_bytes_touched = 0;
    std::uint64_t absolute_decodes = 0;
    std::uint64_t delta_decodes = 0;

    friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

/// Non-owning handle over any of the hierarchy layouts, used by the queries.
class BvhView {
public:
    BvhView(const BvhTree& tree) : tree_(&tree) {}
    BvhView(const CompressedBvh& compressed) : compressed_(&compressed) {}

    int k() const { return tree_ ? tree_->k : compressed_->k; }
    Layout layout() const { return tree_ ? Layout::uncompressed : compressed_->layout; }
    std::size_t treelet_count() const { return tree_ ? 1 : compressed_->treelets.size(); }
    const BvhTree* tree() const { return tree_; }
    const CompressedBvh* compressed() const { return compressed_; }

    struct Node {
        NodeRef ref;
        bool leaf = false;
        int child_count = 0;
        NodeRecord record; // compressed layouts only
    };

    Node open(NodeRef ref) const;
    NodeRef root() const;
    NodeRef child(const Node& node, int i) const;
    std::span<const std::uint32_t> leaf_triangles(const Node& node) const;
    BoundingVolume decode(const Node& node, const BoundingVolume* parent) const;
    std::size_t descriptor_bytes(const Node& node) const;

private:
    const BvhTree* tree_ = nullptr;
    const CompressedBvh* compressed_ = nullptr;
};

/// A mesh with a hierarchy over it.
struct Model {
    const Mesh& mesh;
    BvhView bvh;
};

enum class QueryMode : std::uint8_t { collision, distance };

struct QueryConfig {
    QueryMode mode = QueryMode::collision;
    /// Collision mode only: stop at the first contact.
    bool early_exit = true;
    RigidTransform transform_a;
    RigidTransform transform_b;
};

struct QueryReport {
    bool colliding = false;
    /// Distance mode only.
    std::optional<double> min_distance;
    /// (triangle of a, triangle of b) in original mesh indices.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> witness;
    QueryStats stats;
};

/// Simultaneous descent of both hierarchies. Leaf pairs run exact triangle
/// tests; a leaf against an inner node descends the inner node; two inner
/// nodes descend all child pairs. Only overlapping pairs are expanded. All
/// tests happen in a's frame. Throws AxisSetMismatch when k differs.
QueryReport collide(const Model& a, const Model& b, const QueryConfig& cfg);

/// Exact minimum distance by best-first descent over node pairs ordered by
/// their volume lower bound.
QueryReport distance(const Model& a, const Model& b, const QueryConfig& cfg);

/// Dispatches on cfg.mode.
QueryReport run_query(const Model& a, const Model& b, const QueryConfig& cfg);

} // namespace cbvh
