#include "cbvh/bvh.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace cbvh {

int BvhTree::depth() const
{
    if (nodes.empty())
        return 0;
    int deepest = 0;
    std::vector<std::pair<std::uint32_t, int>> stack{{0u, 1}};
    while (!stack.empty()) {
        const auto [id, level] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, level);
        for (auto c : nodes[id].children)
            stack.emplace_back(c, level + 1);
    }
    return deepest;
}

std::size_t BvhTree::leaf_count() const
{
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const BvhNode& n) { return n.is_leaf(); }));
}

BvhTree build(const Mesh& mesh, const BuildOptions& options)
{
    if (mesh.empty())
        throw std::invalid_argument("build: mesh has no triangles");
    if (options.branching_factor < 2 || options.branching_factor > 255)
        throw std::invalid_argument("build: branching factor must be in [2, 255]");
    if (options.leaf_capacity < 1)
        throw std::invalid_argument("build: leaf capacity must be >= 1");
    const AxisSet& axes = AxisSet::standard(options.k);

    BvhTree tree;
    tree.k = options.k;
    tree.branching_factor = options.branching_factor;
    tree.leaf_capacity = options.leaf_capacity;
    tree.triangle_order.resize(mesh.triangle_count());
    std::iota(tree.triangle_order.begin(), tree.triangle_order.end(), 0u);

    // Centroids scaled by 3 (vertex sums) keep the ordering and skip a division.
    std::vector<Vec3> centroid(mesh.triangle_count());
    for (std::size_t i = 0; i < centroid.size(); ++i) {
        const Triangle t = mesh.triangle(i);
        centroid[i] = t.a + t.b + t.c;
    }

    struct Pending {
        std::uint32_t node;
        std::uint32_t begin;
        std::uint32_t end;
    };
    std::deque<Pending> queue;
    tree.nodes.emplace_back();
    queue.push_back({0, 0, static_cast<std::uint32_t>(mesh.triangle_count())});

    const auto B = static_cast<std::uint32_t>(options.branching_factor);
    const auto capacity = static_cast<std::uint32_t>(options.leaf_capacity);
    while (!queue.empty()) {
        const Pending job = queue.front();
        queue.pop_front();
        auto range = std::span<std::uint32_t>(tree.triangle_order).subspan(job.begin, job.end - job.begin);
        tree.nodes[job.node].bv = fit_bv(mesh, range, axes);

        const std::uint32_t n = job.end - job.begin;
        if (n <= capacity) {
            tree.nodes[job.node].first_triangle = job.begin;
            tree.nodes[job.node].triangle_count = n;
            continue;
        }

        Vec3 cmin{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
        Vec3 cmax = -cmin;
        for (auto t : range) {
            for (int a = 0; a < 3; ++a) {
                cmin[a] = std::min(cmin[a], centroid[t][a]);
                cmax[a] = std::max(cmax[a], centroid[t][a]);
            }
        }
        int axis = 0;
        for (int a = 1; a < 3; ++a)
            if (cmax[a] - cmin[a] > cmax[axis] - cmin[axis])
                axis = a;
        std::sort(range.begin(), range.end(), [&](std::uint32_t l, std::uint32_t r) {
            const double cl = centroid[l][axis];
            const double cr = centroid[r][axis];
            return cl < cr || (cl == cr && l < r);
        });

        std::vector<std::uint32_t> children;
        for (std::uint32_t part = 0; part < B; ++part) {
            const std::uint32_t b = job.begin + static_cast<std::uint32_t>(std::uint64_t{n} * part / B);
            const std::uint32_t e = job.begin + static_cast<std::uint32_t>(std::uint64_t{n} * (part + 1) / B);
            if (b == e)
                continue;
            const auto id = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            children.push_back(id);
            queue.push_back({id, b, e});
        }
        tree.nodes[job.node].children = std::move(children);
    }
    return tree;
}

std::vector<Violation> validate(const BvhTree& tree, const Mesh& mesh)
{
    std::vector<Violation> out;
    auto flag = [&](std::uint32_t node, std::string what) { out.push_back({node, std::move(what)}); };

    if (tree.nodes.empty()) {
        flag(0, "tree has no nodes");
        return out;
    }
    const auto n = static_cast<std::uint32_t>(tree.nodes.size());
    std::vector<std::uint32_t> parent_count(n, 0);
    std::vector<std::uint32_t> covered(mesh.triangle_count(), 0);

    if (tree.triangle_order.size() != mesh.triangle_count())
        flag(0, "triangle order has " + std::to_string(tree.triangle_order.size()) + " entries for " +
                    std::to_string(mesh.triangle_count()) + " triangles");

    for (std::uint32_t i = 0; i < n; ++i) {
        const BvhNode& node = tree.nodes[i];
        if (node.bv.k != tree.k) {
            flag(i, "node axis set differs from tree axis set");
            continue;
        }
        for (int s = 0; s < node.bv.slabs(); ++s)
            if (!(node.bv.lo[s] <= node.bv.hi[s]))
                flag(i, "inverted interval on slab " + std::to_string(s));

        if (node.is_leaf()) {
            if (node.triangle_count == 0) {
                flag(i, "leaf without triangles");
                continue;
            }
            if (std::uint64_t{node.first_triangle} + node.triangle_count > tree.triangle_order.size()) {
                flag(i, "leaf range exceeds triangle order");
                continue;
            }
            for (auto t : tree.leaf_triangles(node)) {
                if (t >= mesh.triangle_count()) {
                    flag(i, "leaf references triangle " + std::to_string(t) + " outside the mesh");
                    continue;
                }
                ++covered[t];
                const auto& axes = tree.axes();
                for (auto v : mesh.triangles()[t]) {
                    const Vec3& p = mesh.vertices()[v];
                    for (int s = 0; s < axes.slabs(); ++s) {
                        const double proj = dot(axes.direction(s), p);
                        if (proj < node.bv.lo[s] || proj > node.bv.hi[s]) {
                            flag(i, "vertex " + std::to_string(v) + " of triangle " + std::to_string(t) +
                                        " outside slab " + std::to_string(s));
                            s = axes.slabs();
                        }
                    }
                }
            }
            continue;
        }

        if (node.triangle_count != 0)
            flag(i, "internal node carries a triangle range");
        if (node.children.size() < 2 || node.children.size() > static_cast<std::size_t>(tree.branching_factor))
            flag(i, "internal node has " + std::to_string(node.children.size()) + " children");
        for (auto c : node.children) {
            if (c >= n || c == 0) {
                flag(i, "invalid child id " + std::to_string(c));
                continue;
            }
            ++parent_count[c];
            const BvhNode& child = tree.nodes[c];
            if (child.bv.k == node.bv.k && !node.bv.contains(child.bv))
                flag(c, "child volume exceeds parent " + std::to_string(i));
        }
    }

    for (std::uint32_t i = 1; i < n; ++i)
        if (parent_count[i] != 1)
            flag(i, "node has " + std::to_string(parent_count[i]) + " parents");
    for (std::size_t t = 0; t < covered.size(); ++t)
        if (covered[t] != 1)
            flag(0, "triangle " + std::to_string(t) + " appears in " + std::to_string(covered[t]) + " leaves");
    return out;
}

} // namespace cbvh
