#include "cbvh/query.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "cbvh/triangle.hpp"

namespace cbvh {

BvhView::Node BvhView::open(NodeRef ref) const
{
    Node n;
    n.ref = ref;
    if (tree_) {
        const BvhNode& node = tree_->nodes.at(ref.offset);
        n.leaf = node.is_leaf();
        n.child_count = static_cast<int>(node.children.size());
        return n;
    }
    n.record = compressed_->record(ref);
    n.leaf = n.record.leaf;
    n.child_count = n.record.child_count;
    return n;
}

NodeRef BvhView::root() const { return tree_ ? NodeRef{0, 0} : compressed_->root(); }

NodeRef BvhView::child(const Node& node, int i) const
{
    if (tree_)
        return {0, tree_->nodes[node.ref.offset].children[static_cast<std::size_t>(i)]};
    return compressed_->child(node.ref, node.record, i);
}

std::span<const std::uint32_t> BvhView::leaf_triangles(const Node& node) const
{
    if (tree_)
        return tree_->leaf_triangles(tree_->nodes[node.ref.offset]);
    return compressed_->leaf_triangles(node.record);
}

BoundingVolume BvhView::decode(const Node& node, const BoundingVolume* parent) const
{
    if (tree_)
        return tree_->nodes[node.ref.offset].bv;
    return node_bv(*compressed_, node.ref, node.record, parent);
}

std::size_t BvhView::descriptor_bytes(const Node& node) const
{
    if (tree_)
        return 4u * static_cast<std::size_t>(tree_->k);
    return node.record.descriptor.size();
}

namespace {

// Per-query decoding state for one side. Counts every decode as a visit.
class Side {
public:
    Side(const Model& model, QueryStats& stats)
        : model_(model), stats_(stats), seen_(model.bvh.treelet_count(), 0)
    {
    }

    const BvhView& view() const { return model_.bvh; }
    const Mesh& mesh() const { return model_.mesh; }

    BoundingVolume decode(const BvhView::Node& node, const BoundingVolume* parent)
    {
        ++stats_.nodes_visited;
        if (view().tree() || node.record.absolute)
            ++stats_.absolute_decodes;
        else
            ++stats_.delta_decodes;
        stats_.descriptor_bytes_touched += view().descriptor_bytes(node);
        if (!seen_[node.ref.treelet]) {
            seen_[node.ref.treelet] = 1;
            ++stats_.treelets_touched;
        }
        return view().decode(node, parent);
    }

private:
    const Model& model_;
    QueryStats& stats_;
    std::vector<std::uint8_t> seen_;
};

struct Decoded {
    NodeRef ref;
    BoundingVolume own;   // in the node's own frame, parent for its children
    BoundingVolume in_a;  // rebounded into a's frame (b side only)
};

struct PairFrame {
    NodeRef a;
    NodeRef b;
    BoundingVolume bva;
    BoundingVolume bvb;
    BoundingVolume bvb_in_a;
};

class PairTraversal {
public:
    PairTraversal(const Model& a, const Model& b, const QueryConfig& cfg, QueryReport& report)
        : a_(a, report.stats), b_(b, report.stats), report_(report)
    {
        if (a.bvh.k() != b.bvh.k())
            throw AxisSetMismatch(a.bvh.k(), b.bvh.k());
        cfg.transform_a.check();
        cfg.transform_b.check();
        relative_ = cfg.transform_a.inverse() * cfg.transform_b;
        axes_ = &AxisSet::standard(a.bvh.k());
    }

    PairFrame root_frame()
    {
        PairFrame f;
        f.a = a_.view().root();
        f.b = b_.view().root();
        f.bva = a_.decode(a_.view().open(f.a), nullptr);
        f.bvb = b_.decode(b_.view().open(f.b), nullptr);
        f.bvb_in_a = rebound_into_frame(f.bvb, relative_, *axes_);
        return f;
    }

    void expand_a(const BvhView::Node& node, const BoundingVolume& parent, std::vector<Decoded>& out)
    {
        out.clear();
        for (int i = 0; i < node.child_count; ++i) {
            const NodeRef ref = a_.view().child(node, i);
            const BoundingVolume bv = a_.decode(a_.view().open(ref), &parent);
            out.push_back({ref, bv, bv});
        }
    }

    void expand_b(const BvhView::Node& node, const BoundingVolume& parent, std::vector<Decoded>& out)
    {
        out.clear();
        for (int i = 0; i < node.child_count; ++i) {
            const NodeRef ref = b_.view().child(node, i);
            const BoundingVolume bv = b_.decode(b_.view().open(ref), &parent);
            out.push_back({ref, bv, rebound_into_frame(bv, relative_, *axes_)});
        }
    }

    void load_leaf_triangles(const BvhView::Node& la, const BvhView::Node& lb)
    {
        tris_a_.clear();
        tris_b_.clear();
        ids_a_.clear();
        ids_b_.clear();
        for (auto t : a_.view().leaf_triangles(la)) {
            tris_a_.push_back(a_.mesh().triangle(t));
            ids_a_.push_back(t);
        }
        for (auto t : b_.view().leaf_triangles(lb)) {
            tris_b_.push_back(relative_.apply(b_.mesh().triangle(t)));
            ids_b_.push_back(t);
        }
    }

    Side a_;
    Side b_;
    QueryReport& report_;
    RigidTransform relative_;
    const AxisSet* axes_ = nullptr;
    std::vector<Triangle> tris_a_, tris_b_;
    std::vector<std::uint32_t> ids_a_, ids_b_;
};

} // namespace

QueryReport collide(const Model& a, const Model& b, const QueryConfig& cfg)
{
    QueryReport report;
    PairTraversal q(a, b, cfg, report);
    QueryStats& stats = report.stats;

    std::vector<PairFrame> stack;
    {
        PairFrame root = q.root_frame();
        ++stats.bv_tests;
        if (!bv_overlap(root.bva, root.bvb_in_a))
            return report;
        stack.push_back(root);
    }

    std::vector<Decoded> kids_a, kids_b;
    std::vector<PairFrame> next;
    while (!stack.empty()) {
        const PairFrame f = stack.back();
        stack.pop_back();
        const BvhView::Node na = a.bvh.open(f.a);
        const BvhView::Node nb = b.bvh.open(f.b);
        next.clear();

        if (na.leaf && nb.leaf) {
            q.load_leaf_triangles(na, nb);
            for (std::size_t i = 0; i < q.tris_a_.size(); ++i) {
                for (std::size_t j = 0; j < q.tris_b_.size(); ++j) {
                    ++stats.primitive_tests;
                    if (tri_tri_intersect(q.tris_a_[i], q.tris_b_[j])) {
                        if (!report.colliding) {
                            report.colliding = true;
                            report.witness = std::pair{q.ids_a_[i], q.ids_b_[j]};
                        }
                        if (cfg.early_exit)
                            return report;
                    }
                }
            }
            continue;
        }
        if (na.leaf) {
            q.expand_b(nb, f.bvb, kids_b);
            for (const auto& kb : kids_b) {
                ++stats.bv_tests;
                if (bv_overlap(f.bva, kb.in_a))
                    next.push_back({f.a, kb.ref, f.bva, kb.own, kb.in_a});
            }
        } else if (nb.leaf) {
            q.expand_a(na, f.bva, kids_a);
            for (const auto& ka : kids_a) {
                ++stats.bv_tests;
                if (bv_overlap(ka.own, f.bvb_in_a))
                    next.push_back({ka.ref, f.b, ka.own, f.bvb, f.bvb_in_a});
            }
        } else {
            q.expand_a(na, f.bva, kids_a);
            q.expand_b(nb, f.bvb, kids_b);
            for (const auto& ka : kids_a) {
                for (const auto& kb : kids_b) {
                    ++stats.bv_tests;
                    if (bv_overlap(ka.own, kb.in_a))
                        next.push_back({ka.ref, kb.ref, ka.own, kb.own, kb.in_a});
                }
            }
        }
        // Reverse so pairs pop in child index order.
        stack.insert(stack.end(), next.rbegin(), next.rend());
    }
    return report;
}

QueryReport distance(const Model& a, const Model& b, const QueryConfig& cfg)
{
    QueryReport report;
    PairTraversal q(a, b, cfg, report);
    QueryStats& stats = report.stats;

    struct Entry {
        double bound;
        std::uint64_t id_a;
        std::uint64_t id_b;
        std::uint32_t slot;
        bool operator>(const Entry& o) const
        {
            if (bound != o.bound)
                return bound > o.bound;
            if (id_a != o.id_a)
                return id_a > o.id_a;
            return id_b > o.id_b;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    std::vector<PairFrame> pool;
    std::vector<std::uint32_t> free_slots;
    auto push = [&](double bound, const PairFrame& f) {
        std::uint32_t slot;
        if (!free_slots.empty()) {
            slot = free_slots.back();
            free_slots.pop_back();
            pool[slot] = f;
        } else {
            slot = static_cast<std::uint32_t>(pool.size());
            pool.push_back(f);
        }
        heap.push({bound, f.a.id(), f.b.id(), slot});
    };

    double best = std::numeric_limits<double>::infinity();
    {
        const PairFrame root = q.root_frame();
        ++stats.bv_tests;
        push(bv_distance(root.bva, root.bvb_in_a), root);
    }

    std::vector<Decoded> kids_a, kids_b;
    while (!heap.empty()) {
        const Entry top = heap.top();
        heap.pop();
        if (top.bound >= best)
            break;
        const PairFrame f = pool[top.slot];
        free_slots.push_back(top.slot);
        const BvhView::Node na = a.bvh.open(f.a);
        const BvhView::Node nb = b.bvh.open(f.b);

        auto consider = [&](const Decoded& ka, const Decoded& kb, const BoundingVolume& bvb_own) {
            ++stats.bv_tests;
            const double bound = bv_distance(ka.own, kb.in_a);
            if (bound < best)
                push(bound, {ka.ref, kb.ref, ka.own, bvb_own, kb.in_a});
        };

        if (na.leaf && nb.leaf) {
            q.load_leaf_triangles(na, nb);
            for (std::size_t i = 0; i < q.tris_a_.size() && best > 0.0; ++i) {
                for (std::size_t j = 0; j < q.tris_b_.size(); ++j) {
                    ++stats.primitive_tests;
                    const double d = tri_tri_distance(q.tris_a_[i], q.tris_b_[j]);
                    if (d < best) {
                        best = d;
                        report.witness = std::pair{q.ids_a_[i], q.ids_b_[j]};
                        if (best == 0.0)
                            break;
                    }
                }
            }
            if (best == 0.0)
                break;
            continue;
        }
        if (na.leaf) {
            q.expand_b(nb, f.bvb, kids_b);
            const Decoded self{f.a, f.bva, f.bva};
            for (const auto& kb : kids_b)
                consider(self, kb, kb.own);
        } else if (nb.leaf) {
            q.expand_a(na, f.bva, kids_a);
            const Decoded other{f.b, f.bvb, f.bvb_in_a};
            for (const auto& ka : kids_a)
                consider(ka, other, f.bvb);
        } else {
            q.expand_a(na, f.bva, kids_a);
            q.expand_b(nb, f.bvb, kids_b);
            for (const auto& ka : kids_a)
                for (const auto& kb : kids_b)
                    consider(ka, kb, kb.own);
        }
    }

    report.min_distance = best;
    report.colliding = best == 0.0;
    return report;
}

QueryReport run_query(const Model& a, const Model& b, const QueryConfig& cfg)
{
    return cfg.mode == QueryMode::collision ? collide(a, b, cfg) : distance(a, b, cfg);
}

} // namespace cbvh
