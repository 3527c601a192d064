#include <gtest/gtest.h>

#include <cmath>

#include "cbvh/bvh.hpp"
#include "cbvh/compressed.hpp"
#include "cbvh/meshgen.hpp"
#include "cbvh/query.hpp"
#include "cbvh/triangle.hpp"
#include "oracles.hpp"

using namespace cbvh;

namespace {

Mesh unit_cube()
{
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    std::vector<TriangleIndices> t{{0, 1, 3}, {0, 3, 2}, {4, 6, 7}, {4, 7, 5}, {0, 4, 5}, {0, 5, 1},
                                   {2, 3, 7}, {2, 7, 6}, {0, 2, 6}, {0, 6, 4}, {1, 5, 7}, {1, 7, 3}};
    return Mesh(v, t);
}

// One hierarchy per layout over the same tree.
struct Hierarchies {
    BvhTree tree;
    CompressedBvh half;
    CompressedBvh delta;

    Hierarchies(const Mesh& m, BuildOptions opts = {}, std::uint32_t budget = 4096)
        : tree(build(m, opts)),
          half(build_treelets(tree, {Layout::half, budget, 8})),
          delta(build_treelets(tree, {Layout::delta, budget, 8}))
    {
    }

    BvhView view(Layout l) const
    {
        switch (l) {
        case Layout::half:
            return BvhView(half);
        case Layout::delta:
            return BvhView(delta);
        default:
            return BvhView(tree);
        }
    }
};

constexpr Layout kLayouts[] = {Layout::uncompressed, Layout::half, Layout::delta};

QueryConfig config(QueryMode mode, const RigidTransform& ta = {}, const RigidTransform& tb = {}, bool early = true)
{
    QueryConfig c;
    c.mode = mode;
    c.early_exit = early;
    c.transform_a = ta;
    c.transform_b = tb;
    return c;
}

} // namespace

TEST(Collide, SelfAtIdentity)
{
    const Mesh m = make_torus_knot(3000);
    const Hierarchies h(m);
    for (auto l : kLayouts) {
        const auto r = collide({m, h.view(l)}, {m, h.view(l)}, config(QueryMode::collision));
        EXPECT_TRUE(r.colliding);
        ASSERT_TRUE(r.witness.has_value());
        EXPECT_TRUE(tri_tri_intersect(m.triangle(r.witness->first), m.triangle(r.witness->second)));
    }
}

TEST(Collide, DisjointCubesRejectAtRoot)
{
    const Mesh cube = unit_cube();
    const Hierarchies h(cube);
    for (auto l : kLayouts) {
        const auto r = collide({cube, h.view(l)}, {cube, h.view(l)},
                               config(QueryMode::collision, {}, RigidTransform::translate({10, 0, 0})));
        EXPECT_FALSE(r.colliding);
        EXPECT_EQ(r.stats.primitive_tests, 0u);
        EXPECT_EQ(r.stats.bv_tests, 1u);
    }
}

TEST(Collide, AxisMismatch)
{
    const Mesh m = make_sphere(200);
    const auto a = build(m, {6, 4, 4});
    const auto b = build(m, {14, 4, 4});
    EXPECT_THROW(collide({m, BvhView(a)}, {m, BvhView(b)}, config(QueryMode::collision)), AxisSetMismatch);
    EXPECT_THROW(distance({m, BvhView(a)}, {m, BvhView(b)}, config(QueryMode::distance)), AxisSetMismatch);
}

TEST(Distance, Coincident)
{
    const Mesh m = make_sphere(1000);
    const Hierarchies h(m);
    for (auto l : kLayouts) {
        const auto r = distance({m, h.view(l)}, {m, h.view(l)}, config(QueryMode::distance));
        ASSERT_TRUE(r.min_distance.has_value());
        EXPECT_EQ(*r.min_distance, 0.0);
        EXPECT_TRUE(r.colliding);
    }
}

TEST(Distance, ParallelTriangles)
{
    const Mesh a({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const Mesh b({{0, 0, 2}, {1, 0, 2}, {0, 1, 2}}, {{0, 1, 2}});
    const Hierarchies ha(a), hb(b);
    for (auto l : kLayouts) {
        const auto r = distance({a, ha.view(l)}, {b, hb.view(l)}, config(QueryMode::distance));
        EXPECT_DOUBLE_EQ(*r.min_distance, 2.0);
        EXPECT_FALSE(r.colliding);
        EXPECT_EQ(r.witness, (std::pair<std::uint32_t, std::uint32_t>{0, 0}));
    }
}

TEST(Distance, FrameConvention)
{
    // b translated by +3 in x and a by +1: relative offset 2, minus the unit
    // cube width 1.
    const Mesh cube = unit_cube();
    const Hierarchies h(cube);
    const auto rot = RigidTransform::rotate({0, 0, 1}, 0.3);
    for (auto l : kLayouts) {
        const auto r = distance({cube, h.view(l)}, {cube, h.view(l)},
                                config(QueryMode::distance, rot * RigidTransform::translate({1, 0, 0}),
                                       rot * RigidTransform::translate({3, 0, 0})));
        EXPECT_NEAR(*r.min_distance, 1.0, 1e-12);
    }
}

TEST(Oracle, SmallScenesAllLayouts)
{
    for (int i = 0; i < 24; ++i) {
        const auto s = oracle::random_scene(99, i, 60, 400);
        const Hierarchies ha(s.a, {6, 4, 4}, 512), hb(s.b, {6, 4, 4}, 512);
        const bool expect_hit = oracle::brute_force_collide(s.a, s.b, s.ta, s.tb);
        const double expect_d = oracle::brute_force_distance(s.a, s.b, s.ta, s.tb);
        for (auto l : kLayouts) {
            const Model a{s.a, ha.view(l)}, b{s.b, hb.view(l)};
            const auto c = collide(a, b, config(QueryMode::collision, s.ta, s.tb));
            EXPECT_EQ(c.colliding, expect_hit) << "scene " << i << " " << layout_name(l);
            const auto d = distance(a, b, config(QueryMode::distance, s.ta, s.tb));
            EXPECT_NEAR(*d.min_distance, expect_d, 1e-5) << "scene " << i << " " << layout_name(l);
            EXPECT_EQ(d.colliding, expect_hit);
            if (d.witness) {
                const RigidTransform rel = s.ta.inverse() * s.tb;
                const double wd = tri_tri_distance(s.a.triangle(d.witness->first), rel.apply(s.b.triangle(d.witness->second)));
                EXPECT_NEAR(wd, *d.min_distance, 1e-12);
            }
        }
    }
}

TEST(Oracle, KDopsAndBranching)
{
    for (int i = 0; i < 9; ++i) {
        const auto s = oracle::random_scene(7, i, 100, 300);
        const bool expect_hit = oracle::brute_force_collide(s.a, s.b, s.ta, s.tb);
        const double expect_d = oracle::brute_force_distance(s.a, s.b, s.ta, s.tb);
        for (int k : {14, 18, 26})
            for (int bf : {2, 8}) {
                const Hierarchies ha(s.a, {k, bf, 3}, 1024), hb(s.b, {k, bf, 3}, 1024);
                for (auto l : kLayouts) {
                    const Model a{s.a, ha.view(l)}, b{s.b, hb.view(l)};
                    EXPECT_EQ(collide(a, b, config(QueryMode::collision, s.ta, s.tb)).colliding, expect_hit);
                    EXPECT_NEAR(*distance(a, b, config(QueryMode::distance, s.ta, s.tb)).min_distance, expect_d, 1e-5);
                }
            }
    }
}

TEST(Oracle, MixedLayouts)
{
    for (int i = 0; i < 6; ++i) {
        const auto s = oracle::random_scene(5, i, 100, 300);
        const Hierarchies ha(s.a), hb(s.b);
        const bool expect_hit = oracle::brute_force_collide(s.a, s.b, s.ta, s.tb);
        const double expect_d = oracle::brute_force_distance(s.a, s.b, s.ta, s.tb);
        for (auto la : kLayouts)
            for (auto lb : kLayouts) {
                const Model a{s.a, ha.view(la)}, b{s.b, hb.view(lb)};
                EXPECT_EQ(collide(a, b, config(QueryMode::collision, s.ta, s.tb)).colliding, expect_hit);
                EXPECT_NEAR(*distance(a, b, config(QueryMode::distance, s.ta, s.tb)).min_distance, expect_d, 1e-5);
            }
    }
}

TEST(Stats, DecodeCounts)
{
    for (int i = 0; i < 6; ++i) {
        const auto s = oracle::random_scene(31, i, 300, 800);
        const Hierarchies ha(s.a, {6, 4, 4}, 512), hb(s.b, {6, 4, 4}, 512);
        for (auto l : kLayouts)
            for (auto mode : {QueryMode::collision, QueryMode::distance}) {
                const Model a{s.a, ha.view(l)}, b{s.b, hb.view(l)};
                const auto r = run_query(a, b, config(mode, s.ta, s.tb, false));
                const auto& st = r.stats;
                EXPECT_EQ(st.absolute_decodes + st.delta_decodes, st.nodes_visited);
                EXPECT_GE(st.bv_tests + 2, st.nodes_visited);
                if (l != Layout::delta)
                    EXPECT_EQ(st.delta_decodes, 0u);
                if (l == Layout::uncompressed)
                    EXPECT_EQ(st.descriptor_bytes_touched, 24 * st.nodes_visited);
                if (l == Layout::half)
                    EXPECT_EQ(st.descriptor_bytes_touched, 12 * st.nodes_visited);
                if (l == Layout::delta)
                    EXPECT_EQ(st.descriptor_bytes_touched, 12 * st.absolute_decodes + 6 * st.delta_decodes);
                EXPECT_EQ(run_query(a, b, config(mode, s.ta, s.tb, false)).stats, st) << "non-deterministic";
            }
    }
}

TEST(Stats, SingleTreeletDeltaDecodesOnlyRootsAbsolutely)
{
    const Mesh m = make_sphere(2000);
    const Hierarchies h(m, {6, 4, 4}, 1u << 20);
    ASSERT_EQ(h.delta.treelets.size(), 1u);
    const auto r = collide({m, BvhView(h.delta)}, {m, BvhView(h.delta)},
                           config(QueryMode::collision, {}, RigidTransform::translate({0.3, 0, 0}), false));
    EXPECT_EQ(r.stats.absolute_decodes, 2u);
    EXPECT_EQ(r.stats.delta_decodes, r.stats.nodes_visited - 2);
    EXPECT_EQ(r.stats.treelets_touched, 2u);
}

TEST(Collide, EarlyExitConsistency)
{
    for (int i = 0; i < 12; ++i) {
        const auto s = oracle::random_scene(17, i, 200, 600);
        const Hierarchies ha(s.a), hb(s.b);
        for (auto l : kLayouts) {
            const Model a{s.a, ha.view(l)}, b{s.b, hb.view(l)};
            const auto fast = collide(a, b, config(QueryMode::collision, s.ta, s.tb, true));
            const auto full = collide(a, b, config(QueryMode::collision, s.ta, s.tb, false));
            EXPECT_EQ(fast.colliding, full.colliding);
            EXPECT_LE(fast.stats.primitive_tests, full.stats.primitive_tests);
        }
    }
}

TEST(Collide, CostMonotonicity)
{
    for (int i = 0; i < 9; ++i) {
        const auto s = oracle::random_scene(23, i, 300, 900);
        const Hierarchies ha(s.a), hb(s.b);
        std::uint64_t tests[3];
        for (int l = 0; l < 3; ++l)
            tests[l] = collide({s.a, ha.view(kLayouts[l])}, {s.b, hb.view(kLayouts[l])},
                               config(QueryMode::collision, s.ta, s.tb, false))
                           .stats.bv_tests;
        EXPECT_GE(tests[1], tests[0]);
        EXPECT_GE(tests[2], tests[0]);
    }
}
