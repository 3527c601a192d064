#include "cbvh/bounding_volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbvh {

AxisSet::AxisSet(int k) : k_(k)
{
    int n = 0;
    auto add = [&](double x, double y, double z) { dirs_[n++] = {x, y, z}; };
    add(1, 0, 0);
    add(0, 1, 0);
    add(0, 0, 1);
    if (k == 14 || k == 26) {
        add(1, 1, 1);
        add(1, -1, 1);
        add(-1, 1, 1);
        add(-1, -1, 1);
    }
    if (k == 18 || k == 26) {
        add(1, 1, 0);
        add(1, 0, 1);
        add(0, 1, 1);
        add(1, -1, 0);
        add(1, 0, -1);
        add(0, 1, -1);
    }
    for (int i = 0; i < n; ++i)
        norms_[i] = length(dirs_[i]);
}

const AxisSet& AxisSet::standard(int k)
{
    static const AxisSet k6(6), k14(14), k18(18), k26(26);
    switch (k) {
    case 6:
        return k6;
    case 14:
        return k14;
    case 18:
        return k18;
    case 26:
        return k26;
    default:
        throw std::invalid_argument("unsupported k-DOP k=" + std::to_string(k) + " (expected 6, 14, 18 or 26)");
    }
}

float round_down_to_float(double v)
{
    float f = static_cast<float>(v);
    if (static_cast<double>(f) > v)
        f = std::nextafter(f, -std::numeric_limits<float>::infinity());
    return f;
}

float round_up_to_float(double v)
{
    float f = static_cast<float>(v);
    if (static_cast<double>(f) < v)
        f = std::nextafter(f, std::numeric_limits<float>::infinity());
    return f;
}

bool BoundingVolume::contains(const BoundingVolume& other) const
{
    if (k != other.k)
        throw AxisSetMismatch(k, other.k);
    for (int i = 0; i < slabs(); ++i)
        if (other.lo[i] < lo[i] || other.hi[i] > hi[i])
            return false;
    return true;
}

namespace {

struct SlabAccumulator {
    std::array<double, kMaxSlabs> lo;
    std::array<double, kMaxSlabs> hi;
    const AxisSet& axes;

    explicit SlabAccumulator(const AxisSet& a) : axes(a)
    {
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
    }

    void add(const Vec3& p)
    {
        for (int i = 0; i < axes.slabs(); ++i) {
            const double s = dot(axes.direction(i), p);
            lo[i] = std::min(lo[i], s);
            hi[i] = std::max(hi[i], s);
        }
    }

    BoundingVolume finish(double pad = 0.0) const
    {
        BoundingVolume bv;
        bv.k = static_cast<std::uint8_t>(axes.k());
        for (int i = 0; i < axes.slabs(); ++i) {
            bv.lo[i] = round_down_to_float(lo[i] - pad);
            bv.hi[i] = round_up_to_float(hi[i] + pad);
        }
        return bv;
    }
};

} // namespace

BoundingVolume fit_bv(const Mesh& mesh, std::span<const std::uint32_t> triangles, const AxisSet& axes)
{
    if (triangles.empty())
        throw std::invalid_argument("fit_bv: empty triangle range");
    SlabAccumulator acc(axes);
    const auto& verts = mesh.vertices();
    for (auto t : triangles) {
        const auto& tri = mesh.triangles().at(t);
        for (auto v : tri)
            acc.add(verts[v]);
    }
    return acc.finish();
}

BoundingVolume fit_points(std::span<const Vec3> points, const AxisSet& axes)
{
    if (points.empty())
        throw std::invalid_argument("fit_points: no points");
    SlabAccumulator acc(axes);
    for (const auto& p : points)
        acc.add(p);
    return acc.finish();
}

bool bv_overlap(const BoundingVolume& a, const BoundingVolume& b)
{
    if (a.k != b.k)
        throw AxisSetMismatch(a.k, b.k);
    for (int i = 0; i < a.slabs(); ++i)
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i])
            return false;
    return true;
}

double bv_distance(const BoundingVolume& a, const BoundingVolume& b)
{
    if (a.k != b.k)
        throw AxisSetMismatch(a.k, b.k);
    auto gap = [&](int i) {
        const double g1 = static_cast<double>(b.lo[i]) - static_cast<double>(a.hi[i]);
        const double g2 = static_cast<double>(a.lo[i]) - static_cast<double>(b.hi[i]);
        return std::max({g1, g2, 0.0});
    };
    if (a.k == 6) {
        const double gx = gap(0), gy = gap(1), gz = gap(2);
        return std::sqrt(gx * gx + gy * gy + gz * gz);
    }
    const AxisSet& axes = a.axes();
    double best = 0.0;
    for (int i = 0; i < a.slabs(); ++i)
        best = std::max(best, gap(i) / axes.norm(i));
    return best;
}

BoundingVolume rebound_into_frame(const BoundingVolume& bv, const RigidTransform& relative, const AxisSet& target)
{
    SlabAccumulator acc(target);
    double magnitude = 0.0;
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner{(c & 1) ? bv.hi[0] : bv.lo[0], (c & 2) ? bv.hi[1] : bv.lo[1],
                          (c & 4) ? bv.hi[2] : bv.lo[2]};
        const Vec3 p = relative.apply(corner);
        magnitude = std::max({magnitude, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
        acc.add(p);
    }
    // A pure translation maps points monotonically, so transformed geometry
    // stays inside the transformed corners bit for bit. Rotations round, so
    // widen by a few double ulps of the largest coordinate.
    const double pad = relative.is_identity_rotation() ? 0.0 : magnitude * 16.0 * std::numeric_limits<double>::epsilon();
    return acc.finish(pad);
}

} // namespace cbvh
