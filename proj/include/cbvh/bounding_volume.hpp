#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "cbvh/mesh.hpp"
#include "cbvh/vec.hpp"

namespace cbvh {

inline constexpr int kMaxSlabs = 13; // 26-DOP

/// Fixed k-DOP direction family. Directions have integer components in
/// {-1, 0, 1} and are not normalized; the first three are always the
/// coordinate axes, so every k-DOP embeds its AABB as slabs 0..2.
class AxisSet {
public:
    /// k must be one of 6, 14, 18, 26. Returns a shared instance.
    static const AxisSet& standard(int k);
    static bool supported(int k) noexcept { return k == 6 || k == 14 || k == 18 || k == 26; }

    int k() const noexcept { return k_; }
    int slabs() const noexcept { return k_ / 2; }
    std::span<const Vec3> directions() const noexcept { return {dirs_.data(), static_cast<std::size_t>(slabs())}; }
    const Vec3& direction(int i) const noexcept { return dirs_[i]; }
    double norm(int i) const noexcept { return norms_[i]; }

private:
    explicit AxisSet(int k);
    int k_;
    std::array<Vec3, kMaxSlabs> dirs_{};
    std::array<double, kMaxSlabs> norms_{};
};

class AxisSetMismatch : public std::invalid_argument {
public:
    AxisSetMismatch(int ka, int kb)
        : std::invalid_argument("axis set mismatch: k=" + std::to_string(ka) + " vs k=" + std::to_string(kb))
    {
    }
};

/// k-DOP as k/2 closed intervals [lo[i], hi[i]] of support values along the
/// axis set's directions. k = 6 is the AABB.
struct BoundingVolume {
    std::uint8_t k = 6;
    std::array<float, kMaxSlabs> lo{};
    std::array<float, kMaxSlabs> hi{};

    int slabs() const noexcept { return k / 2; }
    const AxisSet& axes() const { return AxisSet::standard(k); }

    /// True iff `other` lies inside this volume on every slab.
    bool contains(const BoundingVolume& other) const;

    friend bool operator==(const BoundingVolume& a, const BoundingVolume& b)
    {
        if (a.k != b.k)
            return false;
        for (int i = 0; i < a.slabs(); ++i)
            if (a.lo[i] != b.lo[i] || a.hi[i] != b.hi[i])
                return false;
        return true;
    }
};

/// Tight k-DOP around the vertices of the listed triangles. lo/hi are the
/// min/max projections, rounded outward to float when not representable.
BoundingVolume fit_bv(const Mesh& mesh, std::span<const std::uint32_t> triangles, const AxisSet& axes);
BoundingVolume fit_points(std::span<const Vec3> points, const AxisSet& axes);

/// Closed-interval overlap on every slab. Touching volumes overlap.
bool bv_overlap(const BoundingVolume& a, const BoundingVolume& b);

/// Lower bound on the distance between anything inside a and anything inside
/// b. Exact box distance for k = 6; otherwise the largest slab gap divided by
/// the direction's length.
double bv_distance(const BoundingVolume& a, const BoundingVolume& b);

/// Volume in the target frame containing the image of `bv` under `relative`:
/// the eight corners of bv's AABB slabs are transformed and projected.
BoundingVolume rebound_into_frame(const BoundingVolume& bv, const RigidTransform& relative, const AxisSet& target);

/// Largest float <= v and smallest float >= v.
float round_down_to_float(double v);
float round_up_to_float(double v);

} // namespace cbvh
