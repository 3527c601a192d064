#pragma once

#include "cbvh/mesh.hpp"
#include "cbvh/vec.hpp"

namespace cbvh {

/// Closed-triangle intersection test. Zero-area triangles are handled as
/// segments or points.
bool tri_tri_intersect(const Triangle& t1, const Triangle& t2);

/// Exact minimum Euclidean distance between two closed triangles; 0 exactly
/// when tri_tri_intersect holds.
double tri_tri_distance(const Triangle& t1, const Triangle& t2);

double segment_segment_distance_squared(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2);
double point_segment_distance_squared(const Vec3& p, const Vec3& a, const Vec3& b);
double point_triangle_distance_squared(const Vec3& p, const Triangle& t);

bool is_degenerate(const Triangle& t);

} // namespace cbvh
