#include "cbvh/triangle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cbvh {

namespace {

Vec3 triangle_normal(const Triangle& t) { return cross(t.b - t.a, t.c - t.a); }

double max_edge_squared(const Triangle& t)
{
    return std::max({length_squared(t.b - t.a), length_squared(t.c - t.b), length_squared(t.a - t.c)});
}

double max_abs_coordinate(const Triangle& t)
{
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c)
            m = std::max(m, std::abs(t[i][c]));
    return m;
}

// Segment spanned by a zero-area triangle: its longest edge covers the other
// (collinear) vertex.
struct Segment {
    Vec3 p, q;
};

Segment collapse(const Triangle& t)
{
    const double ab = length_squared(t.b - t.a);
    const double bc = length_squared(t.c - t.b);
    const double ca = length_squared(t.a - t.c);
    if (ab >= bc && ab >= ca)
        return {t.a, t.b};
    if (bc >= ca)
        return {t.b, t.c};
    return {t.c, t.a};
}

template <std::size_t N, std::size_t M>
bool separated_on(const Vec3& axis, const std::array<Vec3, N>& p, const std::array<Vec3, M>& q)
{
    double min1 = std::numeric_limits<double>::infinity(), max1 = -min1;
    for (const auto& v : p) {
        const double s = dot(axis, v);
        min1 = std::min(min1, s);
        max1 = std::max(max1, s);
    }
    double min2 = std::numeric_limits<double>::infinity(), max2 = -min2;
    for (const auto& v : q) {
        const double s = dot(axis, v);
        min2 = std::min(min2, s);
        max2 = std::max(max2, s);
    }
    return max1 < min2 || max2 < min1;
}

// Separating-axis test between two proper triangles. The candidate axes are
// the face normals, the nine edge cross products, and the in-plane edge
// normals that decide the coplanar configuration.
bool proper_triangles_intersect(const Triangle& t1, const Triangle& t2)
{
    const std::array<Vec3, 3> p{t1.a, t1.b, t1.c};
    const std::array<Vec3, 3> q{t2.a, t2.b, t2.c};
    const Vec3 n1 = triangle_normal(t1);
    const Vec3 n2 = triangle_normal(t2);
    if (separated_on(n1, p, q) || separated_on(n2, p, q))
        return false;
    const std::array<Vec3, 3> e1{t1.b - t1.a, t1.c - t1.b, t1.a - t1.c};
    const std::array<Vec3, 3> e2{t2.b - t2.a, t2.c - t2.b, t2.a - t2.c};
    for (const auto& a : e1)
        for (const auto& b : e2)
            if (separated_on(cross(a, b), p, q))
                return false;
    for (int i = 0; i < 3; ++i) {
        if (separated_on(cross(n1, e1[i]), p, q) || separated_on(cross(n2, e2[i]), p, q))
            return false;
    }
    return true;
}

bool segment_triangle_intersect(const Segment& s, const Triangle& t)
{
    const std::array<Vec3, 2> p{s.p, s.q};
    const std::array<Vec3, 3> q{t.a, t.b, t.c};
    const Vec3 n = triangle_normal(t);
    if (separated_on(n, p, q))
        return false;
    const Vec3 d = s.q - s.p;
    const std::array<Vec3, 3> e{t.b - t.a, t.c - t.b, t.a - t.c};
    for (const auto& edge : e) {
        if (separated_on(cross(d, edge), p, q) || separated_on(cross(n, edge), p, q))
            return false;
    }
    return !separated_on(cross(n, d), p, q);
}

} // namespace

bool is_degenerate(const Triangle& t)
{
    const double m = max_edge_squared(t);
    if (m == 0.0)
        return true;
    return length_squared(triangle_normal(t)) <= 1e-24 * m * m;
}

bool tri_tri_intersect(const Triangle& t1, const Triangle& t2)
{
    const bool d1 = is_degenerate(t1);
    const bool d2 = is_degenerate(t2);
    if (!d1 && !d2)
        return proper_triangles_intersect(t1, t2);
    if (d1 && !d2)
        return segment_triangle_intersect(collapse(t1), t2);
    if (!d1 && d2)
        return segment_triangle_intersect(collapse(t2), t1);
    const Segment s1 = collapse(t1);
    const Segment s2 = collapse(t2);
    const double tol = 1e-12 * std::max({max_abs_coordinate(t1), max_abs_coordinate(t2), 1e-300});
    return segment_segment_distance_squared(s1.p, s1.q, s2.p, s2.q) <= tol * tol;
}

double point_segment_distance_squared(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double len2 = length_squared(ab);
    if (len2 == 0.0)
        return length_squared(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return length_squared(p - (a + ab * t));
}

// Closest point by Voronoi region classification of p against the triangle.
double point_triangle_distance_squared(const Vec3& p, const Triangle& t)
{
    if (is_degenerate(t)) {
        return std::min({point_segment_distance_squared(p, t.a, t.b), point_segment_distance_squared(p, t.b, t.c),
                         point_segment_distance_squared(p, t.c, t.a)});
    }
    const Vec3 ab = t.b - t.a;
    const Vec3 ac = t.c - t.a;
    const Vec3 ap = p - t.a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0)
        return length_squared(ap);

    const Vec3 bp = p - t.b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3)
        return length_squared(bp);

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
        return point_segment_distance_squared(p, t.a, t.b);

    const Vec3 cp = p - t.c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6)
        return length_squared(cp);

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
        return point_segment_distance_squared(p, t.a, t.c);

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return point_segment_distance_squared(p, t.b, t.c);

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return length_squared(p - (t.a + ab * v + ac * w));
}

double segment_segment_distance_squared(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);

    if (a == 0.0 && e == 0.0)
        return length_squared(r);
    if (a == 0.0)
        return point_segment_distance_squared(p1, p2, q2);
    if (e == 0.0)
        return point_segment_distance_squared(p2, p1, q1);

    const double c = dot(d1, r);
    const double b = dot(d1, d2);
    const double denom = a * e - b * b;
    double s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    double t = (b * s + f) / e;
    if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    const double dist2 = length_squared((p1 + d1 * s) - (p2 + d2 * t));
    // Parallel segments: the clamped closed form may pick a non-closest pair,
    // so also consider the four endpoint projections.
    if (denom <= 1e-12 * a * e) {
        return std::min({dist2, point_segment_distance_squared(p1, p2, q2), point_segment_distance_squared(q1, p2, q2),
                         point_segment_distance_squared(p2, p1, q1), point_segment_distance_squared(q2, p1, q1)});
    }
    return dist2;
}

double tri_tri_distance(const Triangle& t1, const Triangle& t2)
{
    if (tri_tri_intersect(t1, t2))
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const Vec3& a0 = t1[i];
        const Vec3& a1 = t1[(i + 1) % 3];
        for (int j = 0; j < 3; ++j)
            best = std::min(best, segment_segment_distance_squared(a0, a1, t2[j], t2[(j + 1) % 3]));
    }
    for (int i = 0; i < 3; ++i) {
        best = std::min(best, point_triangle_distance_squared(t1[i], t2));
        best = std::min(best, point_triangle_distance_squared(t2[i], t1));
    }
    return std::sqrt(best);
}

} // namespace cbvh
