#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cbvh/bench.hpp"
#include "cbvh/bvh.hpp"
#include "cbvh/meshgen.hpp"
#include "cbvh/triangle.hpp"

namespace oracle {

double half_value(std::uint16_t bits)
{
    const int s = bits >> 15;
    const int e = (bits >> 10) & 0x1f;
    const int m = bits & 0x3ff;
    if (e == 31)
        return m ? std::numeric_limits<double>::quiet_NaN()
                 : (s ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
    const double mag = e == 0 ? std::pow(2.0, -14) * (m / 1024.0) : std::pow(2.0, e - 15) * (1.0 + m / 1024.0);
    return s ? -mag : mag;
}

const std::vector<std::pair<double, std::uint16_t>>& sorted_finite_halves()
{
    static const auto table = [] {
        std::vector<std::pair<double, std::uint16_t>> v;
        for (std::uint32_t b = 0; b < 0x10000; ++b) {
            if (((b >> 10) & 0x1f) == 31 || b == 0x8000)
                continue;
            v.emplace_back(half_value(static_cast<std::uint16_t>(b)), static_cast<std::uint16_t>(b));
        }
        std::sort(v.begin(), v.end());
        return v;
    }();
    return table;
}

double half_floor(double x)
{
    const auto& t = sorted_finite_halves();
    auto it = std::upper_bound(t.begin(), t.end(), x, [](double v, const auto& e) { return v < e.first; });
    if (it == t.begin())
        return -std::numeric_limits<double>::infinity();
    return std::prev(it)->first;
}

double half_ceil(double x)
{
    const auto& t = sorted_finite_halves();
    auto it = std::lower_bound(t.begin(), t.end(), x, [](const auto& e, double v) { return e.first < v; });
    if (it == t.end())
        return std::numeric_limits<double>::infinity();
    return it->first;
}

namespace {

// Solves the n x n system in place with partial pivoting; false if singular.
bool solve(std::array<std::array<double, 5>, 4>& m, int n)
{
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c]))
                piv = r;
        double scale = 0.0;
        for (int r = 0; r < n; ++r)
            scale = std::max(scale, std::abs(m[r][r]));
        if (std::abs(m[piv][c]) <= 1e-13 * std::max(scale, 1e-300))
            return false;
        std::swap(m[c], m[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c)
                continue;
            const double f = m[r][c] / m[c][c];
            for (int k = c; k <= n; ++k)
                m[r][k] -= f * m[c][k];
        }
    }
    for (int r = 0; r < n; ++r)
        m[r][n] /= m[r][r];
    return true;
}

} // namespace

double triangle_distance(const Triangle& t1, const Triangle& t2)
{
    double best = std::numeric_limits<double>::infinity();
    const std::array<Vec3, 3> A{t1.a, t1.b, t1.c};
    const std::array<Vec3, 3> B{t2.a, t2.b, t2.c};
    for (int sa = 1; sa < 8; ++sa) {
        for (int sb = 1; sb < 8; ++sb) {
            std::vector<int> ia, ib;
            for (int i = 0; i < 3; ++i) {
                if (sa & (1 << i))
                    ia.push_back(i);
                if (sb & (1 << i))
                    ib.push_back(i);
            }
            // P - Q = r + M x with x = (alpha over ia[1..], beta over ib[1..]).
            const Vec3 r = A[ia[0]] - B[ib[0]];
            std::vector<Vec3> cols;
            for (std::size_t i = 1; i < ia.size(); ++i)
                cols.push_back(A[ia[i]] - A[ia[0]]);
            for (std::size_t j = 1; j < ib.size(); ++j)
                cols.push_back(B[ib[0]] - B[ib[j]]);
            const int n = static_cast<int>(cols.size());
            std::array<double, 4> x{};
            if (n > 0) {
                std::array<std::array<double, 5>, 4> m{};
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j)
                        m[i][j] = cbvh::dot(cols[i], cols[j]);
                    m[i][n] = -cbvh::dot(cols[i], r);
                }
                if (!solve(m, n))
                    continue;
                for (int i = 0; i < n; ++i)
                    x[i] = m[i][n];
            }
            const double eps = 1e-12;
            const int na = static_cast<int>(ia.size()) - 1;
            double sum_a = 0.0, sum_b = 0.0;
            bool feasible = true;
            for (int i = 0; i < na; ++i) {
                feasible &= x[i] >= -eps;
                sum_a += x[i];
            }
            for (int j = na; j < n; ++j) {
                feasible &= x[j] >= -eps;
                sum_b += x[j];
            }
            if (!feasible || sum_a > 1.0 + eps || sum_b > 1.0 + eps)
                continue;
            Vec3 d = r;
            for (int i = 0; i < n; ++i)
                d = d + cols[i] * x[i];
            best = std::min(best, cbvh::length(d));
        }
    }
    return best;
}

double sampled_triangle_distance(const Triangle& t1, const Triangle& t2, int steps)
{
    auto point = [](const Triangle& t, double u, double v) { return t.a * (1.0 - u - v) + t.b * u + t.c * v; };
    auto dist2 = [&](const std::array<double, 4>& x) {
        return cbvh::length_squared(point(t1, x[0], x[1]) - point(t2, x[2], x[3]));
    };

    // Coarse grid over both triangles.
    std::vector<std::pair<double, double>> grid;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j)
            grid.emplace_back(double(i) / steps, double(j) / steps);
    std::array<double, 4> best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [u1, v1] : grid)
        for (const auto& [u2, v2] : grid) {
            const std::array<double, 4> x{u1, v1, u2, v2};
            const double d = dist2(x);
            if (d < best_d) {
                best_d = d;
                best = x;
            }
        }

    // Zoom in with a shrinking stencil of samples around the best one. The
    // squared distance is convex in the barycentric coordinates, so this
    // converges to the global minimum.
    auto feasible = [](double u, double v) { return u >= 0 && v >= 0 && u + v <= 1; };
    for (double h = 1.0 / steps; h > 1e-10;) {
        bool improved = false;
        for (int code = 0; code < 81; ++code) {
            std::array<double, 4> x = best;
            int c = code;
            for (int i = 0; i < 4; ++i, c /= 3)
                x[i] += (c % 3 - 1) * h;
            if (!feasible(x[0], x[1]) || !feasible(x[2], x[3]))
                continue;
            const double d = dist2(x);
            if (d < best_d) {
                best_d = d;
                best = x;
                improved = true;
            }
        }
        if (!improved)
            h *= 0.5;
    }
    return std::sqrt(best_d);
}

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Triangle& t)
{
    const Vec3 n = cbvh::cross(t.b - t.a, t.c - t.a);
    const double sp = cbvh::dot(n, p - t.a);
    const double sq = cbvh::dot(n, q - t.a);
    if ((sp > 0 && sq > 0) || (sp < 0 && sq < 0))
        return false;
    if (sp == 0 && sq == 0)
        throw std::invalid_argument("segment_hits_triangle: coplanar input");
    const Vec3 x = p + (q - p) * (sp / (sp - sq));
    // Inside test: x on the inner side of all three edges.
    for (int i = 0; i < 3; ++i) {
        const Vec3& u = t[i];
        const Vec3& v = t[(i + 1) % 3];
        if (cbvh::dot(cbvh::cross(v - u, x - u), n) < 0)
            return false;
    }
    return true;
}

double point_box_distance(const Vec3& p, const Vec3& lo, const Vec3& hi)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

struct Box {
    Vec3 lo, hi;
};

Box box_of(const Triangle& t)
{
    Box b{t.a, t.a};
    for (int i = 1; i < 3; ++i)
        for (int c = 0; c < 3; ++c) {
            b.lo[c] = std::min(b.lo[c], t[i][c]);
            b.hi[c] = std::max(b.hi[c], t[i][c]);
        }
    return b;
}

std::vector<Triangle> triangles_in_a_frame(const Mesh& b, const RigidTransform& ta, const RigidTransform& tb)
{
    const RigidTransform rel = ta.inverse() * tb;
    std::vector<Triangle> out;
    for (std::size_t i = 0; i < b.triangle_count(); ++i)
        out.push_back(rel.apply(b.triangle(i)));
    return out;
}

} // namespace

bool brute_force_collide(const Mesh& a, const Mesh& b, const RigidTransform& ta, const RigidTransform& tb)
{
    const auto tris_b = triangles_in_a_frame(b, ta, tb);
    std::vector<Box> boxes_b;
    for (const auto& t : tris_b)
        boxes_b.push_back(box_of(t));
    for (std::size_t i = 0; i < a.triangle_count(); ++i) {
        const Triangle t = a.triangle(i);
        const Box ba = box_of(t);
        for (std::size_t j = 0; j < tris_b.size(); ++j) {
            const Box& bb = boxes_b[j];
            if (ba.hi.x < bb.lo.x || bb.hi.x < ba.lo.x || ba.hi.y < bb.lo.y || bb.hi.y < ba.lo.y || ba.hi.z < bb.lo.z ||
                bb.hi.z < ba.lo.z)
                continue;
            if (cbvh::tri_tri_intersect(t, tris_b[j]))
                return true;
        }
    }
    return false;
}

double brute_force_distance(const Mesh& a, const Mesh& b, const RigidTransform& ta, const RigidTransform& tb)
{
    const auto tris_b = triangles_in_a_frame(b, ta, tb);
    std::vector<Box> boxes_b;
    for (const auto& t : tris_b)
        boxes_b.push_back(box_of(t));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.triangle_count(); ++i) {
        const Triangle t = a.triangle(i);
        const Box ba = box_of(t);
        for (std::size_t j = 0; j < tris_b.size(); ++j) {
            // Box gap is a lower bound on the triangle distance; the margin
            // keeps rounding from skipping a candidate.
            const Box& bb = boxes_b[j];
            double g2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double g = std::max({bb.lo[c] - ba.hi[c], ba.lo[c] - bb.hi[c], 0.0});
                g2 += g * g;
            }
            if (std::sqrt(g2) > best * (1.0 + 1e-9) + 1e-12)
                continue;
            best = std::min(best, cbvh::tri_tri_distance(t, tris_b[j]));
        }
    }
    return best;
}

Scene random_scene(std::uint64_t seed, int index, std::size_t min_tris, std::size_t max_tris)
{
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
    std::uniform_int_distribution<std::size_t> size(min_tris, max_tris);
    std::uniform_int_distribution<int> kind(0, 3);
    static constexpr const char* kinds[] = {"sphere", "torus", "terrain", "soup"};

    auto make = [&](int which) {
        const std::size_t n = size(rng);
        switch (which) {
        case 0:
            return cbvh::make_sphere(n, std::uniform_real_distribution<double>(0.4, 1.0)(rng));
        case 1:
            return cbvh::make_torus_knot(n, 2, 3);
        case 2:
            return cbvh::make_terrain(n, rng());
        default:
            return cbvh::make_random_soup(n, rng(), 0.8, 0.25);
        }
    };
    Scene s;
    const int ka = kind(rng);
    const int kb = kind(rng);
    s.a = make(ka);
    s.b = make(kb);
    s.kind = kinds[ka];

    s.ta = cbvh::random_rotation(rng);
    s.ta.translation = {std::uniform_real_distribution<double>(-2, 2)(rng), std::uniform_real_distribution<double>(-2, 2)(rng),
                        std::uniform_real_distribution<double>(-2, 2)(rng)};
    const cbvh::RigidTransform rot_b = cbvh::random_rotation(rng);
    std::normal_distribution<double> gauss;
    const Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};

    cbvh::RigidTransform rel; // b relative to a
    switch (index % 3) {
    case 0: { // separated by a small gap
        const auto tree_a = cbvh::build(s.a);
        const auto tree_b = cbvh::build(s.b);
        rel = cbvh::place_at_separation(s.a, tree_a, s.b, tree_b, rot_b,
                                        dir, std::uniform_real_distribution<double>(0.005, 0.2)(rng));
        break;
    }
    case 1: { // touching: within 1e-3 of contact
        const auto tree_a = cbvh::build(s.a);
        const auto tree_b = cbvh::build(s.b);
        rel = cbvh::place_at_separation(s.a, tree_a, s.b, tree_b, rot_b, dir, 0.0);
        break;
    }
    default: // overlapping
        rel = rot_b;
        rel.translation = dir * (0.2 / cbvh::length(dir));
        break;
    }
    s.tb = s.ta * rel;
    return s;
}

} // namespace oracle
