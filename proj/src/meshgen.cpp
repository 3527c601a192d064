#include "cbvh/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cbvh {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

// Quad grid of (rows x cols) vertices, wrapping in u and/or v.
void add_grid(std::vector<TriangleIndices>& tris, std::size_t base, std::size_t rows, std::size_t cols, bool wrap_rows,
              bool wrap_cols)
{
    const std::size_t r_end = wrap_rows ? rows : rows - 1;
    const std::size_t c_end = wrap_cols ? cols : cols - 1;
    for (std::size_t r = 0; r < r_end; ++r) {
        for (std::size_t c = 0; c < c_end; ++c) {
            const std::size_t r1 = (r + 1) % rows;
            const std::size_t c1 = (c + 1) % cols;
            const auto v00 = u32(base + r * cols + c);
            const auto v01 = u32(base + r * cols + c1);
            const auto v10 = u32(base + r1 * cols + c);
            const auto v11 = u32(base + r1 * cols + c1);
            tris.push_back({v00, v10, v11});
            tris.push_back({v00, v11, v01});
        }
    }
}

} // namespace

Mesh make_sphere(std::size_t target_triangles, double radius)
{
    // 2 * slices * (stacks - 1) triangles with slices = 2 * stacks.
    const auto stacks = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(std::sqrt(target_triangles / 4.0) + 0.5)));
    const std::size_t slices = 2 * stacks;
    std::vector<Vec3> verts;
    std::vector<TriangleIndices> tris;
    verts.push_back({0, 0, radius});
    for (std::size_t i = 1; i < stacks; ++i) {
        const double theta = kPi * double(i) / double(stacks);
        for (std::size_t j = 0; j < slices; ++j) {
            const double phi = 2.0 * kPi * double(j) / double(slices);
            verts.push_back({radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
                             radius * std::cos(theta)});
        }
    }
    const auto south = u32(verts.size());
    verts.push_back({0, 0, -radius});

    for (std::size_t j = 0; j < slices; ++j)
        tris.push_back({0, u32(1 + j), u32(1 + (j + 1) % slices)});
    add_grid(tris, 1, stacks - 1, slices, false, true);
    const std::size_t last = 1 + (stacks - 2) * slices;
    for (std::size_t j = 0; j < slices; ++j)
        tris.push_back({south, u32(last + (j + 1) % slices), u32(last + j)});
    return Mesh(std::move(verts), std::move(tris));
}

Mesh make_torus_knot(std::size_t target_triangles, int p, int q)
{
    const std::size_t sides = std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(target_triangles / 16.0)), 6, 32);
    const std::size_t segments = std::max<std::size_t>(16, target_triangles / (2 * sides));
    const double tube = 0.18;
    auto curve = [&](double t) {
        const double r = 1.0 + 0.4 * std::cos(q * t);
        return Vec3{r * std::cos(p * t), r * std::sin(p * t), 0.4 * std::sin(q * t)};
    };

    std::vector<Vec3> verts;
    verts.reserve(segments * sides);
    for (std::size_t i = 0; i < segments; ++i) {
        const double t = 2.0 * kPi * double(i) / double(segments);
        const double dt = 1e-4;
        const Vec3 c = curve(t);
        Vec3 tangent = curve(t + dt) - curve(t - dt);
        tangent = tangent * (1.0 / length(tangent));
        Vec3 normal = cross(tangent, Vec3{0, 0, 1});
        if (length(normal) < 1e-9)
            normal = cross(tangent, Vec3{1, 0, 0});
        normal = normal * (1.0 / length(normal));
        const Vec3 binormal = cross(tangent, normal);
        for (std::size_t j = 0; j < sides; ++j) {
            const double a = 2.0 * kPi * double(j) / double(sides);
            verts.push_back(c + normal * (tube * std::cos(a)) + binormal * (tube * std::sin(a)));
        }
    }
    std::vector<TriangleIndices> tris;
    add_grid(tris, 0, segments, sides, true, true);
    return Mesh(std::move(verts), std::move(tris));
}

Mesh make_terrain(std::size_t target_triangles, std::uint64_t seed)
{
    const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(target_triangles / 2.0))));
    const std::size_t n = cells + 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.5, 4.0), phase(0.0, 2.0 * kPi), amp(0.02, 0.12), jitter(-0.01, 0.01);
    struct Wave {
        double fx, fy, ph, a;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 6; ++i)
        waves.push_back({freq(rng), freq(rng), phase(rng), amp(rng)});

    std::vector<Vec3> verts;
    verts.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double x = -1.0 + 2.0 * double(c) / double(cells);
            const double y = -1.0 + 2.0 * double(r) / double(cells);
            double h = jitter(rng);
            for (const auto& w : waves)
                h += w.a * std::sin(w.fx * x * kPi + w.fy * y * kPi + w.ph);
            verts.push_back({x, y, h});
        }
    }
    std::vector<TriangleIndices> tris;
    add_grid(tris, 0, n, n, false, false);
    return Mesh(std::move(verts), std::move(tris));
}

Mesh make_random_soup(std::size_t triangles, std::uint64_t seed, double extent, double max_edge)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-extent, extent), off(-max_edge, max_edge);
    std::vector<Vec3> verts;
    std::vector<TriangleIndices> tris;
    for (std::size_t i = 0; i < triangles; ++i) {
        const Vec3 c{pos(rng), pos(rng), pos(rng)};
        const auto base = u32(verts.size());
        for (int k = 0; k < 3; ++k)
            verts.push_back(c + Vec3{off(rng), off(rng), off(rng)});
        tris.push_back({base, base + 1, base + 2});
    }
    return Mesh(std::move(verts), std::move(tris));
}

std::optional<MeshKind> parse_mesh_kind(std::string_view name)
{
    if (name == "sphere")
        return MeshKind::sphere;
    if (name == "torus")
        return MeshKind::torus;
    if (name == "terrain")
        return MeshKind::terrain;
    return std::nullopt;
}

Mesh generate_mesh(MeshKind kind, std::size_t target_triangles, std::uint64_t seed)
{
    switch (kind) {
    case MeshKind::sphere:
        return make_sphere(target_triangles);
    case MeshKind::torus:
        return make_torus_knot(target_triangles);
    case MeshKind::terrain:
        return make_terrain(target_triangles, seed);
    }
    throw std::invalid_argument("unknown mesh kind");
}

RigidTransform random_rotation(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double w = a * std::sin(2.0 * kPi * u2);
    const double x = a * std::cos(2.0 * kPi * u2);
    const double y = b * std::sin(2.0 * kPi * u3);
    const double z = b * std::cos(2.0 * kPi * u3);
    RigidTransform r;
    r.rotation.m = {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                     {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                     {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
    return r;
}

} // namespace cbvh
