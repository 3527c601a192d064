#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "cbvh/mesh.hpp"

namespace cbvh {

// Procedural stand-ins for benchmark objects. Triangle counts are
// approximate (the closest grid resolution to the request).

/// UV sphere of the given radius centred at the origin.
Mesh make_sphere(std::size_t target_triangles, double radius = 1.0);

/// (p, q) torus knot swept by a circular tube, fitting in roughly [-1.5, 1.5]^3.
Mesh make_torus_knot(std::size_t target_triangles, int p = 2, int q = 3);

/// Height field over [-1, 1]^2 built from seeded random sinusoids.
Mesh make_terrain(std::size_t target_triangles, std::uint64_t seed);

/// Independent random triangles in [-extent, extent]^3 with edges up to
/// `max_edge`.
Mesh make_random_soup(std::size_t triangles, std::uint64_t seed, double extent = 1.0, double max_edge = 0.3);

enum class MeshKind { sphere, torus, terrain };
std::optional<MeshKind> parse_mesh_kind(std::string_view name);
Mesh generate_mesh(MeshKind kind, std::size_t target_triangles, std::uint64_t seed);

/// Uniformly distributed rotation.
RigidTransform random_rotation(std::mt19937_64& rng);

} // namespace cbvh
