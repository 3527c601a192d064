#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbvh/vec.hpp"

namespace cbvh {

/// Thrown by load_obj on malformed input.
class ObjParseError : public std::runtime_error {
public:
    ObjParseError(std::size_t line, const std::string& what)
        : std::runtime_error("OBJ line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Triangle {
    Vec3 a, b, c;
    constexpr const Vec3& operator[](int i) const { return i == 0 ? a : (i == 1 ? b : c); }
};

using TriangleIndices = std::array<std::uint32_t, 3>;

/// Indexed triangle soup. Construction validates the index invariants.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles);

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<TriangleIndices>& triangles() const noexcept { return triangles_; }
    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    bool empty() const noexcept { return triangles_.empty(); }

    Triangle triangle(std::size_t i) const
    {
        const auto& t = triangles_[i];
        return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
    }

private:
    std::vector<Vec3> vertices_;
    std::vector<TriangleIndices> triangles_;
};

/// Reads the `v` and `f` records of a Wavefront OBJ stream. Polygons are
/// fan-triangulated; 1-based and negative (relative) indices are supported.
Mesh load_obj(std::istream& in);
Mesh load_obj_string(std::string_view text);
Mesh load_obj_file(const std::string& path);

/// Rigid motion x -> rotation * x + translation.
struct RigidTransform {
    Mat3 rotation = Mat3::identity();
    Vec3 translation{};

    /// Throws std::invalid_argument unless R * R^T is the identity within 1e-6.
    void check() const;

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Triangle apply(const Triangle& t) const { return {apply(t.a), apply(t.b), apply(t.c)}; }

    RigidTransform inverse() const;
    bool is_identity_rotation() const { return rotation == Mat3::identity(); }

    static RigidTransform translate(const Vec3& t) { return {Mat3::identity(), t}; }
    /// Rotation of `radians` about a (not necessarily normalized) axis.
    static RigidTransform rotate(const Vec3& axis, double radians);

    friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

/// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);

} // namespace cbvh
