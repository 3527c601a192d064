#include "cbvh/mesh.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cbvh {

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
    for (std::size_t i = 0; i < triangles_.size(); ++i) {
        const auto& t = triangles_[i];
        for (auto idx : t) {
            if (idx >= vertices_.size())
                throw std::out_of_range("triangle " + std::to_string(i) + " references vertex " +
                                        std::to_string(idx) + " of " + std::to_string(vertices_.size()));
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw std::invalid_argument("triangle " + std::to_string(i) + " repeats a vertex index");
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_coordinate(std::string_view tok, std::size_t line)
{
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ObjParseError(line, "non-numeric coordinate '" + std::string(tok) + "'");
    return v;
}

// Resolves the vertex part of a face token ("7", "7/1", "-2//3") against the
// number of vertices seen so far.
std::uint32_t parse_face_index(std::string_view tok, std::size_t vertex_count, std::size_t line)
{
    const auto slash = tok.find('/');
    const auto head = tok.substr(0, slash);
    long long idx = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (ec != std::errc{} || ptr != head.data() + head.size() || idx == 0)
        throw ObjParseError(line, "bad face index '" + std::string(tok) + "'");
    const long long n = static_cast<long long>(vertex_count);
    const long long resolved = idx > 0 ? idx - 1 : n + idx;
    if (resolved < 0 || resolved >= n)
        throw ObjParseError(line, "face index " + std::to_string(idx) + " out of range (" +
                                      std::to_string(vertex_count) + " vertices)");
    return static_cast<std::uint32_t>(resolved);
}

} // namespace

Mesh load_obj(std::istream& in)
{
    std::vector<Vec3> vertices;
    std::vector<TriangleIndices> triangles;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = trim(line.substr(0, hash));
        if (line.size() < 2)
            continue;
        const auto toks = split_ws(line);
        if (toks.front() == "v") {
            if (toks.size() < 4)
                throw ObjParseError(line_no, "vertex needs three coordinates");
            vertices.push_back({parse_coordinate(toks[1], line_no), parse_coordinate(toks[2], line_no),
                                parse_coordinate(toks[3], line_no)});
        } else if (toks.front() == "f") {
            if (toks.size() < 4)
                throw ObjParseError(line_no, "face needs at least three vertices");
            std::vector<std::uint32_t> poly;
            poly.reserve(toks.size() - 1);
            for (std::size_t i = 1; i < toks.size(); ++i)
                poly.push_back(parse_face_index(toks[i], vertices.size(), line_no));
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
                TriangleIndices t{poly[0], poly[i], poly[i + 1]};
                // Fans of polygons with repeated corners produce index-degenerate
                // triangles; they carry no area, so skip them.
                if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                    continue;
                triangles.push_back(t);
            }
        }
    }
    if (triangles.empty())
        throw ObjParseError(line_no, "mesh has no triangles");
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh load_obj_string(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return load_obj(in);
}

Mesh load_obj_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return load_obj(in);
}

void RigidTransform::check() const
{
    const Mat3 p = rotation * rotation.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(p.m[i][j] - (i == j ? 1.0 : 0.0)) > 1e-6)
                throw std::invalid_argument("rotation is not orthonormal");
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(translation[i]))
            throw std::invalid_argument("translation is not finite");
}

RigidTransform RigidTransform::inverse() const
{
    const Mat3 rt = rotation.transposed();
    return {rt, -(rt * translation)};
}

RigidTransform RigidTransform::rotate(const Vec3& axis, double radians)
{
    const double len = length(axis);
    if (len == 0.0)
        throw std::invalid_argument("rotation axis is zero");
    const Vec3 u = axis * (1.0 / len);
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    const double t = 1.0 - c;
    RigidTransform r;
    r.rotation.m = {{{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y},
                     {t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x},
                     {t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}}};
    return r;
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b)
{
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

} // namespace cbvh
