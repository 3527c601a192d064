#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbvh/bvh.hpp"
#include "cbvh/compressed.hpp"
#include "cbvh/meshgen.hpp"
#include "cbvh/query.hpp"

namespace cbvh {

struct GeneratorSpec {
    MeshKind kind = MeshKind::sphere;
    std::size_t triangles = 10000;
    std::uint64_t seed = 1;
};

/// Random poses of b (random rotation, random approach direction) slid along
/// the direction until the exact mesh distance is just above `separation`.
struct PoseGenerator {
    std::uint64_t seed = 1;
    std::size_t count = 4;
    double separation = 0.0;
};

struct Scenario {
    std::string id = "scenario";
    std::string mesh_a_path;
    std::string mesh_b_path;
    std::optional<GeneratorSpec> generator;
    std::vector<std::pair<RigidTransform, RigidTransform>> poses;
    std::optional<PoseGenerator> pose_generator;
    QueryMode mode = QueryMode::collision;
    bool early_exit = true;
    std::vector<Layout> layouts{Layout::uncompressed, Layout::half, Layout::delta};
    BuildOptions build;
    std::uint32_t budget_bytes = 4096;
    int residual_bits = 8;
    int repeat = 5;
    /// Evaluate poses concurrently. Timings are then not isolated.
    bool parallel = false;

    /// Throws std::invalid_argument when the scenario cannot run.
    void check() const;
};

struct BenchRecord {
    std::string scenario;
    Layout layout = Layout::uncompressed;
    std::size_t pose = 0;
    QueryMode mode = QueryMode::collision;
    bool colliding = false;
    std::optional<double> min_distance;
    std::uint64_t wall_ns = 0;     // median of the timed repetitions
    std::uint64_t first_run_ns = 0; // the discarded warm-up run
    std::uint64_t bv_tests = 0;
    std::uint64_t primitive_tests = 0;
    std::uint64_t nodes_visited = 0;
    std::uint64_t treelets_touched = 0;
    std::uint64_t descriptor_bytes = 0; // both hierarchies
    std::uint64_t total_bytes = 0;      // both hierarchies

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct ScenarioResult {
    std::vector<BenchRecord> records;
    std::vector<std::pair<RigidTransform, RigidTransform>> poses;
    /// Memory of a's and b's hierarchy per layout, in scenario layout order.
    std::vector<std::pair<MemoryReport, MemoryReport>> memory;
};

/// Loads or generates the meshes and runs the scenario.
ScenarioResult run_scenario(const Scenario& s);
ScenarioResult run_scenario(const Scenario& s, const Mesh& a, const Mesh& b);

/// Pose of b (a stays at identity) with exact distance in
/// [separation, separation + tolerance), found by bisection along `direction`.
RigidTransform place_at_separation(const Mesh& a, const BvhTree& tree_a, const Mesh& b, const BvhTree& tree_b,
                                   const RigidTransform& rotation_b, const Vec3& direction, double separation,
                                   double tolerance = 1e-3);

/// Cross-layout agreement per pose: identical collision flags and distances
/// within `tolerance`.
bool answers_agree(const std::vector<BenchRecord>& records, double tolerance = 1e-5);

/// Sum of median wall times of layout `num` over that of layout `den`;
/// nullopt if either layout is absent.
std::optional<double> wall_time_ratio(const std::vector<BenchRecord>& records, Layout num, Layout den);

inline constexpr std::string_view kCsvHeader =
    "scenario,layout,pose,mode,colliding,min_distance,wall_ns,bv_tests,primitive_tests,nodes_visited,"
    "treelets_touched,descriptor_bytes,total_bytes,first_run_ns";

std::string emit_csv(const std::vector<BenchRecord>& records);
/// Inverse of emit_csv. Throws std::runtime_error on malformed input.
std::vector<BenchRecord> parse_csv(std::string_view text);

} // namespace cbvh
