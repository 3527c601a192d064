// Benchmark driver: builds each requested layout for a pair of meshes, runs
// collision or distance queries over a set of poses and writes CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cbvh/bench.hpp"

namespace {

std::vector<cbvh::Layout> parse_layouts(const std::string& list)
{
    std::vector<cbvh::Layout> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto layout = cbvh::parse_layout(item);
        if (!layout)
            throw CLI::ValidationError("--layouts", "unknown layout '" + item + "'");
        out.push_back(*layout);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compressed BVH collision / proximity benchmark"};
    app.name("bench");

    cbvh::Scenario s;
    s.pose_generator = cbvh::PoseGenerator{};
    std::string gen_kind;
    std::size_t gen_tris = 10000;
    std::uint64_t seed = 1;
    std::string mode = "collision";
    std::string layouts = "u,h,d";
    std::string csv_path;
    bool full_collision = false;
    bool identity_pose = false;

    app.add_option("--mesh-a", s.mesh_a_path, "OBJ file for object a");
    app.add_option("--mesh-b", s.mesh_b_path, "OBJ file for object b");
    app.add_option("--gen", gen_kind, "Generate both meshes instead of loading them")
        ->check(CLI::IsMember({"sphere", "torus", "terrain"}));
    app.add_option("--tris", gen_tris, "Approximate triangle count per generated mesh")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for mesh and pose generation");
    app.add_option("--mode", mode, "Query kind")->check(CLI::IsMember({"collision", "distance"}));
    app.add_option("--separation", s.pose_generator->separation, "Target separation of generated poses")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--poses", s.pose_generator->count, "Number of generated poses")->check(CLI::PositiveNumber);
    app.add_option("--layouts", layouts, "Comma separated subset of u,h,d");
    app.add_option("--k", s.build.k, "k-DOP size")->check(CLI::IsMember({6, 14, 18, 26}));
    app.add_option("--branching", s.build.branching_factor, "Branching factor")->check(CLI::Range(2, 255));
    app.add_option("--leaf", s.build.leaf_capacity, "Triangles per leaf")->check(CLI::PositiveNumber);
    app.add_option("--budget", s.budget_bytes, "Treelet byte budget")->check(CLI::PositiveNumber);
    app.add_option("--residual-bits", s.residual_bits, "Bits per delta residual")->check(CLI::Range(2, 16));
    app.add_option("--repeat", s.repeat, "Timed repetitions per measurement")->check(CLI::PositiveNumber);
    app.add_option("--csv", csv_path, "Output CSV file (stdout when omitted)");
    app.add_option("--id", s.id, "Scenario id written to the CSV");
    app.add_flag("--no-early-exit", full_collision, "Collision mode: enumerate all contacts");
    app.add_flag("--identity-pose", identity_pose, "Run the single pose with both objects at the origin");
    app.add_flag("--parallel", s.parallel, "Evaluate poses concurrently (correctness runs only)");

    try {
        app.parse(argc, argv);
        s.layouts = parse_layouts(layouts);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every other parse failure is a usage error.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    s.mode = mode == "distance" ? cbvh::QueryMode::distance : cbvh::QueryMode::collision;
    s.early_exit = !full_collision;
    s.pose_generator->seed = seed;
    if (identity_pose) {
        s.pose_generator.reset();
        s.poses.emplace_back();
    }
    if (!gen_kind.empty()) {
        s.generator = cbvh::GeneratorSpec{*cbvh::parse_mesh_kind(gen_kind), gen_tris, seed};
    } else if (s.mesh_a_path.empty() || s.mesh_b_path.empty()) {
        std::cerr << "bench: need --mesh-a and --mesh-b, or --gen\n";
        return 1;
    }

    cbvh::ScenarioResult result;
    try {
        result = cbvh::run_scenario(s);
    } catch (const cbvh::ObjParseError& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    }

    const std::string csv = cbvh::emit_csv(result.records);
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(csv_path);
        out << csv;
        if (!out) {
            std::cerr << "bench: cannot write " << csv_path << '\n';
            return 1;
        }
    }

    for (std::size_t i = 0; i < s.layouts.size(); ++i) {
        const auto& [ma, mb] = result.memory[i];
        std::fprintf(stderr, "%-12s descriptor %10zu B  total %10zu B  treelets %6zu\n",
                     std::string(cbvh::layout_name(s.layouts[i])).c_str(), ma.descriptor_bytes + mb.descriptor_bytes,
                     ma.total_bytes + mb.total_bytes, ma.treelet_count + mb.treelet_count);
    }
    for (const auto layout : {cbvh::Layout::half, cbvh::Layout::delta}) {
        if (const auto ratio = cbvh::wall_time_ratio(result.records, layout, cbvh::Layout::uncompressed))
            std::fprintf(stderr, "%s/uncompressed wall-time ratio: %.4f\n",
                         std::string(cbvh::layout_name(layout)).c_str(), *ratio);
    }

    if (!cbvh::answers_agree(result.records)) {
        std::cerr << "bench: layouts disagree on query answers\n";
        return 2;
    }
    return 0;
}
