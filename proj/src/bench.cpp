#include "cbvh/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <stdexcept>

namespace cbvh {

void Scenario::check() const
{
    if (layouts.empty())
        throw std::invalid_argument("scenario needs at least one layout");
    if (poses.empty() && (!pose_generator || pose_generator->count == 0))
        throw std::invalid_argument("scenario needs at least one pose");
    if (repeat < 1)
        throw std::invalid_argument("repeat must be >= 1");
    if (id.find_first_of(",\n\r\"") != std::string::npos)
        throw std::invalid_argument("scenario id may not contain commas, quotes or newlines");
    if (pose_generator && !(pose_generator->separation >= 0.0))
        throw std::invalid_argument("separation must be >= 0");
    if (generator && generator->triangles == 0)
        throw std::invalid_argument("generator needs a positive triangle count");
}

namespace {

Vec3 box_center(const BoundingVolume& bv)
{
    return {0.5 * (double(bv.lo[0]) + bv.hi[0]), 0.5 * (double(bv.lo[1]) + bv.hi[1]), 0.5 * (double(bv.lo[2]) + bv.hi[2])};
}

double box_radius(const BoundingVolume& bv)
{
    const Vec3 e{double(bv.hi[0]) - bv.lo[0], double(bv.hi[1]) - bv.lo[1], double(bv.hi[2]) - bv.lo[2]};
    return 0.5 * length(e);
}

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start)
{
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

} // namespace

RigidTransform place_at_separation(const Mesh& a, const BvhTree& tree_a, const Mesh& b, const BvhTree& tree_b,
                                   const RigidTransform& rotation_b, const Vec3& direction, double separation,
                                   double tolerance)
{
    const double len = length(direction);
    if (!(len > 0.0))
        throw std::invalid_argument("place_at_separation: zero direction");
    const Vec3 dir = direction * (1.0 / len);
    const Vec3 base = box_center(tree_a.nodes[0].bv) - rotation_b.rotation * box_center(tree_b.nodes[0].bv);
    auto pose_at = [&](double offset) { return RigidTransform{rotation_b.rotation, base + dir * offset}; };
    auto dist = [&](double offset) {
        QueryConfig cfg;
        cfg.mode = QueryMode::distance;
        cfg.transform_b = pose_at(offset);
        return *distance({a, tree_a}, {b, tree_b}, cfg).min_distance;
    };

    double lo = 0.0;
    double hi = box_radius(tree_a.nodes[0].bv) + box_radius(tree_b.nodes[0].bv) + separation + tolerance;
    double d_hi = dist(hi);
    if (dist(lo) > separation)
        return pose_at(lo); // already apart with centres aligned; nothing closer along this ray
    for (int iter = 0; iter < 200 && d_hi - separation >= tolerance; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double d = dist(mid);
        if (d <= separation) {
            lo = mid;
        } else {
            hi = mid;
            d_hi = d;
        }
    }
    return pose_at(hi);
}

ScenarioResult run_scenario(const Scenario& s)
{
    s.check();
    if (s.generator) {
        const Mesh a = generate_mesh(s.generator->kind, s.generator->triangles, s.generator->seed);
        const Mesh b = generate_mesh(s.generator->kind, s.generator->triangles, s.generator->seed + 1);
        return run_scenario(s, a, b);
    }
    if (s.mesh_a_path.empty() || s.mesh_b_path.empty())
        throw std::invalid_argument("scenario needs two mesh paths or a generator");
    const Mesh a = load_obj_file(s.mesh_a_path);
    const Mesh b = s.mesh_b_path == s.mesh_a_path ? a : load_obj_file(s.mesh_b_path);
    return run_scenario(s, a, b);
}

ScenarioResult run_scenario(const Scenario& s, const Mesh& a, const Mesh& b)
{
    s.check();
    ScenarioResult result;
    const BvhTree tree_a = build(a, s.build);
    const BvhTree tree_b = build(b, s.build);

    result.poses = s.poses;
    if (s.pose_generator) {
        std::mt19937_64 rng(s.pose_generator->seed);
        std::normal_distribution<double> gauss;
        for (std::size_t i = 0; i < s.pose_generator->count; ++i) {
            const RigidTransform rot = random_rotation(rng);
            Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
            if (length(dir) == 0.0)
                dir = {1, 0, 0};
            result.poses.emplace_back(RigidTransform{},
                                      place_at_separation(a, tree_a, b, tree_b, rot, dir, s.pose_generator->separation));
        }
    }

    CompressOptions copt;
    copt.budget_bytes = s.budget_bytes;
    copt.residual_bits = s.residual_bits;

    for (const Layout layout : s.layouts) {
        copt.layout = layout;
        const CompressedBvh ca = build_treelets(tree_a, copt);
        const CompressedBvh cb = build_treelets(tree_b, copt);
        const MemoryReport ma = memory_report(ca);
        const MemoryReport mb = memory_report(cb);
        result.memory.emplace_back(ma, mb);

        auto measure = [&](std::size_t pose_index) {
            QueryConfig cfg;
            cfg.mode = s.mode;
            cfg.early_exit = s.early_exit;
            cfg.transform_a = result.poses[pose_index].first;
            cfg.transform_b = result.poses[pose_index].second;
            const Model ma_model{a, ca};
            const Model mb_model{b, cb};

            auto start = Clock::now();
            const QueryReport report = run_query(ma_model, mb_model, cfg);
            BenchRecord r;
            r.first_run_ns = elapsed_ns(start);
            std::vector<std::uint64_t> times;
            for (int rep = 0; rep < s.repeat; ++rep) {
                start = Clock::now();
                const QueryReport again = run_query(ma_model, mb_model, cfg);
                times.push_back(elapsed_ns(start));
                if (again.colliding != report.colliding)
                    throw std::logic_error("query is not deterministic");
            }
            std::sort(times.begin(), times.end());
            r.wall_ns = times.size() % 2 ? times[times.size() / 2]
                                         : (times[times.size() / 2 - 1] + times[times.size() / 2]) / 2;
            r.scenario = s.id;
            r.layout = layout;
            r.pose = pose_index;
            r.mode = s.mode;
            r.colliding = report.colliding;
            r.min_distance = report.min_distance;
            r.bv_tests = report.stats.bv_tests;
            r.primitive_tests = report.stats.primitive_tests;
            r.nodes_visited = report.stats.nodes_visited;
            r.treelets_touched = report.stats.treelets_touched;
            r.descriptor_bytes = ma.descriptor_bytes + mb.descriptor_bytes;
            r.total_bytes = ma.total_bytes + mb.total_bytes;
            return r;
        };

        if (s.parallel) {
            std::vector<std::future<BenchRecord>> jobs;
            for (std::size_t p = 0; p < result.poses.size(); ++p)
                jobs.push_back(std::async(std::launch::async, measure, p));
            for (auto& j : jobs)
                result.records.push_back(j.get());
        } else {
            for (std::size_t p = 0; p < result.poses.size(); ++p)
                result.records.push_back(measure(p));
        }
    }
    return result;
}

bool answers_agree(const std::vector<BenchRecord>& records, double tolerance)
{
    std::map<std::pair<std::string, std::size_t>, const BenchRecord*> first;
    for (const auto& r : records) {
        auto [it, inserted] = first.try_emplace({r.scenario, r.pose}, &r);
        if (inserted)
            continue;
        const BenchRecord& ref = *it->second;
        if (r.colliding != ref.colliding || r.min_distance.has_value() != ref.min_distance.has_value())
            return false;
        if (r.min_distance && std::abs(*r.min_distance - *ref.min_distance) > tolerance)
            return false;
    }
    return true;
}

std::optional<double> wall_time_ratio(const std::vector<BenchRecord>& records, Layout num, Layout den)
{
    double sum_num = 0.0, sum_den = 0.0;
    bool has_num = false, has_den = false;
    for (const auto& r : records) {
        if (r.layout == num) {
            sum_num += double(r.wall_ns);
            has_num = true;
        }
        if (r.layout == den) {
            sum_den += double(r.wall_ns);
            has_den = true;
        }
    }
    if (!has_num || !has_den || sum_den == 0.0)
        return std::nullopt;
    return sum_num / sum_den;
}

namespace {

template <typename T>
void append_number(std::string& out, T value)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), ptr);
}

std::string_view mode_name(QueryMode m) { return m == QueryMode::collision ? "collision" : "distance"; }

template <typename T>
T parse_number(std::string_view field, std::size_t line)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error("CSV line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    return value;
}

} // namespace

std::string emit_csv(const std::vector<BenchRecord>& records)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        out += r.scenario;
        out += ',';
        out += layout_name(r.layout);
        out += ',';
        append_number(out, r.pose);
        out += ',';
        out += mode_name(r.mode);
        out += ',';
        out += r.colliding ? '1' : '0';
        out += ',';
        if (r.min_distance)
            append_number(out, *r.min_distance);
        for (auto v : {r.wall_ns, r.bv_tests, r.primitive_tests, r.nodes_visited, r.treelets_touched, r.descriptor_bytes,
                       r.total_bytes, r.first_run_ns}) {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

std::vector<BenchRecord> parse_csv(std::string_view text)
{
    std::vector<BenchRecord> out;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("CSV: unexpected header");
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (f.size() != 14)
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 14 fields");
        BenchRecord r;
        r.scenario = std::string(f[0]);
        const auto layout = parse_layout(f[1]);
        if (!layout)
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": unknown layout");
        r.layout = *layout;
        r.pose = parse_number<std::size_t>(f[2], line_no);
        if (f[3] == "collision")
            r.mode = QueryMode::collision;
        else if (f[3] == "distance")
            r.mode = QueryMode::distance;
        else
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": unknown mode");
        if (f[4] != "0" && f[4] != "1")
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad colliding flag");
        r.colliding = f[4] == "1";
        if (!f[5].empty())
            r.min_distance = parse_number<double>(f[5], line_no);
        r.wall_ns = parse_number<std::uint64_t>(f[6], line_no);
        r.bv_tests = parse_number<std::uint64_t>(f[7], line_no);
        r.primitive_tests = parse_number<std::uint64_t>(f[8], line_no);
        r.nodes_visited = parse_number<std::uint64_t>(f[9], line_no);
        r.treelets_touched = parse_number<std::uint64_t>(f[10], line_no);
        r.descriptor_bytes = parse_number<std::uint64_t>(f[11], line_no);
        r.total_bytes = parse_number<std::uint64_t>(f[12], line_no);
        r.first_run_ns = parse_number<std::uint64_t>(f[13], line_no);
        out.push_back(std::move(r));
    }
    if (!header_seen)
        throw std::runtime_error("CSV: missing header");
    return out;
}

} // namespace cbvh
