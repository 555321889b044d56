#include "asmplan/assembly.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace asmplan {

namespace fs = std::filesystem;

std::optional<Assembly> Assembly::load(
    const std::vector<std::pair<std::string, RigidState>>& part_specs, std::string* error) {
    Assembly assembly;
    for (const auto& [path, pose] : part_specs) {
        std::string err;
        auto mesh = load_obj(path, &err);
        if (!mesh) {
            if (error) *error = err;
            return std::nullopt;
        }
        Part part;
        part.id = static_cast<PartId>(assembly.parts_.size());
        part.mesh_path = path;
        part.name = fs::path(path).stem().string();
        part.mesh = std::move(*mesh);
        auto sdf = build_sdf_grid(part.mesh, &err);
        if (!sdf) {
            if (error) *error = path + ": " + err;
            return std::nullopt;
        }
        part.sdf = std::move(*sdf);
        part.hull = compute_convex_hull(part.mesh);
        part.props = body_props_from_mesh(part.mesh);
        part.assembled_pose = pose;
        assembly.parts_.push_back(std::move(part));
    }
    if (assembly.parts_.empty()) {
        if (error) *error = "manifest lists no parts";
        return std::nullopt;
    }
    assembly.active_.assign(assembly.parts_.size(), 1);
    assembly.compute_initial_penetration();
    return assembly;
}

std::optional<Assembly> Assembly::load_manifest(const std::string& manifest_path,
                                                std::string* error) {
    auto specs = parse_manifest(manifest_path, error);
    if (!specs) return std::nullopt;
    return load(*specs, error);
}

std::vector<PartId> Assembly::active_ids() const {
    std::vector<PartId> ids;
    for (PartId i = 0; i < part_count(); ++i) {
        if (active_[i]) ids.push_back(i);
    }
    return ids;
}

int Assembly::active_count() const {
    int n = 0;
    for (char a : active_) n += a != 0;
    return n;
}

void Assembly::restore_all() { active_.assign(parts_.size(), 1); }

Aabb Assembly::active_bounds() const {
    Aabb box;
    for (PartId id : active_ids()) {
        const Part& p = parts_[id];
        for (const Vec3& v : p.hull.vertices) box.expand(p.assembled_pose.apply(v));
    }
    return box;
}

void Assembly::compute_initial_penetration() {
    const std::size_t n = parts_.size();
    initial_penetration_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Part& pi = parts_[i];
            const Part& pj = parts_[j];
            double deepest = 0.0;
            for (const Vec3& local : pi.mesh.vertices) {
                Vec3 world = pi.assembled_pose.apply(local);
                Vec3 other_local = pj.assembled_pose.to_local(world);
                if (pj.sdf.node_bounds().distance(other_local) > 0.0) continue;
                double g = query_distance(pj.sdf, other_local);
                if (g < -deepest) deepest = -g;
            }
            initial_penetration_[i * n + j] = deepest;
        }
    }
}

ConvexHull union_hull(const Assembly& assembly, const std::vector<PartPose>& poses) {
    std::vector<Vec3> points;
    for (const PartPose& pp : poses) {
        const Part& part = assembly.part(pp.id);
        for (const Vec3& v : part.hull.vertices) points.push_back(pp.state.apply(v));
    }
    return convex_hull_of_points(points);
}

std::vector<Vec3> other_hull_vertices(const Assembly& assembly, const std::vector<PartId>& exclude) {
    std::vector<Vec3> points;
    for (PartId id : assembly.active_ids()) {
        if (std::find(exclude.begin(), exclude.end(), id) != exclude.end()) continue;
        const Part& part = assembly.part(id);
        for (const Vec3& v : part.hull.vertices) points.push_back(part.assembled_pose.apply(v));
    }
    return points;
}

bool is_disassembled(const Assembly& assembly, PartId part, const RigidState& state,
                     const std::vector<Vec3>& others_hull_vertices) {
    if (others_hull_vertices.empty()) return true;  // nothing left to collide with
    const ConvexHull& hull = assembly.part(part).hull;
    std::vector<Vec3> moving;
    moving.reserve(hull.vertices.size());
    for (const Vec3& v : hull.vertices) moving.push_back(state.apply(v));
    return convex_distance(moving, others_hull_vertices) > 1e-6;
}

bool is_disassembled(const Assembly& assembly, PartId part, const RigidState& state) {
    return is_disassembled(assembly, part, state, other_hull_vertices(assembly, {part}));
}

double max_penetration(const Assembly& assembly, PartId part, const RigidState& state,
                       const std::vector<PartPose>& others) {
    const Part& moving = assembly.part(part);
    double deepest = 0.0;
    for (const Vec3& local : moving.mesh.vertices) {
        Vec3 world = state.apply(local);
        for (const PartPose& pp : others) {
            const Part& other = assembly.part(pp.id);
            Vec3 other_local = pp.state.to_local(world);
            if (other.sdf.node_bounds().distance(other_local) > 0.0) continue;
            double g = query_distance(other.sdf, other_local);
            if (g < -deepest) deepest = -g;
        }
    }
    return deepest;
}

double max_penetration(const Assembly& assembly, PartId part, const RigidState& state) {
    std::vector<PartPose> others;
    for (PartId id : assembly.active_ids()) {
        if (id != part) others.push_back({id, assembly.part(id).assembled_pose});
    }
    return max_penetration(assembly, part, state, others);
}

bool state_valid(const Assembly& assembly, PartId part, const RigidState& state,
                 const std::vector<PartPose>& others) {
    const Part& moving = assembly.part(part);
    for (const PartPose& pp : others) {
        const Part& other = assembly.part(pp.id);
        const double threshold = assembly.penetration_threshold(part, pp.id);
        for (const Vec3& local : moving.mesh.vertices) {
            Vec3 world = state.apply(local);
            Vec3 other_local = pp.state.to_local(world);
            if (other.sdf.node_bounds().distance(other_local) > 0.0) continue;
            double g = query_distance(other.sdf, other_local);
            if (-g > threshold) return false;
        }
    }
    return true;
}

bool state_valid(const Assembly& assembly, PartId part, const RigidState& state) {
    std::vector<PartPose> others;
    for (PartId id : assembly.active_ids()) {
        if (id != part) others.push_back({id, assembly.part(id).assembled_pose});
    }
    return state_valid(assembly, part, state, others);
}

int first_invalid_state(const Assembly& assembly, PartId part,
                        const std::vector<RigidState>& states) {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!state_valid(assembly, part, states[i])) return static_cast<int>(i);
    }
    return -1;
}

bool save_manifest(const std::string& path,
                   const std::vector<std::pair<std::string, RigidState>>& parts) {
    std::ofstream out(path);
    if (!out) return false;
    out << "# mesh_path  m00..m33 (row-major 4x4 pose)\n";
    for (const auto& [mesh_path, pose] : parts) {
        Mat4 m = Mat4::Identity();
        m.topLeftCorner<3, 3>() = pose.rotation.toRotationMatrix();
        m.topRightCorner<3, 1>() = pose.translation;
        out << mesh_path;
        char buf[32];
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                std::snprintf(buf, sizeof(buf), " %.17g", m(r, c));
                out << buf;
            }
        }
        out << '\n';
    }
    return static_cast<bool>(out);
}

std::optional<std::vector<std::pair<std::string, RigidState>>> parse_manifest(
    const std::string& path, std::string* error) {
    std::ifstream in(path);
    if (!in) {
        if (error) *error = "cannot open manifest " + path;
        return std::nullopt;
    }
    fs::path base = fs::path(path).parent_path();
    std::vector<std::pair<std::string, RigidState>> parts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string mesh_path;
        ss >> mesh_path;
        Mat4 m;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                if (!(ss >> m(r, c))) {
                    if (error) {
                        *error = path + ": line " + std::to_string(line_no) + ": expected 16 matrix entries";
                    }
                    return std::nullopt;
                }
            }
        }
        fs::path resolved = fs::path(mesh_path).is_absolute() ? fs::path(mesh_path) : base / mesh_path;
        RigidState pose;
        pose.translation = m.topRightCorner<3, 1>();
        pose.rotation = Quat(m.topLeftCorner<3, 3>()).normalized();
        parts.emplace_back(resolved.string(), pose);
    }
    if (parts.empty()) {
        if (error) *error = path + ": no parts";
        return std::nullopt;
    }
    return parts;
}

}  // namespace asmplan
