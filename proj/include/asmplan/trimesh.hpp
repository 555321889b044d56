#pragma once

#include "asmplan/core.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace asmplan {

struct Aabb {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void expand(const Aabb& other) {
        min = min.cwiseMin(other.min);
        max = max.cwiseMax(other.max);
    }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    Aabb inflated(double margin) const {
        Aabb b;
        b.min = min - Vec3::Constant(margin);
        b.max = max + Vec3::Constant(margin);
        return b;
    }
    // Distance from a point to the box (zero inside).
    double distance(const Vec3& p) const {
        Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
        return d.norm();
    }
};

// Indexed triangle mesh. Vertices are in the part's local frame.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    bool empty() const { return triangles.empty(); }
    Aabb bounds() const;
    // Signed volume via the divergence theorem; meaningful for watertight meshes.
    double volume() const;
    double surface_area() const;
    double max_edge_length() const;
    TriMesh transformed(const RigidState& pose) const;
    TriMesh scaled(double factor, const Vec3& about) const;
    void append(const TriMesh& other);
    bool indices_valid() const;
};

// Every undirected edge incident to exactly two triangles with consistent
// orientation. Multiple disjoint closed shells in one mesh count as watertight.
bool is_watertight(const TriMesh& mesh);

// Conforming longest-edge midpoint subdivision until no edge exceeds max_edge.
// Surface geometry is unchanged; only the triangulation is refined.
TriMesh subdivide_mesh(const TriMesh& mesh, double max_edge = 0.5);

// OBJ I/O. Loads 'v' and 'f' records; polygon faces are fan-triangulated.
std::optional<TriMesh> load_obj(const std::string& path, std::string* error = nullptr);
bool save_obj(const TriMesh& mesh, const std::string& path);

// Oriented bounding box from a PCA fit of the vertices.
struct Obb {
    Vec3 center = Vec3::Zero();
    Mat3 axes = Mat3::Identity();  // columns are the box axes
    Vec3 half_extents = Vec3::Zero();

    double volume() const { return 8.0 * half_extents.prod(); }
    double min_extent() const { return 2.0 * half_extents.minCoeff(); }
};

Obb compute_obb(const TriMesh& mesh);

// Stable content hash of the mesh bytes, used to key cached derived data.
std::uint64_t mesh_content_hash(const TriMesh& mesh);

}  // namespace asmplan
