#pragma once

#include "asmplan/core.hpp"
#include "asmplan/trimesh.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace asmplan {

// Axis-aligned signed-distance voxel grid. Values live on grid nodes
// (x-major layout); queries interpolate trilinearly between them. Negative
// inside the surface, positive outside. Immutable after construction.
struct SdfGrid {
    Vec3 origin = Vec3::Zero();
    Vec3 cell_size = Vec3::Zero();
    std::array<int, 3> dims = {0, 0, 0};  // node counts per axis
    std::vector<float> values;            // dims[0]*dims[1]*dims[2], x-major
    int padding = 2;

    bool empty() const { return values.empty(); }
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * dims[1] + iy) * dims[2] + iz;
    }
    float at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }
    Vec3 node_position(int ix, int iy, int iz) const {
        return origin + Vec3(ix * cell_size.x(), iy * cell_size.y(), iz * cell_size.z());
    }
    Aabb node_bounds() const {
        Aabb b;
        b.expand(origin);
        b.expand(node_position(dims[0] - 1, dims[1] - 1, dims[2] - 1));
        return b;
    }
    double max_cell() const { return cell_size.maxCoeff(); }
};

// Builds the grid with per-axis cell size min(0.05, L_i/20), two padding
// cells beyond the mesh bounds, exact distances seeded near the surface and
// propagated by fast sweeping. Sign comes from a 3-axis ray-parity majority
// vote against the watertight surface. Rejects non-watertight input.
std::optional<SdfGrid> build_sdf_grid(const TriMesh& mesh, std::string* error = nullptr);

// Signed distance at an arbitrary point. Outside the grid box the value is
// the distance to the box plus the boundary value at the clamped point, which
// keeps far-field queries meaningful.
double query_distance(const SdfGrid& grid, const Vec3& point);

// Central finite difference of the trilinear field, one cell per axis.
// Points are clamped so the stencil stays inside the grid.
Vec3 query_gradient(const SdfGrid& grid, const Vec3& point);

// Binary sidecar cache: magic "SDF1", then dims, origin, cell_size as 64-bit
// little-endian floats, then x-major float32 values.
bool save_sdf_cache(const SdfGrid& grid, const std::string& path);
std::optional<SdfGrid> load_sdf_cache(const std::string& path);

// Exact distance from a point to a triangle (used for band seeding and in
// test oracles).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace asmplan
