#pragma once

#include "asmplan/core.hpp"
#include "asmplan/trimesh.hpp"

#include <vector>

namespace asmplan {

// Convex hull as an outward-oriented triangle surface. `vertices` holds only
// the extreme points; `faces` index into it.
struct ConvexHull {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    bool empty() const { return vertices.empty(); }
    double volume() const;
    Aabb bounds() const;
    ConvexHull transformed(const RigidState& pose) const;
    // Signed distance of a point to the farthest face plane (<= 0 inside).
    double plane_distance(const Vec3& p) const;
};

// Incremental hull over the mesh vertices. Degenerate (coplanar or thinner)
// inputs are inflated by 1e-6 along the flat axis instead of rejected.
ConvexHull compute_convex_hull(const TriMesh& mesh);
ConvexHull convex_hull_of_points(const std::vector<Vec3>& points);

// Smallest distance between the two convex point sets (0 when they overlap).
double convex_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// True iff the hulls overlap or touch within tolerance 1e-6.
bool hulls_intersect(const ConvexHull& a, const ConvexHull& b, double tolerance = 1e-6);

}  // namespace asmplan
