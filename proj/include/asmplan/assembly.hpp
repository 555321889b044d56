#pragma once

#include "asmplan/convex_hull.hpp"
#include "asmplan/core.hpp"
#include "asmplan/sdf_grid.hpp"
#include "asmplan/simulator.hpp"
#include "asmplan/trimesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace asmplan {

// One part of an assembly: preprocessed mesh in its local frame plus the
// derived collision data, all immutable after load.
struct Part {
    PartId id = -1;
    std::string name;
    std::string mesh_path;
    TriMesh mesh;
    SdfGrid sdf;
    ConvexHull hull;
    BodyProps props;
    RigidState assembled_pose;
};

// The assembly world model: part bookkeeping, the disassembled-state test and
// penetration queries shared by every planner. Parts are removed (deactivated)
// between sequence-planner iterations; geometry itself never changes.
class Assembly {
public:
    static std::optional<Assembly> load(const std::vector<std::pair<std::string, RigidState>>& parts,
                                        std::string* error = nullptr);
    static std::optional<Assembly> load_manifest(const std::string& manifest_path,
                                                 std::string* error = nullptr);

    int part_count() const { return static_cast<int>(parts_.size()); }
    const Part& part(PartId id) const { return parts_[id]; }
    const std::vector<Part>& parts() const { return parts_; }

    bool is_active(PartId id) const { return active_[id] != 0; }
    std::vector<PartId> active_ids() const;
    int active_count() const;
    void remove_part(PartId id) { active_[id] = 0; }
    void restore_all();

    double normalization_scale() const { return scale_; }
    void set_normalization_scale(double s) { scale_ = s; }

    // Peak penetration of i's vertices inside j's SDF with both parts at
    // their assembled poses. Human-designed assemblies often overlap a little;
    // validity thresholds are widened by this amount per pair.
    double initial_penetration(PartId i, PartId j) const {
        return initial_penetration_[static_cast<std::size_t>(i) * parts_.size() + j];
    }
    double penetration_threshold(PartId i, PartId j) const {
        return defaults::penetration_threshold + initial_penetration(i, j);
    }

    // Joint bounds of the active parts at their assembled poses.
    Aabb active_bounds() const;

private:
    std::vector<Part> parts_;
    std::vector<char> active_;
    std::vector<double> initial_penetration_;
    double scale_ = 1.0;

    void compute_initial_penetration();
};

// Current pose of one part (world frame).
struct PartPose {
    PartId id = -1;
    RigidState state;
};

// Hull of the union of the listed parts' hull vertices at the given poses.
ConvexHull union_hull(const Assembly& assembly, const std::vector<PartPose>& poses);

// Hull vertices (world) of all active parts except `exclude`, at assembled poses.
std::vector<Vec3> other_hull_vertices(const Assembly& assembly, const std::vector<PartId>& exclude);

// True iff the part's hull at `state` does not touch the hull enclosing all
// other active parts. The last remaining part is always disassembled.
bool is_disassembled(const Assembly& assembly, PartId part, const RigidState& state);
// Variant against a prebuilt set of world-frame hull vertices of the others.
bool is_disassembled(const Assembly& assembly, PartId part, const RigidState& state,
                     const std::vector<Vec3>& others_hull_vertices);

// Deepest |min(g, 0)| of the part's vertices against all other active parts'
// SDFs at their assembled poses.
double max_penetration(const Assembly& assembly, PartId part, const RigidState& state);
// Variant with explicit poses for the other parts.
double max_penetration(const Assembly& assembly, PartId part, const RigidState& state,
                       const std::vector<PartPose>& others);

// Per-pair adaptive validity: every other part's penetration stays within
// threshold(part, other). Shared by the physics planner and all baselines.
bool state_valid(const Assembly& assembly, PartId part, const RigidState& state);
bool state_valid(const Assembly& assembly, PartId part, const RigidState& state,
                 const std::vector<PartPose>& others);

// Replays a state path through the common validator. Returns the index of the
// first invalid state, or -1 when every state is within bounds.
int first_invalid_state(const Assembly& assembly, PartId part, const std::vector<RigidState>& states);

// Manifest I/O: one part per line, mesh path followed by a row-major 4x4 pose
// matrix in 64-bit decimal text.
bool save_manifest(const std::string& path,
                   const std::vector<std::pair<std::string, RigidState>>& parts);
std::optional<std::vector<std::pair<std::string, RigidState>>> parse_manifest(
    const std::string& path, std::string* error = nullptr);

}  // namespace asmplan
