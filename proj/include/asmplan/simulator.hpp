#pragma once

#include "asmplan/core.hpp"
#include "asmplan/sdf_grid.hpp"
#include "asmplan/trimesh.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace asmplan {

// Mass, inertia (body frame, about the center of mass) and center of mass.
struct BodyProps {
    double mass = 1.0;
    Mat3 inertia = Mat3::Identity();
    Vec3 center_of_mass = Vec3::Zero();
};

// Unit density, mass and inertia from the mesh's oriented bounding box.
// Robust to open meshes that slip past preprocessing.
BodyProps body_props_from_mesh(const TriMesh& mesh, double density = 1.0);

// One vertex-vs-SDF contact. Penetration d = min(g(x), 0); the normal is the
// normalized SDF gradient; rate is the time derivative of the penetration.
struct Contact {
    Vec3 point = Vec3::Zero();  // world
    double penetration = 0.0;   // <= 0
    Vec3 normal = Vec3::UnitZ();
    double rate = 0.0;
    PartId other = -1;
};

// Penalty contact force f = (-k_n + k_d * rate) * d * n.
inline Vec3 contact_force(const Contact& c, double k_n, double k_d) {
    return (-k_n + k_d * c.rate) * c.penetration * c.normal;
}

// One rigid body in a simulation scene. Bodies without an action are
// kinematically fixed and act only as collision geometry.
struct SimBody {
    PartId id = -1;
    const TriMesh* mesh = nullptr;  // contact sample points (local frame)
    const SdfGrid* sdf = nullptr;
    BodyProps props;
    RigidState state;
    std::optional<Action> action;

    Vec3 com_world() const { return state.apply(props.center_of_mass); }
    Vec3 angular_velocity_world() const { return state.rotation * state.angular_velocity; }
    Vec3 point_velocity(const Vec3& world_point) const {
        return state.linear_velocity + angular_velocity_world().cross(world_point - com_world());
    }
};

struct SimSettings {
    double stiffness = defaults::contact_stiffness;
    double damping = defaults::contact_damping;
    double substep = defaults::sim_substep;
    double contact_threshold = 0.0;  // sample contacts where g(x) < threshold
    // Per-substep damping of the contact-normal velocity component; tangential
    // velocity is never touched (no friction).
    double normal_velocity_damping = 0.98;
    double velocity_cap = 1e3;
    double divergence_translation = 1e4;
    std::ostream* snapshot = nullptr;
};

enum class SimStatus { Ok, Diverged };

// Contacts of `body`'s mesh vertices against every other body's SDF, at the
// bodies' current states. Rates use the relative velocity at the contact.
std::vector<Contact> detect_contacts(const SimBody& body, const std::vector<SimBody>& bodies,
                                     double threshold);

// Advances every actuated body by dt in substeps of settings.substep under
// its action plus penalty contact forces. Fixed bodies never move. Linear and
// angular velocities are zeroed on entry: each call is a fresh quasi-static
// push, so the result depends only on (states, actions).
SimStatus simulate(std::vector<SimBody>& bodies, double dt, const SimSettings& settings = {});

}  // namespace asmplan
