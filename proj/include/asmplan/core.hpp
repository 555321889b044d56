#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace asmplan {

using Vec3 = Eigen::Vector3d;
using Vec3f = Eigen::Vector3f;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

using PartId = int;

// Pose (and velocity) of one rigid part. Angular velocity is expressed in
// the body frame. The quaternion is kept unit length by the integrator.
struct RigidState {
    Vec3 translation = Vec3::Zero();
    Quat rotation = Quat::Identity();
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();  // body frame

    Vec3 apply(const Vec3& local) const { return rotation * local + translation; }
    Vec3 to_local(const Vec3& world) const { return rotation.conjugate() * (world - translation); }

    static RigidState from_pose(const Vec3& t, const Quat& q) {
        RigidState s;
        s.translation = t;
        s.rotation = q.normalized();
        return s;
    }
};

inline bool operator==(const RigidState& a, const RigidState& b) {
    return a.translation == b.translation && a.rotation.coeffs() == b.rotation.coeffs();
}

// Unit-direction force or torque with fixed magnitude.
struct Action {
    enum class Kind { Force, Torque };
    Kind kind = Kind::Force;
    Vec3 direction = Vec3::UnitX();
    double magnitude = 100.0;
};

inline bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.direction == b.direction && a.magnitude == b.magnitude;
}

// Translational part of the state distance: plain Euclidean.
inline double translation_distance(const RigidState& a, const RigidState& b) {
    return (a.translation - b.translation).norm();
}

// Rotational part: norm of the log of the relative quaternion, i.e. half the
// relative rotation angle. Sign-invariant (q and -q give zero distance).
inline double rotation_distance(const RigidState& a, const RigidState& b) {
    Quat rel = a.rotation.conjugate() * b.rotation;
    double w = std::abs(rel.w());
    double v = rel.vec().norm();
    return std::atan2(v, w);
}

struct StateDistance {
    double translation = 0.0;
    double rotation = 0.0;
};

inline StateDistance state_distance(const RigidState& a, const RigidState& b) {
    return {translation_distance(a, b), rotation_distance(a, b)};
}

// Two states are similar iff both components are within their thresholds.
inline bool is_similar(const RigidState& a, const RigidState& b, double delta_t, double delta_r) {
    if (translation_distance(a, b) > delta_t) return false;
    return rotation_distance(a, b) <= delta_r;
}

// Defaults shared across the planners (see bench config for overrides).
namespace defaults {
inline constexpr double contact_stiffness = 1e6;    // k_n
inline constexpr double contact_damping = 0.0;      // k_d
inline constexpr double sim_substep = 1e-3;         // h
inline constexpr double planning_timestep = 0.1;    // dt per planner step
inline constexpr double action_magnitude = 100.0;
inline constexpr double penetration_threshold = 0.01;
inline constexpr double similarity_translation = 0.05;  // delta_t
inline constexpr double similarity_rotation = 0.5;      // delta_r
inline constexpr double geom_step_size = 0.01;
inline constexpr double goal_probability = 0.2;
}  // namespace defaults

}  // namespace asmplan
