#include "asmplan/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace asmplan {

BodyProps body_props_from_mesh(const TriMesh& mesh, double density) {
    BodyProps props;
    Obb obb = compute_obb(mesh);
    Vec3 h = obb.half_extents.cwiseMax(1e-3);
    double volume = 8.0 * h.prod();
    props.mass = std::max(density * volume, 1e-9);
    Vec3 diag(h.y() * h.y() + h.z() * h.z(),
              h.x() * h.x() + h.z() * h.z(),
              h.x() * h.x() + h.y() * h.y());
    Mat3 local = (props.mass / 3.0) * diag.asDiagonal();
    props.inertia = obb.axes * local * obb.axes.transpose();
    props.center_of_mass = obb.center;
    return props;
}

std::vector<Contact> detect_contacts(const SimBody& body, const std::vector<SimBody>& bodies,
                                     double threshold) {
    std::vector<Contact> contacts;
    if (!body.mesh) return contacts;
    for (const Vec3& local : body.mesh->vertices) {
        Vec3 x = body.state.apply(local);
        for (const SimBody& other : bodies) {
            if (other.id == body.id || !other.sdf) continue;
            Vec3 x_other = other.state.to_local(x);
            // Cheap reject: vertices far outside the other's grid cannot be
            // within threshold of its surface.
            if (other.sdf->node_bounds().distance(x_other) > std::max(threshold, 0.0)) continue;
            double g = query_distance(*other.sdf, x_other);
            if (g >= threshold) continue;
            Contact c;
            c.point = x;
            c.penetration = std::min(g, 0.0);
            Vec3 grad = other.state.rotation * query_gradient(*other.sdf, x_other);
            double len = grad.norm();
            c.normal = len > 1e-12 ? Vec3(grad / len) : Vec3::UnitZ();
            Vec3 rel_vel = body.point_velocity(x) - other.point_velocity(x);
            c.rate = c.normal.dot(rel_vel);
            c.other = other.id;
            contacts.push_back(c);
        }
    }
    return contacts;
}

namespace {

void integrate_body(SimBody& body, const Vec3& force, const Vec3& torque_world,
                    const std::vector<Contact>& contacts, const SimSettings& s) {
    const double h = s.substep;
    RigidState& st = body.state;

    // Angular: Euler's equation in the body frame.
    Vec3 torque_body = st.rotation.conjugate() * torque_world;
    const Mat3& inertia = body.props.inertia;
    Vec3 omega = st.angular_velocity;
    Vec3 omega_dot = inertia.ldlt().solve(torque_body - omega.cross(inertia * omega));
    omega += h * omega_dot;

    Vec3 vel = st.linear_velocity + (h / body.props.mass) * force;

    // Suppress penalty-spring oscillation along contact normals only; the
    // tangential component stays untouched (frictionless).
    for (const Contact& c : contacts) {
        double vn = vel.dot(c.normal);
        vel -= (1.0 - s.normal_velocity_damping) * vn * c.normal;
    }

    double vcap = s.velocity_cap;
    if (vel.norm() > vcap) vel *= vcap / vel.norm();
    if (omega.norm() > vcap) omega *= vcap / omega.norm();

    st.linear_velocity = vel;
    st.angular_velocity = omega;
    st.translation += h * vel;

    double angle = omega.norm() * h;
    if (angle > 0.0) {
        Vec3 axis = omega / omega.norm();
        Quat delta(Eigen::AngleAxisd(angle, axis));
        st.rotation = (st.rotation * delta).normalized();
    }
}

}  // namespace

SimStatus simulate(std::vector<SimBody>& bodies, double dt, const SimSettings& settings) {
    for (SimBody& body : bodies) {
        body.state.linear_velocity = Vec3::Zero();
        body.state.angular_velocity = Vec3::Zero();
    }
    const int substeps = std::max(1, static_cast<int>(std::llround(dt / settings.substep)));

    std::vector<int> actuated;
    for (int i = 0; i < static_cast<int>(bodies.size()); ++i) {
        if (bodies[i].action) actuated.push_back(i);
    }

    std::vector<std::vector<Contact>> contacts(actuated.size());
    for (int step = 0; step < substeps; ++step) {
        // Contacts for all actuated bodies against the pre-step states, then
        // integrate, so the update is simultaneous and order-independent.
        for (std::size_t k = 0; k < actuated.size(); ++k) {
            contacts[k] = detect_contacts(bodies[actuated[k]], bodies, settings.contact_threshold);
        }
        for (std::size_t k = 0; k < actuated.size(); ++k) {
            SimBody& body = bodies[actuated[k]];
            Vec3 force = Vec3::Zero();
            Vec3 torque = Vec3::Zero();
            const Action& act = *body.action;
            if (act.kind == Action::Kind::Force) {
                force += act.magnitude * act.direction;
            } else {
                torque += act.magnitude * act.direction;
            }
            Vec3 com = body.com_world();
            for (const Contact& c : contacts[k]) {
                Vec3 f = contact_force(c, settings.stiffness, settings.damping);
                force += f;
                torque += (c.point - com).cross(f);
            }
            integrate_body(body, force, torque, contacts[k], settings);

            const RigidState& st = body.state;
            if (!st.translation.allFinite() || !st.rotation.coeffs().allFinite() ||
                st.translation.norm() > settings.divergence_translation) {
                return SimStatus::Diverged;
            }
        }
        if (settings.snapshot) {
            for (const SimBody& body : bodies) {
                const RigidState& st = body.state;
                char buf[256];
                std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                              step, body.id, st.translation.x(), st.translation.y(),
                              st.translation.z(), st.rotation.w(), st.rotation.x(),
                              st.rotation.y(), st.rotation.z());
                (*settings.snapshot) << buf;
            }
        }
    }
    return SimStatus::Ok;
}

}  // namespace asmplan
