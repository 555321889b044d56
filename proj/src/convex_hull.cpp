#include "asmplan/convex_hull.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace asmplan {

double ConvexHull::volume() const {
    double six_v = 0.0;
    for (const auto& f : faces) {
        six_v += vertices[f[0]].dot(vertices[f[1]].cross(vertices[f[2]]));
    }
    return six_v / 6.0;
}

Aabb ConvexHull::bounds() const {
    Aabb box;
    for (const Vec3& v : vertices) box.expand(v);
    return box;
}

ConvexHull ConvexHull::transformed(const RigidState& pose) const {
    ConvexHull out;
    out.vertices.reserve(vertices.size());
    for (const Vec3& v : vertices) out.vertices.push_back(pose.apply(v));
    out.faces = faces;
    return out;
}

double ConvexHull::plane_distance(const Vec3& p) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : faces) {
        Vec3 n = (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
        double len = n.norm();
        if (len <= 0.0) continue;
        worst = std::max(worst, n.dot(p - vertices[f[0]]) / len);
    }
    return worst;
}

namespace {

struct HullFace {
    std::array<int, 3> v;
    Vec3 normal;   // unit outward
    double offset;  // normal . x = offset on the plane
    bool alive = true;
};

double signed_dist(const HullFace& f, const Vec3& p) { return f.normal.dot(p) - f.offset; }

HullFace make_face(const std::vector<Vec3>& pts, int a, int b, int c, const Vec3& interior) {
    HullFace f;
    f.v = {a, b, c};
    Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    double len = n.norm();
    if (len > 0.0) n /= len;
    if (n.dot(pts[a] - interior) < 0.0) {
        std::swap(f.v[1], f.v[2]);
        n = -n;
    }
    f.normal = n;
    f.offset = n.dot(pts[f.v[0]]);
    return f;
}

}  // namespace

ConvexHull convex_hull_of_points(const std::vector<Vec3>& input) {
    ConvexHull hull;
    if (input.size() < 4) return hull;

    std::vector<Vec3> pts = input;
    Aabb box;
    for (const Vec3& p : pts) box.expand(p);
    const double diag = std::max(box.extent().norm(), 1e-12);
    const double eps = 1e-9 * diag;

    // Initial extreme tetrahedron.
    int i0 = 0, i1 = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].x() < pts[i0].x()) i0 = static_cast<int>(i);
    }
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d = (pts[i] - pts[i0]).squaredNorm();
        if (d > best) { best = d; i1 = static_cast<int>(i); }
    }
    Vec3 dir = pts[i1] - pts[i0];
    int i2 = -1;
    best = eps;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d = dir.cross(pts[i] - pts[i0]).norm();
        if (d > best) { best = d; i2 = static_cast<int>(i); }
    }
    int i3 = -1;
    if (i2 >= 0) {
        Vec3 n = dir.cross(pts[i2] - pts[i0]).normalized();
        best = eps;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d = std::abs(n.dot(pts[i] - pts[i0]));
            if (d > best) { best = d; i3 = static_cast<int>(i); }
        }
    }
    if (i2 < 0 || i3 < 0) {
        // Degenerate input: inflate along the flattest principal axis.
        Vec3 mean = std::accumulate(pts.begin(), pts.end(), Vec3(Vec3::Zero())) /
                    static_cast<double>(pts.size());
        Mat3 cov = Mat3::Zero();
        for (const Vec3& p : pts) {
            Vec3 d = p - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        Vec3 axis = eig.eigenvectors().col(0);  // smallest spread
        if (axis.norm() == 0.0) axis = Vec3::UnitZ();
        std::vector<Vec3> inflated = pts;
        for (const Vec3& p : pts) {
            inflated.push_back(p + 1e-6 * axis);
            inflated.push_back(p - 1e-6 * axis);
        }
        return convex_hull_of_points(inflated);
    }

    Vec3 interior = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
    std::vector<HullFace> faces;
    faces.push_back(make_face(pts, i0, i1, i2, interior));
    faces.push_back(make_face(pts, i0, i1, i3, interior));
    faces.push_back(make_face(pts, i0, i2, i3, interior));
    faces.push_back(make_face(pts, i1, i2, i3, interior));

    for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        // Visible faces, grown from the most violated one through shared edges
        // so the removed region stays connected.
        int seed = -1;
        double worst = eps;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[f].alive) continue;
            double d = signed_dist(faces[f], pts[p]);
            if (d > worst) { worst = d; seed = f; }
        }
        if (seed < 0) continue;  // inside the current hull

        std::map<std::pair<int, int>, std::pair<int, int>> edge_faces;  // undirected edge -> up to two faces
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[f].alive) continue;
            for (int k = 0; k < 3; ++k) {
                int a = faces[f].v[k], b = faces[f].v[(k + 1) % 3];
                auto key = std::minmax(a, b);
                auto it = edge_faces.find(key);
                if (it == edge_faces.end()) {
                    edge_faces[key] = {f, -1};
                } else {
                    it->second.second = f;
                }
            }
        }
        std::vector<char> visible(faces.size(), 0);
        std::vector<int> stack = {seed};
        visible[seed] = 1;
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                auto key = std::minmax(faces[f].v[k], faces[f].v[(k + 1) % 3]);
                auto [fa, fb] = edge_faces[key];
                int g = (fa == f) ? fb : fa;
                if (g >= 0 && !visible[g] && signed_dist(faces[g], pts[p]) > eps) {
                    visible[g] = 1;
                    stack.push_back(g);
                }
            }
        }
        // Horizon: directed edges of visible faces whose neighbor is hidden.
        std::vector<std::pair<int, int>> horizon;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[f].alive || !visible[f]) continue;
            for (int k = 0; k < 3; ++k) {
                int a = faces[f].v[k], b = faces[f].v[(k + 1) % 3];
                auto [fa, fb] = edge_faces[std::minmax(a, b)];
                int g = (fa == f) ? fb : fa;
                if (g < 0 || !visible[g]) horizon.push_back({a, b});
            }
        }
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (visible[f]) faces[f].alive = false;
        }
        for (auto [a, b] : horizon) {
            faces.push_back(make_face(pts, a, b, p, interior));
        }
        faces.erase(std::remove_if(faces.begin(), faces.end(),
                                   [](const HullFace& f) { return !f.alive; }),
                    faces.end());
    }

    // Compact the vertex set to the points actually referenced.
    std::vector<int> remap(pts.size(), -1);
    for (const HullFace& f : faces) {
        for (int k = 0; k < 3; ++k) {
            if (remap[f.v[k]] < 0) {
                remap[f.v[k]] = static_cast<int>(hull.vertices.size());
                hull.vertices.push_back(pts[f.v[k]]);
            }
        }
    }
    for (const HullFace& f : faces) {
        hull.faces.push_back({remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]});
    }
    return hull;
}

ConvexHull compute_convex_hull(const TriMesh& mesh) {
    return convex_hull_of_points(mesh.vertices);
}

namespace {

// GJK support point over explicit vertex lists.
int support_index(const std::vector<Vec3>& pts, const Vec3& d) {
    int best = 0;
    double best_dot = pts[0].dot(d);
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
        double v = pts[i].dot(d);
        if (v > best_dot) { best_dot = v; best = i; }
    }
    return best;
}

struct Simplex {
    Vec3 p[4];
    int n = 0;
};

// Closest point to the origin on the simplex; reduces the simplex to the
// supporting feature. Standard case analysis.
Vec3 closest_on_simplex(Simplex& s) {
    auto keep = [&s](std::initializer_list<int> idx) {
        Simplex r;
        for (int i : idx) r.p[r.n++] = s.p[i];
        s = r;
    };
    if (s.n == 1) return s.p[0];
    if (s.n == 2) {
        Vec3 a = s.p[0], b = s.p[1];
        Vec3 ab = b - a;
        double t = -a.dot(ab);
        double len = ab.squaredNorm();
        if (len <= 0.0 || t <= 0.0) { keep({0}); return a; }
        if (t >= len) { keep({1}); return b; }
        return a + (t / len) * ab;
    }
    if (s.n == 3) {
        Vec3 a = s.p[0], b = s.p[1], c = s.p[2];
        Vec3 ab = b - a, ac = c - a;
        Vec3 n = ab.cross(ac);
        double d1 = -a.dot(ab), d2 = -a.dot(ac);
        if (d1 <= 0.0 && d2 <= 0.0) { keep({0}); return a; }
        Vec3 bo = -b;
        double d3 = bo.dot(ab), d4 = bo.dot(ac);
        if (d3 >= 0.0 && d4 <= d3) { keep({1}); return b; }
        double vc = d1 * d4 - d3 * d2;
        if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
            double t = d1 / (d1 - d3);
            keep({0, 1});
            return a + t * ab;
        }
        Vec3 co = -c;
        double d5 = co.dot(ab), d6 = co.dot(ac);
        if (d6 >= 0.0 && d5 <= d6) { keep({2}); return c; }
        double vb = d5 * d2 - d1 * d6;
        if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
            double t = d2 / (d2 - d6);
            keep({0, 2});
            return a + t * ac;
        }
        double va = d3 * d6 - d5 * d4;
        if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
            double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            keep({1, 2});
            return b + t * (c - b);
        }
        double denom = va + vb + vc;
        if (denom == 0.0) { keep({0}); return a; }
        double v = vb / denom, w = vc / denom;
        return a + v * ab + w * ac;
    }
    // Tetrahedron: origin inside, or closest on one of the faces.
    Vec3 a = s.p[0], b = s.p[1], c = s.p[2], d = s.p[3];
    auto outside = [](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& other) {
        Vec3 n = (p1 - p0).cross(p2 - p0);
        double ref = n.dot(other - p0);
        double org = n.dot(-p0);
        return ref * org < 0.0 || (org != 0.0 && ref == 0.0);
    };
    double best_d = std::numeric_limits<double>::infinity();
    Vec3 best_p = Vec3::Zero();
    Simplex best_s;
    bool any = false;
    const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    const int opposite[4] = {3, 2, 1, 0};
    for (int f = 0; f < 4; ++f) {
        if (!outside(s.p[faces[f][0]], s.p[faces[f][1]], s.p[faces[f][2]], s.p[opposite[f]])) continue;
        Simplex tri;
        tri.n = 3;
        tri.p[0] = s.p[faces[f][0]];
        tri.p[1] = s.p[faces[f][1]];
        tri.p[2] = s.p[faces[f][2]];
        Vec3 q = closest_on_simplex(tri);
        double dist = q.squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best_p = q;
            best_s = tri;
            any = true;
        }
    }
    if (!any) {
        // Origin contained in the tetrahedron.
        return Vec3::Zero();
    }
    s = best_s;
    return best_p;
}

}  // namespace

double convex_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (const Vec3& p : a) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    for (const Vec3& p : b) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * std::max(scale, 1.0);

    auto minkowski_support = [&](const Vec3& d) {
        return a[support_index(a, d)] - b[support_index(b, -d)];
    };

    Simplex s;
    s.p[s.n++] = minkowski_support(Vec3::UnitX());
    Vec3 v = s.p[0];
    for (int iter = 0; iter < 128; ++iter) {
        double vnorm = v.norm();
        if (vnorm < tol) return 0.0;
        Vec3 w = minkowski_support(-v);
        // v.w/|v| lower-bounds the distance; stop when it meets the upper bound.
        if (vnorm - v.dot(w) / vnorm <= 1e-9 * std::max(vnorm, 1.0)) return vnorm;
        bool duplicate = false;
        for (int i = 0; i < s.n; ++i) {
            if ((s.p[i] - w).squaredNorm() <= tol * tol) { duplicate = true; break; }
        }
        if (duplicate) return vnorm;
        s.p[s.n++] = w;
        v = closest_on_simplex(s);
        if (s.n == 4) return 0.0;  // closest_on_simplex only keeps 4 when origin enclosed
    }
    return v.norm();
}

bool hulls_intersect(const ConvexHull& a, const ConvexHull& b, double tolerance) {
    if (a.empty() || b.empty()) return false;
    return convex_distance(a.vertices, b.vertices) <= tolerance;
}

}  // namespace asmplan
