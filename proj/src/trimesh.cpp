#include "asmplan/trimesh.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace asmplan {

Aabb TriMesh::bounds() const {
    Aabb box;
    for (const Vec3& v : vertices) box.expand(v);
    return box;
}

double TriMesh::volume() const {
    double six_v = 0.0;
    for (const auto& t : triangles) {
        const Vec3& a = vertices[t[0]];
        const Vec3& b = vertices[t[1]];
        const Vec3& c = vertices[t[2]];
        six_v += a.dot(b.cross(c));
    }
    return six_v / 6.0;
}

double TriMesh::surface_area() const {
    double area = 0.0;
    for (const auto& t : triangles) {
        area += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
    }
    return area;
}

double TriMesh::max_edge_length() const {
    double longest = 0.0;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            double len = (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm();
            longest = std::max(longest, len);
        }
    }
    return longest;
}

TriMesh TriMesh::transformed(const RigidState& pose) const {
    TriMesh out;
    out.vertices.reserve(vertices.size());
    for (const Vec3& v : vertices) out.vertices.push_back(pose.apply(v));
    out.triangles = triangles;
    return out;
}

TriMesh TriMesh::scaled(double factor, const Vec3& about) const {
    TriMesh out;
    out.vertices.reserve(vertices.size());
    for (const Vec3& v : vertices) out.vertices.push_back(about + factor * (v - about));
    out.triangles = triangles;
    return out;
}

void TriMesh::append(const TriMesh& other) {
    int base = static_cast<int>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    triangles.reserve(triangles.size() + other.triangles.size());
    for (const auto& t : other.triangles) {
        triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
}

bool TriMesh::indices_valid() const {
    int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= n) return false;
        }
    }
    return true;
}

bool is_watertight(const TriMesh& mesh) {
    if (mesh.triangles.empty() || !mesh.indices_valid()) return false;
    // Count directed edges: a closed, consistently oriented surface has every
    // directed edge exactly once and its opposite exactly once.
    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(mesh.triangles.size() * 3);
    auto key = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a == b) return false;  // degenerate edge
            if (++directed[key(a, b)] > 1) return false;
        }
    }
    for (const auto& [k, count] : directed) {
        int a = static_cast<int>(k >> 32);
        int b = static_cast<int>(k & 0xffffffffu);
        auto it = directed.find(key(b, a));
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

namespace {

struct EdgeKey {
    int a, b;
    bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

EdgeKey make_edge(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

TriMesh subdivide_mesh(const TriMesh& mesh, double max_edge) {
    TriMesh out = mesh;
    const double limit_sq = max_edge * max_edge;
    // Each pass splits every over-long edge at its midpoint and re-triangulates
    // the incident triangles, keeping the mesh conforming (and watertight).
    for (int pass = 0; pass < 64; ++pass) {
        std::map<EdgeKey, int> midpoint;  // edge -> new vertex index
        for (const auto& t : out.triangles) {
            for (int k = 0; k < 3; ++k) {
                int a = t[k], b = t[(k + 1) % 3];
                if ((out.vertices[a] - out.vertices[b]).squaredNorm() > limit_sq) {
                    EdgeKey e = make_edge(a, b);
                    if (!midpoint.count(e)) {
                        midpoint[e] = static_cast<int>(out.vertices.size());
                        out.vertices.push_back(0.5 * (out.vertices[a] + out.vertices[b]));
                    }
                }
            }
        }
        if (midpoint.empty()) break;

        std::vector<std::array<int, 3>> next;
        next.reserve(out.triangles.size() * 2);
        for (const auto& t : out.triangles) {
            int m[3];
            int split_count = 0;
            for (int k = 0; k < 3; ++k) {
                auto it = midpoint.find(make_edge(t[k], t[(k + 1) % 3]));
                m[k] = (it == midpoint.end()) ? -1 : it->second;
                if (m[k] >= 0) ++split_count;
            }
            if (split_count == 0) {
                next.push_back(t);
            } else if (split_count == 3) {
                next.push_back({t[0], m[0], m[2]});
                next.push_back({m[0], t[1], m[1]});
                next.push_back({m[2], m[1], t[2]});
                next.push_back({m[0], m[1], m[2]});
            } else if (split_count == 2) {
                // Rotate so the unsplit edge is (t[2], t[0]).
                int r = 0;
                for (int k = 0; k < 3; ++k) {
                    if (m[k] < 0) { r = (k + 1) % 3; break; }
                }
                int v0 = t[r], v1 = t[(r + 1) % 3], v2 = t[(r + 2) % 3];
                int m01 = m[r], m12 = m[(r + 1) % 3];
                next.push_back({v0, m01, m12});
                next.push_back({m01, v1, m12});
                next.push_back({v0, m12, v2});
            } else {
                int r = 0;
                for (int k = 0; k < 3; ++k) {
                    if (m[k] >= 0) { r = k; break; }
                }
                int v0 = t[r], v1 = t[(r + 1) % 3], v2 = t[(r + 2) % 3];
                next.push_back({v0, m[r], v2});
                next.push_back({m[r], v1, v2});
            }
        }
        out.triangles = std::move(next);
    }
    return out;
}

std::optional<TriMesh> load_obj(const std::string& path, std::string* error) {
    std::ifstream in(path);
    if (!in) {
        if (error) *error = "cannot open " + path;
        return std::nullopt;
    }
    TriMesh mesh;
    std::string line;
    std::vector<int> face;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.size() < 2) continue;
        if (line[0] == 'v' && std::isspace(static_cast<unsigned char>(line[1]))) {
            std::istringstream ss(line.substr(1));
            Vec3 v;
            if (!(ss >> v.x() >> v.y() >> v.z())) {
                if (error) *error = path + ": bad vertex on line " + std::to_string(line_no);
                return std::nullopt;
            }
            mesh.vertices.push_back(v);
        } else if (line[0] == 'f' && std::isspace(static_cast<unsigned char>(line[1]))) {
            std::istringstream ss(line.substr(1));
            face.clear();
            std::string token;
            while (ss >> token) {
                // "i", "i/t", "i//n", "i/t/n" forms; negative indices are relative.
                int idx = std::atoi(token.c_str());
                if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
                if (idx <= 0 || idx > static_cast<int>(mesh.vertices.size())) {
                    if (error) *error = path + ": bad face index on line " + std::to_string(line_no);
                    return std::nullopt;
                }
                face.push_back(idx - 1);
            }
            for (std::size_t k = 2; k < face.size(); ++k) {
                mesh.triangles.push_back({face[0], face[k - 1], face[k]});
            }
        }
    }
    if (mesh.vertices.empty() || mesh.triangles.empty()) {
        if (error) *error = path + ": no geometry";
        return std::nullopt;
    }
    return mesh;
}

bool save_obj(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) return false;
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    return static_cast<bool>(out);
}

Obb compute_obb(const TriMesh& mesh) {
    Obb obb;
    if (mesh.vertices.empty()) return obb;
    Vec3 mean = Vec3::Zero();
    for (const Vec3& v : mesh.vertices) mean += v;
    mean /= static_cast<double>(mesh.vertices.size());

    Mat3 cov = Mat3::Zero();
    for (const Vec3& v : mesh.vertices) {
        Vec3 d = v - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Mat3 axes = eig.eigenvectors();
    if (axes.determinant() < 0) axes.col(0) = -axes.col(0);

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& v : mesh.vertices) {
        Vec3 p = axes.transpose() * (v - mean);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    obb.axes = axes;
    obb.half_extents = 0.5 * (hi - lo);
    obb.center = mean + axes * (0.5 * (hi + lo));
    return obb;
}

std::uint64_t mesh_content_hash(const TriMesh& mesh) {
    // FNV-1a over the raw vertex and index bytes.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const Vec3& v : mesh.vertices) {
        double c[3] = {v.x(), v.y(), v.z()};
        mix(c, sizeof(c));
    }
    for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
    return h;
}

}  // namespace asmplan
