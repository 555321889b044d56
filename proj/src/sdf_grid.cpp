#include "asmplan/sdf_grid.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace asmplan {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Region-based closest point (Ericson).
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double t = d1 / (d1 - d3);
        return (p - (a + t * ab)).norm();
    }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double t = d2 / (d2 - d6);
        return (p - (a + t * ac)).norm();
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + t * (c - b))).norm();
    }
    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return (p - (a + v * ab + w * ac)).norm();
}

namespace {

constexpr float kUnset = std::numeric_limits<float>::infinity();

// One fast-sweeping relaxation at a node given the current neighbor minima.
double eikonal_update(double a1, double h1, double a2, double h2, double a3, double h3) {
    struct Term { double a, h; };
    Term t[3] = {{a1, h1}, {a2, h2}, {a3, h3}};
    std::sort(t, t + 3, [](const Term& x, const Term& y) { return x.a < y.a; });

    double u = t[0].a + t[0].h;
    if (u <= t[1].a) return u;

    // Two-term quadratic.
    {
        double w1 = 1.0 / (t[0].h * t[0].h), w2 = 1.0 / (t[1].h * t[1].h);
        double A = w1 + w2;
        double B = -2.0 * (t[0].a * w1 + t[1].a * w2);
        double C = t[0].a * t[0].a * w1 + t[1].a * t[1].a * w2 - 1.0;
        double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
            u = (-B + std::sqrt(disc)) / (2.0 * A);
            if (u <= t[2].a) return u;
        }
    }
    double w1 = 1.0 / (t[0].h * t[0].h), w2 = 1.0 / (t[1].h * t[1].h), w3 = 1.0 / (t[2].h * t[2].h);
    double A = w1 + w2 + w3;
    double B = -2.0 * (t[0].a * w1 + t[1].a * w2 + t[2].a * w3);
    double C = t[0].a * t[0].a * w1 + t[1].a * t[1].a * w2 + t[2].a * t[2].a * w3 - 1.0;
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) disc = 0.0;
    return (-B + std::sqrt(disc)) / (2.0 * A);
}

void fast_sweep(SdfGrid& grid, std::vector<float>& u) {
    const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
    const double hx = grid.cell_size.x(), hy = grid.cell_size.y(), hz = grid.cell_size.z();
    const double big = 1e30;

    auto val = [&](int ix, int iy, int iz) -> double {
        return u[grid.index(ix, iy, iz)];
    };
    auto axis_min = [&](int ix, int iy, int iz, int axis) -> double {
        double lo = big, hi = big;
        if (axis == 0) {
            if (ix > 0) lo = val(ix - 1, iy, iz);
            if (ix < nx - 1) hi = val(ix + 1, iy, iz);
        } else if (axis == 1) {
            if (iy > 0) lo = val(ix, iy - 1, iz);
            if (iy < ny - 1) hi = val(ix, iy + 1, iz);
        } else {
            if (iz > 0) lo = val(ix, iy, iz - 1);
            if (iz < nz - 1) hi = val(ix, iy, iz + 1);
        }
        return std::min(lo, hi);
    };

    // Two cycles of the eight axis-ordered sweeps.
    for (int cycle = 0; cycle < 2; ++cycle) {
        for (int sweep = 0; sweep < 8; ++sweep) {
            int sx = (sweep & 1) ? -1 : 1;
            int sy = (sweep & 2) ? -1 : 1;
            int sz = (sweep & 4) ? -1 : 1;
            int x0 = sx > 0 ? 0 : nx - 1, x1 = sx > 0 ? nx : -1;
            int y0 = sy > 0 ? 0 : ny - 1, y1 = sy > 0 ? ny : -1;
            int z0 = sz > 0 ? 0 : nz - 1, z1 = sz > 0 ? nz : -1;
            for (int ix = x0; ix != x1; ix += sx) {
                for (int iy = y0; iy != y1; iy += sy) {
                    for (int iz = z0; iz != z1; iz += sz) {
                        double a1 = axis_min(ix, iy, iz, 0);
                        double a2 = axis_min(ix, iy, iz, 1);
                        double a3 = axis_min(ix, iy, iz, 2);
                        double cand = eikonal_update(a1, hx, a2, hy, a3, hz);
                        std::size_t idx = grid.index(ix, iy, iz);
                        if (cand < u[idx]) u[idx] = static_cast<float>(cand);
                    }
                }
            }
        }
    }
}

// Parity of the crossing count below each node along one axis, for every node
// column. Ray positions are nudged off the lattice to dodge edge/vertex hits.
void accumulate_parity_votes(const SdfGrid& grid, const TriMesh& mesh, int axis,
                             std::vector<std::uint8_t>& votes) {
    const int n[3] = {grid.dims[0], grid.dims[1], grid.dims[2]};
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const double eps1 = 1.37e-6 * grid.cell_size[a1];
    const double eps2 = 2.11e-6 * grid.cell_size[a2];

    // crossings[column] = sorted axis-coordinates where the surface is crossed
    std::vector<std::vector<double>> crossings(static_cast<std::size_t>(n[a1]) * n[a2]);

    for (const auto& tri : mesh.triangles) {
        const Vec3& p0 = mesh.vertices[tri[0]];
        const Vec3& p1 = mesh.vertices[tri[1]];
        const Vec3& p2 = mesh.vertices[tri[2]];
        double u0 = p0[a1], v0 = p0[a2];
        double u1 = p1[a1], v1 = p1[a2];
        double u2 = p2[a1], v2 = p2[a2];
        double denom = (u1 - u0) * (v2 - v0) - (u2 - u0) * (v1 - v0);
        if (std::abs(denom) < 1e-14) continue;  // edge-on to the ray

        double ulo = std::min({u0, u1, u2}), uhi = std::max({u0, u1, u2});
        double vlo = std::min({v0, v1, v2}), vhi = std::max({v0, v1, v2});
        int j0 = std::max(0, static_cast<int>(std::ceil((ulo - grid.origin[a1] - eps1) / grid.cell_size[a1])));
        int j1 = std::min(n[a1] - 1, static_cast<int>(std::floor((uhi - grid.origin[a1] - eps1) / grid.cell_size[a1])));
        int k0 = std::max(0, static_cast<int>(std::ceil((vlo - grid.origin[a2] - eps2) / grid.cell_size[a2])));
        int k1 = std::min(n[a2] - 1, static_cast<int>(std::floor((vhi - grid.origin[a2] - eps2) / grid.cell_size[a2])));

        for (int j = j0; j <= j1; ++j) {
            double uq = grid.origin[a1] + j * grid.cell_size[a1] + eps1;
            for (int k = k0; k <= k1; ++k) {
                double vq = grid.origin[a2] + k * grid.cell_size[a2] + eps2;
                double s = ((uq - u0) * (v2 - v0) - (vq - v0) * (u2 - u0)) / denom;
                double t = ((vq - v0) * (u1 - u0) - (uq - u0) * (v1 - v0)) / denom;
                if (s < 0.0 || t < 0.0 || s + t > 1.0) continue;
                double w = p0[axis] + s * (p1[axis] - p0[axis]) + t * (p2[axis] - p0[axis]);
                crossings[static_cast<std::size_t>(j) * n[a2] + k].push_back(w);
            }
        }
    }

    for (int j = 0; j < n[a1]; ++j) {
        for (int k = 0; k < n[a2]; ++k) {
            auto& xs = crossings[static_cast<std::size_t>(j) * n[a2] + k];
            if (xs.empty()) continue;
            std::sort(xs.begin(), xs.end());
            std::size_t next = 0;
            int parity = 0;
            for (int i = 0; i < n[axis]; ++i) {
                double coord = grid.origin[axis] + i * grid.cell_size[axis];
                while (next < xs.size() && xs[next] < coord) {
                    parity ^= 1;
                    ++next;
                }
                if (parity) {
                    int idx[3];
                    idx[axis] = i;
                    idx[a1] = j;
                    idx[a2] = k;
                    votes[grid.index(idx[0], idx[1], idx[2])] += 1;
                }
            }
        }
    }
}

}  // namespace

std::optional<SdfGrid> build_sdf_grid(const TriMesh& mesh, std::string* error) {
    if (mesh.empty()) {
        if (error) *error = "empty mesh";
        return std::nullopt;
    }
    if (!is_watertight(mesh)) {
        if (error) *error = "mesh is not watertight; signed distance is undefined";
        return std::nullopt;
    }

    SdfGrid grid;
    Aabb box = mesh.bounds();
    Vec3 extent = box.extent();
    for (int a = 0; a < 3; ++a) {
        double cell = std::min(0.05, extent[a] / 20.0);
        if (cell <= 0.0) cell = 0.05;  // flat axis fallback; meshes are volumetric
        grid.cell_size[a] = cell;
        int interior = static_cast<int>(std::ceil(extent[a] / cell));
        grid.dims[a] = interior + 1 + 2 * grid.padding;
        grid.origin[a] = box.min[a] - grid.padding * cell;
    }

    const std::size_t total = static_cast<std::size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2];
    std::vector<float> dist(total, kUnset);

    // Exact distances within a two-node band of each triangle.
    const int band = grid.padding;
    for (const auto& tri : mesh.triangles) {
        const Vec3& p0 = mesh.vertices[tri[0]];
        const Vec3& p1 = mesh.vertices[tri[1]];
        const Vec3& p2 = mesh.vertices[tri[2]];
        Aabb tb;
        tb.expand(p0);
        tb.expand(p1);
        tb.expand(p2);
        int lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::max(0, static_cast<int>(std::floor((tb.min[a] - grid.origin[a]) / grid.cell_size[a])) - band);
            hi[a] = std::min(grid.dims[a] - 1, static_cast<int>(std::ceil((tb.max[a] - grid.origin[a]) / grid.cell_size[a])) + band);
        }
        for (int ix = lo[0]; ix <= hi[0]; ++ix) {
            for (int iy = lo[1]; iy <= hi[1]; ++iy) {
                for (int iz = lo[2]; iz <= hi[2]; ++iz) {
                    Vec3 p = grid.node_position(ix, iy, iz);
                    double d = point_triangle_distance(p, p0, p1, p2);
                    std::size_t idx = grid.index(ix, iy, iz);
                    if (d < dist[idx]) dist[idx] = static_cast<float>(d);
                }
            }
        }
    }

    fast_sweep(grid, dist);

    std::vector<std::uint8_t> votes(total, 0);
    for (int axis = 0; axis < 3; ++axis) accumulate_parity_votes(grid, mesh, axis, votes);

    grid.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        grid.values[i] = votes[i] >= 2 ? -dist[i] : dist[i];
    }
    return grid;
}

namespace {

double trilinear(const SdfGrid& grid, const Vec3& p) {
    double fx = (p.x() - grid.origin.x()) / grid.cell_size.x();
    double fy = (p.y() - grid.origin.y()) / grid.cell_size.y();
    double fz = (p.z() - grid.origin.z()) / grid.cell_size.z();
    int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.dims[0] - 2);
    int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, grid.dims[1] - 2);
    int iz = std::clamp(static_cast<int>(std::floor(fz)), 0, grid.dims[2] - 2);
    double tx = std::clamp(fx - ix, 0.0, 1.0);
    double ty = std::clamp(fy - iy, 0.0, 1.0);
    double tz = std::clamp(fz - iz, 0.0, 1.0);

    auto v = [&](int dx, int dy, int dz) -> double {
        return grid.at(ix + dx, iy + dy, iz + dz);
    };
    double c00 = v(0, 0, 0) * (1 - tx) + v(1, 0, 0) * tx;
    double c10 = v(0, 1, 0) * (1 - tx) + v(1, 1, 0) * tx;
    double c01 = v(0, 0, 1) * (1 - tx) + v(1, 0, 1) * tx;
    double c11 = v(0, 1, 1) * (1 - tx) + v(1, 1, 1) * tx;
    double c0 = c00 * (1 - ty) + c10 * ty;
    double c1 = c01 * (1 - ty) + c11 * ty;
    return c0 * (1 - tz) + c1 * tz;
}

}  // namespace

double query_distance(const SdfGrid& grid, const Vec3& point) {
    Aabb box = grid.node_bounds();
    if (box.contains(point)) return trilinear(grid, point);
    Vec3 clamped = point.cwiseMax(box.min).cwiseMin(box.max);
    return (point - clamped).norm() + trilinear(grid, clamped);
}

Vec3 query_gradient(const SdfGrid& grid, const Vec3& point) {
    Aabb box = grid.node_bounds();
    Vec3 p = point;
    for (int a = 0; a < 3; ++a) {
        p[a] = std::clamp(p[a], box.min[a] + grid.cell_size[a], box.max[a] - grid.cell_size[a]);
    }
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 lo = p, hi = p;
        lo[a] -= grid.cell_size[a];
        hi[a] += grid.cell_size[a];
        g[a] = (trilinear(grid, hi) - trilinear(grid, lo)) / (2.0 * grid.cell_size[a]);
    }
    return g;
}

bool save_sdf_cache(const SdfGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write("SDF1", 4);
    double header[9] = {
        static_cast<double>(grid.dims[0]), static_cast<double>(grid.dims[1]),
        static_cast<double>(grid.dims[2]),
        grid.origin.x(), grid.origin.y(), grid.origin.z(),
        grid.cell_size.x(), grid.cell_size.y(), grid.cell_size.z(),
    };
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(float)));
    return static_cast<bool>(out);
}

std::optional<SdfGrid> load_sdf_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SDF1", 4) != 0) return std::nullopt;
    double header[9];
    if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) return std::nullopt;
    SdfGrid grid;
    for (int a = 0; a < 3; ++a) {
        grid.dims[a] = static_cast<int>(header[a]);
        if (grid.dims[a] < 2 || grid.dims[a] > 100000) return std::nullopt;
    }
    grid.origin = Vec3(header[3], header[4], header[5]);
    grid.cell_size = Vec3(header[6], header[7], header[8]);
    std::size_t total = static_cast<std::size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2];
    grid.values.resize(total);
    if (!in.read(reinterpret_cast<char*>(grid.values.data()),
                 static_cast<std::streamsize>(total * sizeof(float)))) {
        return std::nullopt;
    }
    return grid;
}

}  // namespace asmplan
