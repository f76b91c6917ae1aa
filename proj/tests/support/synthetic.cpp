#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace symmetria::testsupport {

namespace {

double bump_height(double x, double y, const std::vector<Bump>& bumps) {
    double z = 0.0;
    double ax = std::abs(x);
    for (const Bump& b : bumps) {
        double dx = ax - b.x;
        double dy = y - b.y;
        double s = std::sqrt(dx * dx + dy * dy) / b.radius;
        if (s < 1.0) {
            double c = std::cos(0.5 * M_PI * s);
            z += b.amplitude * c * c;
        }
    }
    return z;
}

} // namespace

const std::vector<Bump>& default_bumps() {
    // Asymmetric in y and in profile so the mirror is the only symmetry. Kept
    // gentle: strong bumps reshape the coarse heat-kernel field enough to
    // spawn extra maxima whose twins vanish under perturbation, which makes
    // the anchor assignment brittle.
    static const std::vector<Bump> bumps = {
        {0.80, 0.45, 0.38, 0.45},
        {0.95, 1.15, 0.30, -0.35},
        {0.55, 1.60, 0.33, 0.55},
    };
    return bumps;
}

MirroredSheet mirrored_sheet(int nu, int nv, double width, double height,
                             const std::vector<Bump>& bumps) {
    const double dx = 0.5 * width / nu;
    const double dy = height / nv;
    const int cols = nv + 1;
    const int n_right = (nu + 1) * cols; // seam column included
    const int n = (2 * nu + 1) * cols;

    std::vector<Vec3> vertices(n);
    std::vector<int> inv(n);

    auto right_id = [cols](int i, int j) { return i * cols + j; };
    auto left_id = [cols, n_right](int i, int j) { return n_right + (i - 1) * cols + j; };

    for (int i = 0; i <= nu; ++i) {
        for (int j = 0; j <= nv; ++j) {
            double x = i * dx;
            double y = j * dy;
            double z = bump_height(x, y, bumps);
            vertices[right_id(i, j)] = Vec3(x, y, z);
            if (i == 0) {
                inv[right_id(i, j)] = right_id(i, j);
            } else {
                // The left twin reuses the same y, z doubles with x negated,
                // so the two halves are bitwise mirror images.
                vertices[left_id(i, j)] = Vec3(-x, y, z);
                inv[right_id(i, j)] = left_id(i, j);
                inv[left_id(i, j)] = right_id(i, j);
            }
        }
    }

    std::vector<Face> faces;
    faces.reserve(4 * nu * nv);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            int v00 = right_id(i, j), v10 = right_id(i + 1, j);
            int v01 = right_id(i, j + 1), v11 = right_id(i + 1, j + 1);
            faces.push_back({v00, v10, v11});
            faces.push_back({v00, v11, v01});
            // Mirrored faces with reversed orientation.
            faces.push_back({inv[v00], inv[v11], inv[v10]});
            faces.push_back({inv[v00], inv[v01], inv[v11]});
        }
    }

    return {TriangleMesh(std::move(vertices), std::move(faces)), std::move(inv)};
}

TriangleMesh icosphere(int subdivisions, double radius) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    std::vector<Face> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},  {9, 8, 1},
    };

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            vertices.push_back(0.5 * (vertices[a] + vertices[b]));
            midpoint[key] = static_cast<int>(vertices.size()) - 1;
            return static_cast<int>(vertices.size()) - 1;
        };
        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const Face& f : faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    for (Vec3& v : vertices) v = v.normalized() * radius;
    return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh tetrahedron() {
    std::vector<Vec3> vertices = {
        {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    std::vector<Face> faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh edge_strip(int m) {
    std::vector<Vec3> vertices;
    for (int i = 0; i <= m; ++i) {
        vertices.emplace_back(i, 0.0, 0.0);
        vertices.emplace_back(i, 1.0, 0.0);
    }
    std::vector<Face> faces;
    for (int i = 0; i < m; ++i) {
        int a = 2 * i, b = 2 * i + 1, c = 2 * (i + 1), d = 2 * (i + 1) + 1;
        faces.push_back({a, c, d});
        faces.push_back({a, d, b});
    }
    return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh jittered_grid(int nx, int ny, unsigned seed) {
    std::uint64_t state = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    auto next01 = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };

    std::vector<Vec3> vertices;
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            vertices.emplace_back(i + 0.35 * (next01() - 0.5), j + 0.35 * (next01() - 0.5),
                                  0.45 * (next01() - 0.5));

    std::vector<Face> faces;
    auto id = [ny](int i, int j) { return i * (ny + 1) + j; };
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh(std::move(vertices), std::move(faces));
}

HoledSheet punch_hole(const MirroredSheet& sheet, double cx, double cy, double radius) {
    const TriangleMesh& mesh = sheet.mesh;
    double total_area = surface_area(mesh);

    std::vector<Face> kept_faces;
    double removed = 0.0;
    for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
        const Face& face = mesh.faces()[f];
        Vec3 centroid = (mesh.vertices()[face[0]] + mesh.vertices()[face[1]] +
                         mesh.vertices()[face[2]]) /
                        3.0;
        bool inside = centroid.x() > 0.0 &&
                      std::hypot(centroid.x() - cx, centroid.y() - cy) < radius;
        if (inside)
            removed += mesh.face_area(static_cast<int>(f));
        else
            kept_faces.push_back(face);
    }

    // Drop vertices that lost every face.
    std::vector<int> remap(mesh.n(), -1);
    std::vector<Vec3> kept_vertices;
    for (const Face& face : kept_faces) {
        for (int v : face) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(kept_vertices.size());
                kept_vertices.push_back(mesh.vertices()[v]);
            }
        }
    }
    for (Face& face : kept_faces)
        for (int& v : face) v = remap[v];

    HoledSheet out{TriangleMesh(std::move(kept_vertices), std::move(kept_faces)), {}, 0.0};
    out.removed_area_fraction = removed / total_area;
    for (int v = 0; v < mesh.n(); ++v) {
        int partner = sheet.involution[v];
        if (remap[v] >= 0 && remap[partner] >= 0)
            out.surviving_pairs.emplace_back(remap[v], remap[partner]);
    }
    return out;
}

void write_off(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "OFF\n" << mesh.n() << " " << mesh.faces().size() << " 0\n";
    for (const Vec3& v : mesh.vertices()) out << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void write_pairs(const std::string& path, const std::vector<std::pair<int, int>>& pairs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (auto [a, b] : pairs) out << a << " " << b << "\n";
}

} // namespace symmetria::testsupport
