#include "symmetria/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace symmetria {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// Reads the next line that carries content, skipping blanks and '#' comments.
bool next_content_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        return true;
    }
    return false;
}

} // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    bbox_diag_ = vertices_.empty() ? 0.0 : (hi - lo).norm();

    validate();

    edges_.reserve(faces_.size() * 3);
    for (const auto& f : faces_) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            edges_.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

double TriangleMesh::face_area(int f) const {
    const Face& t = faces_.at(f);
    return triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

void TriangleMesh::validate() const {
    const int nv = n();
    if (nv < 3 || faces_.empty())
        throw ValidationError("mesh requires at least 3 vertices and 1 face");

    const double eps_area = 1e-12 * bbox_diag_ * bbox_diag_;
    for (size_t fi = 0; fi < faces_.size(); ++fi) {
        const Face& f = faces_[fi];
        for (int idx : f) {
            if (idx < 0 || idx >= nv)
                throw ValidationError("face " + std::to_string(fi) + ": vertex index " +
                                      std::to_string(idx) + " out of range [0, " +
                                      std::to_string(nv) + ")");
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw ValidationError("face " + std::to_string(fi) + ": repeated vertex index");
        double area = triangle_area(vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
        if (!(area > eps_area))
            throw ValidationError("face " + std::to_string(fi) + ": degenerate (area " +
                                  std::to_string(area) + ")");
    }

    // Edge-connectivity sweep over the face graph's vertex set.
    std::vector<std::vector<int>> adj(nv);
    for (const auto& f : faces_) {
        for (int e = 0; e < 3; ++e) {
            adj[f[e]].push_back(f[(e + 1) % 3]);
            adj[f[(e + 1) % 3]].push_back(f[e]);
        }
    }
    std::vector<char> seen(nv, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != nv)
        throw ValidationError("mesh is disconnected: reached " + std::to_string(reached) +
                              " of " + std::to_string(nv) + " vertices");
}

AdjacencyIndex::AdjacencyIndex(const TriangleMesh& mesh) {
    const int nv = mesh.n();
    one_ring_.assign(nv, {});
    vertex_faces_.assign(nv, {});

    std::map<std::pair<int, int>, std::vector<int>> edge_incidence;
    const auto& faces = mesh.faces();
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            one_ring_[a].push_back(b);
            one_ring_[b].push_back(a);
            edge_incidence[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(fi));
        }
        for (int idx : f) vertex_faces_[idx].push_back(static_cast<int>(fi));
    }

    for (auto& ring : one_ring_) {
        std::sort(ring.begin(), ring.end());
        ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    }

    const auto& edges = mesh.edge_list();
    edge_faces_.resize(edges.size());
    for (size_t ei = 0; ei < edges.size(); ++ei) {
        const auto& inc = edge_incidence.at(edges[ei]);
        if (inc.size() > 2)
            throw NonManifoldError("edge (" + std::to_string(edges[ei].first) + ", " +
                                   std::to_string(edges[ei].second) + ") has " +
                                   std::to_string(inc.size()) + " incident faces");
        edge_faces_[ei] = {inc[0], inc.size() == 2 ? inc[1] : -1};
    }
}

std::vector<int> AdjacencyIndex::two_ring(int v) const {
    std::vector<int> out = one_ring_.at(v);
    for (int w : one_ring_[v])
        out.insert(out.end(), one_ring_[w].begin(), one_ring_[w].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), v), out.end());
    return out;
}

AdjacencyIndex build_adjacency(const TriangleMesh& mesh) {
    return AdjacencyIndex(mesh);
}

namespace {

TriangleMesh parse_off(std::istream& in) {
    std::string line;
    int line_no = 0;
    if (!next_content_line(in, line, line_no))
        throw ParseError("OFF: empty file");

    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF")
        throw ParseError("OFF: missing OFF header at line " + std::to_string(line_no));

    long nv = -1, nf = -1, ne = -1;
    // Counts may share the header line or follow on their own line.
    if (!(header >> nv >> nf >> ne)) {
        if (!next_content_line(in, line, line_no))
            throw ParseError("OFF: missing counts line");
        std::istringstream counts(line);
        if (!(counts >> nv >> nf >> ne))
            throw ParseError("OFF: malformed counts at line " + std::to_string(line_no));
    }
    if (nv < 0 || nf < 0)
        throw ParseError("OFF: negative counts at line " + std::to_string(line_no));

    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, line_no))
            throw ParseError("OFF: expected " + std::to_string(nv) + " vertices, file ended at line " +
                             std::to_string(line_no));
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x >> y >> z))
            throw ParseError("OFF: malformed vertex at line " + std::to_string(line_no));
        vertices.emplace_back(x, y, z);
    }

    std::vector<Face> faces;
    faces.reserve(static_cast<size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        if (!next_content_line(in, line, line_no))
            throw ParseError("OFF: expected " + std::to_string(nf) + " faces, file ended at line " +
                             std::to_string(line_no));
        std::istringstream ls(line);
        int count;
        if (!(ls >> count))
            throw ParseError("OFF: malformed face at line " + std::to_string(line_no));
        if (count != 3)
            throw ParseError("OFF: face with " + std::to_string(count) +
                             " vertices at line " + std::to_string(line_no) + "; only triangles are supported");
        Face f;
        if (!(ls >> f[0] >> f[1] >> f[2]))
            throw ParseError("OFF: malformed face indices at line " + std::to_string(line_no));
        faces.push_back(f);
    }

    return TriangleMesh(std::move(vertices), std::move(faces));
}

int parse_obj_face_index(const std::string& token, long nv, int line_no) {
    // Accepts i, i/t, i//n, i/t/n. Only the vertex index is used.
    size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    long idx;
    try {
        size_t pos = 0;
        idx = std::stol(head, &pos);
        if (pos != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        throw ParseError("OBJ: malformed face index '" + token + "' at line " + std::to_string(line_no));
    }
    if (idx <= 0)
        throw ParseError("OBJ: non-positive face index " + std::to_string(idx) + " at line " +
                         std::to_string(line_no));
    // Out-of-range indices are a validation failure, reported with context here.
    if (idx > nv)
        throw ValidationError("OBJ: face index " + std::to_string(idx) + " exceeds vertex count " +
                              std::to_string(nv) + " at line " + std::to_string(line_no));
    return static_cast<int>(idx - 1);
}

TriangleMesh parse_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<std::pair<std::array<std::string, 3>, int>> raw_faces;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw ParseError("OBJ: malformed vertex at line " + std::to_string(line_no));
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::array<std::string, 3> t;
            if (!(ls >> t[0] >> t[1] >> t[2]))
                throw ParseError("OBJ: face with fewer than 3 indices at line " + std::to_string(line_no));
            std::string extra;
            if (ls >> extra)
                throw ParseError("OBJ: face with more than 3 vertices at line " + std::to_string(line_no) +
                                 "; only triangles are supported");
            raw_faces.emplace_back(t, line_no);
        }
        // All other records (vn, vt, usemtl, ...) are ignored.
    }

    const long nv = static_cast<long>(vertices.size());
    faces.reserve(raw_faces.size());
    for (const auto& [tokens, fline] : raw_faces) {
        Face f;
        for (int i = 0; i < 3; ++i) f[i] = parse_obj_face_index(tokens[i], nv, fline);
        faces.push_back(f);
    }

    return TriangleMesh(std::move(vertices), std::move(faces));
}

} // namespace

TriangleMesh parse_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open mesh file: " + path);
    switch (format) {
        case MeshFormat::Off: return parse_off(in);
        case MeshFormat::Obj: return parse_obj(in);
    }
    throw ParseError("unknown mesh format");
}

TriangleMesh parse_mesh(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "off") return parse_mesh(path, MeshFormat::Off);
    if (ext == "obj") return parse_mesh(path, MeshFormat::Obj);
    throw ParseError("unrecognized mesh extension '" + ext + "' for " + path +
                     " (expected .off or .obj)");
}

std::vector<double> vertex_areas(const TriangleMesh& mesh) {
    std::vector<double> areas(mesh.n(), 0.0);
    const auto& faces = mesh.faces();
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        double third = mesh.face_area(static_cast<int>(fi)) / 3.0;
        for (int idx : faces[fi]) areas[idx] += third;
    }
    return areas;
}

double surface_area(const TriangleMesh& mesh) {
    double total = 0.0;
    for (size_t fi = 0; fi < mesh.faces().size(); ++fi)
        total += mesh.face_area(static_cast<int>(fi));
    return total;
}

} // namespace symmetria
