#include "polyreg/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polyreg {

using json = nlohmann::ordered_json;
using std::numbers::pi;

double Rat64::value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

Rat64 Rat64::recognize(double x, std::int64_t max_den, double tol)
{
    for (std::int64_t q = 1; q <= max_den; ++q) {
        const double scaled = x * static_cast<double>(q);
        const double p = std::round(scaled);
        if (std::abs(scaled - p) <= tol * static_cast<double>(q)) {
            return Rat64{static_cast<std::int64_t>(p), q};
        }
    }
    return Rat64{};
}

namespace {

Vec3 rodrigues(const Vec3& v, const Vec3& axis, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + axis.cross(v) * s + axis * (axis.dot(v)) * (1.0 - c);
}

double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c)
{
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double numer = a.dot(b.cross(c));
    const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    return 2.0 * std::atan2(numer, denom);
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 d = b - a;
    const double t = std::clamp(d.dot(p - a) / d.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

struct FacePlaneBasis {
    Vec3 origin, e1, e2, n;
    Vec2 project(const Vec3& p) const { return Vec2((p - origin).dot(e1), (p - origin).dot(e2)); }
};

FacePlaneBasis face_basis(const std::vector<Vec3>& verts, const std::vector<int>& loop, const Vec3& normal)
{
    FacePlaneBasis b;
    b.origin = verts[loop[0]];
    b.n = normal;
    Vec3 seed = (verts[loop[1]] - b.origin).normalized();
    b.e1 = (seed - normal * normal.dot(seed)).normalized();
    b.e2 = normal.cross(b.e1);
    return b;
}

Vec3 newell_normal(const std::vector<Vec3>& verts, const std::vector<int>& loop)
{
    Vec3 n = Vec3::Zero();
    for (size_t i = 0; i < loop.size(); ++i) {
        const Vec3& p = verts[loop[i]];
        const Vec3& q = verts[loop[(i + 1) % loop.size()]];
        n += p.cross(q);
    }
    const double len = n.norm();
    if (len < 1e-14) throw std::runtime_error("degenerate face (zero normal)");
    return n / len;
}

} // namespace

Vec3 CapArc::point(double t) const { return rodrigues(start_dir, axis, t * angle); }

PolytopeGeometry make_polytope_2d(std::vector<Vec2> vertices, std::vector<std::vector<int>> loops,
                                  std::map<int, BcKind> bc)
{
    PolytopeGeometry g;
    g.dimension = 2;
    g.vertices.reserve(vertices.size());
    for (const Vec2& v : vertices) g.vertices.emplace_back(v.x(), v.y(), 0.0);
    g.loops = std::move(loops);

    int side_id = 0;
    for (size_t li = 0; li < g.loops.size(); ++li) {
        const auto& loop = g.loops[li];
        if (loop.size() < 3) throw std::runtime_error("loop with fewer than 3 vertices");
        for (size_t k = 0; k < loop.size(); ++k) {
            Side2d s;
            s.loop = static_cast<int>(li);
            s.pos = static_cast<int>(k);
            s.v0 = loop[k];
            s.v1 = loop[(k + 1) % loop.size()];
            auto it = bc.find(side_id);
            s.bc = it != bc.end() ? it->second : BcKind::Dirichlet;
            g.sides.push_back(s);
            ++side_id;
        }
    }
    g.finalize();
    return g;
}

PolytopeGeometry make_polytope_3d(std::vector<Vec3> vertices, std::vector<std::vector<int>> face_loops,
                                  std::map<int, BcKind> bc)
{
    PolytopeGeometry g;
    g.dimension = 3;
    g.vertices = std::move(vertices);
    g.faces.reserve(face_loops.size());
    for (size_t fi = 0; fi < face_loops.size(); ++fi) {
        Face3d f;
        f.loop = face_loops[fi];
        auto it = bc.find(static_cast<int>(fi));
        f.bc = it != bc.end() ? it->second : BcKind::Dirichlet;
        g.faces.push_back(std::move(f));
    }
    g.finalize();
    return g;
}

void PolytopeGeometry::finalize()
{
    for (const Vec3& v : vertices)
        if (!v.allFinite()) throw std::runtime_error("non-finite vertex coordinate");

    if (dimension == 2) {
        // corner occurrences, merged by vertex position
        std::map<std::pair<long long, long long>, int> by_pos;
        auto pos_key = [&](const Vec3& p) {
            return std::make_pair(static_cast<long long>(std::llround(p.x() * 1e9)),
                                  static_cast<long long>(std::llround(p.y() * 1e9)));
        };
        int global_side = 0;
        for (const auto& loop : loops) {
            const int n = static_cast<int>(loop.size());
            for (int k = 0; k < n; ++k) {
                const int side_out = global_side + k;
                const int side_in = global_side + (k + n - 1) % n;
                const Vec2 v = vertex2(loop[k]);
                const Vec2 u = vertex2(loop[(k + n - 1) % n]);
                const Vec2 w = vertex2(loop[(k + 1) % n]);
                const Vec2 d_in = v - u, d_out = w - v;
                if (d_in.norm() < 1e-12 || d_out.norm() < 1e-12)
                    throw std::runtime_error("degenerate (zero-length) side");
                CornerOccurrence occ;
                occ.side_in = side_in;
                occ.side_out = side_out;
                occ.opening = interior_angle_ccw(d_in, d_out);
                occ.frame_angle = std::atan2(d_out.y(), d_out.x());

                auto key = pos_key(vertices[loop[k]]);
                auto it = by_pos.find(key);
                if (it == by_pos.end()) {
                    Corner c;
                    c.id = static_cast<int>(corners.size());
                    c.vertex = loop[k];
                    c.occurrences.push_back(occ);
                    by_pos[key] = c.id;
                    corners.push_back(std::move(c));
                } else {
                    corners[it->second].occurrences.push_back(occ);
                }
            }
            global_side += n;
        }
        for (Corner& c : corners) {
            c.opening = 0.0;
            for (const auto& occ : c.occurrences) c.opening += occ.opening;
            if (!(c.opening > 1e-12 && c.opening <= 2.0 * pi + 1e-9)) {
                std::ostringstream os;
                os << "corner opening " << c.opening << " outside (0, 2pi] at corner " << c.id;
                throw std::runtime_error(os.str());
            }
            c.opening = std::min(c.opening, 2.0 * pi);
            c.opening_over_pi = Rat64::recognize(c.opening / pi);
        }
        return;
    }

    if (dimension != 3) throw std::runtime_error("dimension must be 2 or 3");

    // face normals, planarity, outward orientation via total signed volume
    double vol6 = 0.0;
    for (Face3d& f : faces) {
        if (f.loop.size() < 3) throw std::runtime_error("face with fewer than 3 vertices");
        f.normal = newell_normal(vertices, f.loop);
        f.plane_offset = f.normal.dot(vertices[f.loop[0]]);
        double scale = 0.0;
        for (int v : f.loop) scale = std::max(scale, (vertices[v] - vertices[f.loop[0]]).norm());
        for (int v : f.loop) {
            if (std::abs(f.normal.dot(vertices[v]) - f.plane_offset) > 1e-9 * std::max(scale, 1.0))
                throw std::runtime_error("non-planar face");
        }
        for (size_t k = 0; k + 2 < f.loop.size(); ++k) {
            const Vec3& a = vertices[f.loop[0]];
            const Vec3& b = vertices[f.loop[k + 1]];
            const Vec3& c = vertices[f.loop[k + 2]];
            vol6 += a.dot(b.cross(c));
        }
    }
    if (vol6 < 0.0) {  // consistently inward: flip every face
        for (Face3d& f : faces) {
            std::reverse(f.loop.begin(), f.loop.end());
            f.normal = -f.normal;
            f.plane_offset = -f.plane_offset;
        }
    } else if (vol6 == 0.0) {
        throw std::runtime_error("polyhedron has zero volume");
    }

    // edges: vertex pairs shared by exactly two faces
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& loop = faces[fi].loop;
        for (size_t k = 0; k < loop.size(); ++k) {
            int a = loop[k], b = loop[(k + 1) % loop.size()];
            if (a == b) throw std::runtime_error("degenerate (zero-length) edge in face loop");
            edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(fi));
        }
    }
    for (auto& [vv, incident] : edge_faces) {
        if (incident.size() != 2) {
            std::ostringstream os;
            os << "edge (" << vv.first << "," << vv.second << ") shared by " << incident.size()
               << " faces; expected 2";
            throw std::runtime_error(os.str());
        }
        EdgeGeom e;
        e.id = static_cast<int>(edges.size());
        e.v0 = vv.first;
        e.v1 = vv.second;
        e.face_a = incident[0];
        e.face_b = incident[1];
        e.tangent = (vertices[e.v1] - vertices[e.v0]).normalized();
        edges.push_back(e);
    }

    // corners: every vertex that appears in some face
    std::set<int> used;
    for (const Face3d& f : faces)
        for (int v : f.loop) used.insert(v);
    for (int v : used) {
        Corner c;
        c.id = static_cast<int>(corners.size());
        c.vertex = v;
        for (size_t fi = 0; fi < faces.size(); ++fi)
            if (std::count(faces[fi].loop.begin(), faces[fi].loop.end(), v))
                c.faces.push_back(static_cast<int>(fi));
        for (const EdgeGeom& e : edges)
            if (e.v0 == v || e.v1 == v) c.edges.push_back(e.id);
        corners.push_back(std::move(c));
    }

    // dihedral openings, measured through the interior by probing
    for (EdgeGeom& e : edges) {
        const Vec3 mid = 0.5 * (vertices[e.v0] + vertices[e.v1]);
        const double elen = (vertices[e.v1] - vertices[e.v0]).norm();
        auto in_face_dir = [&](int fi) {
            const Face3d& f = faces[fi];
            Vec3 w = f.normal.cross(e.tangent);
            FacePlaneBasis basis = face_basis(vertices, f.loop, f.normal);
            std::vector<Vec2> loop2;
            loop2.reserve(f.loop.size());
            for (int v : f.loop) loop2.push_back(basis.project(vertices[v]));
            const double h = 1e-4 * elen;
            if (point_in_loop(loop2, basis.project(mid + h * w))) return w;
            if (point_in_loop(loop2, basis.project(mid - h * w))) return Vec3(-w);
            throw std::runtime_error("edge with inconsistent face normals");
        };
        e.wedge_a = in_face_dir(e.face_a);
        e.wedge_b = in_face_dir(e.face_b);
        double phi = std::atan2(e.wedge_b.dot(e.tangent.cross(e.wedge_a)), e.wedge_b.dot(e.wedge_a));
        if (phi < 0) phi += 2.0 * pi;
        const double h = 1e-4 * elen;
        const Vec3 probe_pos = mid + h * rodrigues(e.wedge_a, e.tangent, 0.5 * phi);
        const Vec3 probe_neg = mid + h * rodrigues(e.wedge_a, e.tangent, -0.5 * (2.0 * pi - phi));
        if (contains(probe_pos)) {
            e.opening = phi;
        } else if (contains(probe_neg)) {
            e.opening = 2.0 * pi - phi;
        } else {
            throw std::runtime_error("edge with inconsistent face normals (no interior side found)");
        }
        if (!(e.opening > 1e-12 && e.opening <= 2.0 * pi + 1e-9))
            throw std::runtime_error("edge opening outside (0, 2pi]");
        e.opening = std::min(e.opening, 2.0 * pi);
        e.opening_over_pi = Rat64::recognize(e.opening / pi);
    }
}

double PolytopeGeometry::corner_opening(int corner_id) const
{
    return corner(corner_id).opening;
}

double PolytopeGeometry::edge_opening(int edge_id) const
{
    if (dimension != 3) throw std::runtime_error("edge_opening: 3D geometry required");
    return edge(edge_id).opening;
}

const Corner& PolytopeGeometry::corner(int corner_id) const
{
    if (corner_id < 0 || corner_id >= static_cast<int>(corners.size()))
        throw std::out_of_range("unknown corner id");
    return corners[corner_id];
}

const EdgeGeom& PolytopeGeometry::edge(int edge_id) const
{
    if (edge_id < 0 || edge_id >= static_cast<int>(edges.size()))
        throw std::out_of_range("unknown edge id");
    return edges[edge_id];
}

bool PolytopeGeometry::contains(const Vec3& p) const
{
    if (dimension == 2) {
        bool inside = false;
        for (const auto& loop : loops) {
            std::vector<Vec2> pts;
            pts.reserve(loop.size());
            for (int v : loop) pts.push_back(vertex2(v));
            if (point_in_loop(pts, p.head<2>())) inside = !inside;
        }
        return inside;
    }
    double w = 0.0;
    for (const Face3d& f : faces) {
        for (size_t k = 0; k + 2 < f.loop.size(); ++k) {
            w += triangle_solid_angle(vertices[f.loop[0]] - p, vertices[f.loop[k + 1]] - p,
                                      vertices[f.loop[k + 2]] - p);
        }
    }
    return w > 2.0 * pi;  // winding number > 1/2
}

double PolytopeGeometry::min_corner_pair_distance() const
{
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < corners.size(); ++i)
        for (size_t j = i + 1; j < corners.size(); ++j)
            d = std::min(d, (vertices[corners[i].vertex] - vertices[corners[j].vertex]).norm());
    return d;
}

PolytopeGeometry::Distances PolytopeGeometry::distances(const Vec3& p) const
{
    Distances d;
    d.r_c.resize(corners.size());
    for (size_t i = 0; i < corners.size(); ++i) d.r_c[i] = (p - vertices[corners[i].vertex]).norm();
    if (dimension == 3) {
        d.r_e.resize(edges.size());
        for (size_t i = 0; i < edges.size(); ++i)
            d.r_e[i] = segment_distance(p, vertices[edges[i].v0], vertices[edges[i].v1]);
        for (const Corner& c : corners) {
            for (int eid : c.edges) {
                if (d.r_c[c.id] == 0.0)
                    throw std::domain_error("rho_ce requested at the corner itself");
                d.rho_ce[{c.id, eid}] = d.r_e[eid] / d.r_c[c.id];
            }
        }
    }
    return d;
}

CornerCone PolytopeGeometry::corner_cone(int corner_id) const
{
    if (dimension != 3) throw std::runtime_error("corner_cone: 3D geometry required");
    const Corner& c = corner(corner_id);
    if (c.faces.size() < 3) throw std::runtime_error("corner with fewer than 3 incident faces");
    const Vec3 apex = vertices[c.vertex];

    CornerCone cone;
    cone.apex = apex;
    std::map<int, Vec3> edge_dir;
    for (int eid : c.edges) {
        const EdgeGeom& e = edges[eid];
        const int other = (e.v0 == c.vertex) ? e.v1 : e.v0;
        edge_dir[eid] = (vertices[other] - apex).normalized();
    }

    // one arc per incident face, endpoints at the face's two edges through the corner
    std::vector<CapArc> arcs;
    for (int fi : c.faces) {
        const Face3d& f = faces[fi];
        const int n = static_cast<int>(f.loop.size());
        int k = -1;
        for (int i = 0; i < n; ++i)
            if (f.loop[i] == c.vertex) { k = i; break; }
        const int vprev = f.loop[(k + n - 1) % n];
        const int vnext = f.loop[(k + 1) % n];
        auto find_edge = [&](int a, int b) {
            for (int eid : c.edges)
                if ((edges[eid].v0 == std::min(a, b)) && (edges[eid].v1 == std::max(a, b))) return eid;
            throw std::runtime_error("corner incidence inconsistent");
        };
        CapArc arc;
        arc.face = fi;
        arc.bc = f.bc;
        arc.edge_start = find_edge(c.vertex, vnext);
        arc.edge_end = find_edge(c.vertex, vprev);
        const Vec3 a = (vertices[vnext] - apex).normalized();
        const Vec3 b = (vertices[vprev] - apex).normalized();
        // in-face angle at the corner
        FacePlaneBasis basis = face_basis(vertices, f.loop, f.normal);
        std::vector<Vec2> lp;
        for (int v : f.loop) lp.push_back(basis.project(vertices[v]));
        const Vec2 v2 = lp[k], u2 = lp[(k + n - 1) % n], w2 = lp[(k + 1) % n];
        double gamma = (shoelace_area(lp) > 0.0) ? interior_angle_ccw(v2 - u2, w2 - v2)
                                                 : interior_angle_ccw(v2 - w2, u2 - v2);
        arc.start_dir = a;
        arc.angle = gamma;
        arc.axis = f.normal;
        if ((rodrigues(a, arc.axis, gamma) - b).norm() > 1e-8) {
            arc.axis = -f.normal;
            if ((rodrigues(a, arc.axis, gamma) - b).norm() > 1e-8)
                throw std::runtime_error("corner cone arc construction failed");
        }
        arcs.push_back(arc);
    }

    // chain arcs into a single cycle
    std::vector<bool> usedarc(arcs.size(), false);
    cone.arcs.push_back(arcs[0]);
    usedarc[0] = true;
    while (cone.arcs.size() < arcs.size()) {
        const int want = cone.arcs.back().edge_end;
        bool found = false;
        for (size_t i = 0; i < arcs.size(); ++i) {
            if (usedarc[i]) continue;
            CapArc a = arcs[i];
            if (a.edge_start == want) {
                cone.arcs.push_back(a);
                usedarc[i] = true;
                found = true;
                break;
            }
            if (a.edge_end == want) {  // reverse the arc
                CapArc r = a;
                r.start_dir = a.point(1.0);
                r.axis = -a.axis;
                r.edge_start = a.edge_end;
                r.edge_end = a.edge_start;
                cone.arcs.push_back(r);
                usedarc[i] = true;
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("corner incidence does not form a single cycle");
    }
    if (cone.arcs.back().edge_end != cone.arcs.front().edge_start)
        throw std::runtime_error("corner incidence cycle does not close");

    for (const CapArc& a : cone.arcs) {
        cone.edge_ids.push_back(a.edge_start);
        cone.edge_dirs.push_back(edge_dir[a.edge_start]);
    }
    return cone;
}

// ---------------------------------------------------------------------------
// JSON, builtins
// ---------------------------------------------------------------------------

namespace {

BcKind parse_bc(const std::string& s)
{
    if (s == "dirichlet") return BcKind::Dirichlet;
    if (s == "neumann") return BcKind::Neumann;
    throw std::runtime_error("bc must be 'dirichlet' or 'neumann', got '" + s + "'");
}

} // namespace

PolytopeGeometry PolytopeGeometry::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("geometry document is not valid JSON: ") + e.what());
    }
    if (!j.contains("dimension")) throw std::runtime_error("geometry document missing 'dimension'");
    const int dim = j["dimension"].get<int>();
    if (!j.contains("vertices")) throw std::runtime_error("geometry document missing 'vertices'");

    std::map<int, BcKind> bc;
    if (j.contains("bc"))
        for (auto& [key, val] : j["bc"].items()) bc[std::stoi(key)] = parse_bc(val.get<std::string>());

    if (dim == 2) {
        std::vector<Vec2> verts;
        for (const auto& v : j["vertices"]) {
            if (v.size() != 2) throw std::runtime_error("2D vertex must have 2 coordinates");
            verts.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        if (!j.contains("loops")) throw std::runtime_error("2D geometry document missing 'loops'");
        std::vector<std::vector<int>> loops = j["loops"].get<std::vector<std::vector<int>>>();
        return make_polytope_2d(std::move(verts), std::move(loops), std::move(bc));
    }
    if (dim == 3) {
        std::vector<Vec3> verts;
        for (const auto& v : j["vertices"]) {
            if (v.size() != 3) throw std::runtime_error("3D vertex must have 3 coordinates");
            verts.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        }
        if (!j.contains("faces")) throw std::runtime_error("3D geometry document missing 'faces'");
        std::vector<std::vector<int>> fl = j["faces"].get<std::vector<std::vector<int>>>();
        return make_polytope_3d(std::move(verts), std::move(fl), std::move(bc));
    }
    throw std::runtime_error("dimension must be 2 or 3");
}

PolytopeGeometry PolytopeGeometry::from_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open geometry file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string PolytopeGeometry::to_json_text() const
{
    json j;
    j["dimension"] = dimension;
    json jv = json::array();
    for (const Vec3& v : vertices) {
        if (dimension == 2) jv.push_back({v.x(), v.y()});
        else jv.push_back({v.x(), v.y(), v.z()});
    }
    j["vertices"] = jv;
    if (dimension == 2) {
        j["loops"] = loops;
        json jb = json::object();
        for (size_t i = 0; i < sides.size(); ++i)
            jb[std::to_string(i)] = sides[i].bc == BcKind::Dirichlet ? "dirichlet" : "neumann";
        j["bc"] = jb;
    } else {
        json jf = json::array();
        for (const Face3d& f : faces) jf.push_back(f.loop);
        j["faces"] = jf;
        json jb = json::object();
        for (size_t i = 0; i < faces.size(); ++i)
            jb[std::to_string(i)] = faces[i].bc == BcKind::Dirichlet ? "dirichlet" : "neumann";
        j["bc"] = jb;
    }
    return j.dump(2);
}

std::vector<std::string> PolytopeGeometry::builtin_names()
{
    return {"square", "lshape", "slit_square", "cube", "thick_l", "fichera"};
}

PolytopeGeometry PolytopeGeometry::builtin(const std::string& name)
{
    if (name == "square") {
        return make_polytope_2d({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
    }
    if (name == "lshape") {
        return make_polytope_2d({{0, 0}, {1, 0}, {1, 1}, {-1, 1}, {-1, -1}, {0, -1}},
                                {{0, 1, 2, 3, 4, 5}});
    }
    if (name == "slit_square") {
        // slit from the boundary point (1,0) to the tip at the center
        return make_polytope_2d({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {1, 0}, {0, 0}},
                                {{0, 1, 2, 3, 4, 5, 4}});
    }
    if (name == "cube") {
        std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
        std::vector<std::vector<int>> f = {
            {0, 3, 2, 1},  // z = 0
            {4, 5, 6, 7},  // z = 1
            {0, 1, 5, 4},  // y = 0
            {2, 3, 7, 6},  // y = 1
            {0, 4, 7, 3},  // x = 0
            {1, 2, 6, 5},  // x = 1
        };
        return make_polytope_3d(std::move(v), std::move(f));
    }
    if (name == "thick_l") {
        // L-shaped footprint extruded to height 1
        std::vector<Vec2> fp = {{0, 0}, {1, 0}, {1, 1}, {-1, 1}, {-1, -1}, {0, -1}};
        std::vector<Vec3> v;
        for (const Vec2& p : fp) v.emplace_back(p.x(), p.y(), 0.0);
        for (const Vec2& p : fp) v.emplace_back(p.x(), p.y(), 1.0);
        std::vector<std::vector<int>> f;
        f.push_back({5, 4, 3, 2, 1, 0});          // bottom, outward -z
        f.push_back({6, 7, 8, 9, 10, 11});        // top, outward +z
        for (int k = 0; k < 6; ++k) {
            int a = k, b = (k + 1) % 6;
            f.push_back({a, b, b + 6, a + 6});
        }
        return make_polytope_3d(std::move(v), std::move(f));
    }
    if (name == "fichera") {
        // (-1,1)^3 minus the closed octant [0,1]^3
        std::vector<Vec3> v = {
            {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},   // 0..3  z=-1 square
            {-1, -1, 1},  {1, -1, 1},  {-1, 1, 1},                // 4..6
            {0, 0, 0},                                            // 7 notch corner
            {1, 0, 0},   {0, 1, 0},   {0, 0, 1},                  // 8..10
            {1, 1, 0},   {1, 0, 1},   {0, 1, 1},                  // 11..13
        };
        std::vector<std::vector<int>> f = {
            {0, 3, 2, 1},                  // z = -1
            {0, 1, 5, 4},                  // y = -1
            {0, 4, 6, 3},                  // x = -1
            {1, 2, 11, 8, 12, 5},          // x = +1 (L-shaped)
            {3, 6, 13, 9, 11, 2},          // y = +1 (L-shaped)
            {4, 5, 12, 10, 13, 6},         // z = +1 (L-shaped)
            {7, 9, 13, 10},                // x = 0 notch face
            {7, 10, 12, 8},                // y = 0 notch face
            {7, 8, 11, 9},                 // z = 0 notch face
        };
        return make_polytope_3d(std::move(v), std::move(f));
    }
    throw std::runtime_error("unknown builtin geometry: " + name);
}

// ---------------------------------------------------------------------------
// Neighborhood decomposition
// ---------------------------------------------------------------------------

std::vector<RegionLabel> NeighborhoodDecomposition::classify(const Vec3& p) const
{
    std::vector<RegionLabel> labels;
    const auto d = geom->distances(p);
    const double e = eps, e2 = eps_second;

    if (geom->dimension == 2) {
        for (const Corner& c : geom->corners)
            if (d.r_c[c.id] <= e) labels.push_back({RegionKind::Corner, c.id, -1});
        bool smooth = true;
        for (const Corner& c : geom->corners)
            if (d.r_c[c.id] < 0.5 * e) smooth = false;
        if (smooth) labels.push_back({RegionKind::Smooth, -1, -1});
        return labels;
    }

    for (const Corner& c : geom->corners) {
        if (d.r_c[c.id] > e) continue;
        bool away_from_edges = true;
        for (int eid : c.edges)
            if (d.rho_ce.at({c.id, eid}) < 0.5 * e) away_from_edges = false;
        if (away_from_edges) labels.push_back({RegionKind::Corner, c.id, -1});
    }
    for (const EdgeGeom& eg : geom->edges) {
        if (d.r_e[eg.id] > e) continue;
        bool away_from_corners = true;
        for (const Corner& c : geom->corners)
            if ((c.vertex == eg.v0 || c.vertex == eg.v1) && d.r_c[c.id] < 0.5 * e)
                away_from_corners = false;
        // nearest-edge clause; without it two edge tubes meeting at a corner
        // would overlap just outside the corner collar, at any epsilon
        bool nearest = true;
        for (const EdgeGeom& other : geom->edges)
            if (other.id != eg.id && d.r_e[other.id] < d.r_e[eg.id]) nearest = false;
        if (away_from_corners && nearest) labels.push_back({RegionKind::Edge, -1, eg.id});
    }
    for (const Corner& c : geom->corners)
        for (int eid : c.edges)
            if (d.r_c[c.id] <= e && d.rho_ce.at({c.id, eid}) <= e)
                labels.push_back({RegionKind::EdgeVertex, c.id, eid});

    bool smooth = true;
    for (const Corner& c : geom->corners)
        if (d.r_c[c.id] < e2) smooth = false;
    for (const EdgeGeom& eg : geom->edges)
        if (d.r_e[eg.id] < e2) smooth = false;
    if (smooth) labels.push_back({RegionKind::Smooth, -1, -1});
    return labels;
}

NeighborhoodDecomposition decompose_neighborhoods(const PolytopeGeometry& geom, double eps,
                                                  double eps_prime, double eps_second)
{
    if (!(0.0 < eps_second && eps_second < eps && eps < eps_prime))
        throw std::invalid_argument("decompose_neighborhoods requires 0 < eps'' < eps < eps'");

    // corner-ball disjointness
    for (size_t i = 0; i < geom.corners.size(); ++i) {
        for (size_t j = i + 1; j < geom.corners.size(); ++j) {
            const double dij =
                (geom.vertices[geom.corners[i].vertex] - geom.vertices[geom.corners[j].vertex]).norm();
            if (dij <= 2.0 * eps_prime) {
                std::ostringstream os;
                os << "epsilon too large: corner neighborhoods of corners " << i << " and " << j
                   << " are not disjoint (distance " << dij << " <= 2*eps' = " << 2.0 * eps_prime << ")";
                throw std::runtime_error(os.str());
            }
        }
    }
    if (geom.dimension == 3) {
        // edge-vertex neighborhoods at a common corner stay disjoint iff edge
        // directions subtend an angle larger than 2*asin(eps')
        for (const Corner& c : geom.corners) {
            std::vector<std::pair<int, Vec3>> dirs;
            const Vec3 apex = geom.vertices[c.vertex];
            for (int eid : c.edges) {
                const EdgeGeom& e = geom.edges[eid];
                const int other = (e.v0 == c.vertex) ? e.v1 : e.v0;
                dirs.emplace_back(eid, (geom.vertices[other] - apex).normalized());
            }
            const double min_angle = 2.0 * std::asin(std::min(1.0, eps_prime));
            for (size_t i = 0; i < dirs.size(); ++i) {
                for (size_t j = i + 1; j < dirs.size(); ++j) {
                    const double ang = std::acos(std::clamp(dirs[i].second.dot(dirs[j].second), -1.0, 1.0));
                    if (ang <= min_angle) {
                        std::ostringstream os;
                        os << "epsilon too large: edge-vertex neighborhoods of edges " << dirs[i].first
                           << " and " << dirs[j].first << " at corner " << c.id
                           << " are not disjoint (angle " << ang << " <= " << min_angle << ")";
                        throw std::runtime_error(os.str());
                    }
                }
            }
        }
        // sampled disjointness of distinct edge neighborhoods
        NeighborhoodDecomposition probe{eps, eps_prime, eps_second, &geom};
        for (const EdgeGeom& eg : geom.edges) {
            const Vec3 a = geom.vertices[eg.v0], b = geom.vertices[eg.v1];
            for (int it = 1; it <= 7; ++it) {
                const double t = it / 8.0;
                const Vec3 base = a + t * (b - a);
                for (int ir = 0; ir < 3; ++ir) {
                    const double rr = eps * (0.15 + 0.4 * ir);
                    for (int ip = 0; ip < 8; ++ip) {
                        const double phi = eg.opening * (ip + 0.5) / 8.0;
                        const Vec3 p = base + rr * rodrigues(eg.wedge_a, eg.tangent, phi);
                        if (!geom.contains(p)) continue;
                        auto labels = probe.classify(p);
                        int edge_hits = 0;
                        int last = -1;
                        for (const auto& l : labels)
                            if (l.kind == RegionKind::Edge) { ++edge_hits; last = l.edge; }
                        if (edge_hits > 1) {
                            std::ostringstream os;
                            os << "epsilon too large: edge neighborhoods of edges " << eg.id << " and "
                               << last << " overlap at sampled point";
                            throw std::runtime_error(os.str());
                        }
                    }
                }
            }
        }
    }
    return NeighborhoodDecomposition{eps, eps_prime, eps_second, &geom};
}

NeighborhoodDecomposition decompose_neighborhoods(const PolytopeGeometry& geom)
{
    const double eps = 0.25 * geom.min_corner_pair_distance();
    return decompose_neighborhoods(geom, eps, 1.2 * eps, 0.8 * eps);
}

// ---------------------------------------------------------------------------
// Dyadic coverings
// ---------------------------------------------------------------------------

namespace {

bool angle_in_sector(double x, double y, double omega)
{
    // branch centered on the bisector so openings up to 2*pi are safe
    const double half = 0.5 * omega;
    const double c = std::cos(half), s = std::sin(half);
    const double xr = c * x + s * y, yr = -s * x + c * y;
    const double t = std::atan2(yr, xr) + half;
    return t > 0.0 && t < omega;
}

} // namespace

bool DyadicCell::contains(const Vec3& p, const DyadicCover& cover) const
{
    const double scale = std::pow(2.0, -mu);
    switch (cover.kind) {
    case DyadicRegionKind::Sector2d: {
        const double r = std::hypot(p.x(), p.y());
        return r > 0.25 * scale && r < scale && angle_in_sector(p.x(), p.y(), cover.omega);
    }
    case DyadicRegionKind::Wedge3d: {
        const double r = std::hypot(p.x(), p.y());
        if (!(r > 0.25 * scale && r < scale)) return false;
        if (!angle_in_sector(p.x(), p.y(), cover.omega)) return false;
        const double zlo = scale * (0.5 * nu - 0.5), zhi = scale * (0.5 * nu + 0.5);
        return p.z() > zlo && p.z() < zhi;
    }
    case DyadicRegionKind::EdgeVertexCone3d: {
        const double rc = p.norm();
        if (!(rc > 0.25 * cover.eps * scale && rc < cover.eps * scale)) return false;
        const double re = std::hypot(p.x(), p.y());
        return re / rc < cover.eps;
    }
    }
    return false;
}

int DyadicCover::multiplicity(const Vec3& p) const
{
    int n = 0;
    for (const DyadicCell& c : cells)
        if (c.contains(p, *this)) ++n;
    return n;
}

bool DyadicCover::in_target(const Vec3& p) const
{
    const double rmin = std::pow(2.0, -(mu_max + 2));
    switch (kind) {
    case DyadicRegionKind::Sector2d: {
        const double r = std::hypot(p.x(), p.y());
        return r > rmin && r < 1.0 && angle_in_sector(p.x(), p.y(), omega);
    }
    case DyadicRegionKind::Wedge3d: {
        const double r = std::hypot(p.x(), p.y());
        return r > rmin && r < 1.0 && angle_in_sector(p.x(), p.y(), omega) && std::abs(p.z()) < 1.0;
    }
    case DyadicRegionKind::EdgeVertexCone3d: {
        const double rc = p.norm();
        return rc > eps * rmin && rc < eps && std::hypot(p.x(), p.y()) / rc < eps;
    }
    }
    return false;
}

DyadicCover dyadic_cover(DyadicRegionKind kind, int mu_max, double omega, double eps)
{
    if (mu_max < 0) throw std::invalid_argument("dyadic_cover: mu_max must be >= 0");
    DyadicCover cover;
    cover.kind = kind;
    cover.omega = omega;
    cover.eps = eps;
    cover.mu_max = mu_max;
    switch (kind) {
    case DyadicRegionKind::Sector2d:
    case DyadicRegionKind::EdgeVertexCone3d:
        cover.overlap_bound = 3;
        for (int mu = 0; mu <= mu_max; ++mu) cover.cells.push_back({mu, 0});
        break;
    case DyadicRegionKind::Wedge3d:
        cover.overlap_bound = 12;
        for (int mu = 0; mu <= mu_max; ++mu) {
            const int nmax = (1 << (mu + 1));
            for (int nu = -nmax + 1; nu <= nmax - 1; ++nu) cover.cells.push_back({mu, nu});
        }
        break;
    }
    return cover;
}

} // namespace polyreg
