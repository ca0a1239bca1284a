#ifndef POLYREG_GEOMETRY_HPP
#define POLYREG_GEOMETRY_HPP

#include "polyreg/polygon2d.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyreg {

enum class BcKind { Dirichlet, Neumann };

// Rational p/q recognized from a floating-point multiple; q == 0 means "not exact".
struct Rat64 {
    std::int64_t num = 0;
    std::int64_t den = 0;
    bool exact() const { return den != 0; }
    double value() const;
    static Rat64 recognize(double x, std::int64_t max_den = 720, double tol = 1e-12);
};

struct CornerOccurrence {
    int side_in  = -1;   // global side index ending at the corner
    int side_out = -1;   // global side index starting at the corner
    double opening = 0.0;
    double frame_angle = 0.0;  // angle of the sector's first ray (theta = 0 side)
};

struct Corner {
    int id = -1;
    int vertex = -1;            // representative vertex index
    double opening = 0.0;       // 2D: interior angle (sum over occurrences)
    Rat64 opening_over_pi;      // exact fraction of pi when recognized
    std::vector<CornerOccurrence> occurrences;  // 2D only
    std::vector<int> faces;     // 3D: incident faces
    std::vector<int> edges;     // 3D: incident edges
};

struct EdgeGeom {
    int id = -1;
    int v0 = -1, v1 = -1;
    int face_a = -1, face_b = -1;
    double opening = 0.0;       // dihedral angle through the interior
    Rat64 opening_over_pi;
    Vec3 tangent;               // unit, v0 -> v1
    Vec3 wedge_a, wedge_b;      // unit in-face directions away from the edge
};

struct Side2d {
    int loop = -1, pos = -1;
    int v0 = -1, v1 = -1;
    BcKind bc = BcKind::Dirichlet;
};

struct Face3d {
    std::vector<int> loop;      // vertex indices, oriented so the normal points outward
    BcKind bc = BcKind::Dirichlet;
    Vec3 normal;                // unit outward
    double plane_offset = 0.0;  // normal . x = plane_offset on the face
};

// Arc of the spherical cap cut by the tangent cone at a 3D corner. The arc starts
// at `start_dir`, rotating by `angle` around `axis` inside the plane of face `face`.
struct CapArc {
    int face = -1;
    BcKind bc = BcKind::Dirichlet;
    Vec3 start_dir;
    Vec3 axis;
    double angle = 0.0;
    int edge_start = -1, edge_end = -1;  // incident edge ids at the arc's ends
    Vec3 point(double t) const;          // t in [0,1]
};

struct CornerCone {
    Vec3 apex;
    std::vector<int> edge_ids;
    std::vector<Vec3> edge_dirs;  // unit directions of incident edges
    std::vector<CapArc> arcs;     // cyclic boundary of the spherical cap
};

class PolytopeGeometry {
public:
    int dimension = 0;
    std::vector<Vec3> vertices;              // z = 0 for 2D
    std::vector<std::vector<int>> loops;     // 2D boundary loops (counterclockwise outer)
    std::vector<Side2d> sides;               // 2D, derived
    std::vector<Face3d> faces;               // 3D
    std::vector<Corner> corners;
    std::vector<EdgeGeom> edges;             // 3D only

    static PolytopeGeometry from_json_text(const std::string& text);
    static PolytopeGeometry from_json_file(const std::string& path);
    // square, lshape, slit_square, sector (omega=3pi/2), cube, thick_l, fichera
    static PolytopeGeometry builtin(const std::string& name);
    static std::vector<std::string> builtin_names();
    std::string to_json_text() const;

    Vec2 vertex2(int i) const { return vertices[i].head<2>(); }

    double corner_opening(int corner_id) const;
    double edge_opening(int edge_id) const;
    const Corner& corner(int corner_id) const;
    const EdgeGeom& edge(int edge_id) const;

    bool contains(const Vec3& p) const;      // interior test (winding based)
    double min_corner_pair_distance() const;

    // Distances r_c, r_e and ratios rho_ce = r_e / r_c at a point.
    struct Distances {
        std::vector<double> r_c;                      // by corner id
        std::vector<double> r_e;                      // by edge id (3D)
        std::map<std::pair<int, int>, double> rho_ce; // (corner, edge) incident pairs
    };
    Distances distances(const Vec3& p) const;

    CornerCone corner_cone(int corner_id) const;     // 3D

private:
    void finalize();  // derive corners/edges/openings, check invariants
    friend PolytopeGeometry make_polytope_2d(std::vector<Vec2>, std::vector<std::vector<int>>,
                                             std::map<int, BcKind>);
    friend PolytopeGeometry make_polytope_3d(std::vector<Vec3>, std::vector<std::vector<int>>,
                                             std::map<int, BcKind>);
};

PolytopeGeometry make_polytope_2d(std::vector<Vec2> vertices, std::vector<std::vector<int>> loops,
                                  std::map<int, BcKind> bc = {});
PolytopeGeometry make_polytope_3d(std::vector<Vec3> vertices, std::vector<std::vector<int>> face_loops,
                                  std::map<int, BcKind> bc = {});

// ---------------------------------------------------------------------------
// Neighborhood decomposition (corner / edge / edge-vertex / smooth remainder)
// ---------------------------------------------------------------------------

enum class RegionKind { Smooth, Corner, Edge, EdgeVertex };

struct RegionLabel {
    RegionKind kind = RegionKind::Smooth;
    int corner = -1;
    int edge = -1;
    bool operator==(const RegionLabel&) const = default;
};

class NeighborhoodDecomposition {
public:
    double eps = 0.0, eps_prime = 0.0, eps_second = 0.0;
    const PolytopeGeometry* geom = nullptr;

    // All regions containing the point; points on interfaces belong to every
    // region whose closed condition they satisfy.
    std::vector<RegionLabel> classify(const Vec3& p) const;
};

// Throws with a diagnostic naming the offending pair when the disjointness
// requirements fail for the requested epsilons.
NeighborhoodDecomposition decompose_neighborhoods(const PolytopeGeometry& geom, double eps,
                                                  double eps_prime, double eps_second);
// Automatic choice: eps = 1/4 of the minimal pairwise corner distance,
// eps' = 1.2 eps, eps'' = 0.8 eps.
NeighborhoodDecomposition decompose_neighborhoods(const PolytopeGeometry& geom);

// ---------------------------------------------------------------------------
// Dyadic coverings of the canonical singular regions
// ---------------------------------------------------------------------------

enum class DyadicRegionKind { Sector2d, Wedge3d, EdgeVertexCone3d };

struct DyadicCell {
    int mu = 0;
    int nu = 0;  // wedge axial shift index; 0 otherwise
    // Closed-form membership in the cell (coordinates relative to the region anchor).
    bool contains(const Vec3& p, const struct DyadicCover& cover) const;
};

struct DyadicCover {
    DyadicRegionKind kind = DyadicRegionKind::Sector2d;
    double omega = 0.0;      // sector / wedge opening
    double eps = 0.0;        // edge-vertex cone parameter
    int mu_max = 0;
    std::vector<DyadicCell> cells;
    int overlap_bound = 0;   // proven multiplicity bound for this family

    // Number of cells containing p; p is given in region coordinates
    // (sector: (x,y); wedge: (x_perp, x3); edge-vertex: corner at origin, edge +z).
    int multiplicity(const Vec3& p) const;
    // Target region membership r-range guard: points with r below the resolved
    // scale 2^-(mu_max+2) are outside every cell by construction.
    bool in_target(const Vec3& p) const;
};

DyadicCover dyadic_cover(DyadicRegionKind kind, int mu_max, double omega, double eps = 0.5);

} // namespace polyreg

#endif
