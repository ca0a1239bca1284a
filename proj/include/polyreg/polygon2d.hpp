#ifndef POLYREG_POLYGON2D_HPP
#define POLYREG_POLYGON2D_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace polyreg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

double shoelace_area(const std::vector<Vec2>& loop);

// Interior angle at vertex v between incoming direction d_in = v - prev and
// outgoing d_out = next - v, for a counterclockwise-oriented boundary.
// A doubling-back vertex (d_out antiparallel to d_in) is a crack tip: angle 2*pi.
double interior_angle_ccw(const Vec2& d_in, const Vec2& d_out);

// Even-odd point containment for a (possibly weakly simple) closed loop.
bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p);

// Ear-clipping triangulation of a simple CCW polygon. Indices into `loop`.
// Throws std::runtime_error if the polygon cannot be triangulated (degenerate
// or self-intersecting input, e.g. crack loops with doubled segments).
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& loop);

} // namespace polyreg

#endif
