#include "polyreg/polygon2d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyreg {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c)
{
    const double d1 = cross2(b - a, p - a);
    const double d2 = cross2(c - b, p - b);
    const double d3 = cross2(a - c, p - c);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

} // namespace

double shoelace_area(const std::vector<Vec2>& loop)
{
    double a = 0.0;
    const size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = loop[i];
        const Vec2& q = loop[(i + 1) % n];
        a += cross2(p, q);
    }
    return 0.5 * a;
}

double interior_angle_ccw(const Vec2& d_in, const Vec2& d_out)
{
    const Vec2 a = d_in.normalized();
    const Vec2 b = d_out.normalized();
    const double c = cross2(a, b);
    const double d = a.dot(b);
    if (d < -1.0 + 1e-12 && std::abs(c) < 1e-9) {
        // boundary doubles back on itself: crack tip
        return 2.0 * std::numbers::pi;
    }
    const double turn = std::atan2(c, d);
    return std::numbers::pi - turn;
}

bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p)
{
    bool inside = false;
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& loop)
{
    const int n = static_cast<int>(loop.size());
    if (n < 3) throw std::runtime_error("ear_clip: fewer than 3 vertices");
    if (shoelace_area(loop) <= 0.0)
        throw std::runtime_error("ear_clip: polygon must be counterclockwise with positive area");

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<size_t>(n - 2));

    while (idx.size() > 3) {
        const int m = static_cast<int>(idx.size());
        bool clipped = false;
        for (int i = 0; i < m && !clipped; ++i) {
            const int ip = idx[(i + m - 1) % m];
            const int ic = idx[i];
            const int in = idx[(i + 1) % m];
            const Vec2& a = loop[ip];
            const Vec2& b = loop[ic];
            const Vec2& c = loop[in];
            const double conv = cross2(b - a, c - b);
            if (conv <= 1e-14 * (b - a).norm() * (c - b).norm()) continue;  // reflex or flat
            bool contains_other = false;
            for (int j : idx) {
                if (j == ip || j == ic || j == in) continue;
                if (point_in_triangle(loop[j], a, b, c)) { contains_other = true; break; }
            }
            if (contains_other) continue;
            tris.push_back({ip, ic, in});
            idx.erase(idx.begin() + i);
            clipped = true;
        }
        if (!clipped) {
            // drop a removable flat vertex, if any
            for (int i = 0; i < m && !clipped; ++i) {
                const Vec2& a = loop[idx[(i + m - 1) % m]];
                const Vec2& b = loop[idx[i]];
                const Vec2& c = loop[idx[(i + 1) % m]];
                const Vec2 u = b - a, v = c - b;
                if (std::abs(cross2(u, v)) <= 1e-13 * u.norm() * v.norm() && u.dot(v) > 0.0) {
                    idx.erase(idx.begin() + i);
                    clipped = true;
                }
            }
        }
        if (!clipped)
            throw std::runtime_error("ear_clip: no ear found (degenerate or crack polygon)");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

} // namespace polyreg
