#ifndef POLYREG_FIELDS_HPP
#define POLYREG_FIELDS_HPP

#include "polyreg/geometry.hpp"
#include "polyreg/jets.hpp"
#include "polyreg/spectra.hpp"

#include <memory>
#include <optional>

namespace polyreg {

using Mat3 = Eigen::Matrix3d;

// Where a field is known to live; quadrature uses this to skip dead regions.
struct SupportHint {
    enum Kind { Everywhere, Ball, Shell } kind = Everywhere;
    Vec3 center = Vec3::Zero();
    double r0 = 0.0, r1 = 0.0;  // Shell: r0 <= |x - center| <= r1; Ball: |x - center| <= r1
    bool possibly_nonzero(const Vec3& p, double slack = 0.0) const;
};

// A scalar field with exact derivative evaluation up to max_order(), produced by
// closed-form Taylor-jet recurrences. `axes` columns are the differentiation
// directions (defaults to the coordinate axes); anisotropic norms pass the edge
// frame here to split transverse and parallel derivatives.
class Field {
public:
    virtual ~Field() = default;
    virtual int dim() const = 0;
    virtual int max_order() const = 0;
    virtual Jet jet(const Vec3& p, int order, const Mat3& axes) const = 0;
    Jet jet(const Vec3& p, int order) const { return jet(p, order, Mat3::Identity()); }

    virtual SupportHint support() const { return {}; }
    // exponent of the leading singular behavior, when there is one
    virtual std::optional<double> singular_exponent() const { return std::nullopt; }
    virtual bool harmonic() const { return false; }
    virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const Field>;

// r^lambda sin(lambda theta') at a 2D corner (cos for Neumann), theta' measured
// from the sector's first side. lambda = k pi/omega (Dirichlet/Neumann) or
// (k - 1/2) pi/omega (mixed). Throws for integer lambda (logarithmic case).
FieldPtr corner_singular(const Vec2& corner, double frame_angle, double omega, int k,
                         const ProblemSpec& bc, int max_order = 16);
// Convenience: bound to a geometry corner (single-occurrence corners only).
FieldPtr corner_singular(const PolytopeGeometry& geom, int corner_id, int k, const ProblemSpec& bc,
                         int max_order = 16);

enum class AxialProfile { One, Sin, Cos };

// s(x_perp) * g(x_par) along a 3D edge through `anchor` with direction `tangent`;
// the transverse singular factor starts on the ray `side_dir` (theta' = 0).
FieldPtr edge_singular_3d(const Vec3& anchor, const Vec3& tangent, const Vec3& side_dir,
                          double omega, int k, const ProblemSpec& bc, AxialProfile profile,
                          int max_order = 12);

enum class CutoffProfile { ExpSmoothstep, PolySmoothstep };

// chi(|x - center|): identically 1 for r <= r0, identically 0 for r >= r1, with a
// closed-form transition. Works in 2D and 3D alike.
FieldPtr radial_cutoff(const Vec3& center, double r0, double r1, int field_dim,
                       CutoffProfile profile = CutoffProfile::ExpSmoothstep, int max_order = 16);

// single monomial c * x^a y^b z^c (exponents per axis)
FieldPtr monomial(int dim, const std::array<int, 3>& powers, double coefficient = 1.0);
FieldPtr constant_field(int dim, double value);

FieldPtr product(FieldPtr a, FieldPtr b);
FieldPtr laplacian_of(FieldPtr a);

// (u_tilde, f) = (chi u, Laplace(chi u)); requires u harmonic with exact derivatives.
struct ManufacturedPair {
    FieldPtr u;  // chi * u_singular, supported in the cutoff ball
    FieldPtr f;  // its Laplacian, supported in the cutoff shell
};
ManufacturedPair manufactured_pair(FieldPtr u_harmonic, FieldPtr cutoff);

// ---------------------------------------------------------------------------
// Membership oracle for pure powers r^lambda s(theta) near a 2D corner and for
// polynomials, in the K / J scales and the analytic classes A / B.
// ---------------------------------------------------------------------------

enum class SpaceKind { K, J, A, B };

// r^lambda s(theta): requires non-integer lambda and non-integer -beta.
bool membership_oracle(double lambda, double beta, SpaceKind space, int m);
// polynomial with nonzero value at the corner
bool membership_oracle_polynomial(double beta, SpaceKind space, int m);

} // namespace polyreg

#endif
