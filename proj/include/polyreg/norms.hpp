#ifndef POLYREG_NORMS_HPP
#define POLYREG_NORMS_HPP

#include "polyreg/fields.hpp"
#include "polyreg/weights.hpp"

#include <set>

namespace polyreg {

// Weighted (semi-)norm families. K and M are order-m seminorms (|alpha| = m);
// J, Step and N are order-m norms (all |alpha| <= m).
//   K:    corner/edge exponent beta + |alpha|
//   J:    uniform exponent beta + m (flagged entities: beta + |alpha|)
//   Step: max{beta + |alpha|, 0}
//   M:    edge exponent beta + |alpha_perp|, corner exponent beta + |alpha|
//   N:    max-clamped M exponents (flagged entities unclamped)
enum class NormKind { K, J, Step, M, N };

struct NormFlags {
    std::set<int> corners;
    std::set<int> edges;
    static NormFlags all(const struct NormDomain& dom);
};

struct QuadratureParams {
    int gauss_order = 12;
    int dyadic_depth = 48;
    double diverge_ratio = 1.0 - 1e-3;  // annulus ratio threshold
    int diverge_run = 8;                // consecutive annuli at or above the threshold
    int axial_panels = 4;
    int max_refine_level = 14;          // polygon grading toward corners
};

// Norm evaluation domains: the canonical model regions of the corner/edge
// analysis plus plane polygons. 3D domains put the edge direction on the z axis,
// which is the transverse/parallel split used by the anisotropic norms.
struct NormDomain {
    enum class Kind { Sector2d, Polygon2d, Wedge3d, Brick3d, EdgeVertexCone3d };
    Kind kind = Kind::Sector2d;

    // Sector2d / Wedge3d / EdgeVertexCone3d
    double omega = 0.0;
    double radius = 1.0;
    double axial_lo = 0.0, axial_hi = 1.0;  // Wedge3d / Brick3d
    double rho_max = 0.5;                   // EdgeVertexCone3d

    PolytopeGeometry polygon;  // Polygon2d, or the Brick3d cross-section

    int dim() const;
    int corner_count() const;  // weighted corner-like entities
    int edge_count() const;    // weighted edge-like entities
};

NormDomain sector_domain(double omega, double radius = 1.0);
NormDomain polygon_domain(const PolytopeGeometry& g);
NormDomain wedge_domain(double omega, double radius, double axial_lo, double axial_hi);
// cross-section corners become parallel 3D edges (indexed like the cross corners)
NormDomain brick_domain(const PolytopeGeometry& cross_section, double axial_lo, double axial_hi);
NormDomain edge_vertex_cone_domain(double omega, double radius, double rho_max);

// Per-entity dyadic series diagnostics for one norm order.
struct EntitySeries {
    std::string entity;
    int id = -1;
    bool diverged = false;
    double tail_ratio = 0.0;     // last measured annulus ratio
    double tail = 0.0;           // geometric tail estimate added to the value
    std::vector<double> annuli;  // A_mu, squared-contribution per dyadic level
};

struct SeminormValue {
    enum class Status { Finite, Diverged } status = Status::Finite;
    double value = 0.0;  // meaningful only when Finite
    std::vector<EntitySeries> series;
    bool diverged() const { return status == Status::Diverged; }
};

struct SeminormSequence {
    NormKind kind = NormKind::K;
    WeightMultiExponent beta;
    int max_order = 0;
    std::vector<SeminormValue> values;  // index m = 0..max_order

    const SeminormValue& at(int m) const { return values.at(m); }
    int finite_count() const;
};

// All orders m = 0..max_order in one quadrature pass.
SeminormSequence seminorm_sequence(const NormDomain& dom, const Field& u,
                                   const WeightMultiExponent& beta, NormKind kind, int max_order,
                                   const NormFlags& flags = {},
                                   const QuadratureParams& params = {});

// single-order conveniences
SeminormValue k_seminorm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta,
                         int m, const QuadratureParams& params = {});
SeminormValue j_norm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta, int m,
                     const QuadratureParams& params = {});
SeminormValue step_weighted_norm(const NormDomain& dom, const Field& u,
                                 const WeightMultiExponent& beta, int m,
                                 const QuadratureParams& params = {});
SeminormValue m_seminorm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta,
                         int m, const QuadratureParams& params = {});
SeminormValue n_norm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta, int m,
                     const NormFlags& flags = {}, const QuadratureParams& params = {});

// Cauchy-constant fit s_m <= C^(m+1) m! over the computed orders.
struct AnalyticFitReport {
    bool member = false;
    double fitted_C = 0.0;
    std::vector<double> c_estimates;  // (s_m / m!)^(1/(m+1)) per order
    double window_low = 0.0, window_high = 0.0, drift = 0.0;
    std::string reason;
};

AnalyticFitReport analytic_fit(const SeminormSequence& seq, int window1_lo = 4, int window1_hi = 8,
                               int window2_lo = 8, int window2_hi = 12,
                               double drift_threshold = 0.10);

// Regularity-shift constants: smallest C_k with
//   s_k(u)/k! <= C_k^(k+1) ( sum_{l<=k-2} s_l(f; beta+2)/l! + ||u||_{K^1_beta} ).
struct ShiftCheckReport {
    std::vector<int> orders;     // k values
    std::vector<double> C_k;
    double plateau_ratio = 0.0;  // max_{k<=M} C_k / max_{k<=8} C_k
    bool bounded = false;
    SeminormSequence u_seminorms;
    SeminormSequence f_seminorms;
};

ShiftCheckReport shift_constant_check(const NormDomain& dom, const Field& u, const Field& f,
                                      const WeightMultiExponent& beta, int max_order,
                                      const QuadratureParams& params = {},
                                      double plateau_tolerance = 1.1);

} // namespace polyreg

#endif
