#ifndef POLYREG_SPECTRA_HPP
#define POLYREG_SPECTRA_HPP

#include "polyreg/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polyreg {

// Boundary-condition pair on the two sides of a corner (or the two faces of an edge).
struct ProblemSpec {
    BcKind side0 = BcKind::Dirichlet;
    BcKind side1 = BcKind::Dirichlet;

    bool dirichlet_dirichlet() const { return side0 == BcKind::Dirichlet && side1 == BcKind::Dirichlet; }
    bool neumann_neumann() const { return side0 == BcKind::Neumann && side1 == BcKind::Neumann; }
    bool mixed() const { return side0 != side1; }
    static ProblemSpec dirichlet() { return {BcKind::Dirichlet, BcKind::Dirichlet}; }
    static ProblemSpec neumann() { return {BcKind::Neumann, BcKind::Neumann}; }
    static ProblemSpec mixed_dn() { return {BcKind::Dirichlet, BcKind::Neumann}; }
};

enum class SpectrumKind { DirichletDirichlet, NeumannNeumann, Mixed };

// One real singular exponent; exact as a rational when the opening is a rational
// multiple of pi.
struct Exponent {
    double value = 0.0;
    Rat64 rational;  // exact value when .exact()
    bool critical = false;  // integer exponent: logarithmic case

    bool exactly_equals(double x, double tol = 1e-12) const;
};

// Mellin spectrum of the Laplacian at a plane corner / transversal to an edge.
// Closed-form family l*pi/omega (Dirichlet without l=0, Neumann with l=0) or
// (2l+1)*pi/(2*omega) for mixed sides.
class MellinSpectrum {
public:
    SpectrumKind kind = SpectrumKind::DirichletDirichlet;
    double omega = 0.0;
    Rat64 omega_over_pi;
    double window = 0.0;                 // materialized for |Re lambda| <= window
    std::vector<Exponent> exponents;     // strictly increasing

    // smallest element > 0, per the threshold definition on the strip 0 < Re(lambda) < b
    Exponent b_threshold() const;        // throws if the window is too small
    bool contains(double x, double tol = 1e-12) const;
    double smallest_positive() const;    // convenience, same as b_threshold().value
};

MellinSpectrum corner_spectrum_laplace(double omega, const ProblemSpec& bc, double window);
MellinSpectrum corner_spectrum_laplace(const PolytopeGeometry& geom, int corner_id,
                                       const ProblemSpec& bc, double window);
// transversal spectrum of a 3D edge
MellinSpectrum edge_spectrum_laplace(const PolytopeGeometry& geom, int edge_id,
                                     const ProblemSpec& bc, double window);

// Exponents k*pi/omega (with the BC-dependent family) in (0, n+1], each flagged
// critical when it is an integer.
std::vector<Exponent> singular_exponents_up_to(double omega, const ProblemSpec& bc, int n);

std::string to_string(SpectrumKind k);

} // namespace polyreg

#endif
