#ifndef POLYREG_WEIGHTS_HPP
#define POLYREG_WEIGHTS_HPP

#include "polyreg/spectra.hpp"

#include <map>
#include <string>
#include <vector>

namespace polyreg {

// One weight exponent per corner and (in 3D) per edge of a bound geometry.
struct WeightMultiExponent {
    std::vector<double> beta_c;  // by corner id
    std::vector<double> beta_e;  // by edge id, 3D only

    static WeightMultiExponent uniform(const PolytopeGeometry& geom, double beta_corner,
                                       double beta_edge = 0.0);
    void validate_against(const PolytopeGeometry& geom) const;
};

// kappa_beta = max_c(-beta_c) in 2D, max over corners and edges in 3D.
double kappa(const WeightMultiExponent& beta);

enum class Verdict { Admissible, Inadmissible };

struct EntityVerdict {
    std::string entity;       // "corner 3", "edge 7"
    int id = -1;
    Verdict verdict = Verdict::Admissible;
    double margin = 0.0;      // distance to the nearest violated/active bound
    std::string active_bound; // human-readable description of the binding constraint
    bool certified = false;   // false where the theory only covers the case partially
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<EntityVerdict> entries;
    std::string note;
};

// 2D condition 0 <= -beta_c - 1 < b_c per corner, with b_c from the supplied spectra.
AdmissibilityReport admissible_2d(const PolytopeGeometry& geom, const WeightMultiExponent& beta,
                                  const std::vector<MellinSpectrum>& corner_spectra);

// 3D conditions: edges 0 <= -beta_e - 1 < pi/omega_e; corners
// -1/2 <= -beta_c - 3/2 < lambda_c with lambda_c the Dirichlet limiting exponent,
// or min{2, lambda_c^Neu} for the Neumann problem.
AdmissibilityReport admissible_3d(const PolytopeGeometry& geom, const WeightMultiExponent& beta,
                                  const std::vector<MellinSpectrum>& edge_spectra,
                                  const std::vector<double>& corner_lambda, BcKind problem);

struct ShiftConditionEntry {
    int edge = -1;
    bool satisfied = true;
    long long offending_k = -1;  // resonance index when violated by equality
    std::string reason;
};

// Anisotropic shift condition: 0 <= -beta_e - 1 and -beta_e - 1 not equal to any
// spectrum element (k pi / omega_e family, including 0 for Neumann).
std::vector<ShiftConditionEntry> shift_condition_aniso(const PolytopeGeometry& geom,
                                                       const WeightMultiExponent& beta,
                                                       const std::vector<MellinSpectrum>& edge_spectra);

// Closed range condition along an edge: -beta_e - 1 not in Re(spectrum).
bool edge_closed_range_condition(double beta_e, const MellinSpectrum& spectrum);

// Admissible interval endpoints for beta at each corner (2D helper; no optimization).
struct AdmissibleInterval {
    int corner = -1;
    double beta_min = 0.0, beta_max = 0.0;  // open at beta_min, closed at beta_max
};
std::vector<AdmissibleInterval> admissible_intervals_2d(const PolytopeGeometry& geom,
                                                        const std::vector<MellinSpectrum>& corner_spectra);

} // namespace polyreg

#endif
