#include "polyreg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace polyreg {

using std::numbers::pi;

namespace {

// lambda = (num_k / den_k) * (pi / omega); exact rational value when omega = (p/q) pi
Exponent make_exponent(std::int64_t num_k, std::int64_t den_k, double omega, const Rat64& omega_over_pi)
{
    Exponent e;
    e.value = static_cast<double>(num_k) / static_cast<double>(den_k) * pi / omega;
    if (omega_over_pi.exact()) {
        // (num_k/den_k) * (q/p) for omega = (p/q) pi
        std::int64_t n = num_k * omega_over_pi.den;
        std::int64_t d = den_k * omega_over_pi.num;
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(std::abs(n), d);
        if (g > 0) { n /= g; d /= g; }
        e.rational = Rat64{n, d};
        e.value = e.rational.value();
        e.critical = (d == 1);
    } else {
        const double r = std::round(e.value);
        e.critical = std::abs(e.value - r) < 1e-12;
    }
    return e;
}

} // namespace

bool Exponent::exactly_equals(double x, double tol) const
{
    if (rational.exact()) {
        const Rat64 r = Rat64::recognize(x);
        if (r.exact()) return r.num * rational.den == rational.num * r.den;
    }
    return std::abs(value - x) <= tol;
}

Exponent MellinSpectrum::b_threshold() const
{
    for (const Exponent& e : exponents)
        if (e.value > 1e-14) return e;
    throw std::runtime_error(
        "b_threshold: no positive spectrum element in the materialized window; increase the window");
}

double MellinSpectrum::smallest_positive() const { return b_threshold().value; }

bool MellinSpectrum::contains(double x, double tol) const
{
    for (const Exponent& e : exponents)
        if (e.exactly_equals(x, tol)) return true;
    return false;
}

MellinSpectrum corner_spectrum_laplace(double omega, const ProblemSpec& bc, double window)
{
    if (!(omega > 0.0 && omega <= 2.0 * pi + 1e-12))
        throw std::invalid_argument("corner_spectrum_laplace: omega must lie in (0, 2pi]");
    if (!(window > 0.0)) throw std::invalid_argument("corner_spectrum_laplace: window must be positive");

    MellinSpectrum s;
    s.omega = omega;
    s.omega_over_pi = Rat64::recognize(omega / pi);
    s.window = window;
    if (bc.dirichlet_dirichlet()) s.kind = SpectrumKind::DirichletDirichlet;
    else if (bc.neumann_neumann()) s.kind = SpectrumKind::NeumannNeumann;
    else s.kind = SpectrumKind::Mixed;

    const double step = pi / omega;
    if (s.kind == SpectrumKind::Mixed) {
        // (2l+1) pi / (2 omega), l in Z
        const std::int64_t lmax = static_cast<std::int64_t>(std::floor(window / (0.5 * step) / 2.0)) + 1;
        for (std::int64_t l = -lmax; l <= lmax; ++l) {
            Exponent e = make_exponent(2 * l + 1, 2, omega, s.omega_over_pi);
            if (std::abs(e.value) <= window) s.exponents.push_back(e);
        }
    } else {
        const std::int64_t lmax = static_cast<std::int64_t>(std::floor(window / step)) + 1;
        for (std::int64_t l = -lmax; l <= lmax; ++l) {
            if (l == 0 && s.kind == SpectrumKind::DirichletDirichlet) continue;
            Exponent e = make_exponent(l, 1, omega, s.omega_over_pi);
            if (std::abs(e.value) <= window) s.exponents.push_back(e);
        }
    }
    std::sort(s.exponents.begin(), s.exponents.end(),
              [](const Exponent& a, const Exponent& b) { return a.value < b.value; });
    return s;
}

MellinSpectrum corner_spectrum_laplace(const PolytopeGeometry& geom, int corner_id,
                                       const ProblemSpec& bc, double window)
{
    return corner_spectrum_laplace(geom.corner_opening(corner_id), bc, window);
}

MellinSpectrum edge_spectrum_laplace(const PolytopeGeometry& geom, int edge_id,
                                     const ProblemSpec& bc, double window)
{
    return corner_spectrum_laplace(geom.edge_opening(edge_id), bc, window);
}

std::vector<Exponent> singular_exponents_up_to(double omega, const ProblemSpec& bc, int n)
{
    if (n < 0) throw std::invalid_argument("singular_exponents_up_to: n must be >= 0");
    MellinSpectrum s = corner_spectrum_laplace(omega, bc, n + 2.0);
    std::vector<Exponent> out;
    for (const Exponent& e : s.exponents)
        if (e.value > 1e-14 && e.value <= n + 1.0 + 1e-14) out.push_back(e);
    return out;
}

std::string to_string(SpectrumKind k)
{
    switch (k) {
    case SpectrumKind::DirichletDirichlet: return "dirichlet";
    case SpectrumKind::NeumannNeumann: return "neumann";
    case SpectrumKind::Mixed: return "mixed";
    }
    return "?";
}

} // namespace polyreg
