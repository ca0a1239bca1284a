#ifndef POLYREG_JETS_HPP
#define POLYREG_JETS_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace polyreg {

// Truncated Taylor expansion (jet) of a scalar function at a point, in 1, 2 or 3
// variables. Coefficient storage is graded-lexicographic; c[index(a)] holds the
// *Taylor coefficient* d^a u / a!, not the raw derivative.
//
// All arithmetic is exact truncated polynomial algebra, so derivatives extracted
// from a jet are closed-form values up to floating-point rounding. There is no
// finite differencing anywhere in this class.
class Jet {
public:
    static constexpr int kMaxOrder = 20;

    Jet() : dim_(0), order_(0) {}
    Jet(int dim, int order);

    static Jet constant(int dim, int order, double v);
    // The affine jet of the coordinate function x_k with value `v` at the base point.
    static Jet variable(int dim, int order, int k, double v);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(c_.size()); }

    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    double coeff(const std::array<int, 3>& a) const;
    void set_coeff(const std::array<int, 3>& a, double v);
    // d^a u at the base point (coefficient times a!).
    double deriv(const std::array<int, 3>& a) const;

    const std::vector<double>& raw() const { return c_; }
    std::vector<double>& raw() { return c_; }

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(double s) const;
    Jet operator-() const;
    Jet operator*(const Jet& o) const;   // truncated product

    Jet partial(int k) const;            // order decreases by one
    Jet laplacian() const;               // order decreases by two

    // Flat index of a multi-index (trailing entries ignored beyond dim).
    static int index(int dim, const std::array<int, 3>& a);
    static int coeff_count(int dim, int order);
    // Exponent list for (dim, order), graded: degree 0 first.
    static const std::vector<std::array<int, 3>>& exponents(int dim, int order);

private:
    int dim_;
    int order_;
    std::vector<double> c_;
};

// Univariate Taylor coefficients s[n] = f^(n)(t0)/n! for elementary profiles.
std::vector<double> series_pow(double t0, double expo, int order);  // t^expo, t0 > 0
std::vector<double> series_exp(double t0, int order);
std::vector<double> series_sin(double t0, int order);
std::vector<double> series_cos(double t0, int order);

// Composition g(T) where `s` are the Taylor coefficients of g at T.value().
// Exact for truncated jets since T - T.value() has no constant term.
Jet compose_series(const std::vector<double>& s, const Jet& T);

Jet jet_sqrt(const Jet& T);             // requires T.value() > 0
Jet jet_pow(const Jet& T, double expo); // requires T.value() > 0
Jet jet_exp(const Jet& T);
Jet jet_recip(const Jet& T);            // requires T.value() != 0

// Tensor product of a jet in (x1[,x2]) and a jet in the last variable:
// result(x) = a(x_perp) * b(x_par), truncated to max(a.order, b.order).
Jet tensor_product(const Jet& a_perp, const Jet& b_axial);

double factorial(int n);

} // namespace polyreg

#endif
