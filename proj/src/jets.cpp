#include "polyreg/jets.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace polyreg {

namespace {

int tri(int n) { return n * (n + 1) / 2; }
int tet(int n) { return n * (n + 1) * (n + 2) / 6; }

} // namespace

int Jet::index(int dim, const std::array<int, 3>& a)
{
    const int a1 = a[0], a2 = dim >= 2 ? a[1] : 0, a3 = dim >= 3 ? a[2] : 0;
    const int g = a1 + a2 + a3;
    switch (dim) {
    case 1: return a1;
    case 2: return tri(g) + a2;
    case 3: return tet(g) + tri(g - a1) + a3;
    default: throw std::invalid_argument("Jet: dim must be 1, 2 or 3");
    }
}

int Jet::coeff_count(int dim, int order)
{
    switch (dim) {
    case 1: return order + 1;
    case 2: return tri(order + 1);
    case 3: return tet(order + 1);
    default: throw std::invalid_argument("Jet: dim must be 1, 2 or 3");
    }
}

const std::vector<std::array<int, 3>>& Jet::exponents(int dim, int order)
{
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::vector<std::array<int, 3>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(dim, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::array<int, 3>> exps(coeff_count(dim, order));
    if (dim == 1) {
        for (int g = 0; g <= order; ++g) exps[g] = {g, 0, 0};
    } else if (dim == 2) {
        for (int g = 0; g <= order; ++g)
            for (int a2 = 0; a2 <= g; ++a2) exps[tri(g) + a2] = {g - a2, a2, 0};
    } else {
        for (int g = 0; g <= order; ++g)
            for (int a1 = g; a1 >= 0; --a1)
                for (int a3 = 0; a3 <= g - a1; ++a3)
                    exps[tet(g) + tri(g - a1) + a3] = {a1, g - a1 - a3, a3};
    }
    return cache.emplace(key, std::move(exps)).first->second;
}

Jet::Jet(int dim, int order) : dim_(dim), order_(order), c_(coeff_count(dim, order), 0.0)
{
    if (order < 0 || order > kMaxOrder) throw std::invalid_argument("Jet: order out of range");
}

Jet Jet::constant(int dim, int order, double v)
{
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(int dim, int order, int k, double v)
{
    Jet j(dim, order);
    j.c_[0] = v;
    if (order >= 1) {
        std::array<int, 3> e{0, 0, 0};
        e[k] = 1;
        j.c_[index(dim, e)] = 1.0;
    }
    return j;
}

double Jet::coeff(const std::array<int, 3>& a) const
{
    int g = a[0] + a[1] + a[2];
    if (g > order_) return 0.0;
    return c_[index(dim_, a)];
}

void Jet::set_coeff(const std::array<int, 3>& a, double v)
{
    c_[index(dim_, a)] = v;
}

double Jet::deriv(const std::array<int, 3>& a) const
{
    int g = a[0] + a[1] + a[2];
    if (g > order_) return 0.0;
    return c_[index(dim_, a)] * factorial(a[0]) * factorial(a[1]) * factorial(a[2]);
}

Jet& Jet::operator+=(const Jet& o)
{
    assert(dim_ == o.dim_ && order_ == o.order_);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o)
{
    assert(dim_ == o.dim_ && order_ == o.order_);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s)
{
    for (double& v : c_) v *= s;
    return *this;
}

Jet Jet::operator+(const Jet& o) const { Jet r = *this; r += o; return r; }
Jet Jet::operator-(const Jet& o) const { Jet r = *this; r -= o; return r; }
Jet Jet::operator*(double s) const { Jet r = *this; r *= s; return r; }
Jet Jet::operator-() const { Jet r = *this; r *= -1.0; return r; }

Jet Jet::operator*(const Jet& o) const
{
    assert(dim_ == o.dim_ && order_ == o.order_);
    Jet r(dim_, order_);
    const auto& exps = exponents(dim_, order_);
    const int n = size();
    for (int i = 0; i < n; ++i) {
        const double ai = c_[i];
        if (ai == 0.0) continue;
        const auto& ea = exps[i];
        const int ga = ea[0] + ea[1] + ea[2];
        for (int j = 0; j < n; ++j) {
            const double bj = o.c_[j];
            if (bj == 0.0) continue;
            const auto& eb = exps[j];
            const int gb = eb[0] + eb[1] + eb[2];
            if (ga + gb > order_) break;  // exps are graded, degrees only grow
            std::array<int, 3> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
            r.c_[index(dim_, e)] += ai * bj;
        }
    }
    return r;
}

Jet Jet::partial(int k) const
{
    if (order_ == 0) return Jet(dim_, 0);
    Jet r(dim_, order_ - 1);
    const auto& exps = exponents(dim_, order_ - 1);
    for (size_t i = 0; i < exps.size(); ++i) {
        std::array<int, 3> e = exps[i];
        e[k] += 1;
        r.c_[i] = coeff(e) * e[k];
    }
    return r;
}

Jet Jet::laplacian() const
{
    if (order_ < 2) throw std::invalid_argument("Jet::laplacian: order must be >= 2");
    Jet r(dim_, order_ - 2);
    const auto& exps = exponents(dim_, order_ - 2);
    for (size_t i = 0; i < exps.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < dim_; ++k) {
            std::array<int, 3> e = exps[i];
            e[k] += 2;
            acc += coeff(e) * (e[k] - 1) * e[k];
        }
        r.c_[i] = acc;
    }
    return r;
}

std::vector<double> series_pow(double t0, double expo, int order)
{
    if (t0 <= 0.0) throw std::invalid_argument("series_pow: base point must be positive");
    std::vector<double> s(order + 1);
    // s[n] = binom(expo, n) * t0^(expo-n)
    double binom = 1.0;
    for (int n = 0; n <= order; ++n) {
        s[n] = binom * std::pow(t0, expo - n);
        binom *= (expo - n) / (n + 1);
    }
    return s;
}

std::vector<double> series_exp(double t0, int order)
{
    std::vector<double> s(order + 1);
    double e = std::exp(t0);
    double f = 1.0;
    for (int n = 0; n <= order; ++n) {
        s[n] = e / f;
        f *= (n + 1);
    }
    return s;
}

std::vector<double> series_sin(double t0, int order)
{
    std::vector<double> s(order + 1);
    const double sn = std::sin(t0), cs = std::cos(t0);
    double f = 1.0;
    for (int n = 0; n <= order; ++n) {
        switch (n % 4) {
        case 0: s[n] = sn / f; break;
        case 1: s[n] = cs / f; break;
        case 2: s[n] = -sn / f; break;
        case 3: s[n] = -cs / f; break;
        }
        f *= (n + 1);
    }
    return s;
}

std::vector<double> series_cos(double t0, int order)
{
    std::vector<double> s(order + 1);
    const double sn = std::sin(t0), cs = std::cos(t0);
    double f = 1.0;
    for (int n = 0; n <= order; ++n) {
        switch (n % 4) {
        case 0: s[n] = cs / f; break;
        case 1: s[n] = -sn / f; break;
        case 2: s[n] = -cs / f; break;
        case 3: s[n] = sn / f; break;
        }
        f *= (n + 1);
    }
    return s;
}

Jet compose_series(const std::vector<double>& s, const Jet& T)
{
    const int order = T.order();
    if (static_cast<int>(s.size()) < order + 1)
        throw std::invalid_argument("compose_series: series too short for jet order");
    Jet dT = T;
    dT.raw()[0] = 0.0;  // T - T.value()
    Jet r = Jet::constant(T.dim(), order, s[order]);
    for (int n = order - 1; n >= 0; --n) {
        r = r * dT;
        r.raw()[0] += s[n];
    }
    return r;
}

Jet jet_sqrt(const Jet& T) { return compose_series(series_pow(T.value(), 0.5, T.order()), T); }

Jet jet_pow(const Jet& T, double expo)
{
    return compose_series(series_pow(T.value(), expo, T.order()), T);
}

Jet jet_exp(const Jet& T) { return compose_series(series_exp(T.value(), T.order()), T); }

Jet jet_recip(const Jet& T)
{
    const double t0 = T.value();
    if (t0 == 0.0) throw std::invalid_argument("jet_recip: zero base value");
    std::vector<double> s(T.order() + 1);
    double p = 1.0 / t0;
    for (int n = 0; n <= T.order(); ++n) {
        s[n] = (n % 2 == 0 ? p : -p);
        p /= t0;
    }
    return compose_series(s, T);
}

Jet tensor_product(const Jet& a_perp, const Jet& b_axial)
{
    const int order = std::max(a_perp.order(), b_axial.order());
    const int dim = a_perp.dim() + 1;
    Jet r(dim, order);
    const auto& ea = Jet::exponents(a_perp.dim(), a_perp.order());
    for (size_t i = 0; i < ea.size(); ++i) {
        const double ca = a_perp.raw()[i];
        if (ca == 0.0) continue;
        const int ga = ea[i][0] + ea[i][1];
        for (int n = 0; n <= b_axial.order(); ++n) {
            if (ga + n > order) break;
            const double cb = b_axial.raw()[n];
            if (cb == 0.0) continue;
            std::array<int, 3> e{0, 0, 0};
            if (dim == 2) { e[0] = ea[i][0]; e[1] = n; }
            else          { e[0] = ea[i][0]; e[1] = ea[i][1]; e[2] = n; }
            r.set_coeff(e, ca * cb);
        }
    }
    return r;
}

double factorial(int n)
{
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw std::invalid_argument("factorial: argument out of range");
    return table[static_cast<size_t>(n)];
}

} // namespace polyreg
