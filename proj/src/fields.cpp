#include "polyreg/fields.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polyreg {

using std::numbers::pi;

bool SupportHint::possibly_nonzero(const Vec3& p, double slack) const
{
    switch (kind) {
    case Everywhere: return true;
    case Ball: return (p - center).norm() <= r1 + slack;
    case Shell: {
        const double r = (p - center).norm();
        return r >= r0 - slack && r <= r1 + slack;
    }
    }
    return true;
}

namespace {

struct CJet {
    Jet re, im;
    CJet() = default;
    CJet(Jet r, Jet i) : re(std::move(r)), im(std::move(i)) {}
    CJet operator*(const CJet& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    CJet& add_const(double cr, double ci)
    {
        re.raw()[0] += cr;
        im.raw()[0] += ci;
        return *this;
    }
};

// angle of (x, y) relative to a sector of opening omega starting at theta' = 0,
// branch centered on the bisector so crack openings are handled
double sector_angle(double x, double y, double omega)
{
    const double half = 0.5 * omega;
    const double c = std::cos(half), s = std::sin(half);
    const double xr = c * x + s * y, yr = -s * x + c * y;
    return std::atan2(yr, xr) + half;
}

double singular_lambda(double omega, int k, const ProblemSpec& bc)
{
    if (k < 1) throw std::invalid_argument("singular field: k must be >= 1");
    if (bc.mixed()) return (k - 0.5) * pi / omega;
    return k * pi / omega;
}

// Holomorphic power zeta^lambda as a complex jet; the complex displacement
// zeta - zeta0 = sum_j lin[j] xi_j is supplied by the caller along with the
// branch-resolved polar form of zeta0.
CJet holomorphic_power(double r0, double theta0, double lambda, int dim, int order,
                       const std::array<std::complex<double>, 3>& lin)
{
    // Taylor coefficients a_n = binom(lambda, n) zeta0^(lambda - n)
    std::vector<std::complex<double>> a(order + 1);
    double binom = 1.0;
    for (int n = 0; n <= order; ++n) {
        const double mag = std::pow(r0, lambda - n);
        const double arg = (lambda - n) * theta0;
        a[n] = binom * std::complex<double>(mag * std::cos(arg), mag * std::sin(arg));
        binom *= (lambda - n) / (n + 1);
    }
    CJet P{Jet(dim, order), Jet(dim, order)};
    for (int j = 0; j < dim; ++j) {
        if (lin[j] == std::complex<double>(0, 0)) continue;
        std::array<int, 3> e{0, 0, 0};
        e[j] = 1;
        P.re.set_coeff(e, lin[j].real());
        P.im.set_coeff(e, lin[j].imag());
    }
    CJet acc{Jet::constant(dim, order, a[order].real()), Jet::constant(dim, order, a[order].imag())};
    for (int n = order - 1; n >= 0; --n) {
        acc = acc * P;
        acc.add_const(a[n].real(), a[n].imag());
    }
    return acc;
}

class CornerSingularField final : public Field {
public:
    CornerSingularField(const Vec2& corner, double frame_angle, double omega, int k,
                        const ProblemSpec& bc, int max_order)
        : corner_(corner), frame_angle_(frame_angle), omega_(omega), bc_(bc),
          lambda_(singular_lambda(omega, k, bc)), max_order_(max_order)
    {
        if (std::abs(lambda_ - std::round(lambda_)) < 1e-12)
            throw std::invalid_argument(
                "corner_singular: integer exponent, logarithmic case unsupported");
        use_imag_ = !(bc.neumann_neumann());
    }

    int dim() const override { return 2; }
    int max_order() const override { return max_order_; }
    std::optional<double> singular_exponent() const override { return lambda_; }
    bool harmonic() const override { return true; }

    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        const double ca = std::cos(frame_angle_), sa = std::sin(frame_angle_);
        const double wx = p.x() - corner_.x(), wy = p.y() - corner_.y();
        // zeta = e^{-i frame_angle} (w_x + i w_y)
        const double zx = ca * wx + sa * wy;
        const double zy = -sa * wx + ca * wy;
        const double r0 = std::hypot(zx, zy);
        if (r0 < 1e-300) throw std::domain_error("corner_singular: evaluation at the corner");
        const double theta0 = sector_angle(zx, zy, omega_);
        std::array<std::complex<double>, 3> lin{};
        for (int j = 0; j < 2; ++j) {
            const double dx = axes(0, j), dy = axes(1, j);
            lin[j] = {ca * dx + sa * dy, -sa * dx + ca * dy};
        }
        CJet f = holomorphic_power(r0, theta0, lambda_, 2, order, lin);
        return use_imag_ ? f.im : f.re;
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os << "corner_singular(lambda=" << lambda_ << ", omega=" << omega_ << ","
           << (bc_.mixed() ? " mixed" : (use_imag_ ? " dirichlet" : " neumann")) << ")";
        return os.str();
    }

private:
    Vec2 corner_;
    double frame_angle_;
    double omega_;
    ProblemSpec bc_;
    double lambda_;
    int max_order_;
    bool use_imag_;
};

class EdgeSingularField final : public Field {
public:
    EdgeSingularField(const Vec3& anchor, const Vec3& tangent, const Vec3& side_dir, double omega,
                      int k, const ProblemSpec& bc, AxialProfile profile, int max_order)
        : anchor_(anchor), omega_(omega), bc_(bc), profile_(profile),
          lambda_(singular_lambda(omega, k, bc)), max_order_(max_order)
    {
        if (std::abs(lambda_ - std::round(lambda_)) < 1e-12)
            throw std::invalid_argument(
                "edge_singular_3d: integer exponent, logarithmic case unsupported");
        t_ = tangent.normalized();
        n1_ = (side_dir - t_ * t_.dot(side_dir)).normalized();
        n2_ = t_.cross(n1_);
        use_imag_ = !(bc.neumann_neumann());
    }

    int dim() const override { return 3; }
    int max_order() const override { return max_order_; }
    std::optional<double> singular_exponent() const override { return lambda_; }
    bool harmonic() const override
    {
        return profile_ == AxialProfile::One;  // sin/cos profiles solve Delta u = -/+ u
    }

    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        const Vec3 w = p - anchor_;
        const double zx = w.dot(n1_), zy = w.dot(n2_), zpar = w.dot(t_);
        const double r0 = std::hypot(zx, zy);
        if (r0 < 1e-300) throw std::domain_error("edge_singular_3d: evaluation on the edge");
        const double theta0 = sector_angle(zx, zy, omega_);

        // split evaluation when the first two axes are transverse and the third is
        // parallel: transverse 2-jet tensored with the axial profile series
        const bool aligned = std::abs(axes.col(0).dot(t_)) < 1e-14 &&
                             std::abs(axes.col(1).dot(t_)) < 1e-14 &&
                             std::abs(std::abs(axes.col(2).dot(t_)) - 1.0) < 1e-14;
        if (aligned) {
            std::array<std::complex<double>, 3> lin2{};
            for (int j = 0; j < 2; ++j) lin2[j] = {axes.col(j).dot(n1_), axes.col(j).dot(n2_)};
            CJet f2 = holomorphic_power(r0, theta0, lambda_, 2, order, lin2);
            Jet s2 = use_imag_ ? f2.im : f2.re;
            Jet gz(1, order);
            const double zsign = axes.col(2).dot(t_);
            switch (profile_) {
            case AxialProfile::One: gz = Jet::constant(1, order, 1.0); break;
            case AxialProfile::Sin: {
                auto s = series_sin(zpar, order);
                for (int n = 0; n <= order; ++n) gz.raw()[n] = s[n] * std::pow(zsign, n);
                break;
            }
            case AxialProfile::Cos: {
                auto s = series_cos(zpar, order);
                for (int n = 0; n <= order; ++n) gz.raw()[n] = s[n] * std::pow(zsign, n);
                break;
            }
            }
            return tensor_product(s2, gz);
        }

        std::array<std::complex<double>, 3> lin{};
        Jet par = Jet::constant(3, order, zpar);
        for (int j = 0; j < 3; ++j) {
            const Vec3 d = axes.col(j);
            lin[j] = {d.dot(n1_), d.dot(n2_)};
            std::array<int, 3> e{0, 0, 0};
            e[j] = 1;
            if (order >= 1) par.set_coeff(e, d.dot(t_));
        }
        CJet f = holomorphic_power(r0, theta0, lambda_, 3, order, lin);
        Jet s = use_imag_ ? f.im : f.re;
        switch (profile_) {
        case AxialProfile::One: return s;
        case AxialProfile::Sin: return s * compose_series(series_sin(zpar, order), par);
        case AxialProfile::Cos: return s * compose_series(series_cos(zpar, order), par);
        }
        return s;
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os << "edge_singular(lambda=" << lambda_ << ", omega=" << omega_ << ", profile="
           << (profile_ == AxialProfile::One ? "1" : profile_ == AxialProfile::Sin ? "sin" : "cos")
           << ")";
        return os.str();
    }

private:
    Vec3 anchor_, t_, n1_, n2_;
    double omega_;
    ProblemSpec bc_;
    AxialProfile profile_;
    double lambda_;
    int max_order_;
    bool use_imag_;
};

// Taylor coefficients of the cutoff transition profile H at t0, H(0)=1, H(1)=0.
std::vector<double> cutoff_profile_series(CutoffProfile profile, double t0, int order)
{
    if (profile == CutoffProfile::ExpSmoothstep) {
        // H(t) = g(1-t) / (g(t) + g(1-t)), g(t) = exp(-1/t)
        Jet t = Jet::variable(1, order, 0, t0);
        Jet one = Jet::constant(1, order, 1.0);
        Jet gpos = jet_exp(-jet_recip(t));
        Jet gneg = jet_exp(-jet_recip(one - t));
        Jet H = gneg * jet_recip(gpos + gneg);
        return H.raw();
    }
    // 1 - normalized incomplete beta of degree p: C^p junctions, polynomial inside
    constexpr int p = 15;
    // S(t) = int_0^t s^p (1-s)^p ds / B(p+1, p+1); expand the integrand binomially
    Jet t = Jet::variable(1, order + 1, 0, t0);
    Jet integrand = Jet::constant(1, order + 1, 0.0);
    {
        Jet tp = Jet::constant(1, order + 1, 1.0);
        for (int i = 0; i < p; ++i) tp = tp * t;
        Jet omt = Jet::constant(1, order + 1, 1.0) - t;
        Jet omtp = Jet::constant(1, order + 1, 1.0);
        for (int i = 0; i < p; ++i) omtp = omtp * omt;
        integrand = tp * omtp;
    }
    // antiderivative jet: S'(t) = integrand; B(p+1, p+1) = (p!)^2 / (2p+1)!
    const double beta_norm = factorial(p) * factorial(p) / factorial(2 * p + 1);
    std::vector<double> s(order + 1, 0.0);
    // S(t0) by direct numerically stable series: integrate the polynomial exactly
    {
        double acc = 0.0;
        // expand t^p (1-t)^p = sum_j binom(p,j) (-1)^j t^{p+j}
        double binom = 1.0;
        for (int j = 0; j <= p; ++j) {
            acc += binom * (j % 2 == 0 ? 1.0 : -1.0) * std::pow(t0, p + j + 1) / (p + j + 1);
            binom = binom * (p - j) / (j + 1);
        }
        s[0] = 1.0 - acc / beta_norm;
    }
    for (int n = 1; n <= order; ++n) s[n] = -integrand.raw()[n - 1] / n / beta_norm;
    return s;
}

class RadialCutoffField final : public Field {
public:
    RadialCutoffField(const Vec3& center, double r0, double r1, int field_dim,
                      CutoffProfile profile, int max_order)
        : center_(center), r0_(r0), r1_(r1), dim_(field_dim), profile_(profile),
          max_order_(max_order)
    {
        if (!(0.0 < r0 && r0 < r1)) throw std::invalid_argument("radial_cutoff: need 0 < r0 < r1");
        if (field_dim != 2 && field_dim != 3)
            throw std::invalid_argument("radial_cutoff: dim must be 2 or 3");
    }

    int dim() const override { return dim_; }
    int max_order() const override { return max_order_; }
    SupportHint support() const override { return {SupportHint::Ball, center_, 0.0, r1_}; }

    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        const Vec3 w = p - center_;
        const double r = (dim_ == 2) ? std::hypot(w.x(), w.y()) : w.norm();
        if (r <= r0_) return Jet::constant(dim_, order, 1.0);
        if (r >= r1_) return Jet::constant(dim_, order, 0.0);
        // r^2 as an exact quadratic jet in the requested axes
        Jet r2 = Jet::constant(dim_, order, 0.0);
        for (int j = 0; j < dim_; ++j) {
            Jet xj = Jet::variable(dim_, order, j, w.dot(axes.col(j)));
            // off-axis coupling: |w + Axes xi|^2 expands exactly when axes are orthonormal
            r2 += xj * xj;
        }
        Jet rj = jet_sqrt(r2);
        const double scale = 1.0 / (r1_ - r0_);
        auto H = cutoff_profile_series(profile_, (r - r0_) * scale, order);
        for (int n = 0; n <= order; ++n) H[n] *= std::pow(scale, n);
        return compose_series(H, rj);
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os << "radial_cutoff(r0=" << r0_ << ", r1=" << r1_ << ")";
        return os.str();
    }

private:
    Vec3 center_;
    double r0_, r1_;
    int dim_;
    CutoffProfile profile_;
    int max_order_;
};

class MonomialField final : public Field {
public:
    MonomialField(int dim, std::array<int, 3> powers, double coeff)
        : dim_(dim), powers_(powers), coeff_(coeff)
    {
        for (int j = dim; j < 3; ++j)
            if (powers_[j] != 0) throw std::invalid_argument("monomial: exponent beyond dimension");
    }
    int dim() const override { return dim_; }
    int max_order() const override { return Jet::kMaxOrder; }
    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        Jet r = Jet::constant(dim_, order, coeff_);
        for (int j = 0; j < dim_; ++j) {
            if (powers_[j] == 0) continue;
            // coordinate function x_j in the requested axes
            Jet xj = Jet::constant(dim_, order, p[j]);
            for (int a = 0; a < dim_ && order >= 1; ++a) {
                std::array<int, 3> e{0, 0, 0};
                e[a] = 1;
                xj.set_coeff(e, axes(j, a));
            }
            for (int q = 0; q < powers_[j]; ++q) r = r * xj;
        }
        return r;
    }
    std::string describe() const override
    {
        std::ostringstream os;
        os << coeff_ << " x^" << powers_[0] << " y^" << powers_[1];
        if (dim_ == 3) os << " z^" << powers_[2];
        return os.str();
    }

private:
    int dim_;
    std::array<int, 3> powers_;
    double coeff_;
};

class ProductField final : public Field {
public:
    ProductField(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b))
    {
        if (a_->dim() != b_->dim()) throw std::invalid_argument("product: dimension mismatch");
    }
    int dim() const override { return a_->dim(); }
    int max_order() const override { return std::min(a_->max_order(), b_->max_order()); }
    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        if (!a_->support().possibly_nonzero(p) || !b_->support().possibly_nonzero(p))
            return Jet::constant(dim(), order, 0.0);
        return a_->jet(p, order, axes) * b_->jet(p, order, axes);
    }
    SupportHint support() const override
    {
        // the tighter of the two hints; cutoff * singular keeps the cutoff ball
        const SupportHint sa = a_->support(), sb = b_->support();
        if (sa.kind != SupportHint::Everywhere) return sa;
        return sb;
    }
    std::optional<double> singular_exponent() const override
    {
        if (a_->singular_exponent()) return a_->singular_exponent();
        return b_->singular_exponent();
    }
    std::string describe() const override { return a_->describe() + " * " + b_->describe(); }

private:
    FieldPtr a_, b_;
};

class LaplacianField final : public Field {
public:
    explicit LaplacianField(FieldPtr a) : a_(std::move(a)) {}
    int dim() const override { return a_->dim(); }
    int max_order() const override { return a_->max_order() - 2; }
    Jet jet(const Vec3& p, int order, const Mat3& axes) const override
    {
        if (!a_->support().possibly_nonzero(p)) return Jet::constant(dim(), order, 0.0);
        return a_->jet(p, order + 2, axes).laplacian();
    }
    SupportHint support() const override { return a_->support(); }
    std::string describe() const override { return "laplacian(" + a_->describe() + ")"; }

private:
    FieldPtr a_;
};

} // namespace

FieldPtr corner_singular(const Vec2& corner, double frame_angle, double omega, int k,
                         const ProblemSpec& bc, int max_order)
{
    return std::make_shared<CornerSingularField>(corner, frame_angle, omega, k, bc, max_order);
}

FieldPtr corner_singular(const PolytopeGeometry& geom, int corner_id, int k, const ProblemSpec& bc,
                         int max_order)
{
    const Corner& c = geom.corner(corner_id);
    if (c.occurrences.size() != 1)
        throw std::invalid_argument("corner_singular: corner with multiple boundary occurrences");
    return corner_singular(geom.vertices[c.vertex].head<2>(), c.occurrences[0].frame_angle,
                           c.opening, k, bc, max_order);
}

FieldPtr edge_singular_3d(const Vec3& anchor, const Vec3& tangent, const Vec3& side_dir,
                          double omega, int k, const ProblemSpec& bc, AxialProfile profile,
                          int max_order)
{
    return std::make_shared<EdgeSingularField>(anchor, tangent, side_dir, omega, k, bc, profile,
                                               max_order);
}

FieldPtr radial_cutoff(const Vec3& center, double r0, double r1, int field_dim,
                       CutoffProfile profile, int max_order)
{
    return std::make_shared<RadialCutoffField>(center, r0, r1, field_dim, profile, max_order);
}

FieldPtr monomial(int dim, const std::array<int, 3>& powers, double coefficient)
{
    return std::make_shared<MonomialField>(dim, powers, coefficient);
}

FieldPtr constant_field(int dim, double value)
{
    return std::make_shared<MonomialField>(dim, std::array<int, 3>{0, 0, 0}, value);
}

FieldPtr product(FieldPtr a, FieldPtr b)
{
    return std::make_shared<ProductField>(std::move(a), std::move(b));
}

FieldPtr laplacian_of(FieldPtr a) { return std::make_shared<LaplacianField>(std::move(a)); }

ManufacturedPair manufactured_pair(FieldPtr u_harmonic, FieldPtr cutoff)
{
    if (!u_harmonic->harmonic())
        throw std::invalid_argument("manufactured_pair: u must be harmonic");
    if (u_harmonic->max_order() < 4)
        throw std::invalid_argument("manufactured_pair: insufficient max_order on u");
    ManufacturedPair pair;
    pair.u = product(cutoff, u_harmonic);
    pair.f = laplacian_of(pair.u);
    return pair;
}

bool membership_oracle(double lambda, double beta, SpaceKind space, int m)
{
    if (std::abs(lambda - std::round(lambda)) < 1e-12)
        throw std::invalid_argument("membership_oracle: critical (integer) exponent");
    if (std::abs(-beta - std::round(-beta)) < 1e-12 && -beta >= 1.0 - 1e-12)
        throw std::invalid_argument("membership_oracle: critical (integer) weight");
    (void)space;
    (void)m;
    // r^lambda s(theta): the order-k term integrates r^{2(beta+shift)+2(lambda-k)+1};
    // in every scale the binding term reduces to lambda > -beta-1, and a non-integer
    // power is never absorbed by the polynomial summand of J/B.
    return lambda > -beta - 1.0;
}

bool membership_oracle_polynomial(double beta, SpaceKind space, int m)
{
    switch (space) {
    case SpaceKind::K:
    case SpaceKind::A:
        return beta > -1.0;  // the order-0 term needs r^{2 beta} integrable
    case SpaceKind::J:
        return static_cast<double>(m) > -beta - 1.0;  // weight r^{beta+m} on the value
    case SpaceKind::B:
        return true;  // all orders m >= kappa_beta > -beta-1 carry integrable weights
    }
    return false;
}

} // namespace polyreg
