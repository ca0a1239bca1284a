#include "polyreg/norms.hpp"

#include "polyreg/polygon2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polyreg {

using std::numbers::pi;

namespace {

// ---------------------------------------------------------------------------
// Gauss-Legendre rules (Newton iteration on the Legendre polynomial)
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> x, w;  // on [-1, 1]
};

const GaussRule& gauss_rule(int n)
{
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

struct Panel1d {
    double lo, hi;
};

std::vector<Panel1d> split_interval(double lo, double hi, int n)
{
    std::vector<Panel1d> out;
    for (int i = 0; i < n; ++i)
        out.push_back({lo + (hi - lo) * i / n, lo + (hi - lo) * (i + 1) / n});
    return out;
}

// ---------------------------------------------------------------------------
// Weight policy
// ---------------------------------------------------------------------------

struct EntityDef {
    std::string name;
    int id = -1;
    bool edge_like = false;  // anisotropic kinds use |alpha_perp| here
    bool flagged = false;
    double beta = 0.0;
};

bool includes_lower_orders(NormKind k)
{
    return k == NormKind::J || k == NormKind::Step || k == NormKind::N;
}

// Weight for one entity: r^(beta + shift) or the max{.,0}-clamped variant.
// Returns the shift t and whether to clamp.
inline void weight_shift(NormKind kind, bool edge_like, bool flagged, int a, int a_perp, int m,
                         int& t, bool& clamp)
{
    clamp = false;
    switch (kind) {
    case NormKind::K: t = a; return;
    case NormKind::J: t = flagged ? a : m; return;
    case NormKind::Step: t = a; clamp = true; return;
    case NormKind::M: t = edge_like ? a_perp : a; return;
    case NormKind::N:
        t = edge_like ? a_perp : a;
        clamp = !flagged;
        return;
    }
    t = a;
}

// ---------------------------------------------------------------------------
// Accumulation machinery
// ---------------------------------------------------------------------------

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double v)
    {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

class Accumulator {
public:
    Accumulator(const NormDomain& dom, const Field& u, NormKind kind, int max_order,
                std::vector<EntityDef> entities, const QuadratureParams& params)
        : dom_(dom), u_(u), kind_(kind), M_(max_order), entities_(std::move(entities)),
          params_(params)
    {
        const int dim = dom.dim();
        if (u.dim() != dim)
            throw std::invalid_argument("seminorm: field dimension does not match the domain");
        if (max_order > u.max_order())
            throw std::invalid_argument("seminorm: requested order exceeds the field's max_order");
        totals_.assign(M_ + 1, KahanSum{});
        const auto& exps = Jet::exponents(dim, M_);
        fact_.resize(exps.size());
        a_tot_.resize(exps.size());
        a_perp_.resize(exps.size());
        for (size_t i = 0; i < exps.size(); ++i) {
            fact_[i] = factorial(exps[i][0]) * factorial(exps[i][1]) * factorial(exps[i][2]);
            a_tot_[i] = exps[i][0] + exps[i][1] + exps[i][2];
            a_perp_[i] = exps[i][0] + exps[i][1];  // z is the parallel direction
        }
        const int n_series = static_cast<int>(entities_.size());
        series_.assign(n_series, std::vector<std::vector<double>>(
                                     M_ + 1, std::vector<double>(params.dyadic_depth + 1, 0.0)));
        if (dom.kind == NormDomain::Kind::EdgeVertexCone3d) {
            grid_.assign(M_ + 1, std::vector<double>((params.dyadic_depth + 1) *
                                                     (params.dyadic_depth + 1), 0.0));
        }
        pw_.assign(entities_.size(), std::vector<double>(M_ + 1, 0.0));
    }

    // entity_r: distance value per entity; levels: dyadic level per entity or -1
    void add_point(const Vec3& x, double qw, const std::vector<double>& entity_r,
                   const std::vector<int>& levels)
    {
        if (!u_.support().possibly_nonzero(x, 1e-12)) return;
        const int dim = dom_.dim();
        Jet jet = u_.jet(x, M_, Mat3::Identity());

        // pow tables pw[e][t] = r_e^(beta_e + t)
        for (size_t e = 0; e < entities_.size(); ++e) {
            const double r = entity_r[e];
            double p = std::pow(r, entities_[e].beta);
            for (int t = 0; t <= M_; ++t) {
                pw_[e][t] = p;
                p *= r;
            }
        }

        const auto& raw = jet.raw();
        for (int m = 0; m <= M_; ++m) {
            const int begin = includes_lower_orders(kind_)
                                  ? 0
                                  : (m == 0 ? 0 : Jet::coeff_count(dim, m - 1));
            const int end = Jet::coeff_count(dim, m);
            double acc_m = 0.0;
            for (int i = begin; i < end; ++i) {
                const double d = raw[i] * fact_[i];
                if (d == 0.0) continue;
                double w = 1.0;
                for (size_t e = 0; e < entities_.size(); ++e) {
                    int t;
                    bool clamp;
                    weight_shift(kind_, entities_[e].edge_like, entities_[e].flagged, a_tot_[i],
                                 a_perp_[i], m, t, clamp);
                    if (clamp && entities_[e].beta + t <= 0.0) continue;  // weight 1
                    w *= pw_[e][t];
                }
                const double wd = w * d;
                acc_m += wd * wd;
            }
            if (acc_m == 0.0) continue;
            const double contrib = qw * acc_m;
            totals_[m].add(contrib);
            for (size_t e = 0; e < entities_.size(); ++e)
                if (levels[e] >= 0) series_[e][m][levels[e]] += contrib;
            if (!grid_.empty() && levels.size() == 2 && levels[0] >= 0 && levels[1] >= 0)
                grid_[m][levels[0] * (params_.dyadic_depth + 1) + levels[1]] += contrib;
        }
    }

    SeminormSequence finish(const WeightMultiExponent& beta_in) const;

    const QuadratureParams& params() const { return params_; }

private:
    const NormDomain& dom_;
    const Field& u_;
    NormKind kind_;
    int M_;
    std::vector<EntityDef> entities_;
    QuadratureParams params_;
    std::vector<KahanSum> totals_;
    std::vector<double> fact_;
    std::vector<int> a_tot_, a_perp_;
    std::vector<std::vector<std::vector<double>>> series_;  // [entity][m][level]
    std::vector<std::vector<double>> grid_;                 // EVC: [m][mu * (D+1) + nu]
    mutable std::vector<std::vector<double>> pw_;
};

// run-length divergence test on a dyadic series
bool series_diverged(const std::vector<double>& A, const QuadratureParams& p, double* last_ratio)
{
    int run = 0;
    *last_ratio = 0.0;
    const int burn = 2;
    for (size_t i = burn; i + 1 < A.size(); ++i) {
        if (!(std::isfinite(A[i]) && std::isfinite(A[i + 1]))) return true;
        if (A[i] > 0.0 && A[i + 1] > 0.0) {
            const double q = A[i + 1] / A[i];
            *last_ratio = q;
            run = (q >= p.diverge_ratio) ? run + 1 : 0;
            if (run >= p.diverge_run) return true;
        } else {
            run = 0;
        }
    }
    return false;
}

double geometric_tail(const std::vector<double>& A)
{
    const size_t n = A.size();
    if (n < 2) return 0.0;
    const double last = A[n - 1], prev = A[n - 2];
    if (!(last > 0.0) || !(prev > 0.0)) return 0.0;
    double q = last / prev;
    if (q >= 0.998) q = 0.998;  // convergent series should never get here
    return last * q / (1.0 - q);
}

SeminormSequence Accumulator::finish(const WeightMultiExponent& beta_in) const
{
    SeminormSequence seq;
    seq.kind = kind_;
    seq.beta = beta_in;
    seq.max_order = M_;
    seq.values.resize(M_ + 1);
    const int D = params_.dyadic_depth;

    for (int m = 0; m <= M_; ++m) {
        SeminormValue& val = seq.values[m];
        double total = totals_[m].s;
        bool diverged = false;

        if (dom_.kind == NormDomain::Kind::EdgeVertexCone3d) {
            // nested tails over the (radial, angular) dyadic grid
            const auto& G = grid_[m];
            std::vector<double> col_totals(D + 1, 0.0);
            double extra = 0.0;
            for (int nu = 0; nu <= D; ++nu) {
                std::vector<double> col(D + 1);
                double s = 0.0;
                for (int mu = 0; mu <= D; ++mu) {
                    col[mu] = G[mu * (D + 1) + nu];
                    s += col[mu];
                }
                const double t = geometric_tail(col);
                extra += t;
                col_totals[nu] = s + t;
            }
            extra += geometric_tail(col_totals);
            total += extra;
        }

        for (size_t e = 0; e < entities_.size(); ++e) {
            EntitySeries es;
            es.entity = entities_[e].name;
            es.id = entities_[e].id;
            es.annuli = series_[e][m];
            es.diverged = series_diverged(es.annuli, params_, &es.tail_ratio);
            if (dom_.kind != NormDomain::Kind::EdgeVertexCone3d) {
                es.tail = es.diverged ? 0.0 : geometric_tail(es.annuli);
                total += es.tail;
            }
            diverged = diverged || es.diverged;
            val.series.push_back(std::move(es));
        }
        if (!std::isfinite(total)) diverged = true;
        val.status = diverged ? SeminormValue::Status::Diverged : SeminormValue::Status::Finite;
        val.value = diverged ? 0.0 : std::sqrt(total);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Prepared polygon quadrature
// ---------------------------------------------------------------------------

struct CornerTri {
    int corner = -1;       // geometry corner id
    Vec2 apex, a, b;       // apex at the corner
};

struct RegularTri {
    Vec2 a, b, c;
};

struct PolygonQuadrature {
    std::vector<CornerTri> corner_tris;
    std::vector<RegularTri> regular_tris;
};

double dist_point_tri(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c)
{
    auto seg = [&](const Vec2& u, const Vec2& v) {
        const Vec2 d = v - u;
        const double t = std::clamp((p - u).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (p - (u + t * d)).norm();
    };
    return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

PolygonQuadrature prepare_polygon(const PolytopeGeometry& g, const QuadratureParams& params)
{
    if (g.dimension != 2) throw std::invalid_argument("polygon domain requires a 2D geometry");
    if (g.loops.size() != 1)
        throw std::runtime_error("polygon quadrature supports a single boundary loop");
    std::vector<Vec2> loop;
    for (int v : g.loops[0]) loop.push_back(g.vertex2(v));
    // crack loops (repeated vertices) are rejected by the triangulator
    auto tris = ear_clip(loop);

    std::vector<Vec2> corner_pos;
    for (const Corner& c : g.corners) corner_pos.push_back(g.vertices[c.vertex].head<2>());
    auto corner_at = [&](const Vec2& p) {
        for (size_t i = 0; i < corner_pos.size(); ++i)
            if ((p - corner_pos[i]).norm() < 1e-12) return static_cast<int>(i);
        return -1;
    };

    // split until each triangle touches at most one corner
    std::vector<std::array<Vec2, 3>> work;
    for (auto& t : tris) work.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
    std::vector<std::array<Vec2, 3>> isolated;
    int guard = 0;
    while (!work.empty()) {
        if (++guard > 200000) throw std::runtime_error("polygon splitting failed to terminate");
        auto t = work.back();
        work.pop_back();
        int touching = 0;
        for (const Vec2& v : t) touching += corner_at(v) >= 0 ? 1 : 0;
        if (touching <= 1) {
            isolated.push_back(t);
            continue;
        }
        const Vec2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
        work.push_back({t[0], m01, m20});
        work.push_back({m01, t[1], m12});
        work.push_back({m20, m12, t[2]});
        work.push_back({m01, m12, m20});
    }

    // grade regular triangles toward the corners
    PolygonQuadrature q;
    std::vector<std::pair<std::array<Vec2, 3>, int>> grade;
    for (auto& t : isolated) grade.push_back({t, 0});
    while (!grade.empty()) {
        auto [t, level] = grade.back();
        grade.pop_back();
        int apex = -1;
        for (int k = 0; k < 3; ++k)
            if (corner_at(t[k]) >= 0) apex = k;
        if (apex >= 0) {
            CornerTri ct;
            ct.corner = corner_at(t[apex]);
            ct.apex = t[apex];
            ct.a = t[(apex + 1) % 3];
            ct.b = t[(apex + 2) % 3];
            q.corner_tris.push_back(ct);
            continue;
        }
        const double diam = std::max({(t[0] - t[1]).norm(), (t[1] - t[2]).norm(),
                                      (t[2] - t[0]).norm()});
        double dist = std::numeric_limits<double>::infinity();
        for (const Vec2& cp : corner_pos) dist = std::min(dist, dist_point_tri(cp, t[0], t[1], t[2]));
        if (level < params.max_refine_level && diam > 0.7 * dist) {
            const Vec2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]),
                       m20 = 0.5 * (t[2] + t[0]);
            grade.push_back({{t[0], m01, m20}, level + 1});
            grade.push_back({{m01, t[1], m12}, level + 1});
            grade.push_back({{m20, m12, t[2]}, level + 1});
            grade.push_back({{m01, m12, m20}, level + 1});
        } else {
            q.regular_tris.push_back({t[0], t[1], t[2]});
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// Domain walkers
// ---------------------------------------------------------------------------

struct AxialRange {
    double lo = 0.0, hi = 1.0;
    bool active = false;
};

// sector / wedge: dyadic radial annuli about the origin, Gauss in angle (and axially)
void walk_sector(Accumulator& acc, const NormDomain& dom, const Field& u,
                 const QuadratureParams& params, const AxialRange& axial)
{
    const GaussRule& G = gauss_rule(params.gauss_order);
    const int n_th = std::max(2, static_cast<int>(std::ceil(dom.omega / (pi / 4))));
    const auto th_panels = split_interval(0.0, dom.omega, n_th);
    std::vector<Panel1d> z_panels{{0.0, 1.0}};
    if (axial.active) z_panels = split_interval(axial.lo, axial.hi, params.axial_panels);

    const SupportHint sup = u.support();
    const bool radial_support = (sup.kind != SupportHint::Everywhere) &&
                                sup.center.head<2>().norm() < 1e-14;

    std::vector<double> entity_r(1);
    std::vector<int> levels(1);
    for (int mu = 0; mu <= params.dyadic_depth; ++mu) {
        const double rhi = dom.radius * std::pow(2.0, -mu);
        const double rlo = 0.5 * rhi;
        if (radial_support) {
            const double s0 = (sup.kind == SupportHint::Shell) ? sup.r0 : 0.0;
            if (rlo > sup.r1 + 1e-12 || rhi < s0 - 1e-12) continue;
        }
        levels[0] = mu;
        for (const auto& zp : z_panels) {
            for (int iz = 0; iz < (axial.active ? params.gauss_order : 1); ++iz) {
                const double z = axial.active
                                     ? 0.5 * (zp.lo + zp.hi) + 0.5 * (zp.hi - zp.lo) * G.x[iz]
                                     : 0.0;
                const double wz = axial.active ? 0.5 * (zp.hi - zp.lo) * G.w[iz] : 1.0;
                for (const auto& tp : th_panels) {
                    for (int it = 0; it < params.gauss_order; ++it) {
                        const double th =
                            0.5 * (tp.lo + tp.hi) + 0.5 * (tp.hi - tp.lo) * G.x[it];
                        const double wt = 0.5 * (tp.hi - tp.lo) * G.w[it];
                        for (int ir = 0; ir < params.gauss_order; ++ir) {
                            const double r = 0.5 * (rlo + rhi) + 0.5 * (rhi - rlo) * G.x[ir];
                            const double wr = 0.5 * (rhi - rlo) * G.w[ir];
                            entity_r[0] = r;
                            acc.add_point(Vec3(r * std::cos(th), r * std::sin(th), z),
                                          wr * wt * wz * r, entity_r, levels);
                        }
                    }
                }
            }
        }
    }
}

// polygon / brick: prepared triangles, polar-dyadic at corner triangles
void walk_polygon(Accumulator& acc, const NormDomain& dom, const Field& u,
                  const QuadratureParams& params, const AxialRange& axial)
{
    const PolygonQuadrature Q = prepare_polygon(dom.polygon, params);
    const GaussRule& G = gauss_rule(params.gauss_order);
    std::vector<Vec2> corner_pos;
    for (const Corner& c : dom.polygon.corners)
        corner_pos.push_back(dom.polygon.vertices[c.vertex].head<2>());
    const int n_ent = static_cast<int>(corner_pos.size());

    std::vector<Panel1d> z_panels{{0.0, 1.0}};
    if (axial.active) z_panels = split_interval(axial.lo, axial.hi, params.axial_panels);
    const int nz = axial.active ? params.gauss_order : 1;

    std::vector<double> entity_r(n_ent);
    std::vector<int> levels(n_ent, -1);

    auto emit = [&](const Vec2& p, double w2d, int corner, int level) {
        for (int e = 0; e < n_ent; ++e) {
            entity_r[e] = (p - corner_pos[e]).norm();
            levels[e] = (e == corner) ? level : -1;
        }
        for (const auto& zp : z_panels) {
            for (int iz = 0; iz < nz; ++iz) {
                const double z = axial.active
                                     ? 0.5 * (zp.lo + zp.hi) + 0.5 * (zp.hi - zp.lo) * G.x[iz]
                                     : 0.0;
                const double wz = axial.active ? 0.5 * (zp.hi - zp.lo) * G.w[iz] : 1.0;
                acc.add_point(Vec3(p.x(), p.y(), z), w2d * wz, entity_r, levels);
            }
        }
    };

    const SupportHint sup = u.support();
    for (const auto& t : Q.regular_tris) {
        // tensor rule on the collapsed square
        const Vec2 e1 = t.b - t.a, e2 = t.c - t.b;
        const double area2 = std::abs(e1.x() * (t.c - t.a).y() - e1.y() * (t.c - t.a).x());
        if (sup.kind == SupportHint::Ball || sup.kind == SupportHint::Shell) {
            const Vec2 sc = sup.center.head<2>();
            if (dist_point_tri(sc, t.a, t.b, t.c) > sup.r1 + 1e-12 &&
                !point_in_loop({t.a, t.b, t.c}, sc))
                continue;
        }
        for (int is = 0; is < params.gauss_order; ++is) {
            const double s = 0.5 + 0.5 * G.x[is];
            const double ws = 0.5 * G.w[is];
            for (int iv = 0; iv < params.gauss_order; ++iv) {
                const double v = 0.5 + 0.5 * G.x[iv];
                const double wv = 0.5 * G.w[iv];
                const Vec2 p = t.a + s * (e1 + v * e2);
                emit(p, ws * wv * area2 * s, -1, -1);
            }
        }
    }

    for (const auto& ct : Q.corner_tris) {
        const Vec2 u1 = ct.a - ct.apex, u2 = ct.b - ct.apex;
        const double theta_span = std::acos(std::clamp(u1.normalized().dot(u2.normalized()), -1.0, 1.0));
        const double rot_sign = (u1.x() * u2.y() - u1.y() * u2.x()) >= 0 ? 1.0 : -1.0;
        const double phi0 = std::atan2(u1.y(), u1.x());
        // chord through a, b
        const Vec2 chord = ct.b - ct.a;
        Vec2 n(-chord.y(), chord.x());
        n.normalize();
        if (n.dot(u1) < 0) n = -n;
        const double h = n.dot(u1);  // distance from apex to the chord line
        const int n_th = std::max(1, static_cast<int>(std::ceil(theta_span / (pi / 8))));
        const auto th_panels = split_interval(0.0, theta_span, n_th);

        const bool radial_support = (sup.kind != SupportHint::Everywhere) &&
                                    (sup.center.head<2>() - ct.apex).norm() < 1e-14;
        for (const auto& tp : th_panels) {
            for (int it = 0; it < params.gauss_order; ++it) {
                const double th = 0.5 * (tp.lo + tp.hi) + 0.5 * (tp.hi - tp.lo) * G.x[it];
                const double wt = 0.5 * (tp.hi - tp.lo) * G.w[it];
                const Vec2 dir(std::cos(phi0 + rot_sign * th), std::sin(phi0 + rot_sign * th));
                const double R = h / n.dot(dir);
                for (int mu = 0; mu <= params.dyadic_depth; ++mu) {
                    const double rhi = R * std::pow(2.0, -mu);
                    const double rlo = 0.5 * rhi;
                    if (radial_support) {
                        const double s0 = (sup.kind == SupportHint::Shell) ? sup.r0 : 0.0;
                        if (rlo > sup.r1 + 1e-12 || rhi < s0 - 1e-12) continue;
                    }
                    for (int ir = 0; ir < params.gauss_order; ++ir) {
                        const double r = 0.5 * (rlo + rhi) + 0.5 * (rhi - rlo) * G.x[ir];
                        const double wr = 0.5 * (rhi - rlo) * G.w[ir];
                        emit(ct.apex + r * dir, wr * wt * r, ct.corner, mu);
                    }
                }
            }
        }
    }
}

void walk_edge_vertex_cone(Accumulator& acc, const NormDomain& dom, const Field& u,
                           const QuadratureParams& params)
{
    (void)u;
    const GaussRule& G = gauss_rule(params.gauss_order);
    const double chi_max = std::asin(std::min(1.0, dom.rho_max));
    const int n_phi = std::max(2, static_cast<int>(std::ceil(dom.omega / (pi / 4))));
    const auto phi_panels = split_interval(0.0, dom.omega, n_phi);

    std::vector<double> entity_r(2);
    std::vector<int> levels(2);
    for (int mu = 0; mu <= params.dyadic_depth; ++mu) {
        const double rhi = dom.radius * std::pow(2.0, -mu);
        const double rlo = 0.5 * rhi;
        levels[0] = mu;
        for (int nu = 0; nu <= params.dyadic_depth; ++nu) {
            const double chi_hi = chi_max * std::pow(2.0, -nu);
            const double chi_lo = 0.5 * chi_hi;
            levels[1] = nu;
            for (int ir = 0; ir < params.gauss_order; ++ir) {
                const double r = 0.5 * (rlo + rhi) + 0.5 * (rhi - rlo) * G.x[ir];
                const double wr = 0.5 * (rhi - rlo) * G.w[ir];
                for (int ic = 0; ic < params.gauss_order; ++ic) {
                    const double chi =
                        0.5 * (chi_lo + chi_hi) + 0.5 * (chi_hi - chi_lo) * G.x[ic];
                    const double wc = 0.5 * (chi_hi - chi_lo) * G.w[ic];
                    const double sc = std::sin(chi);
                    for (const auto& pp : phi_panels) {
                        for (int ip = 0; ip < params.gauss_order; ++ip) {
                            const double phi =
                                0.5 * (pp.lo + pp.hi) + 0.5 * (pp.hi - pp.lo) * G.x[ip];
                            const double wp = 0.5 * (pp.hi - pp.lo) * G.w[ip];
                            entity_r[0] = r;        // r_c
                            entity_r[1] = sc;       // rho_ce
                            acc.add_point(Vec3(r * sc * std::cos(phi), r * sc * std::sin(phi),
                                               r * std::cos(chi)),
                                          wr * wc * wp * r * r * sc, entity_r, levels);
                        }
                    }
                }
            }
        }
    }
}

std::vector<EntityDef> domain_entities(const NormDomain& dom, const WeightMultiExponent& beta,
                                       const NormFlags& flags)
{
    std::vector<EntityDef> ents;
    auto corner = [&](int id, double b) {
        ents.push_back({"corner " + std::to_string(id), id, false, flags.corners.count(id) > 0, b});
    };
    auto edge = [&](int id, double b) {
        ents.push_back({"edge " + std::to_string(id), id, true, flags.edges.count(id) > 0, b});
    };
    switch (dom.kind) {
    case NormDomain::Kind::Sector2d:
        if (beta.beta_c.size() != 1) throw std::invalid_argument("sector domain needs one beta_c");
        corner(0, beta.beta_c[0]);
        break;
    case NormDomain::Kind::Polygon2d:
        if (beta.beta_c.size() != dom.polygon.corners.size())
            throw std::invalid_argument("polygon domain needs one beta_c per corner");
        for (const Corner& c : dom.polygon.corners) corner(c.id, beta.beta_c[c.id]);
        break;
    case NormDomain::Kind::Wedge3d:
        if (beta.beta_e.size() != 1) throw std::invalid_argument("wedge domain needs one beta_e");
        edge(0, beta.beta_e[0]);
        break;
    case NormDomain::Kind::Brick3d:
        if (beta.beta_e.size() != dom.polygon.corners.size())
            throw std::invalid_argument("brick domain needs one beta_e per cross-section corner");
        for (const Corner& c : dom.polygon.corners) edge(c.id, beta.beta_e[c.id]);
        break;
    case NormDomain::Kind::EdgeVertexCone3d:
        if (beta.beta_c.size() != 1 || beta.beta_e.size() != 1)
            throw std::invalid_argument("edge-vertex cone needs one beta_c and one beta_e");
        corner(0, beta.beta_c[0]);
        edge(0, beta.beta_e[0]);
        break;
    }
    return ents;
}

} // namespace

int NormDomain::dim() const
{
    return (kind == Kind::Sector2d || kind == Kind::Polygon2d) ? 2 : 3;
}

int NormDomain::corner_count() const
{
    switch (kind) {
    case Kind::Sector2d: return 1;
    case Kind::Polygon2d: return static_cast<int>(polygon.corners.size());
    case Kind::EdgeVertexCone3d: return 1;
    default: return 0;
    }
}

int NormDomain::edge_count() const
{
    switch (kind) {
    case Kind::Wedge3d: return 1;
    case Kind::Brick3d: return static_cast<int>(polygon.corners.size());
    case Kind::EdgeVertexCone3d: return 1;
    default: return 0;
    }
}

NormFlags NormFlags::all(const NormDomain& dom)
{
    NormFlags f;
    for (int i = 0; i < dom.corner_count(); ++i) f.corners.insert(i);
    for (int i = 0; i < dom.edge_count(); ++i) f.edges.insert(i);
    return f;
}

NormDomain sector_domain(double omega, double radius)
{
    if (!(omega > 0 && omega <= 2 * pi + 1e-12) || !(radius > 0))
        throw std::invalid_argument("sector_domain: invalid parameters");
    NormDomain d;
    d.kind = NormDomain::Kind::Sector2d;
    d.omega = omega;
    d.radius = radius;
    return d;
}

NormDomain polygon_domain(const PolytopeGeometry& g)
{
    if (g.dimension != 2) throw std::invalid_argument("polygon_domain: 2D geometry required");
    NormDomain d;
    d.kind = NormDomain::Kind::Polygon2d;
    d.polygon = g;
    return d;
}

NormDomain wedge_domain(double omega, double radius, double axial_lo, double axial_hi)
{
    if (!(axial_hi > axial_lo)) throw std::invalid_argument("wedge_domain: empty axial range");
    NormDomain d = sector_domain(omega, radius);
    d.kind = NormDomain::Kind::Wedge3d;
    d.axial_lo = axial_lo;
    d.axial_hi = axial_hi;
    return d;
}

NormDomain brick_domain(const PolytopeGeometry& cross_section, double axial_lo, double axial_hi)
{
    NormDomain d = polygon_domain(cross_section);
    d.kind = NormDomain::Kind::Brick3d;
    d.axial_lo = axial_lo;
    d.axial_hi = axial_hi;
    return d;
}

NormDomain edge_vertex_cone_domain(double omega, double radius, double rho_max)
{
    if (!(rho_max > 0 && rho_max <= 1))
        throw std::invalid_argument("edge_vertex_cone_domain: rho_max must lie in (0, 1]");
    NormDomain d = sector_domain(omega, radius);
    d.kind = NormDomain::Kind::EdgeVertexCone3d;
    d.rho_max = rho_max;
    return d;
}

int SeminormSequence::finite_count() const
{
    int n = 0;
    for (const auto& v : values)
        if (!v.diverged()) ++n;
    return n;
}

SeminormSequence seminorm_sequence(const NormDomain& dom, const Field& u,
                                   const WeightMultiExponent& beta, NormKind kind, int max_order,
                                   const NormFlags& flags, const QuadratureParams& params)
{
    if (max_order < 0) throw std::invalid_argument("seminorm_sequence: negative order");
    auto entities = domain_entities(dom, beta, flags);
    if (kind == NormKind::Step || kind == NormKind::N) {
        double kb = 0.0;
        for (const auto& e : entities)
            if (!e.flagged || kind == NormKind::Step) kb = std::max(kb, -e.beta);
        if (max_order < kb) {
            std::ostringstream os;
            os << "step-weighted/N norms are defined only for m >= kappa_beta = " << kb
               << "; got m = " << max_order;
            throw std::invalid_argument(os.str());
        }
    }
    Accumulator acc(dom, u, kind, max_order, entities, params);
    AxialRange axial;
    switch (dom.kind) {
    case NormDomain::Kind::Sector2d:
        walk_sector(acc, dom, u, params, axial);
        break;
    case NormDomain::Kind::Wedge3d:
        axial = {dom.axial_lo, dom.axial_hi, true};
        walk_sector(acc, dom, u, params, axial);
        break;
    case NormDomain::Kind::Polygon2d:
        walk_polygon(acc, dom, u, params, axial);
        break;
    case NormDomain::Kind::Brick3d:
        axial = {dom.axial_lo, dom.axial_hi, true};
        walk_polygon(acc, dom, u, params, axial);
        break;
    case NormDomain::Kind::EdgeVertexCone3d:
        walk_edge_vertex_cone(acc, dom, u, params);
        break;
    }
    return acc.finish(beta);
}

namespace {

SeminormValue single_order(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta,
                           NormKind kind, int m, const NormFlags& flags,
                           const QuadratureParams& params)
{
    // norms with lower-order terms need every order's weights anyway, so the
    // sequence evaluation is reused and the top entry returned
    auto seq = seminorm_sequence(dom, u, beta, kind, m, flags, params);
    return seq.values.at(m);
}

} // namespace

SeminormValue k_seminorm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta,
                         int m, const QuadratureParams& params)
{
    return single_order(dom, u, beta, NormKind::K, m, {}, params);
}

SeminormValue j_norm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta, int m,
                     const QuadratureParams& params)
{
    return single_order(dom, u, beta, NormKind::J, m, {}, params);
}

SeminormValue step_weighted_norm(const NormDomain& dom, const Field& u,
                                 const WeightMultiExponent& beta, int m,
                                 const QuadratureParams& params)
{
    return single_order(dom, u, beta, NormKind::Step, m, {}, params);
}

SeminormValue m_seminorm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta,
                         int m, const QuadratureParams& params)
{
    return single_order(dom, u, beta, NormKind::M, m, {}, params);
}

SeminormValue n_norm(const NormDomain& dom, const Field& u, const WeightMultiExponent& beta, int m,
                     const NormFlags& flags, const QuadratureParams& params)
{
    return single_order(dom, u, beta, NormKind::N, m, flags, params);
}

AnalyticFitReport analytic_fit(const SeminormSequence& seq, int window1_lo, int window1_hi,
                               int window2_lo, int window2_hi, double drift_threshold)
{
    AnalyticFitReport rep;
    for (const auto& v : seq.values) {
        if (v.diverged()) {
            rep.member = false;
            rep.reason = "a seminorm in the sequence diverged";
            return rep;
        }
    }
    if (seq.finite_count() < 6)
        throw std::invalid_argument("analytic_fit: at least 6 finite seminorms required");

    bool all_zero = true;
    for (int m = 0; m < static_cast<int>(seq.values.size()); ++m) {
        const double s = seq.values[m].value;
        all_zero = all_zero && s == 0.0;
        rep.c_estimates.push_back(s > 0.0 ? std::pow(s / factorial(m), 1.0 / (m + 1)) : 0.0);
        rep.fitted_C = std::max(rep.fitted_C, rep.c_estimates.back());
    }
    if (all_zero) {
        rep.member = true;
        rep.fitted_C = 0.0;
        rep.reason = "zero field";
        return rep;
    }
    auto window_max = [&](int lo, int hi) {
        double w = 0.0;
        for (int m = std::max(0, lo); m <= std::min<int>(hi, rep.c_estimates.size() - 1); ++m)
            w = std::max(w, rep.c_estimates[m]);
        return w;
    };
    rep.window_low = window_max(window1_lo, window1_hi);
    rep.window_high = window_max(window2_lo, window2_hi);
    rep.drift = std::abs(rep.window_high - rep.window_low) /
                std::max({rep.window_low, rep.window_high, 1e-300});
    rep.member = rep.drift < drift_threshold;
    rep.reason = rep.member ? "window estimates stable" : "window estimates drift too much";
    return rep;
}

ShiftCheckReport shift_constant_check(const NormDomain& dom, const Field& u, const Field& f,
                                      const WeightMultiExponent& beta, int max_order,
                                      const QuadratureParams& params, double plateau_tolerance)
{
    if (max_order < 2)
        throw std::invalid_argument("shift_constant_check: max_order must be at least 2");
    WeightMultiExponent beta2 = beta;
    for (double& b : beta2.beta_c) b += 2.0;
    for (double& b : beta2.beta_e) b += 2.0;

    ShiftCheckReport rep;
    rep.u_seminorms = seminorm_sequence(dom, u, beta, NormKind::K, max_order, {}, params);
    rep.f_seminorms = seminorm_sequence(dom, f, beta2, NormKind::K, max_order - 2, {}, params);
    for (const auto& v : rep.u_seminorms.values)
        if (v.diverged()) throw std::runtime_error("shift_constant_check: divergent u seminorm");
    for (const auto& v : rep.f_seminorms.values)
        if (v.diverged()) throw std::runtime_error("shift_constant_check: divergent f seminorm");

    const double base = std::hypot(rep.u_seminorms.values[0].value,
                                   max_order >= 1 ? rep.u_seminorms.values[1].value : 0.0);
    double rhs = base;
    double max_all = 0.0, max_to8 = 0.0;
    for (int k = 2; k <= max_order; ++k) {
        rhs += rep.f_seminorms.values[k - 2].value / factorial(k - 2);
        const double lhs = rep.u_seminorms.values[k].value / factorial(k);
        const double C = (lhs == 0.0) ? 0.0 : std::pow(lhs / rhs, 1.0 / (k + 1));
        rep.orders.push_back(k);
        rep.C_k.push_back(C);
        max_all = std::max(max_all, C);
        if (k <= 8) max_to8 = std::max(max_to8, C);
    }
    rep.plateau_ratio = max_to8 > 0.0 ? max_all / max_to8 : 0.0;
    rep.bounded = rep.plateau_ratio <= plateau_tolerance;
    return rep;
}

} // namespace polyreg
