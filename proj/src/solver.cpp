#include "jost/solver.hpp"

#include "jost/errors.hpp"
#include "jost/ode.hpp"
#include "jost/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jost {

namespace {

constexpr double threshold_guard = 1e-6;
constexpr int rotation_samples = 49;
constexpr double rotation_limit = 1.2;
// local error per step relative to the requested global accuracy
constexpr double local_tol_factor = 0.1;
const cplx I{0.0, 1.0};

ode::Settings ode_settings(const SolverSettings& s) {
    ode::Settings o;
    o.rel_tol = local_tol_factor * s.rel_tol;
    o.abs_tol = local_tol_factor * s.abs_tol;
    o.max_steps = s.max_steps;
    return o;
}

void check_channels(const ChannelSet& cs, const RadialPotential& p) {
    if (cs.size() != p.channels()) throw InvalidArgument("potential and channel set disagree on the channel count");
}

void check_energy(cplx e) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) throw InvalidArgument("energy must be finite");
}

void check_theta_allowed(const RadialPotential& p, double theta) {
    const double limit = p.max_rotation();
    if (limit == 0.0 ? theta != 0.0 : std::abs(theta) >= limit)
        throw InvalidArgument("rotation angle outside the potential's analyticity sector");
}

// 2 mu_n / hbar^2 per channel; rows of the coupling matrix are scaled by it.
Eigen::VectorXcd coupling_scale(const ChannelSet& cs) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(cs.size()));
    for (std::size_t c = 0; c < cs.size(); ++c)
        out[static_cast<Eigen::Index>(c)] = 2.0 * cs[c].reduced_mass / (cs.hbar() * cs.hbar());
    return out;
}

// Energies this close to the real axis are treated as real when picking the contour.
bool near_real(cplx e) { return std::abs(e.imag()) <= 1e-9 * (1.0 + std::abs(e)); }

std::string describe_energy(cplx e) {
    std::ostringstream os;
    os.precision(10);
    os << "E = " << e.real() << (e.imag() < 0 ? " - " : " + ") << std::abs(e.imag()) << "i";
    return os.str();
}

// Flattened matrix views into the integrator state.
using MapM = Eigen::Map<Matrix>;
using CMapM = Eigen::Map<const Matrix>;

double scan_rotation(const RadialPotential& p, const auto& margin_at) {
    const double limit = p.max_rotation();
    double best_theta = 0.0;
    double best = margin_at(0.0);
    if (limit == 0.0) return best > 0.0 ? best_theta : std::numeric_limits<double>::quiet_NaN();
    best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rotation_samples; ++i) {
        const double theta = -rotation_limit + 2.0 * rotation_limit * i / (rotation_samples - 1);
        if (std::abs(theta) >= limit) continue;
        const double m = margin_at(theta);
        if (m > best) {
            best = m;
            best_theta = theta;
        }
    }
    return best > 0.0 ? best_theta : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void SolverSettings::validate() const {
    if (!(r_min > 0.0) || !(R > r_min) || !std::isfinite(R))
        throw InvalidArgument("solver settings need 0 < r_min < R");
    if (theta && !(std::abs(*theta) < std::numbers::pi / 2.0))
        throw InvalidArgument("rotation angle must satisfy |theta| < pi/2");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("solver tolerances must be positive");
    if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
}

ContourPath build_contour(const SolverSettings& settings) {
    settings.validate();
    const double theta = settings.theta.value_or(0.0);
    ContourPath c{};
    c.start = cplx{settings.r_min, 0.0};
    c.end = std::polar(settings.R, theta);
    const cplx span = c.end - c.start;
    c.length = std::abs(span);
    c.direction = span / c.length;
    c.theta = theta;
    return c;
}

ExpansionTable ExpansionTable::truncated(int new_order) const {
    if (new_order < 0 || new_order > order) throw InvalidArgument("truncation order out of range");
    ExpansionTable out = *this;
    out.order = new_order;
    out.a.resize(static_cast<std::size_t>(new_order) + 1);
    out.b.resize(static_cast<std::size_t>(new_order) + 1);
    return out;
}

// ---------------------------------------------------------------------------
// rotation

double decay_margin(const ChannelSet& cs, const RadialPotential& p, cplx energy, double theta) {
    check_channels(cs, p);
    const Eigen::MatrixXd lambda = p.decay_rates();
    const cplx rot = std::polar(1.0, theta);
    std::vector<double> growth(cs.size());
    for (std::size_t n = 0; n < cs.size(); ++n)
        growth[n] = std::abs((upper_sqrt(cs.momentum_squared(n, energy)) * rot).imag());
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = 0; b < cs.size(); ++b) {
            const auto ia = static_cast<Eigen::Index>(a);
            const auto ib = static_cast<Eigen::Index>(b);
            margin = std::min(margin, lambda(ia, ib) * std::cos(theta) - growth[a] - growth[b]);
        }
    return margin;
}

double direct_decay_margin(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SheetSelector& sheet,
                           double theta) {
    const double full = decay_margin(cs, p, energy, theta);
    if (!near_real(energy) || !sheet.is_physical() || theta != 0.0) return full;
    // F_in integrand h^(+)_m V h^(-)_p ~ exp((kappa_p - kappa_m - lambda) r)
    const Eigen::MatrixXd lambda = p.decay_rates();
    const auto k = channel_momenta(cs, energy, sheet);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = 0; b < cs.size(); ++b)
            margin = std::min(margin, lambda(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) -
                                          std::abs(k[b].imag() - k[a].imag()));
    return std::max(full, margin);
}

double choose_rotation(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings) {
    check_energy(energy);
    if (settings.theta) {
        check_theta_allowed(p, *settings.theta);
        if (!(decay_margin(cs, p, energy, *settings.theta) > 0.0))
            throw DivergenceError("outside analyticity/convergence domain for the given rotation at " +
                                  describe_energy(energy));
        return *settings.theta;
    }
    if (near_real(energy) && decay_margin(cs, p, energy, 0.0) > 0.0) return 0.0;
    const double theta = scan_rotation(p, [&](double t) { return decay_margin(cs, p, energy, t); });
    if (std::isnan(theta))
        throw DivergenceError("outside analyticity/convergence domain: no rotation angle works at " +
                              describe_energy(energy));
    return theta;
}

double choose_rotation_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SheetSelector& sheet,
                              const SolverSettings& settings) {
    check_energy(energy);
    if (settings.theta) {
        check_theta_allowed(p, *settings.theta);
        if (!(direct_decay_margin(cs, p, energy, sheet, *settings.theta) > 0.0))
            throw DivergenceError("outside convergence domain for the given rotation at " + describe_energy(energy));
        return *settings.theta;
    }
    if (near_real(energy) && direct_decay_margin(cs, p, energy, sheet, 0.0) > 0.0) return 0.0;
    const double theta = scan_rotation(p, [&](double t) { return decay_margin(cs, p, energy, t); });
    if (std::isnan(theta))
        throw DivergenceError("outside convergence domain: no rotation angle works at " + describe_energy(energy));
    return theta;
}

// ---------------------------------------------------------------------------
// tilded equations

TildePair integrate_tilde(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings) {
    settings.validate();
    check_channels(cs, p);
    SolverSettings resolved = settings;
    resolved.theta = choose_rotation(cs, p, energy, settings);
    const ContourPath path = build_contour(resolved);

    const auto n = static_cast<Eigen::Index>(cs.size());
    std::vector<cplx> k2(cs.size());
    std::vector<int> ell(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) {
        k2[c] = cs.momentum_squared(c, energy);
        ell[c] = cs[c].angular_momentum;
    }

    const Eigen::VectorXcd scale = coupling_scale(cs);
    Matrix v(n, n), q(n, n), pv(n, n);
    Eigen::VectorXcd tj(n), ty(n);
    auto rhs = [&](double s, const ode::Vector& y, ode::Vector& dy) {
        const cplx r = path.at(s);
        p.evaluate_into(r, v);
        v = scale.asDiagonal() * v;
        for (Eigen::Index c = 0; c < n; ++c) {
            tj[c] = riccati::tilde_j_sq(ell[static_cast<std::size_t>(c)], k2[static_cast<std::size_t>(c)], r);
            ty[c] = riccati::tilde_y_sq(ell[static_cast<std::size_t>(c)], k2[static_cast<std::size_t>(c)], r);
        }
        CMapM a(y.data(), n, n);
        CMapM b(y.data() + n * n, n, n);
        q.noalias() = tj.asDiagonal() * a;
        q.noalias() -= ty.asDiagonal() * b;
        pv.noalias() = v * q;
        MapM da(dy.data(), n, n);
        MapM db(dy.data() + n * n, n, n);
        da.noalias() = -path.direction * (ty.asDiagonal() * pv);
        db.noalias() = -path.direction * (tj.asDiagonal() * pv);
    };

    ode::Vector y0 = ode::Vector::Zero(2 * n * n);
    MapM(y0.data(), n, n).setIdentity();
    const ode::Vector y = ode::integrate_dopri5(rhs, 0.0, path.length, std::move(y0), ode_settings(settings));

    TildePair out;
    out.A_tilde = CMapM(y.data(), n, n);
    out.B_tilde = CMapM(y.data() + n * n, n, n);
    out.theta = path.theta;
    return out;
}

JostPair assemble_jost(const ChannelSet& cs, const Matrix& a_tilde, const Matrix& b_tilde, cplx energy,
                       const SheetSelector& sheet) {
    const auto k = channel_momenta(cs, energy, sheet);
    const auto n = static_cast<Eigen::Index>(cs.size());
    if (a_tilde.rows() != n || a_tilde.cols() != n || b_tilde.rows() != n || b_tilde.cols() != n)
        throw InvalidArgument("tilded matrices do not match the channel count");
    std::vector<cplx> k_l(cs.size()), k_l1(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) {
        if (k[c] == cplx{0.0, 0.0})
            throw SingularPoint("Jost matrix requested exactly at a threshold (k = 0 in a denominator)");
        k_l[c] = std::pow(k[c], cs[c].angular_momentum);
        k_l1[c] = k_l[c] * k[c];
    }
    JostPair jp{Matrix(n, n), Matrix(n, n), energy, sheet, k};
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto mm = static_cast<std::size_t>(m);
            const auto cc = static_cast<std::size_t>(c);
            const cplx first = k_l1[cc] / (2.0 * k_l1[mm]) * a_tilde(m, c);
            const cplx second = I * k_l[mm] * k_l1[cc] / 2.0 * b_tilde(m, c);
            jp.F_in(m, c) = first - second;
            jp.F_out(m, c) = first + second;
        }
    }
    return jp;
}

JostPair jost_from_tilde(const ChannelSet& cs, const TildePair& tp, cplx energy, const SheetSelector& sheet) {
    return assemble_jost(cs, tp.A_tilde, tp.B_tilde, energy, sheet);
}

// ---------------------------------------------------------------------------
// direct equations

JostPair integrate_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SheetSelector& sheet,
                          const SolverSettings& settings) {
    settings.validate();
    check_channels(cs, p);
    const auto k = channel_momenta(cs, energy, sheet);
    for (const cplx kn : k)
        if (std::abs(kn) < threshold_guard)
            throw SingularPoint("direct Jost integration too close to a threshold; use the tilded route");

    SolverSettings resolved = settings;
    resolved.theta = choose_rotation_direct(cs, p, energy, sheet, settings);
    const ContourPath path = build_contour(resolved);

    const auto n = static_cast<Eigen::Index>(cs.size());
    std::vector<int> ell(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) ell[c] = cs[c].angular_momentum;

    const Eigen::VectorXcd scale = coupling_scale(cs);
    Matrix v(n, n), phi(n, n), pv(n, n);
    Eigen::VectorXcd hp(n), hm(n), fin_factor(n), fout_factor(n);
    const cplx half_over_i = 1.0 / (2.0 * I);
    auto rhs = [&](double s, const ode::Vector& y, ode::Vector& dy) {
        const cplx r = path.at(s);
        p.evaluate_into(r, v);
        v = scale.asDiagonal() * v;
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            hp[c] = riccati::h(+1, ell[cc], k[cc] * r);
            hm[c] = riccati::h(-1, ell[cc], k[cc] * r);
            fin_factor[c] = -half_over_i * hp[c] / k[cc];
            fout_factor[c] = half_over_i * hm[c] / k[cc];
        }
        CMapM fin(y.data(), n, n);
        CMapM fout(y.data() + n * n, n, n);
        phi.noalias() = hm.asDiagonal() * fin;
        phi.noalias() += hp.asDiagonal() * fout;
        pv.noalias() = v * phi;
        MapM dfin(dy.data(), n, n);
        MapM dfout(dy.data() + n * n, n, n);
        dfin.noalias() = path.direction * (fin_factor.asDiagonal() * pv);
        dfout.noalias() = path.direction * (fout_factor.asDiagonal() * pv);
    };

    ode::Vector y0 = ode::Vector::Zero(2 * n * n);
    MapM(y0.data(), n, n).setIdentity();
    MapM(y0.data() + n * n, n, n).setIdentity();
    y0 *= 0.5;
    const ode::Vector y = ode::integrate_dopri5(rhs, 0.0, path.length, std::move(y0), ode_settings(settings));

    return JostPair{CMapM(y.data(), n, n), CMapM(y.data() + n * n, n, n), energy, sheet, k};
}

// ---------------------------------------------------------------------------
// expansion coefficients

ExpansionTable integrate_coefficients(const ChannelSet& cs, const RadialPotential& p, cplx center, int order,
                                      const SolverSettings& settings) {
    settings.validate();
    check_channels(cs, p);
    if (order < 0) throw InvalidArgument("expansion order must be non-negative");
    if (order + 1 + [&] {
            int lmax = 0;
            for (const auto& c : cs.channels()) lmax = std::max(lmax, c.angular_momentum);
            return lmax;
        }() > riccati::max_order)
        throw InvalidArgument("expansion order too large for the Riccati function range");

    SolverSettings resolved = settings;
    resolved.theta = choose_rotation(cs, p, center, settings);
    const ContourPath path = build_contour(resolved);

    const auto n = static_cast<Eigen::Index>(cs.size());
    const auto terms = static_cast<std::size_t>(order) + 1;
    const Eigen::Index block = n * n;

    // gamma[j](c), eta[j](c): diagonal Taylor coefficient matrices
    std::vector<Eigen::VectorXcd> gamma(terms, Eigen::VectorXcd(n)), eta(terms, Eigen::VectorXcd(n));
    std::vector<Matrix> qm(terms, Matrix(n, n));
    std::vector<cplx> g(terms), t(terms);
    const Eigen::VectorXcd scale = coupling_scale(cs);
    Matrix v(n, n), pm(n, n);

    auto rhs = [&](double s, const ode::Vector& y, ode::Vector& dy) {
        const cplx r = path.at(s);
        p.evaluate_into(r, v);
        v = scale.asDiagonal() * v;
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& ch = cs[static_cast<std::size_t>(c)];
            riccati::taylor_coefficients(ch.angular_momentum, center - ch.threshold, r, ch.reduced_mass, cs.hbar(), g, t);
            for (std::size_t j = 0; j < terms; ++j) {
                gamma[j][c] = g[j];
                eta[j][c] = t[j];
            }
        }
        auto alpha = [&](std::size_t i) { return CMapM(y.data() + static_cast<Eigen::Index>(i) * block, n, n); };
        auto beta = [&](std::size_t i) {
            return CMapM(y.data() + static_cast<Eigen::Index>(terms + i) * block, n, n);
        };
        // Q_m = V sum_{j+k=m} (gamma_j alpha_k - eta_j beta_k)
        for (std::size_t m = 0; m < terms; ++m) {
            pm.setZero();
            for (std::size_t j = 0; j <= m; ++j) {
                pm.noalias() += gamma[j].asDiagonal() * alpha(m - j);
                pm.noalias() -= eta[j].asDiagonal() * beta(m - j);
            }
            qm[m].noalias() = v * pm;
        }
        for (std::size_t idx = 0; idx < terms; ++idx) {
            MapM da(dy.data() + static_cast<Eigen::Index>(idx) * block, n, n);
            MapM db(dy.data() + static_cast<Eigen::Index>(terms + idx) * block, n, n);
            da.setZero();
            db.setZero();
            for (std::size_t i = 0; i <= idx; ++i) {
                da.noalias() -= eta[i].asDiagonal() * qm[idx - i];
                db.noalias() -= gamma[i].asDiagonal() * qm[idx - i];
            }
            da *= path.direction;
            db *= path.direction;
        }
    };

    ode::Vector y0 = ode::Vector::Zero(static_cast<Eigen::Index>(2 * terms) * block);
    MapM(y0.data(), n, n).setIdentity();
    const ode::Vector y = ode::integrate_dopri5(rhs, 0.0, path.length, std::move(y0), ode_settings(settings));

    ExpansionTable table{center, order, {}, {}, resolved, cs, p.description()};
    for (std::size_t i = 0; i < terms; ++i) {
        table.a.emplace_back(CMapM(y.data() + static_cast<Eigen::Index>(i) * block, n, n));
        table.b.emplace_back(CMapM(y.data() + static_cast<Eigen::Index>(terms + i) * block, n, n));
    }
    return table;
}

}  // namespace jost
