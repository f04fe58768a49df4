#include "jost/analysis.hpp"

#include "jost/errors.hpp"
#include "jost/parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace jost {

namespace {

constexpr double singular_guard = 1e-14;

double parity(int l) { return (l % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

DirectSource::DirectSource(ChannelSet cs, const RadialPotential& potential, SolverSettings settings)
    : cs_(std::move(cs)), potential_(potential), settings_(settings) {
    if (cs_.size() != potential_.channels())
        throw InvalidArgument("potential and channel set disagree on the channel count");
    settings_.validate();
}

JostPair DirectSource::jost(cplx energy, const SheetSelector& sheet) const {
    return integrate_direct(cs_, potential_, energy, sheet, settings_);
}

ExpansionSource::ExpansionSource(ExpansionTable table, std::string id) : table_(std::move(table)), id_(std::move(id)) {}

JostPair ExpansionSource::jost(cplx energy, const SheetSelector& sheet) const {
    return jost_from_expansion(table_, energy, sheet);
}

std::string ExpansionSource::label() const {
    if (!id_.empty()) return "expansion(" + id_ + ")";
    std::ostringstream os;
    os << "expansion(E0=" << table_.center.real() << (table_.center.imag() < 0 ? "-" : "+")
       << std::abs(table_.center.imag()) << "i;M=" << table_.order << ")";
    return os.str();
}

cplx determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("determinant of a non-square matrix");
    if (m.rows() == 0) return {1.0, 0.0};
    return Eigen::PartialPivLU<Matrix>(m).determinant();
}

cplx det_fin(const JostSource& source, cplx energy, const SheetSelector& sheet) {
    return determinant(source.jost(energy, sheet).F_in);
}

Matrix raw_s_matrix(const JostPair& jp) {
    const Eigen::PartialPivLU<Matrix> lu(jp.F_in);
    if (!(std::abs(lu.determinant()) > singular_guard))
        throw SingularPoint("F_in is singular at this energy (spectral point); S-matrix undefined");
    // S = F_out F_in^{-1}  <=>  F_in^T S^T = F_out^T
    return jp.F_in.transpose().partialPivLu().solve(jp.F_out.transpose()).transpose();
}

Matrix s_matrix(const ChannelSet& cs, const JostPair& jp) {
    Matrix s = raw_s_matrix(jp);
    const auto n = static_cast<Eigen::Index>(cs.size());
    if (s.rows() != n || jp.momenta.size() != cs.size())
        throw InvalidArgument("Jost pair does not match the channel set");
    std::vector<cplx> v(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) v[c] = cs.hbar() * jp.momenta[c] / cs[c].reduced_mass;
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index c = 0; c < n; ++c)
            if (m != c) s(m, c) *= std::sqrt(v[static_cast<std::size_t>(m)] / v[static_cast<std::size_t>(c)]);
    return s;
}

bool CrossSectionRow::applicable(std::size_t entrance) const {
    return !std::isnan(sigma(static_cast<Eigen::Index>(entrance), 0));
}

CrossSectionRow cross_sections(const ChannelSet& cs, double energy, const Matrix& s) {
    const auto n = static_cast<Eigen::Index>(cs.size());
    if (s.rows() != n || s.cols() != n) throw InvalidArgument("S-matrix does not match the channel set");
    if (!std::isfinite(energy)) throw InvalidArgument("energy must be finite");
    CrossSectionRow row{energy, Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN())};
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& in = cs[static_cast<std::size_t>(a)];
        if (!(energy > in.threshold)) continue;
        const double k2 = cs.momentum_squared(static_cast<std::size_t>(a), energy).real();
        for (Eigen::Index b = 0; b < n; ++b) {
            if (!(energy > cs[static_cast<std::size_t>(b)].threshold)) {
                row.sigma(a, b) = 0.0;
                continue;
            }
            const cplx t = s(b, a) - (a == b ? 1.0 : 0.0);
            row.sigma(a, b) = std::numbers::pi / k2 * (2 * in.angular_momentum + 1) * std::norm(t);
        }
    }
    return row;
}

SpectralPoint find_spectral_point(const JostSource& source, cplx guess, const SheetSelector& sheet,
                                  const RootSettings& settings) {
    if (!std::isfinite(guess.real()) || !std::isfinite(guess.imag())) throw InvalidArgument("guess must be finite");
    if (settings.max_iter < 1 || !(settings.initial_step > 0.0) || !(settings.tol > 0.0))
        throw InvalidArgument("invalid root-finder settings");
    if (sheet.size() != source.channels().size()) throw InvalidArgument("sheet selector length mismatch");

    auto f = [&](cplx e) {
        try {
            return det_fin(source, e, sheet);
        } catch (const Error& ex) {
            throw NoConvergence(std::string("root search left the solver's valid region: ") + ex.what());
        }
    };
    auto done = [&](cplx e, cplx fe, int iter) {
        return SpectralPoint{e, sheet, std::abs(fe), iter, source.label()};
    };

    // real guess on an unphysical sheet: start at E - i0
    const double h = settings.initial_step;
    const cplx shift = (guess.imag() == 0.0 && !sheet.is_physical()) ? cplx{0.0, -h} : cplx{0.0, 0.0};
    cplx x0 = guess - h + shift, x1 = guess + h + shift, x2 = guess + shift;
    cplx f0 = f(x0), f1 = f(x1), f2 = f(x2);
    if (std::abs(f2) < settings.det_tol) return done(x2, f2, 0);

    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        const cplx h1 = x1 - x0, h2 = x2 - x1;
        const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
        const cplx a = (d2 - d1) / (h2 + h1);
        const cplx b = a * h2 + d2;
        const cplx disc = std::sqrt(b * b - 4.0 * f2 * a);
        const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
        const cplx dx = den == cplx{0.0, 0.0} ? h2 : -2.0 * f2 / den;
        const cplx x3 = x2 + dx;
        if (!std::isfinite(x3.real()) || !std::isfinite(x3.imag())) throw NoConvergence("root search diverged");
        const cplx f3 = f(x3);
        if (std::abs(dx) < settings.tol * (1.0 + std::abs(x3)) || std::abs(f3) < settings.det_tol)
            return done(x3, f3, iter);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = f3;
    }
    throw NoConvergence("root search did not converge within the iteration limit");
}

std::vector<SpectralPoint> bound_state_scan(const JostSource& source, double lo, double hi,
                                            const ScanSettings& settings) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("scan interval must satisfy lo < hi");
    if (!(settings.samples_per_unit > 0.0) || !(settings.percentile > 0.0) || settings.percentile > 1.0)
        throw InvalidArgument("invalid scan settings");
    const SheetSelector sheet = physical_sheet(source.channels());
    const auto count = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil((hi - lo) * settings.samples_per_unit)) + 1);
    const double spacing = (hi - lo) / static_cast<double>(count - 1);
    auto energy_at = [&](std::size_t i) { return i + 1 == count ? hi : lo + spacing * static_cast<double>(i); };

    const cplx nan{std::numeric_limits<double>::quiet_NaN(), 0.0};
    std::vector<cplx> det(count, nan);
    std::vector<double> mag(count, std::numeric_limits<double>::quiet_NaN());
    parallel_for(count, settings.jobs, [&](std::size_t i) {
        try {
            det[i] = det_fin(source, energy_at(i), sheet);
            mag[i] = std::abs(det[i]);
        } catch (const Error&) {
        }
    });

    std::vector<double> finite;
    for (double m : mag)
        if (std::isfinite(m)) finite.push_back(m);
    if (finite.size() < 3) return {};
    std::sort(finite.begin(), finite.end());
    const double cut = finite[static_cast<std::size_t>(settings.percentile * static_cast<double>(finite.size() - 1))];

    std::vector<double> seeds;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        const double m = mag[i];
        if (!std::isfinite(m) || !std::isfinite(mag[i - 1]) || !std::isfinite(mag[i + 1])) continue;
        if (m < mag[i - 1] && m <= mag[i + 1] && m <= cut) seeds.push_back(energy_at(i));
    }
    // sign flips
    for (std::size_t i = 0; i + 1 < count; ++i) {
        if (!std::isfinite(mag[i]) || !std::isfinite(mag[i + 1])) continue;
        if ((det[i] * std::conj(det[i + 1])).real() < 0.0) {
            const double w = mag[i] / (mag[i] + mag[i + 1]);
            seeds.push_back(energy_at(i) + w * (energy_at(i + 1) - energy_at(i)));
        }
    }
    std::sort(seeds.begin(), seeds.end());

    RootSettings root = settings.root;
    root.initial_step = std::min(root.initial_step, spacing);
    std::vector<std::optional<SpectralPoint>> found(seeds.size());
    parallel_for(seeds.size(), settings.jobs, [&](std::size_t i) {
        try {
            found[i] = find_spectral_point(source, cplx{seeds[i], 0.0}, sheet, root);
        } catch (const Error&) {
        }
    });

    std::vector<SpectralPoint> points;
    for (auto& p : found) {
        if (!p) continue;
        const cplx e = p->energy;
        if (std::abs(e.imag()) > 1e-6 * (1.0 + std::abs(e))) continue;
        if (e.real() < lo || e.real() > hi) continue;
        points.push_back(std::move(*p));
    }
    sort_spectral_points(points);
    std::vector<SpectralPoint> unique;
    for (auto& p : points)
        if (unique.empty() || std::abs(p.energy - unique.back().energy) > settings.dedup) unique.push_back(std::move(p));
    return unique;
}

namespace {

double symmetry_gap(const ChannelSet& cs, const JostPair& jp, const JostPair& flipped) {
    double worst = 0.0;
    const auto n = static_cast<Eigen::Index>(cs.size());
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double sign = parity(cs[static_cast<std::size_t>(m)].angular_momentum) *
                                parity(cs[static_cast<std::size_t>(c)].angular_momentum);
            worst = std::max(worst, std::abs(flipped.F_in(m, c) - sign * jp.F_out(m, c)));
        }
    return worst;
}

}  // namespace

double symmetry_residual(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings,
                         const SheetSelector& sheet) {
    const TildePair tp = integrate_tilde(cs, p, energy, settings);
    return symmetry_gap(cs, jost_from_tilde(cs, tp, energy, sheet), jost_from_tilde(cs, tp, energy, sheet.flipped()));
}

double symmetry_residual(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings) {
    return symmetry_residual(cs, p, energy, settings, physical_sheet(cs));
}

double symmetry_residual_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy,
                                const SolverSettings& settings, const SheetSelector& sheet) {
    return symmetry_gap(cs, integrate_direct(cs, p, energy, sheet, settings),
                        integrate_direct(cs, p, energy, sheet.flipped(), settings));
}

void sort_spectral_points(std::vector<SpectralPoint>& points) {
    std::stable_sort(points.begin(), points.end(), [](const SpectralPoint& a, const SpectralPoint& b) {
        if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
        return a.energy.imag() < b.energy.imag();
    });
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectralPoint>& points) {
    const auto old_precision = os.precision(12);
    os << "re_E,im_E,sheet,residual,source\n";
    for (const auto& p : points)
        os << p.energy.real() << ',' << p.energy.imag() << ',' << p.sheet.to_string() << ',' << p.residual << ','
           << p.source << '\n';
    os.precision(old_precision);
}

void write_cross_section_csv(std::ostream& os, std::size_t channels, const std::vector<CrossSectionRow>& rows) {
    const auto old_precision = os.precision(12);
    os << 'E';
    for (std::size_t a = 1; a <= channels; ++a)
        for (std::size_t b = 1; b <= channels; ++b) os << ",sigma_" << a << b;
    os << '\n';
    for (const auto& row : rows) {
        os << row.energy;
        for (Eigen::Index a = 0; a < row.sigma.rows(); ++a)
            for (Eigen::Index b = 0; b < row.sigma.cols(); ++b) {
                os << ',';
                if (!std::isnan(row.sigma(a, b))) os << row.sigma(a, b);
            }
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace jost
