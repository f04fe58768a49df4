#include "jost/expansion.hpp"

#include "jost/errors.hpp"
#include "jost/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace jost {

namespace {

void check_same_channels(const ChannelSet& a, const ChannelSet& b) {
    bool same = a.size() == b.size() && a.hbar() == b.hbar();
    for (std::size_t n = 0; same && n < a.size(); ++n)
        same = a[n].threshold == b[n].threshold && a[n].reduced_mass == b[n].reduced_mass &&
               a[n].angular_momentum == b[n].angular_momentum;
    if (!same) throw InvalidArgument("expansion table was built for a different channel set");
}

}  // namespace

JostPair jost_from_expansion(const ExpansionTable& table, cplx energy, const SheetSelector& sheet) {
    if (table.a.empty() || table.a.size() != table.b.size())
        throw InvalidArgument("expansion table has no coefficients");
    const cplx de = energy - table.center;
    Matrix a = table.a.back();
    Matrix b = table.b.back();
    for (std::size_t j = table.a.size() - 1; j-- > 0;) {
        a = a * de + table.a[j];
        b = b * de + table.b[j];
    }
    return assemble_jost(table.channels, a, b, energy, sheet);
}

JostPair jost_from_expansion(const ExpansionTable& table, const ChannelSet& cs, cplx energy,
                             const SheetSelector& sheet) {
    check_same_channels(table.channels, cs);
    return jost_from_expansion(table, energy, sheet);
}

DomainCheck domain_d_contains(const ChannelSet& cs, const RadialPotential& p, cplx energy) {
    if (cs.size() != p.channels()) throw InvalidArgument("potential and channel set disagree on the channel count");
    double growth = 0.0;
    for (std::size_t n = 0; n < cs.size(); ++n)
        growth = std::max(growth, std::abs(2.0 * upper_sqrt(cs.momentum_squared(n, energy)).imag()));
    const double margin = p.min_decay_rate() - growth;
    return {margin > 0.0, margin};
}

std::vector<double> domain_real_axis_crossings(const ChannelSet& cs, const RadialPotential& p, double lo, double hi,
                                               int samples) {
    if (!(hi > lo) || samples < 2) throw InvalidArgument("crossing search needs lo < hi and at least two samples");
    auto margin = [&](double x) { return domain_d_contains(cs, p, cplx{x, 0.0}).margin; };
    std::vector<double> out;
    double x0 = lo;
    double m0 = margin(x0);
    for (int i = 1; i < samples; ++i) {
        const double x1 = lo + (hi - lo) * i / (samples - 1);
        const double m1 = margin(x1);
        if ((m0 > 0.0) != (m1 > 0.0)) {
            double a = x0, b = x1;
            const bool a_inside = m0 > 0.0;
            for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
                const double mid = 0.5 * (a + b);
                if ((margin(mid) > 0.0) == a_inside)
                    a = mid;
                else
                    b = mid;
            }
            out.push_back(0.5 * (a + b));
        }
        x0 = x1;
        m0 = m1;
    }
    return out;
}

std::optional<double> domain_upper_edge(const ChannelSet& cs, const RadialPotential& p, double re_energy,
                                        double im_max) {
    auto margin = [&](double im) { return domain_d_contains(cs, p, cplx{re_energy, im}).margin; };
    if (!(margin(0.0) > 0.0)) return std::nullopt;
    if (margin(im_max) > 0.0) return im_max;
    double a = 0.0, b = im_max;
    for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + b); ++it) {
        const double mid = 0.5 * (a + b);
        if (margin(mid) > 0.0)
            a = mid;
        else
            b = mid;
    }
    return a;
}

void EnergyGrid::validate() const {
    if (n_re < 1 || n_im < 1) throw InvalidArgument("grid needs at least one point per axis");
    if (!(re_max >= re_min) || !(im_max >= im_min)) throw InvalidArgument("grid bounds must be ordered");
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) || !std::isfinite(im_max))
        throw InvalidArgument("grid bounds must be finite");
}

cplx EnergyGrid::point(std::size_t index) const {
    const auto i_re = static_cast<int>(index % static_cast<std::size_t>(n_re));
    const auto i_im = static_cast<int>(index / static_cast<std::size_t>(n_re));
    const double re = n_re == 1 ? re_min : re_min + (re_max - re_min) * i_re / (n_re - 1);
    const double im = n_im == 1 ? im_min : im_min + (im_max - im_min) * i_im / (n_im - 1);
    return {re, im};
}

std::size_t AccuracyMap::count_below(double level) const {
    std::size_t count = 0;
    for (const auto& e : rel_err)
        if (e && *e < level) ++count;
    return count;
}

std::vector<std::optional<cplx>> direct_determinants(const ChannelSet& cs, const RadialPotential& p,
                                                     const EnergyGrid& grid, const SheetSelector& sheet,
                                                     const SolverSettings& settings, unsigned jobs) {
    grid.validate();
    settings.validate();
    std::vector<std::optional<cplx>> dets(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        try {
            dets[i] = integrate_direct(cs, p, grid.point(i), sheet, settings).F_in.determinant();
        } catch (const Error&) {
            dets[i].reset();
        }
    });
    return dets;
}

AccuracyMap accuracy_map(const ExpansionTable& table, const EnergyGrid& grid, const SheetSelector& sheet,
                         const std::vector<std::optional<cplx>>& direct_dets) {
    grid.validate();
    if (direct_dets.size() != grid.size()) throw InvalidArgument("determinant list does not match the grid");
    AccuracyMap map{grid, sheet, std::vector<std::optional<double>>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!direct_dets[i] || *direct_dets[i] == cplx{0.0, 0.0}) continue;
        try {
            const cplx approx = jost_from_expansion(table, grid.point(i), sheet).F_in.determinant();
            const double err = std::abs(approx - *direct_dets[i]) / std::abs(*direct_dets[i]);
            if (std::isfinite(err)) map.rel_err[i] = err;
        } catch (const Error&) {
        }
    }
    return map;
}

AccuracyMap accuracy_map(const ExpansionTable& table, const ChannelSet& cs, const RadialPotential& p,
                         const EnergyGrid& grid, const SheetSelector& sheet, const SolverSettings& settings,
                         unsigned jobs) {
    check_same_channels(table.channels, cs);
    return accuracy_map(table, grid, sheet, direct_determinants(cs, p, grid, sheet, settings, jobs));
}

void write_accuracy_csv(std::ostream& os, const AccuracyMap& map) {
    const auto old_precision = os.precision(12);
    os << "re_E,im_E,rel_err\n";
    for (std::size_t i = 0; i < map.rel_err.size(); ++i) {
        const cplx e = map.grid.point(i);
        os << e.real() << ',' << e.imag() << ',';
        if (map.rel_err[i]) os << *map.rel_err[i];
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace jost
