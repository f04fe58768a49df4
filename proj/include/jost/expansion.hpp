#pragma once

#include "jost/solver.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace jost {

/// Semi-analytic Jost pair from the truncated power series of A~, B~ around the table
/// centre. The sheet only enters through the momentum factors.
JostPair jost_from_expansion(const ExpansionTable& table, cplx energy, const SheetSelector& sheet);

/// Same, checking that `cs` matches the channels the table was built for.
JostPair jost_from_expansion(const ExpansionTable& table, const ChannelSet& cs, cplx energy, const SheetSelector& sheet);

struct DomainCheck {
    bool inside = false;
    /// min lambda - max_n |2 Im sqrt(2 mu_n (E - E_n)) / hbar|; positive inside D.
    double margin = 0.0;
};

DomainCheck domain_d_contains(const ChannelSet& cs, const RadialPotential& p, cplx energy);

/// Points on the real segment [lo, hi] where the boundary of D crosses the axis,
/// located by bisection after sampling the margin at `samples` points.
std::vector<double> domain_real_axis_crossings(const ChannelSet& cs, const RadialPotential& p, double lo, double hi,
                                               int samples = 2001);

/// Upper edge of D above a given Re E: the largest Im E >= 0 (up to im_max) still
/// inside D, or empty when Re E itself is outside. D is symmetric under E -> conj(E).
std::optional<double> domain_upper_edge(const ChannelSet& cs, const RadialPotential& p, double re_energy,
                                        double im_max);

/// Rectangular grid of complex energies; index (i_re, i_im), both inclusive of the corners.
struct EnergyGrid {
    double re_min = 0.0, re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;
    int n_re = 101, n_im = 101;

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(n_re) * static_cast<std::size_t>(n_im); }
    /// Cell index ordering: im-major rows, re varying fastest.
    cplx point(std::size_t index) const;
};

struct AccuracyMap {
    EnergyGrid grid;
    SheetSelector sheet;
    /// Relative error of det F_in per cell (same ordering as EnergyGrid::point); empty where
    /// the direct solver failed.
    std::vector<std::optional<double>> rel_err;

    /// Number of cells with rel_err below `level`.
    std::size_t count_below(double level) const;
};

/// Direct determinants on a grid; failed cells are empty. Reusable across tables.
std::vector<std::optional<cplx>> direct_determinants(const ChannelSet& cs, const RadialPotential& p,
                                                     const EnergyGrid& grid, const SheetSelector& sheet,
                                                     const SolverSettings& settings, unsigned jobs = 1);

AccuracyMap accuracy_map(const ExpansionTable& table, const ChannelSet& cs, const RadialPotential& p,
                         const EnergyGrid& grid, const SheetSelector& sheet, const SolverSettings& settings,
                         unsigned jobs = 1);

/// Variant taking determinants from direct_determinants().
AccuracyMap accuracy_map(const ExpansionTable& table, const EnergyGrid& grid, const SheetSelector& sheet,
                         const std::vector<std::optional<cplx>>& direct_dets);

/// CSV with header `re_E,im_E,rel_err`; missing cells leave the third field empty.
void write_accuracy_csv(std::ostream& os, const AccuracyMap& map);

}  // namespace jost
