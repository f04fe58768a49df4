#pragma once

#include "jost/expansion.hpp"
#include "jost/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace jost {

/// Something that produces Jost pairs: the direct solver or an expansion table.
class JostSource {
public:
    virtual ~JostSource() = default;
    virtual const ChannelSet& channels() const = 0;
    virtual JostPair jost(cplx energy, const SheetSelector& sheet) const = 0;
    /// "direct" or "expansion(<id>)".
    virtual std::string label() const = 0;
};

/// Direct integration. Keeps a reference to the potential.
class DirectSource final : public JostSource {
public:
    DirectSource(ChannelSet cs, const RadialPotential& potential, SolverSettings settings);
    const ChannelSet& channels() const override { return cs_; }
    JostPair jost(cplx energy, const SheetSelector& sheet) const override;
    std::string label() const override { return "direct"; }

private:
    ChannelSet cs_;
    const RadialPotential& potential_;
    SolverSettings settings_;
};

class ExpansionSource final : public JostSource {
public:
    explicit ExpansionSource(ExpansionTable table, std::string id = {});
    const ChannelSet& channels() const override { return table_.channels; }
    JostPair jost(cplx energy, const SheetSelector& sheet) const override;
    std::string label() const override;
    const ExpansionTable& table() const { return table_; }

private:
    ExpansionTable table_;
    std::string id_;
};

/// Determinant by partially pivoted LU.
cplx determinant(const Matrix& m);

cplx det_fin(const JostSource& source, cplx energy, const SheetSelector& sheet);

/// S = F_out F_in^{-1} as produced by the Jost matrices. Throws SingularPoint when
/// |det F_in| <= 1e-14.
Matrix raw_s_matrix(const JostPair& jp);

/// Flux-normalised S-matrix, S_mn = sqrt(v_m / v_n) [F_out F_in^{-1}]_mn with v_n = hbar k_n / mu_n.
/// Unitary for real energies above all thresholds.
Matrix s_matrix(const ChannelSet& cs, const JostPair& jp);

struct CrossSectionRow {
    double energy = 0.0;
    /// sigma(n, n') is the n -> n' cross section; NaN where the entrance channel n is closed.
    Eigen::MatrixXd sigma;

    bool applicable(std::size_t entrance) const;
};

/// sigma_{n->n'} = pi / k_n^2 (2 l_n + 1) |S_{n'n} - delta_{n'n}|^2 with the flux-normalised S.
/// Closed exit channels contribute zero.
CrossSectionRow cross_sections(const ChannelSet& cs, double energy, const Matrix& s);

struct SpectralPoint {
    cplx energy;
    SheetSelector sheet;
    double residual = 0.0;
    int iterations = 0;
    std::string source;
};

struct RootSettings {
    double tol = 1e-12;          // relative step tolerance, |dE| < tol (1 + |E|)
    double det_tol = 1e-14;      // absolute |det| tolerance
    int max_iter = 60;
    double initial_step = 1e-2;  // spread of the three starting points
};

/// Muller iteration on det F_in. Throws NoConvergence when the iteration budget runs out or
/// the iteration leaves the region where the source can be evaluated.
SpectralPoint find_spectral_point(const JostSource& source, cplx guess, const SheetSelector& sheet,
                                  const RootSettings& settings = {});

struct ScanSettings {
    double samples_per_unit = 400.0;
    double percentile = 0.2;
    double dedup = 1e-8;
    unsigned jobs = 1;
    RootSettings root;
};

/// Bound states on the physical sheet within [lo, hi]: samples |det F_in| along the real
/// axis, seeds Muller from local minima below the given percentile, deduplicates.
std::vector<SpectralPoint> bound_state_scan(const JostSource& source, double lo, double hi,
                                            const ScanSettings& settings = {});

/// max |F_in(-k)_mn - (-1)^{l_m + l_n} F_out(k)_mn| from a single tilded integration.
double symmetry_residual(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings,
                         const SheetSelector& sheet);
double symmetry_residual(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings);

/// Same relation with two independent direct integrations on `sheet` and its flip.
double symmetry_residual_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy,
                                const SolverSettings& settings, const SheetSelector& sheet);

/// Sorted by real part, then imaginary part.
void sort_spectral_points(std::vector<SpectralPoint>& points);

/// Header `re_E,im_E,sheet,residual,source`.
void write_spectrum_csv(std::ostream& os, const std::vector<SpectralPoint>& points);

/// Header `E,sigma_11,sigma_12,...`; non-applicable entries are empty fields.
void write_cross_section_csv(std::ostream& os, std::size_t channels, const std::vector<CrossSectionRow>& rows);

}  // namespace jost
