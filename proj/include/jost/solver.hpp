#pragma once

#include "jost/channels.hpp"
#include "jost/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jost {

struct SolverSettings {
    double r_min = 1e-6;
    /// Length of the integration ray (|R'| for rotated contours).
    double R = 40.0;
    /// Rotation angle of the ray in radians; empty selects it automatically per energy.
    std::optional<double> theta;
    /// Target accuracy of the end values; each step is held to a tenth of it.
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_steps = 200000;

    void validate() const;
};

/// Straight segment from r_min on the real axis to R e^{i theta}.
struct ContourPath {
    cplx start;
    cplx end;
    cplx direction;  // unit complex number, dr/ds
    double length;
    double theta;

    cplx at(double s) const { return start + s * direction; }
};

/// Uses settings.theta, or 0 when it is unset.
ContourPath build_contour(const SolverSettings& settings);

/// End values of the momentum-factorised matrices A~, B~.
struct TildePair {
    Matrix A_tilde;
    Matrix B_tilde;
    double theta = 0.0;
};

struct JostPair {
    Matrix F_in;
    Matrix F_out;
    cplx energy;
    SheetSelector sheet;
    std::vector<cplx> momenta;
};

/// Asymptotic Taylor coefficients a_n, b_n of A~, B~ around `center`.
struct ExpansionTable {
    cplx center;
    int order = 0;
    std::vector<Matrix> a;
    std::vector<Matrix> b;
    SolverSettings settings;  // theta resolved
    ChannelSet channels;
    std::string potential;

    /// Copy keeping orders 0..order.
    ExpansionTable truncated(int order) const;
};

// --- contour rotation ------------------------------------------------------

/// min_{nn'} (lambda_{nn'} cos theta - |Im k_n e^{i theta}| - |Im k_n' e^{i theta}|):
/// positive when every product of free solutions and potential decays along the ray.
double decay_margin(const ChannelSet& cs, const RadialPotential& p, cplx energy, double theta);

/// Margin relevant to the direct formulation on a given sheet. Equals decay_margin except
/// for real energies on the physical sheet at theta = 0, where only F_in has to converge.
double direct_decay_margin(const ChannelSet& cs, const RadialPotential& p, cplx energy,
                           const SheetSelector& sheet, double theta);

/// Rotation angle for the tilded and coefficient equations: settings.theta if set, 0 for
/// real energies inside D, otherwise the best of 49 angles in [-1.2, 1.2].
/// Throws DivergenceError when the margin at the chosen angle is not positive.
double choose_rotation(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings);

/// Same for the direct equations; real energies on the physical sheet use theta = 0.
double choose_rotation_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy,
                              const SheetSelector& sheet, const SolverSettings& settings);

// --- integrations ----------------------------------------------------------

TildePair integrate_tilde(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SolverSettings& settings);

/// F_mn = k_n^{l_n+1} / (2 k_m^{l_m+1}) A~_mn -/+ i k_m^{l_m} k_n^{l_n+1} / 2 B~_mn.
JostPair jost_from_tilde(const ChannelSet& cs, const TildePair& tp, cplx energy, const SheetSelector& sheet);

/// Builds a Jost pair from (A~, B~)-like matrices; shared by the tilded and expansion paths.
JostPair assemble_jost(const ChannelSet& cs, const Matrix& a_tilde, const Matrix& b_tilde, cplx energy,
                       const SheetSelector& sheet);

/// Integrates the equations for F_in(E, r), F_out(E, r) with Riccati-Hankel matrices.
/// Rejects energies with |k_n| < 1e-6 (use the tilded route near thresholds).
JostPair integrate_direct(const ChannelSet& cs, const RadialPotential& p, cplx energy, const SheetSelector& sheet,
                          const SolverSettings& settings);

/// All 2(M+1) coefficient equations in a single pass.
ExpansionTable integrate_coefficients(const ChannelSet& cs, const RadialPotential& p, cplx center, int order,
                                      const SolverSettings& settings);

}  // namespace jost
