#include "jost/analysis.hpp"
#include "jost/errors.hpp"
#include "jost/expansion.hpp"
#include "jost/riccati.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace jost;
namespace rc = jost::riccati;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

// Runs a check, turning library errors into a failure line.
void criterion(const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

ChannelSet benchmark() { return ChannelSet({{0.0, 1.0, 0}, {0.1, 1.0, 0}}); }

double rel_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

double round_to(double x, int digits) {
    const double s = std::pow(10.0, digits);
    return std::round(x * s) / s;
}

struct Target {
    cplx seed;
    cplx expected;
};

}  // namespace

int main() {
    const auto cs = benchmark();
    const NoroTaylorPotential nt;
    const SolverSettings settings;
    const DirectSource direct(cs, nt, settings);
    const auto resonance_sheet = SheetSelector::parse("--");
    cplx first_resonance{NAN, NAN};

    criterion("bound states", [&] {
        const auto start = std::chrono::steady_clock::now();
        const auto points = bound_state_scan(direct, -3.0, 0.0);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double expected[] = {-2.314391, -1.310208, -0.537428, -0.065258};
        bool ok = points.size() == 4 && seconds < 60.0;
        double worst = 0.0;
        for (std::size_t i = 0; ok && i < 4; ++i) {
            worst = std::max(worst, std::abs(points[i].energy - cplx{expected[i], 0.0}));
        }
        ok = ok && worst <= 1e-5;
        std::ostringstream os;
        os.precision(9);
        os << points.size() << " found [";
        for (const auto& p : points) os << ' ' << p.energy.real();
        os << " ], max |dE| " << worst << ", " << seconds << " s";
        report("bound states", ok, os.str());
    });

    criterion("first resonance (direct)", [&] {
        const auto p = find_spectral_point(direct, {4.7, 0.0}, resonance_sheet);
        first_resonance = p.energy;
        const double d = std::abs(p.energy - cplx{4.768197, -0.000710});
        report("first resonance (direct)", d <= 2e-5,
               fmt("E = %.9f %+.9fi, |dE| = %.2e", p.energy.real(), p.energy.imag(), d));
    });

    criterion("resonances 2-3 (direct)", [&] {
        const Target targets[] = {{{7.3, -0.8}, {7.241200, -0.755956}}, {{8.2, -3.0}, {8.171217, -3.254166}}};
        bool ok = true;
        std::string detail;
        for (const auto& t : targets) {
            const auto p = find_spectral_point(direct, t.seed, resonance_sheet);
            const double d = std::abs(p.energy - t.expected);
            ok = ok && d <= 1e-4;
            detail += fmt("E = %.6f %+.6fi (|dE| %.1e); ", p.energy.real(), p.energy.imag(), d);
        }
        report("resonances 2-3 (direct)", ok, detail);
    });

    const auto table10 = integrate_coefficients(cs, nt, {5.0, 0.0}, 10, settings);
    const auto table5 = table10.truncated(5);

    criterion("expansion about E0 = 5", [&] {
        const auto p5 = find_spectral_point(ExpansionSource(table5), {4.7, 0.0}, resonance_sheet);
        const double d5 = std::abs(p5.energy - cplx{4.768178, -0.000686});
        const auto p10 = find_spectral_point(ExpansionSource(table10), {4.7, 0.0}, resonance_sheet);
        const bool same = std::isfinite(first_resonance.real()) &&
                          round_to(p10.energy.real(), 6) == round_to(first_resonance.real(), 6) &&
                          round_to(p10.energy.imag(), 6) == round_to(first_resonance.imag(), 6);
        report("expansion about E0 = 5", d5 <= 1e-5 && same,
               fmt("M=5: %.6f %+.6fi (|dE| %.1e); ", p5.energy.real(), p5.energy.imag(), d5) +
                   fmt("M=10: %.6f %+.6fi, six decimals %s", p10.energy.real(), p10.energy.imag()) +
                   (same ? "match direct" : "differ from direct"));
    });

    criterion("expansion about E0 = 7.5-2i", [&] {
        const auto table = integrate_coefficients(cs, nt, {7.5, -2.0}, 5, settings);
        const ExpansionSource src(table);
        const Target targets[] = {{{7.3, -0.8}, {7.131204, -0.768670}}, {{8.2, -3.0}, {8.241795, -2.982867}}};
        bool ok = true;
        std::string detail;
        for (const auto& t : targets) {
            const auto p = find_spectral_point(src, t.seed, resonance_sheet);
            const double d = std::abs(p.energy - t.expected);
            ok = ok && d <= 1e-4;
            detail += fmt("E = %.6f %+.6fi (|dE| %.1e); ", p.energy.real(), p.energy.imag(), d);
        }
        report("expansion about E0 = 7.5-2i", ok, detail);
    });

    criterion("expansion accuracy domain", [&] {
        const EnergyGrid center{5.0, 5.0, 0.0, 0.0, 1, 1};
        const double at_center = *accuracy_map(table5, cs, nt, center, resonance_sheet, settings).rel_err.at(0);
        // corners of the 0.02-spaced map cell containing the resonance
        const double step = 0.02;
        const double re0 = 4.0 + step * std::floor((first_resonance.real() - 4.0) / step);
        const double im0 = -1.0 + step * std::floor((first_resonance.imag() + 1.0) / step);
        const EnergyGrid cell{re0, re0 + step, im0, im0 + step, 2, 2};
        const auto map = accuracy_map(table5, cs, nt, cell, resonance_sheet, settings);
        double worst = 0.0;
        bool complete = true;
        for (const auto& e : map.rel_err) {
            complete = complete && e.has_value();
            if (e) worst = std::max(worst, *e);
        }
        report("expansion accuracy domain", complete && worst < 1e-2 && at_center < 1e-8,
               fmt("max rel. error on the resonance cell %.2e, at E0 %.2e", worst, at_center));
    });

    criterion("domain D real-axis crossing", [&] {
        const auto crossings = domain_real_axis_crossings(cs, nt, -1.0, 12.0);
        const bool ok = crossings.size() == 1 && std::abs(crossings[0] + 0.025) <= 1e-4;
        report("domain D real-axis crossing", ok,
               crossings.empty() ? std::string("no crossing") : fmt("crossing at %.8f", crossings[0]));
    });

    criterion("zero potential", [&] {
        const ChannelSet free({{0.0, 1.0, 0}, {0.3, 2.0, 1}, {-0.2, 0.7, 2}}, 1.2);
        const ZeroPotential zero(3);
        const DirectSource src(free, zero, settings);
        const Matrix half = 0.5 * Matrix::Identity(3, 3);
        double worst = 0.0;
        for (cplx e : {cplx{2.0, 0.0}, cplx{1.1, -0.4}, cplx{0.1, 0.3}, cplx{5.0, 0.0}})
            for (const auto& sheet : enumerate_sheets(free)) {
                const auto jp = src.jost(e, sheet);
                worst = std::max({worst, (jp.F_in - half).cwiseAbs().maxCoeff(), (jp.F_out - half).cwiseAbs().maxCoeff()});
                if (e.imag() == 0.0 && sheet.is_physical())
                    worst = std::max(worst, (s_matrix(free, jp) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff());
            }
        report("zero potential", worst < 1e-12, fmt("max deviation %.2e", worst));
    });

    criterion("Riccati identities", [&] {
        std::mt19937_64 gen(2024);
        std::uniform_real_distribution<double> radius(0.1, 30.0), phase(-M_PI, M_PI), kr(0.2, 6.0), rr(0.2, 6.0);
        std::uniform_int_distribution<int> order(0, 12);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const cplx z = std::polar(radius(gen), phase(gen));
            const int l = order(gen);
            const cplx j = rc::j(l, z), y = rc::y(l, z), jp = rc::j_prime(l, z), yp = rc::y_prime(l, z);
            worst = std::max(worst, std::abs(j * yp - jp * y - 1.0) / (1.0 + std::abs(j * yp) + std::abs(jp * y)));
            for (int s : {+1, -1}) {
                const cplx h = rc::h(s, l, z);
                worst = std::max(worst, std::abs(h - (j + double(s) * cplx(0, 1) * y)) /
                                            (std::abs(j) + std::abs(y) + std::abs(h)));
            }
            // h- d/dr h+(kr) - d/dr h-(kr) h+ = 2ik
            const cplx k = std::polar(kr(gen), phase(gen) / 2.0);
            const cplx r{rr(gen), 0.0};
            const cplx hp = rc::h(+1, l, k * r), hm = rc::h(-1, l, k * r);
            const cplx w = k * (hm * rc::h_prime(+1, l, k * r) - rc::h_prime(-1, l, k * r) * hp);
            worst = std::max(worst, std::abs(w - 2.0 * cplx(0, 1) * k) /
                                        (std::abs(k) * (1.0 + std::abs(hm * rc::h_prime(+1, l, k * r)))));
        }
        report("Riccati identities", worst < 1e-10, fmt("max relative residual %.2e over 1000 points", worst));
    });

    criterion("in/out symmetry", [&] {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> re(0.3, 9.0), im(-2.5, 1.0);
        std::uniform_int_distribution<int> pick(0, 3);
        const auto sheets = enumerate_sheets(cs);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const cplx e{re(gen), im(gen)};
            const auto& sheet = sheets[static_cast<std::size_t>(pick(gen))];
            const auto jp = direct.jost(e, sheet);
            const double scale = std::max(jp.F_in.cwiseAbs().maxCoeff(), jp.F_out.cwiseAbs().maxCoeff());
            worst = std::max(worst, symmetry_residual_direct(cs, nt, e, settings, sheet) / scale);
        }
        report("in/out symmetry", worst < 1e-10, fmt("max residual relative to max|F| %.2e over 100 energies", worst));
    });

    criterion("S-matrix unitarity", [&] {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double e = 0.3 + 0.237 * i;
            const Matrix s = s_matrix(cs, direct.jost({e, 0.0}, physical_sheet(cs)));
            worst = std::max(worst, (s.adjoint() * s - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
        }
        report("S-matrix unitarity", worst < 1e-8, fmt("max |S^+S - I| %.2e over 50 energies", worst));
    });

    criterion("Taylor coefficients vs Richardson differences", [&] {
        // n-th central difference, four Richardson levels in h^2
        auto derivative = [](const std::function<cplx(cplx)>& f, cplx x, int n, double h0) {
            auto diff = [&](double h) {
                cplx sum = 0.0;
                double binom = 1.0;
                for (int k = 0; k <= n; ++k) {
                    sum += ((k % 2 == 0) ? 1.0 : -1.0) * binom * f(x + (0.5 * n - k) * h);
                    binom = binom * (n - k) / (k + 1);
                }
                return sum / std::pow(h, n);
            };
            constexpr int levels = 4;
            cplx t[levels][levels];
            for (int i = 0; i < levels; ++i) t[i][0] = diff(h0 / std::pow(2.0, i));
            for (int m = 1; m < levels; ++m)
                for (int i = m; i < levels; ++i)
                    t[i][m] = t[i][m - 1] + (t[i][m - 1] - t[i - 1][m - 1]) / (std::pow(4.0, m) - 1.0);
            return t[levels - 1][levels - 1];
        };
        const double mu = 1.3, hbar = 0.9;
        double worst = 0.0;
        for (cplx r : {cplx{1.5, 0.0}, cplx{2.5, 0.3}, cplx{4.0, -0.2}, cplx{6.0, 0.5}}) {
            const double h0 = 0.6 / std::abs(r);
            for (cplx e0 : {cplx{1.5, 0.0}, cplx{-0.8, 0.4}, cplx{3.0, -1.0}})
                for (int l = 0; l <= 3; ++l) {
                    auto tj = [&](cplx e) { return rc::tilde_j_sq(l, 2.0 * mu * e / (hbar * hbar), r); };
                    auto ty = [&](cplx e) { return rc::tilde_y_sq(l, 2.0 * mu * e / (hbar * hbar), r); };
                    double factorial = 1.0;
                    for (int n = 1; n <= 4; ++n) {
                        factorial *= n;
                        const cplx g = rc::taylor_g(l, n, e0, r, mu, hbar);
                        const cplx t = rc::taylor_t(l, n, e0, r, mu, hbar);
                        worst = std::max(worst, std::abs(g - derivative(tj, e0, n, h0) / factorial) / std::abs(g));
                        worst = std::max(worst, std::abs(t - derivative(ty, e0, n, h0) / factorial) / std::abs(t));
                    }
                }
        }
        report("Taylor coefficients vs Richardson differences", worst < 1e-6,
               fmt("max relative difference %.2e for n <= 4", worst));
    });

    criterion("direct vs tilded Jost matrices", [&] {
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> re(0.3, 9.0), im(-2.5, 1.0);
        std::uniform_int_distribution<int> pick(0, 3);
        const auto sheets = enumerate_sheets(cs);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const cplx e{re(gen), im(gen)};
            const auto& sheet = sheets[static_cast<std::size_t>(pick(gen))];
            const auto d = direct.jost(e, sheet);
            const auto t = jost_from_tilde(cs, integrate_tilde(cs, nt, e, settings), e, sheet);
            worst = std::max({worst, rel_diff(d.F_in, t.F_in), rel_diff(d.F_out, t.F_out)});
        }
        report("direct vs tilded Jost matrices", worst < 10 * settings.rel_tol,
               fmt("max relative difference %.2e over 50 (E, sheet) pairs", worst));
    });

    criterion("R doubling and r_min halving", [&] {
        SolverSettings longer = settings;
        longer.R *= 2.0;
        SolverSettings closer = settings;
        closer.r_min *= 0.5;
        double worst = 0.0;
        const std::vector<std::pair<cplx, SheetSelector>> points = {
            {{-1.310208, 0.0}, physical_sheet(cs)},    {{2.0, 0.0}, physical_sheet(cs)},
            {{4.768197, -0.000710}, resonance_sheet}, {{7.2412, -0.755956}, resonance_sheet},
            {{8.171217, -3.254166}, resonance_sheet}};
        for (const auto& [e, sheet] : points) {
            const Matrix f = integrate_direct(cs, nt, e, sheet, settings).F_in;
            worst = std::max(worst, rel_diff(f, integrate_direct(cs, nt, e, sheet, longer).F_in));
            worst = std::max(worst, rel_diff(f, integrate_direct(cs, nt, e, sheet, closer).F_in));
        }
        report("R doubling and r_min halving", worst < 1e-10, fmt("max relative change %.2e", worst));
    });

    criterion("sigma_11 resonance peak", [&] {
        auto sigma11 = [&](double e) {
            return cross_sections(cs, e, s_matrix(cs, direct.jost({e, 0.0}, physical_sheet(cs)))).sigma(0, 0);
        };
        // the resonance is a Fano profile: take the tallest interior local maximum of a fine scan
        std::vector<double> es, sig;
        for (int i = 0; i <= 700; ++i) {
            es.push_back(4.70 + 2e-4 * i);
            sig.push_back(sigma11(es.back()));
        }
        double peak_e = NAN, peak = -1.0;
        for (std::size_t i = 1; i + 1 < es.size(); ++i)
            if (sig[i] > sig[i - 1] && sig[i] >= sig[i + 1] && sig[i] > peak) {
                peak = sig[i];
                peak_e = es[i];
            }
        // background: away from the narrow peak the curve has no jumps
        double prev = sigma11(1.0), worst_jump = 0.0;
        for (double e = 1.05; e <= 12.0 + 1e-12; e += 0.05) {
            const double s = sigma11(e);
            if (std::abs(e - 4.768) > 0.1) worst_jump = std::max(worst_jump, std::abs(s - prev) / std::max(s, prev));
            prev = s;
        }
        const bool ok = std::abs(peak_e - 4.768) <= 0.01 && worst_jump < 0.5;
        report("sigma_11 resonance peak", ok,
               fmt("peak at E = %.4f (sigma_11 = %.4g), largest background step %.2f", peak_e, peak, worst_jump));
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
