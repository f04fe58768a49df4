#include "jost/riccati.hpp"

#include "jost/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jost::riccati {

namespace {

constexpr double series_radius = 2.0;    // |z| below which the power series are used
constexpr double series_rel_eps = 1e-17;
constexpr int series_max_terms = 1000;

const cplx I{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_order(int l) {
    if (l < 0 || l > max_order) throw InvalidArgument("Riccati order out of range: " + std::to_string(l));
}

void check_finite(cplx z) {
    if (!finite(z)) throw InvalidArgument("non-finite argument to Riccati function");
}

cplx ipow(cplx z, int n) {
    cplx out{1.0, 0.0};
    for (int i = 0; i < n; ++i) out *= z;
    return out;
}

// (2l+1)!!
double odd_double_factorial(int l) {
    double out = 1.0;
    for (int m = 3; m <= 2 * l + 1; m += 2) out *= m;
    return out;
}

// j_l(z) = z^(l+1) * series_j(l, z^2)
cplx series_j(int l, cplx w) {
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    for (int n = 0; n < series_max_terms; ++n) {
        term *= -w / (2.0 * (n + 1) * (2 * l + 2 * n + 3));
        sum += term;
        if (std::abs(term) < series_rel_eps * std::abs(sum)) break;
    }
    return sum / odd_double_factorial(l);
}

// y_l(z) = z^(-l) * series_y(l, z^2), l >= 0; `loss` is max |term| / |sum|.
cplx series_y(int l, cplx w, double* loss = nullptr) {
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double peak = 1.0;
    for (int n = 0; n < series_max_terms; ++n) {
        term *= -w / (2.0 * (n + 1) * (2 * n - 2 * l + 1));
        sum += term;
        peak = std::max(peak, std::abs(term));
        if (n >= l && std::abs(term) < series_rel_eps * std::abs(sum)) break;
    }
    if (loss) *loss = peak / std::abs(sum);
    return -odd_double_factorial(l - 1) * sum;
}

// Finite exponential sum for h^(+/-); exact for every l. `loss` is max |term| / |sum|.
cplx h_closed(int sign, int l, cplx z, double* loss = nullptr) {
    const cplx si = static_cast<double>(sign) * I;
    const cplx x = si / (2.0 * z);
    cplx a{1.0, 0.0};
    cplx xm{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double peak = 1.0;
    for (int m = 0; m < l; ++m) {
        a *= static_cast<double>(l + m + 1) * static_cast<double>(l - m) / (m + 1.0);
        xm *= x;
        sum += a * xm;
        peak = std::max(peak, std::abs(a * xm));
    }
    if (loss) *loss = peak / std::abs(sum);
    return ipow(-si, l + 1) * std::exp(si * z) * sum;
}

// y from the two Hankel functions, with its estimated error amplification.
cplx y_from_hankel(int l, cplx z, double& loss) {
    double lp = 1.0, lm = 1.0;
    const cplx hp = h_closed(+1, l, z, &lp);
    const cplx hm = h_closed(-1, l, z, &lm);
    const cplx v = (hp - hm) / (2.0 * I);
    loss = std::max(lp * std::abs(hp), lm * std::abs(hm)) / std::abs(v);
    return v;
}

}  // namespace

cplx j(int l, cplx z) {
    check_order(l);
    check_finite(z);
    if (l == 0) return std::sin(z);
    const double az = std::abs(z);
    if (az < series_radius || l >= az) return ipow(z, l + 1) * series_j(l, z * z);
    return 0.5 * (h_closed(+1, l, z) + h_closed(-1, l, z));
}

cplx y(int l, cplx z) {
    check_finite(z);
    if (l < 0) {
        const int n = -l;
        check_order(n - 1);
        return (n % 2 == 1 ? 1.0 : -1.0) * j(n - 1, z);
    }
    check_order(l);
    if (l == 0) return -std::cos(z);
    if (z == cplx{0.0, 0.0}) throw SingularPoint("Riccati-Neumann function of positive order at z = 0");
    if (std::abs(z) < series_radius) return series_y(l, z * z) / ipow(z, l);
    double loss_h = 1.0;
    const cplx via_h = y_from_hankel(l, z, loss_h);
    if (!(loss_h > 1e3) || l < std::abs(z) / 2.0) return via_h;
    double loss_s = 1.0;
    const cplx via_s = series_y(l, z * z, &loss_s) / ipow(z, l);
    return loss_s < loss_h ? via_s : via_h;
}

cplx h(int sign, int l, cplx z) {
    if (sign != 1 && sign != -1) throw InvalidArgument("Riccati-Hankel sign must be +1 or -1");
    check_order(l);
    check_finite(z);
    if (z == cplx{0.0, 0.0}) throw SingularPoint("Riccati-Hankel function at z = 0");
    if (std::abs(z) < series_radius) return j(l, z) + static_cast<double>(sign) * I * y(l, z);
    double loss_c = 1.0;
    const cplx closed = h_closed(sign, l, z, &loss_c);
    if (!(loss_c > 1e3) || l < std::abs(z) / 2.0) return closed;
    const cplx jv = j(l, z);
    const cplx yv = y(l, z);
    const cplx sum = jv + static_cast<double>(sign) * I * yv;
    const double loss_s = (std::abs(jv) + std::abs(yv)) / std::abs(sum);
    return loss_s < loss_c ? sum : closed;
}

cplx j_prime(int l, cplx z) {
    check_order(l);
    if (l == 0) return std::cos(z);
    if (z == cplx{0.0, 0.0}) return 0.0;
    return j(l - 1, z) - static_cast<double>(l) / z * j(l, z);
}

cplx y_prime(int l, cplx z) {
    check_order(l);
    if (l == 0) return std::sin(z);
    if (z == cplx{0.0, 0.0}) throw SingularPoint("Riccati-Neumann derivative at z = 0");
    return y(l - 1, z) - static_cast<double>(l) / z * y(l, z);
}

cplx h_prime(int sign, int l, cplx z) {
    if (sign != 1 && sign != -1) throw InvalidArgument("Riccati-Hankel sign must be +1 or -1");
    check_order(l);
    if (z == cplx{0.0, 0.0}) throw SingularPoint("Riccati-Hankel derivative at z = 0");
    if (l == 0) return std::exp(static_cast<double>(sign) * I * z);
    return h(sign, l - 1, z) - static_cast<double>(l) / z * h(sign, l, z);
}

cplx tilde_j_sq(int l, cplx k2, cplx r) {
    check_order(l);
    check_finite(k2);
    check_finite(r);
    const cplx w = k2 * r * r;
    if (std::abs(w) < series_radius * series_radius) return ipow(r, l + 1) * series_j(l, w);
    const cplx k = std::sqrt(k2);
    return j(l, k * r) / ipow(k, l + 1);
}

cplx tilde_y_sq(int l, cplx k2, cplx r) {
    check_finite(k2);
    check_finite(r);
    if (l < 0) {
        const int n = -l;
        check_order(n - 1);
        return (n % 2 == 1 ? 1.0 : -1.0) * tilde_j_sq(n - 1, k2, r);
    }
    check_order(l);
    const cplx w = k2 * r * r;
    if (std::abs(w) < series_radius * series_radius) {
        if (l > 0 && r == cplx{0.0, 0.0}) throw SingularPoint("tilded Riccati-Neumann function at r = 0");
        return series_y(l, w) / ipow(r, l);
    }
    const cplx k = std::sqrt(k2);
    return ipow(k, l) * y(l, k * r);
}

cplx taylor_g(int l, int n, cplx kinetic, cplx r, double mu, double hbar) {
    if (n < 0) throw InvalidArgument("Taylor index must be non-negative");
    const cplx k2 = 2.0 * mu * kinetic / (hbar * hbar);
    const cplx c = -mu * r / (hbar * hbar);
    cplx factor{1.0, 0.0};
    for (int i = 1; i <= n; ++i) factor *= c / static_cast<double>(i);
    return factor * tilde_j_sq(l + n, k2, r);
}

cplx taylor_t(int l, int n, cplx kinetic, cplx r, double mu, double hbar) {
    if (n < 0) throw InvalidArgument("Taylor index must be non-negative");
    if (r == cplx{0.0, 0.0}) throw SingularPoint("Taylor coefficient t at r = 0");
    const cplx k2 = 2.0 * mu * kinetic / (hbar * hbar);
    const cplx c = mu * r / (hbar * hbar);
    cplx factor{1.0, 0.0};
    for (int i = 1; i <= n; ++i) factor *= c / static_cast<double>(i);
    return factor * tilde_y_sq(l - n, k2, r);
}

void taylor_coefficients(int l, cplx kinetic, cplx r, double mu, double hbar, std::span<cplx> g,
                         std::span<cplx> t) {
    if (g.size() != t.size() || g.empty()) throw InvalidArgument("coefficient spans must have equal, non-zero length");
    const cplx k2 = 2.0 * mu * kinetic / (hbar * hbar);
    const cplx c = mu * r / (hbar * hbar);
    cplx factor{1.0, 0.0};
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (n > 0) factor *= c / static_cast<double>(n);
        const int ni = static_cast<int>(n);
        g[n] = (n % 2 == 0 ? factor : -factor) * tilde_j_sq(l + ni, k2, r);
        t[n] = factor * tilde_y_sq(l - ni, k2, r);
    }
}

}  // namespace jost::riccati
