#pragma once

#include <complex>
#include <span>

// Riccati-Bessel j_l, Riccati-Neumann y_l and Riccati-Hankel h_l^(+/-) = j_l +/- i y_l
// of complex argument, normalised so that
//
//   j_0(z) = sin z,   y_0(z) = -cos z,   h_0^(+/-)(z) = -/+ i exp(+/- i z).
//
// The "tilded" forms strip the odd powers of the momentum,
//
//   j_l(kr) = k^(l+1) tj_l(k^2, r),   y_l(kr) = k^(-l) ty_l(k^2, r),
//
// and are entire functions of k^2 (hence single valued in the energy).

namespace jost::riccati {

using cplx = std::complex<double>;

/// Largest supported order.
inline constexpr int max_order = 100;

cplx j(int l, cplx z);

/// Negative orders follow y_{-n}(z) = (-1)^(n+1) j_{n-1}(z).
cplx y(int l, cplx z);

/// sign = +1 for the outgoing, -1 for the incoming function. Singular at z = 0.
cplx h(int sign, int l, cplx z);

// d/dz of the functions above (l >= 0).
cplx j_prime(int l, cplx z);
cplx y_prime(int l, cplx z);
cplx h_prime(int sign, int l, cplx z);

/// j_l(kr) / k^(l+1) given k^2.  Evaluated by its power series for |k r| < 2,
/// so k^2 = 0 is fine.
cplx tilde_j_sq(int l, cplx k2, cplx r);

/// k^l y_l(kr) given k^2; negative l allowed.
cplx tilde_y_sq(int l, cplx k2, cplx r);

inline cplx tilde_j(int l, cplx k, cplx r) { return tilde_j_sq(l, k * k, r); }
inline cplx tilde_y(int l, cplx k, cplx r) { return tilde_y_sq(l, k * k, r); }

// Taylor coefficients in (E - E0) of tj_l and ty_l for a channel of reduced
// mass mu, where `kinetic` = E0 minus the channel threshold:
//
//   g_{ln} = (1/n!) (-mu r / hbar^2)^n  tj_{l+n}
//   t_{ln} = (1/n!) ( mu r / hbar^2)^n  ty_{l-n}
cplx taylor_g(int l, int n, cplx kinetic, cplx r, double mu, double hbar);
cplx taylor_t(int l, int n, cplx kinetic, cplx r, double mu, double hbar);

/// g_{l0..lM} and t_{l0..lM} in one call; both spans must have length M+1.
void taylor_coefficients(int l, cplx kinetic, cplx r, double mu, double hbar, std::span<cplx> g,
                         std::span<cplx> t);

}  // namespace jost::riccati
