#!/usr/bin/env python3
"""Reference values for the unit tests, evaluated at 50 digits with mpmath.

Everything here is written from the model equations directly. Derivatives are
taken numerically with mpmath's high-precision differentiator, never from the
closed forms the library implements. Run it and paste the output into
oracle_constants.hpp when a reference value needs to change.
"""
import mpmath as mp

mp.mp.dps = 50


def energy(x1, x2, D, k1, k2):
    r = mp.sqrt(x1**2 + x2**2 / 2)
    return (-(x2 + mp.sqrt(2) * D * mp.atan(mp.sqrt(2) * x1 / x2)) / 2
            - D * mp.atanh(x1 / r) / (2 * r)
            + k1 / 2 * (x1**2 + x2**2 / 2 + k2) ** 2)


def k2_from_stationarity(x1s, x2s, D, k1):
    # d/dx1 energy(x*) = 0 is affine in k2: solve it numerically.
    g = lambda k2: mp.diff(lambda a: energy(a, x2s, D, k1, k2), x1s)
    return mp.findroot(g, mp.mpf(0))


def hess(x1, x2, D, k1, k2):
    f = lambda a, b: energy(a, b, D, k1, k2)
    h11 = mp.diff(f, (x1, x2), (2, 0))
    h12 = mp.diff(f, (x1, x2), (1, 1))
    h22 = mp.diff(f, (x1, x2), (0, 2))
    return h11, h12, h22


def bound_roots(x1s, x2s, D):
    def h11(k1):
        return hess(x1s, x2s, D, k1, k2_from_stationarity(x1s, x2s, D, k1))[0]

    def det(k1):
        a, b, c = hess(x1s, x2s, D, k1, k2_from_stationarity(x1s, x2s, D, k1))
        return a * c - b * b
    # Both are affine in k1: two evaluations pin the root exactly.
    ka, kb = mp.mpf('0.5'), mp.mpf('1.5')
    r1 = ka - h11(ka) * (kb - ka) / (h11(kb) - h11(ka))
    r2 = ka - det(ka) * (kb - ka) / (det(kb) - det(ka))
    return r1, r2, (det(kb) - det(ka)) / (kb - ka)


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


L, C, E = mp.mpf('470e-6'), mp.mpf('500e-6'), mp.mpf(10)
D = mp.mpf('61.25') / E**2 * mp.sqrt(L / C)
show("D_reference", D)
show("D_P30", mp.mpf(30) / E**2 * mp.sqrt(L / C))
show("tau_of_4.847e-4", mp.mpf('4.847e-4') / mp.sqrt(L * C))
x2s = mp.mpf(4)
x1s = D / x2s + D
show("x1_star_reference", x1s)

x1, x2, u, Dd = mp.mpf('0.4'), mp.mpf('3.9'), mp.mpf('0.8'), mp.mpf('0.59384')
show("field_dx1", -(1 - u) * x2 + u)
show("field_dx2", (1 - u) * x1 - Dd / x2)

a, b = mp.mpf('0.7423'), mp.mpf(4)
show("fd11", -b / a)
show("fd12", -2 * b / (b + 1))
show("fd22", -2 * a / (b + 1) ** 2)

show("H_at_1_1_D1_k1_1_k2_0", energy(mp.mpf(1), mp.mpf(1), mp.mpf(1), mp.mpf(1), mp.mpf(0)))

k1 = mp.mpf('0.01')
show("k2_reference_k1_0.01", k2_from_stationarity(x1s, x2s, D, k1))
r1, r2, slope = bound_roots(x1s, x2s, D)
show("k1_prime_reference", r1)
show("k1_double_prime_reference", r2)
show("det_slope_reference", slope)
r1, r2, slope = bound_roots(mp.mpf(2), mp.mpf(1), mp.mpf(1))
show("k1_prime_2_1", r1)
show("det_root_2_1", r2)
show("det_slope_2_1", slope)

zs = lambda y: D * (y - x2s) / (x2s * y * (y + 1))
show("zd_s_at_2", zs(mp.mpf(2)))
show("zd_s_slope_fd", mp.diff(zs, x2s))
w = lambda y: -(1 - (1 - D / (y * x2s))) * x2s + (1 - D / (y * x2s))
show("zd_w_slope_fd_derived", mp.diff(w, x1s))
show("pd_control_0.4_3.9",
     mp.mpf('0.8') + mp.mpf('-0.4') * (mp.mpf('0.4') - mp.mpf('0.7423'))
     + mp.mpf('-1.5') * (mp.mpf('3.9') - 4))
show("rk4_one_step", 1 - mp.mpf('0.1') + mp.mpf('0.1')**2 / 2 - mp.mpf('0.1')**3 / 6
     + mp.mpf('0.1')**4 / 24)
