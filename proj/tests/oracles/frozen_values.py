"""Independent high-precision oracles for values frozen into the C++ tests.

Run with: python3 tests/oracles/frozen_values.py
"""
import mpmath as mp

mp.mp.dps = 40


def phi(x, mu=0, var=1):
    return mp.exp(-(x - mu) ** 2 / (2 * var)) / mp.sqrt(2 * mp.pi * var)


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


# Equal-weight N(-1,1), N(1,1): derivative of log-density at x = 1 via central differences.
logmix = lambda x: mp.log(phi(x, -1) / 2 + phi(x, 1) / 2)
print("mixture grad at 1 (FD, h=1e-5):", mp.nstr(central_diff(logmix, mp.mpf(1), mp.mpf("1e-5")), 17))
print("mixture grad at 1 (diff):      ", mp.nstr(mp.diff(logmix, 1), 17))

# Hyvarinen score of the same mixture at 0: 2 * Laplacian(log p) + grad^2.
print("mixture HS at 0:", mp.nstr(2 * mp.diff(logmix, 0, 2) + mp.diff(logmix, 0) ** 2, 17))

# Standard logistic log-density at 0.
logistic = lambda x: mp.exp(-x) / (1 + mp.exp(-x)) ** 2
print("logistic log p(0):", mp.nstr(mp.log(logistic(0)), 17))

# -log cosh(50).
print("-log cosh 50:", mp.nstr(-mp.log(mp.cosh(50)), 20), " vs -(50-log2):", mp.nstr(-(50 - mp.log(2)), 20))

# mixture path t = 1/2 of N(0,1), N(1,1): log-density at 0.
print("path log p_0.5(0):", mp.nstr(mp.log(phi(0) / 2 + phi(0, 1) / 2), 17))

# Bregman integrand, log-cosh kernel, sigma_p = 1, sigma_q = 0.
print("tanh 1 - log cosh 1:", mp.nstr(mp.tanh(1) - mp.log(mp.cosh(1)), 17))

# Blend at alpha = 1/2, N(0,1), x = 0, Hyvarinen kernel.
print("blend:", mp.nstr(mp.mpf(-2) / 2 + mp.log(2 * mp.pi) / 4, 17))

# Fisher divergence of N(0, s2) from N(0,1) by quadrature.
s2 = 2
f = lambda y: (y * (1 - mp.mpf(1) / s2)) ** 2 * phi(y)
print("d_HS(N(0,2), N(0,1)):", mp.nstr(mp.quad(f, [-mp.inf, mp.inf]), 17))

# Posterior mean, prior N(0,1): Fisher divergence of f = N(0,2) from N(theta,1).
for theta in (0, 1):
    g = lambda y: (-y / 2 + (y - theta)) ** 2 * phi(y, theta)
    print("d_HS(N(0,2), N(%d,1)):" % theta, mp.nstr(mp.quad(g, [-mp.inf, mp.inf]), 17))

# Log-cosh Bregman divergence between N(1,1) forecast and N(0,1) truth (route check reference).
# Integrand: k(sp)-k(sq)+(sq-sp)k'(sp) with k = -log cosh, sp = -(y-1), sq = -y.
k = lambda s: -mp.log(mp.cosh(s))
dk = lambda s: -mp.tanh(s)
h = lambda y: (k(-(y - 1)) - k(-y) + (-y + (y - 1)) * dk(-(y - 1))) * phi(y)
print("d_logcosh(N(1,1), N(0,1)):", mp.nstr(mp.quad(h, [-mp.inf, 0, mp.inf]), 17))

# Phi(N(0,1)) for the log-cosh kernel: E[-log cosh x].
print("Phi_logcosh(N(0,1)):", mp.nstr(mp.quad(lambda y: -mp.log(mp.cosh(y)) * phi(y), [-mp.inf, 0, mp.inf]), 17))
