"""Exact rational evaluation of two Euler-Maruyama steps of the coupled
OU-perturbed SIS system, used to freeze expected values in sde_test.cpp."""
from fractions import Fraction as F

N, i0, beta, gm = F(200), F(100), F(6, 100), F(10)
alpha, sigma = F(4, 10), F(5, 100)
nu = beta * N - gm
dt = F(1, 1000)
dBs = [F(1, 100), F(-3, 100)]


def drift(i, y):
    return i * (N - i) * (nu / N - alpha * y + sigma**2 * (N - 2 * i) / 2) - gm * i * i / N


i, y = i0, F(0)
for k, dB in enumerate(dBs):
    d = drift(i, y)
    g = sigma * i * (N - i)
    i, y = i + d * dt + g * dB, y - alpha * y * dt + sigma * dB
    print(f"step {k + 1}: drift={float(d)!r} i={float(i)!r} y={float(y)!r}")
