"""Independent reference values frozen into the unit tests.

Fresnel integrals come from mpmath's Fresnel functions, propagated amplitudes
from mpmath quadrature at 30 digits, Zeno survivals from a plain numpy FFT
implementation. Run: python3 tests/oracles/generate.py
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def fresnel01(x):
    x = mp.mpf(x)
    if x == 0:
        return mp.mpc(1)
    s = 1 if x > 0 else -1
    ax = abs(x)
    z = mp.sqrt(2 * ax / mp.pi)
    v = mp.sqrt(mp.pi / (2 * ax)) * (mp.fresnelc(z) + 1j * mp.fresnels(z))
    return v if s > 0 else mp.conj(v)


def kernel_integral(a, b, A, B, y, alpha, pieces=400):
    f = lambda x: (a * x + b) * mp.expj(alpha * (x - y) ** 2)
    pts = mp.linspace(A, B, pieces + 1)
    return mp.quad(f, pts)


def pref(alpha):
    return mp.sqrt(alpha / (1j * mp.pi))


def show(name, v):
    v = mp.mpc(v)
    print(f"{name}: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")


print("# fresnel_raw")
for x in ["0.5", "3", "4", "4.5", "7.3", "20", "44.9", "45.1", "100", "1e4", "1e7"]:
    show(f"x={x}", fresnel01(mp.mpf(x)))

print("# rectangle, hbar = m = 1")
for t, y in [("1", "10"), ("0.01", "0.5"), ("0.1", "2"), ("1", "-3.5")]:
    alpha = 1 / (2 * mp.mpf(t))
    show(f"t={t} y={y}", pref(alpha) * kernel_integral(0, 1, 0, 1, mp.mpf(y), alpha))

print("# oracle integral x e^{i 50 (x-5)^2} on [-1, 0]")
show("I", kernel_integral(1, 0, -1, 0, 5, 50))

print("# ramp polygon N=4 on [-1,0], values (N-j)/N normalized")
N = 4
vals = [mp.mpf(N - j) / N for j in range(N + 1)]
xs = [mp.mpf(-1) + mp.mpf(j) / N for j in range(N + 1)]
norm = mp.mpf(0)
for j in range(N):
    fa, fb, h = vals[j], vals[j + 1], xs[j + 1] - xs[j]
    norm += h * (fa * fa + fa * fb + fb * fb) / 3
scale = 1 / mp.sqrt(norm)
vals = [v * scale for v in vals]
print("scale", mp.nstr(scale, 17))
for dt, y in [("0.01", "3"), ("0.01", "-0.3"), ("0.001", "5"), ("0.1", "40")]:
    alpha = 1 / (2 * mp.mpf(dt))
    tot = mp.mpc(0)
    for j in range(N):
        aj = (vals[j + 1] - vals[j]) / (xs[j + 1] - xs[j])
        bj = vals[j] - aj * xs[j]
        tot += kernel_integral(aj, bj, xs[j], xs[j + 1], mp.mpf(y), alpha, 200)
    show(f"dt={dt} y={y}", pref(alpha) * tot)

print("# momentum amplitude of the same ramp")
for p in ["3", "50", "0"]:
    tot = mp.mpc(0)
    for j in range(N):
        aj = (vals[j + 1] - vals[j]) / (xs[j + 1] - xs[j])
        bj = vals[j] - aj * xs[j]
        tot += mp.quad(lambda x: (aj * x + bj) * mp.expj(-mp.mpf(p) * x), [xs[j], xs[j + 1]])
    show(f"p={p}", tot / mp.sqrt(2 * mp.pi))

print("# zeno, numpy reference on L = 64, dx = 1/2048")
a, w, L, dx = 1.0, 1 / 8, 64.0, 1 / 2048
n = int(round(2 * L / dx))
x = -L + dx * (np.arange(n) + 0.5)
k = 2 * np.pi * np.fft.fftfreq(n, d=dx)
inside = (x >= -a) & (x <= 0)
psi0 = np.where(inside, np.sin(np.pi * (-x) / a), 0).astype(complex)
psi0 /= np.sqrt(np.sum(abs(psi0) ** 2) * dx)


def window(mode):
    W = inside.astype(float)
    if mode == "tapered":
        l = (x >= -a) & (x < -a + w)
        W[l] = np.sin(np.pi * (x[l] + a) / (2 * w)) ** 2
        r = (x > -w) & (x <= 0)
        W[r] = np.sin(np.pi * (-x[r]) / (2 * w)) ** 2
    return W


for mode in ["sharp", "tapered"]:
    W = window(mode)
    for steps in [16]:
        dt = 0.5 / steps
        psi = psi0.copy()
        cum = 1.0
        qs = []
        for _ in range(steps):
            psi = np.fft.ifft(np.exp(-0.5j * k * k * dt) * np.fft.fft(psi))
            tot = np.sum(abs(psi) ** 2) * dx
            q = np.sum(abs(psi[inside]) ** 2) * dx / tot
            qs.append(q)
            cum *= q
            psi *= W
            psi /= np.sqrt(np.sum(abs(psi) ** 2) * dx)
        print(f"{mode} n={steps} q1={qs[0]!r} q2={qs[1]!r} cumulative={cum!r}")
    dt = 0.5 / 256
    psi = psi0 * W
    psi /= np.sqrt(np.sum(abs(psi) ** 2) * dx)
    psi = np.fft.ifft(np.exp(-0.5j * k * k * dt) * np.fft.fft(psi))
    print(f"{mode} leak(T/256)={np.sum(abs(psi[~inside]) ** 2) * dx / (np.sum(abs(psi) ** 2) * dx)!r}")
