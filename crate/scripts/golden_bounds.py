"""Independent high-precision evaluation of the level-based bound goldens.

Writes crates/core/tests/data/bounds.json. Values are rounded to 12
significant digits.
"""

import json
import sys
from pathlib import Path

from mpmath import mp, mpf, e, log, sqrt, ceil, nstr

mp.dps = 50


def g3(m, z_star, delta, gamma0):
    return 4 / (gamma0 * delta**2) * log(128 * m / (z_star * delta**2))


def bound(z, delta, lam):
    s = sum(lam * log(6 * delta * lam / (4 + zj * delta * lam)) + 1 / zj for zj in z)
    return 8 / delta**2 * s


def levels(n, d):
    f = [0]
    while f[-1] < n:
        f.append(f[-1] + int(ceil(d * sqrt(n - f[-1]))))
    assert f[-1] == n
    return f


def d2(psi):
    return (-1 + sqrt(1 + 4 / psi**2)) * psi**2 / 2


def sig(x):
    return nstr(x, 12, min_fixed=-1, max_fixed=-1)


def leadingones(n, mu, lam):
    delta = min(mpf(1), mpf(lam) / (e * mu) - 1)
    z = [1 / (e * n)] * n
    return z, delta, mpf(mu) / lam


def onemax_small(n, mu, lam, c):
    c = mpf(c)
    delta = min(mpf(1), (1 - c) * lam / (13 * e * mu) - 1)
    z = [c * (n - j + 1) / n for j in range(1, n + 1)]
    return z, delta, mpf(mu) / lam


def onemax_large(n, mu, lam, d, kappa, psi):
    gamma0 = mpf(mu) / lam
    delta = min(mpf(1), psi / (e * gamma0) - 1)
    ell = len(levels(n, d)) - 1
    return [kappa] * ell, delta, gamma0


def preset_entries(name, params, z, delta, gamma0, lam):
    return [
        {"name": f"{name}-bound", "kind": "preset-bound", "params": params,
         "value": sig(bound(z, delta, lam))},
        {"name": f"{name}-g3", "kind": "preset-g3", "params": params,
         "value": sig(g3(len(z) + 1, min(z), delta, gamma0))},
    ]


def main():
    out = []
    out.append({"name": "g3-leadingones-shape", "kind": "g3",
                "params": {"m": 101, "z_star": "1/(100e)", "delta": 1, "gamma0": 0.25},
                "value": sig(g3(101, 1 / (100 * e), 1, mpf(1) / 4))})
    out.append({"name": "g3-two-levels", "kind": "g3",
                "params": {"m": 2, "z_star": 1, "delta": 1, "gamma0": 0.5},
                "value": sig(g3(2, 1, 1, mpf(1) / 2))})
    out.append({"name": "g3-doubling-gap", "kind": "g3-doubling",
                "params": {"m": 50, "z_star": 0.01, "delta": 0.7, "gamma0": 0.3},
                "value": sig(g3(100, mpf("0.01"), mpf("0.7"), mpf("0.3"))
                             - g3(50, mpf("0.01"), mpf("0.7"), mpf("0.3")))})
    out.append({"name": "bound-two-levels", "kind": "bound",
                "params": {"z": [0.5], "delta": 1, "lambda": 100},
                "value": sig(bound([mpf(1) / 2], 1, 100))})
    z = [mpf("0.01"), mpf("0.02"), mpf("0.05"), mpf("0.1")]
    for k in range(1, 11):
        delta = mpf(k) / 10
        out.append({"name": f"bound-monotone-delta-{k}", "kind": "bound",
                    "params": {"z": [0.01, 0.02, 0.05, 0.1], "delta": k / 10, "lambda": 100000},
                    "value": sig(bound(z, delta, 100000))})

    for n, mu, lam in [(100, 10, 100), (100, 10, 500), (1000, 7, 200)]:
        zs, delta, g0 = leadingones(n, mu, lam)
        out += preset_entries(f"leadingones-{n}-{mu}-{lam}", {"preset": "leadingones", "n": n, "mu": mu, "lambda": lam},
                              zs, delta, g0, lam)
    for n, mu, lam, c in [(100, 7, 495, 0.5), (400, 10, 1000, 0.5)]:
        zs, delta, g0 = onemax_small(n, mu, lam, c)
        out += preset_entries(f"onemax-small-{n}-{mu}-{lam}",
                              {"preset": "onemax-small", "n": n, "mu": mu, "lambda": lam, "c": c},
                              zs, delta, g0, lam)
    psi = mpf(1) / 4
    d = d2(psi)
    for n, mu in [(400, 120), (2500, 250)]:
        lam = int(ceil(2 * e * mu / psi))
        zs, delta, g0 = onemax_large(n, mu, lam, d, psi, psi)
        out += preset_entries(f"onemax-large-{n}-{mu}-{lam}",
                              {"preset": "onemax-large", "n": n, "mu": mu, "lambda": lam,
                               "d": "max", "kappa": 0.25, "psi": 0.25},
                              zs, delta, g0, lam)
    out.append({"name": "max-spacing-quarter", "kind": "max-spacing", "params": {"psi": 0.25},
                "value": sig(d)})
    default_psi = mpf(1) / 2 * (mpf(1) / 4) ** 7
    out.append({"name": "max-spacing-default", "kind": "max-spacing",
                "params": {"psi": "default"}, "value": sig(d2(default_psi))})

    path = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/bounds.json")
    path.write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
