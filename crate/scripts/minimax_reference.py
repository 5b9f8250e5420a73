"""Reference minimax fractional-delay taps from an independent conic solver.

Regenerates the fixtures frozen in crates/srirnn-core/tests/minimax_fixtures.rs.
Grid: 512 uniform points on [0, 2*pi*0.25] inclusive, uniform weighting,
taps constrained to sum to one.
"""
from fractions import Fraction

import cvxpy as cp
import numpy as np

GRID = 512
BAND = 0.25


def design(delta, order, solver=cp.CLARABEL, **opts):
    w = 2 * np.pi * BAND * np.arange(GRID) / (GRID - 1)
    k = np.arange(order + 1)
    basis = np.exp(-1j * np.outer(w, k))
    target = np.exp(-1j * w * delta)
    l = cp.Variable(order + 1)
    t = cp.Variable()
    re = np.real(basis) @ l - np.real(target)
    im = np.imag(basis) @ l - np.imag(target)
    cons = [cp.sum(l) == 1]
    cons += [cp.SOC(t, cp.vstack([re[i], im[i]])) for i in range(GRID)]
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver=solver, **opts)
    taps = np.asarray(l.value)
    err = np.max(np.abs(basis @ taps - target))
    return taps, err


def main():
    for p, q in [(160, 147), (147, 160)]:
        delta = Fraction(p, q) - 1
        for order in range(1, 6):
            taps, err = design(float(delta), order, max_iter=500,
                               tol_gap_abs=1e-14, tol_gap_rel=1e-14,
                               tol_feas=1e-14)
            body = ", ".join(f"{x:.17e}" for x in taps)
            print(f"// ratio {p}/{q} order {order} objective {err:.17e}")
            print(f"(({p}, {q}), {order}, &[{body}]),")


if __name__ == "__main__":
    main()
