"""Brute-force lower bound for the partner search on span{I, E12} at t = 32.

For x = E12 and every y = a I + b E12 in the unit ball, the objective
    F(y) = (|| [[t I, x], [y, t I]] || - sqrt(t^2 + 1))_+
is evaluated on the radial retraction of a uniform grid over the real and
imaginary parts of (a, b) in [-1, 1]^4. F is 1-Lipschitz in y for the
operator norm, the retraction onto the ball is 2-Lipschitz, and every ball
point lies within h * sqrt(4) / 2 (coefficient 2-norm) of a grid point,
which moves y by at most sqrt(2) times that in operator norm. Hence

    inf over Ball of F >= grid minimum - 2 * sqrt(2) * h

and that bound is the committed delta.

Usage: python3 m2_upper_grid.py [OUT.json]   (prints to stdout without OUT)
       python3 m2_upper_grid.py --check FIXTURE.json
"""

import json
import sys

import numpy as np

T = 32.0
STEPS = 21  # per real coordinate, so 21^4 = 194481 grid points


def objective(a, b):
    """Vectorised F for arrays of complex a, b."""
    n = a.shape[0]
    m = np.zeros((n, 4, 4), dtype=complex)
    m[:, 0, 0] = T
    m[:, 1, 1] = T
    m[:, 2, 2] = T
    m[:, 3, 3] = T
    m[:, 0, 3] = 1.0  # x = E12 in the top-right block
    m[:, 2, 0] = a  # y = [[a, b], [0, a]] in the bottom-left block
    m[:, 2, 1] = b
    m[:, 3, 1] = a
    norms = np.linalg.norm(m, ord=2, axis=(1, 2))
    return np.maximum(norms - np.sqrt(T * T + 1.0), 0.0)


def operator_norm(a, b):
    m = np.zeros((a.shape[0], 2, 2), dtype=complex)
    m[:, 0, 0] = a
    m[:, 0, 1] = b
    m[:, 1, 1] = a
    return np.linalg.norm(m, ord=2, axis=(1, 2))


def main():
    axis = np.linspace(-1.0, 1.0, STEPS)
    h = axis[1] - axis[0]
    ar, ai, br, bi = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    a = (ar + 1j * ai).ravel()
    b = (br + 1j * bi).ravel()
    scale = np.maximum(operator_norm(a, b), 1.0)
    a, b = a / scale, b / scale
    values = objective(a, b)
    k = int(np.argmin(values))
    lipschitz_gap = 2.0 * np.sqrt(2.0) * h * np.sqrt(4.0) / 2.0
    out = {
        "space": "m2-upper",
        "x": [[0.0, 0.0], [1.0, 0.0]],
        "t": T,
        "grid_points": int(values.size),
        "grid_step": float(h),
        "grid_min": float(values[k]),
        "grid_argmin": [[float(a[k].real), float(a[k].imag)], [float(b[k].real), float(b[k].imag)]],
        "lipschitz_gap": float(lipschitz_gap),
        "delta": float(values[k] - lipschitz_gap),
    }
    text = json.dumps(out, indent=2) + "\n"
    if len(sys.argv) > 2 and sys.argv[1] == "--check":
        with open(sys.argv[2]) as fh:
            frozen = json.load(fh)
        bad = [k for k in ("grid_min", "delta") if abs(frozen[k] - out[k]) > 1e-12]
        if bad:
            sys.stderr.write("fixture mismatch in %s\n" % ", ".join(bad))
            sys.exit(1)
        print("fixture reproduced: delta = %.17g" % out["delta"])
    elif len(sys.argv) > 1:
        with open(sys.argv[1], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
