"""Smoke test for the lattice_theta_py extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
Run:                      python3 python/smoke.py
"""

import math

import mpmath

import lattice_theta_py as lt


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    # theta(1; i) from the product of Jacobi thetas: sqrt(y) * theta3(e^{-pi y})^2 at y = 1
    q = mpmath.exp(-mpmath.pi)
    reference = float(mpmath.jtheta(3, 0, q) ** 2)
    close(lt.theta(1.0, 0.0, 1.0), reference, 1e-13)
    close(lt.theta(1.0, 0.5, math.sqrt(3) / 2), 1.1596, 5e-5)

    value, tail = lt.theta_estimate(2.0, 0.1, 1.3)
    assert tail < 1e-12 and value > 0

    # Melin scaling: theta(1/s; z) = s * theta(s; z)
    close(lt.theta(0.5, 0.2, 1.1), 2.0 * lt.theta(2.0, 0.2, 1.1), 1e-12)

    th = lt.thresholds()
    close(th["sigma1b"] * th["rho2"], 1.0, 1e-12)
    ext = lt.thresholds_extended(30)
    assert ext["rho1"].startswith("0.0401611445477626")

    p = lt.minimizer("W1", 0.4)
    assert p.branch == "corner" and (p.x, p.y) == (0.0, 1.0)
    p = lt.minimizer("W1", 0.01)
    assert p.branch == "segment" and 1.0 < p.y < math.sqrt(3)

    x, y, _, mesh_x, mesh_y = lt.brute_minimize("W1", 0.01, grid=150)
    assert abs(x - p.x) <= 2 * mesh_x and abs(y - p.y) <= 2 * mesh_y

    rx, ry, word = lt.reduce(3.3, 0.2, "G1")
    assert 0.0 <= rx <= 0.5 and rx * rx + ry * ry >= 1.0 - 1e-12, (rx, ry, word)

    jet = lt.j_jet(0.5, math.sqrt(3) / 2, 1 / 3, 1 / 3)
    assert jet.gradient_norm() < 1e-10
    a1, a2 = lt.alpha_thresholds()
    close(a1, 0.3732155067, 1e-8)
    close(a2, 0.9256496973, 1e-8)

    rows = lt.phase_sweep([-0.5, 0.5, 0.95])
    assert [r.shape for r in rows] == ["hexagonal", "square", "rectangular"], rows

    try:
        lt.theta(1.0, 0.0, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative imaginary part accepted")

    checks = lt.verify("identities")
    assert checks and all(c.passed for c in checks), [c for c in checks if not c.passed]

    print(f"smoke ok: theta(1;i) = {lt.theta(1.0, 0.0, 1.0):.12f}, {len(checks)} identity checks pass")


if __name__ == "__main__":
    main()
