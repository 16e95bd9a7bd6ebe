"""Smoke test for the pyclab extension module."""

import json
import math
import os
import tempfile

import pyclab


def close(a, b, tol):
    return abs(a - b) <= tol * (1.0 + abs(b))


def main():
    v, d, db = pyclab.eval_jet("xi^2 + conj(xi)", 1 + 2j)
    assert close(v, (1 + 2j) ** 2 + (1 - 2j), 1e-14)
    assert close(d, 2 * (1 + 2j), 1e-14) and close(db, 1.0, 1e-14)

    sphere = pyclab.Congruence.point_sphere((1.0, 2.0, 3.0))
    assert sphere.transition_residual() < 1e-10
    s = sphere.spin("N", 0.3 + 0.4j, 0.0)
    assert abs(s["sigma"]) < 1e-12

    rot = pyclab.Congruence.perturbed_rotation(0.3)
    assert not rot.is_holomorphic()
    gb = rot.gauss_bonnet(32, 64)
    assert close(gb, 4 * math.pi, 1e-8), gb
    idx = rot.index_sum(48)
    assert idx["total_index"] == 4 and not idx["degenerate"], idx

    moved = sphere.translate((1.0, 0.0, 0.0))
    p = moved.realize("N", 0.2j, 0.0)
    assert all(math.isfinite(c) for c in p)

    surf = sphere.surface("N", (-1.0, 1.0, -1.0, 1.0), 9, 0.0)
    radii = [math.dist(v, (1.0, 2.0, 3.0)) for v in surf["vertices"]]
    assert max(radii) - min(radii) < 1e-8

    rho, sigma = pyclab.sachs_closed_form(1.0 + 0.5j, 0.2, 0.5)
    rho_n, sigma_n = pyclab.sachs_rk4(1.0 + 0.5j, 0.2, 0.5, 2000)
    assert close(rho_n, rho, 1e-9) and close(sigma_n, sigma, 1e-9)

    try:
        pyclab.Congruence.from_spec("{not json")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed spec accepted")

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "report.json")
        code = pyclab.run_cli(["analyze", "--spec", '{"family": "point_sphere", "p": [0, 0, 0]}',
                               "--grid", "8", "--r", "1", "--out", out])
        with open(out) as fh:
            report = json.load(fh)
        assert code == 0, report
        assert report["command"] == "analyze"

    print("smoke test passed")


if __name__ == "__main__":
    main()
