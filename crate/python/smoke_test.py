"""Builds the extension module, imports it and checks a few known values."""

import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "gamma6-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = os.path.join(ROOT, "target", "release", "libpygamma6.so")
    dest = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(dest, "pygamma6.so"))
    sys.path.insert(0, dest)


def main():
    build()
    import pygamma6 as g

    checks = g.verify()
    assert checks and all(status != "fail" for _, status in checks)

    assert g.orbit_counts("gamma-prime", 4) == [1, 5, 17, 53, 161]
    assert g.orbit_counts("ab", 4) == [1, 5, 17, 53, 157]

    a, b = g.GroupElem("A"), g.GroupElem("B")
    assert (a * a.inverse()).is_identity()
    assert a * b != b * a
    assert g.GroupElem("SSS").is_identity()

    pts = g.cloud(1, 32)
    assert len(pts) > 0 and all(len(p) == 4 for p in pts)

    curve, (x, y, gap), certified = g.lemniscate(1024)
    assert certified
    assert abs(x - 2 ** 0.5 / 2) < 1e-6 and abs(y - 6 ** 0.5 / 6) < 1e-6

    for pair, lk, residual in g.linking(256):
        assert abs(lk) == 1 and residual < 0.1, pair

    assert g.decompose_pv() == ["-7/4", "-3/8", "1/8"]
    assert g.dirichlet("")[0] == "inside"
    assert g.dirichlet("A") == ("outside", ["J0-"])
    print("smoke test passed")


if __name__ == "__main__":
    main()
