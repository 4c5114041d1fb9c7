#!/usr/bin/env python3
"""Smoke test for the nonbilocal_py extension module.

Builds are looked up in target/{debug,release}; the shared library is copied
next to a temp dir so `import nonbilocal_py` resolves without installation.

Run from the repository root:

    cargo build -p nonbilocal-py
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    for profile in ("release", "debug"):
        src = ROOT / "target" / profile / "libnonbilocal_py.so"
        if src.is_file():
            tmp = Path(tempfile.mkdtemp(prefix="nonbilocal_py_"))
            shutil.copy(src, tmp / "nonbilocal_py.so")
            sys.path.insert(0, str(tmp))
            import nonbilocal_py

            return nonbilocal_py
    sys.exit("build the extension first: cargo build -p nonbilocal-py")


def check(label, ok):
    print(f"{label}: {'ok' if ok else 'FAILED'}")
    if not ok:
        sys.exit(1)


def main():
    nb = import_extension()

    bell = nb.State.builtin("bell_phi_plus")
    ket00 = nb.State.builtin("ket00")
    check("builtin states", bell.dims() == [2, 2] and bell.is_pure())

    s = 1 / math.sqrt(2)
    rebuilt = nb.State.from_pure([s, 0, 0, s], [2, 2])
    check(
        "pure construction",
        abs(nb.affinity(rebuilt, bell) - 1.0) < 1e-12,
    )

    coeffs = nb.schmidt_coefficients(bell)
    check(
        "schmidt coefficients",
        len(coeffs) == 2 and all(abs(c - s) < 1e-12 for c in coeffs),
    )

    mixed = nb.State.builtin("example3_mix")
    check("mixed matrix round trip",
          abs(nb.State.from_matrix(mixed.matrix(), [2, 2]).purity() - mixed.purity()) < 1e-12)
    check("partial trace", abs(mixed.partial_trace([0]).purity() - 0.5) < 1e-12)

    check("hs_min", abs(nb.hs_min(bell, restarts=4) - 0.5) < 1e-8)
    check("geometric_discord", abs(nb.geometric_discord(bell, restarts=4) - 0.5) < 1e-8)
    check("affinity_min", abs(nb.affinity_min(mixed, restarts=4) - 1 / 6) < 1e-8)

    check(
        "nonbilocal_pure",
        abs(nb.nonbilocal_pure(ket00, bell) - 0.5) < 1e-12
        and abs(nb.nonbilocal_pure(bell, bell) - 0.75) < 1e-12,
    )
    value = nb.nonbilocal(mixed.swap(), mixed, restarts=4, seed=1)
    check("nonbilocal numeric", value >= 5 / 12 - 1e-9)

    b3 = nb.bound_thm3(mixed.swap(), mixed)
    check("eigenvalue bound", value <= b3 + 1e-7)
    try:
        nb.bound_thm4(mixed.swap(), mixed)
        check("degenerate marginal rejected", False)
    except ValueError:
        check("degenerate marginal rejected", True)

    product = ket00.tensor(ket00)
    check("tensor dims", product.dims() == [2, 2, 2, 2])

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
