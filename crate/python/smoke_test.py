#!/usr/bin/env python3
"""Smoke test for the adamslab extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p adams-py` (release preferred), stages it under a temp
directory as an importable module, and exercises the main surface against
closed-form values.

Run from anywhere:  python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / "release" / "libadamslab.so",
        REPO / "target" / "debug" / "libadamslab.so",
        REPO / "target" / "release" / "libadamslab.dylib",
        REPO / "target" / "debug" / "libadamslab.dylib",
    ]
    src = next((p for p in candidates if p.exists()), None)
    if src is None:
        sys.exit("libadamslab not found; run `cargo build -p adams-py` first")
    stage = Path(tempfile.mkdtemp(prefix="adamslab-"))
    shutil.copy2(src, stage / "adamslab.so")
    sys.path.insert(0, str(stage))


checks = 0


def check(label: str, ok: bool, detail: str = "") -> None:
    global checks
    checks += 1
    if not ok:
        sys.exit(f"FAIL {label} {detail}")
    print(f"  ok {label}" + (f"  ({detail})" if detail else ""))


def main() -> None:
    stage_module()
    import adamslab

    print(f"adamslab {adamslab.__version__}")

    d1 = adamslab.Dimension(1)
    check(
        "beta*(m=1) = 4 pi",
        abs(d1.beta_star() - 4 * math.pi) < 1e-12,
        d1.beta_star_exact(),
    )
    d2 = adamslab.Dimension(2)
    check(
        "beta*(m=2) = 32 pi^2",
        abs(d2.beta_star() - 32 * math.pi**2) < 1e-9,
        d2.beta_star_exact(),
    )
    check(
        "I_1 = -1/(4 pi)",
        abs(d1.self_energy() + 1 / (4 * math.pi)) < 1e-10,
        f"{d1.self_energy():.12f}",
    )
    check("H_2 = -1/(16 pi^2)", abs(d2.h_constant() + 1 / (16 * math.pi**2)) < 1e-15)

    check(
        "bubble mass at radius 2 is 1/2 (m=1)",
        abs(adamslab.bubble_mass(1, 2.0) - 0.5) < 1e-10,
    )
    check("eta0 vanishes at the origin", adamslab.eta0(2, 0.0) == 0.0)

    g1 = adamslab.solve_green(1)
    check("C(disk) = 0", abs(g1.c()) < 1e-10, f"{g1.c():.3e}")
    check(
        "|G|^2_L2(disk) = 1/(8 pi)",
        abs(g1.l2_norm_sq() - 1 / (8 * math.pi)) < 1e-10,
    )
    g2 = adamslab.solve_green(2)
    check(
        "C(4-ball) = -1/(16 pi^2)",
        abs(g2.c() + 1 / (16 * math.pi**2)) < 1e-8,
        f"{g2.c():.12e}",
    )
    check(
        "point mass recovered",
        abs(g1.distributional_mass(1e-3) + 1) < 1e-6
        and abs(g2.distributional_mass(1e-3) - 1) < 1e-6,
    )

    j01_sq = 5.783185962946785
    check(
        "lambda_1(disk) = j_{0,1}^2",
        abs(adamslab.lowest_eigenvalue(1) - j01_sq) < 1e-8,
        f"{adamslab.lowest_eigenvalue(1):.10f}",
    )

    gap = adamslab.threshold_gap(1, eps=1e-4)
    check(
        "trial exceeds the concentration threshold",
        gap["F_value"] > gap["threshold"] > 0,
        f"F={gap['F_value']:.6f} thr={gap['threshold']:.6f}",
    )
    check(
        "disk threshold is pi(1+e)",
        abs(gap["threshold"] - math.pi * (1 + math.e)) < 1e-9,
    )

    ex = adamslab.maximize(1, beta_frac=0.5)
    check(
        "maximizer satisfies its equation",
        ex.el_residual() < 1e-8,
        f"residual {ex.el_residual():.2e} in {ex.iterations()} iterations",
    )
    check("S(0.5 beta*) on the disk", abs(ex.s_value() - 4.864818313) < 1e-6)
    check(
        "Pohozaev balance at the maximizer",
        abs(ex.pohozaev()["residual"]) < 1e-6,
    )

    scan = adamslab.divergence_demo(1)
    check(
        "functional diverges past lambda_1",
        scan[-1][1] > 10 * math.pi and scan[0][1] < scan[-1][1],
    )

    crit = adamslab.run_criterion(1)
    check("acceptance criterion 1 passes", crit["passed"] is True, crit["title"])

    try:
        adamslab.Dimension(0)
    except ValueError:
        check("m=0 raises ValueError", True)
    else:
        check("m=0 raises ValueError", False)

    print(f"smoke test passed: {checks} checks")


if __name__ == "__main__":
    main()
