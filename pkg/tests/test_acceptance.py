"""Acceptance suite: one PASS/FAIL line per criterion.

Run ``python3 tests/test_acceptance.py`` for the summary table or
``pytest tests/test_acceptance.py -s`` to see the lines under pytest.
"""

from __future__ import annotations

import csv
import itertools
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mslab.cli import run as cli_run
from mslab.distributions import UNIT_VARIANCE_PARENTS, ContinuousParent, DiscretePMF, SeedSpec
from mslab.lossless_codec import enum_encode
from mslab.markov_empirical import empirical_entropy_table, kgram_count_table
from mslab.multiset_core import (
    TypeVector,
    binomial_entropy_asymptotic,
    binomial_entropy_exact,
    entropy_decomposition_check,
    iid_joint,
)
from mslab.order_stats import zero_rate_curve
from mslab.quantizer import (
    high_rate_validate,
    interchange_check,
    ordered_restriction,
    os_quantizer_2d_gaussian,
    rotated_product_codebook,
    scheme_ledger,
)
from mslab.rd_bounds import (
    BREAK_1,
    BREAK_2,
    blahut_arimoto_point,
    bound_curve,
    erokhin_rate_at,
    erokhin_rd,
    error_frequency_matrix,
    lossy_logn_budget,
    os_covariance_eigenvalues,
    os_covariance_gaussian_k2,
    os_covariance_monte_carlo,
    slb_os_gaussian,
    sub_branch,
    sub_os_gaussian,
)
from mslab.universal_codec import (
    histogram_decode,
    histogram_encode,
    mixture_type_pmf_quadrature,
    normalized_redundancy_binary,
    redundancy_terms_empirical,
    uniform_mixture_type_pmf,
    universal_encode,
)

CRITERIA: dict[int, tuple[str, object]] = {}


def criterion(num: int, title: str):
    def register(fn):
        CRITERIA[num] = (title, fn)
        return fn

    return register


def _all(checks: dict[str, bool]) -> tuple[bool, str]:
    failed = [k for k, v in checks.items() if not v]
    return not failed, "all checks hold" if not failed else "failed: " + "; ".join(failed)


@criterion(1, "histogram run-length code")
def c01():
    bits = "01001100000111010001"
    counts = histogram_decode(bits)
    return _all({
        f"8 bins (got {len(counts)})": len(counts) == 8,
        f"sum 12 (got {sum(counts)})": sum(counts) == 12,
        "bit-exact re-encoding": histogram_encode(counts).to_str() == bits,
    })


@criterion(2, "enumerative code length")
def c02():
    bad = []
    for A in range(1, 9):
        for n in range(1, 65):
            t = TypeVector((n,) + (0,) * (A - 1))
            L = len(enum_encode(t))
            want = math.ceil(math.log2(math.comb(n + A - 1, A - 1))) if A > 1 else 0
            if L != want or L / math.log2(n + 1) > A:
                bad.append((n, A, L, want))
    return not bad, f"{8 * 64} (n, |X|) pairs checked" if not bad else f"mismatches {bad[:3]}"


@criterion(3, "sequence = multiset + order entropy")
def c03():
    pmfs = [(0.5, 0.5), (0.1, 0.9), (1 / 3,) * 3, (0.2, 0.3, 0.5), (0.05, 0.05, 0.9)]
    worst = 0.0
    for probs in pmfs:
        for n in range(1, 7):
            r = entropy_decomposition_check(iid_joint(DiscretePMF(probs), n))
            worst = max(worst, abs(r.h_sequence - r.h_multiset - r.h_order))
    return worst < 1e-9, f"max |residual| = {worst:.2e} (tol 1e-9)"


@criterion(4, "binomial multiset entropy asymptotics")
def c04():
    e100 = abs(binomial_entropy_exact(100, 0.5) - binomial_entropy_asymptotic(100, 0.5))
    e400 = abs(binomial_entropy_exact(400, 0.5) - binomial_entropy_asymptotic(400, 0.5))
    ok = e100 < 0.01 and e400 < e100
    return ok, f"error at n=100: {e100:.2e}, at n=400: {e400:.2e}"


@criterion(5, "equiprobable types and normalized redundancy")
def c05():
    pmf_err = max(
        abs(mixture_type_pmf_quadrature(n, z) - uniform_mixture_type_pmf(n)) for n in range(1, 65) for z in range(n + 1)
    )
    rho2 = normalized_redundancy_binary(2**16)
    rho3 = redundancy_terms_empirical(3, 256)[2]
    checks = {
        f"type pmf = 1/(n+1) (max err {pmf_err:.1e})": pmf_err < 1e-10,
        f"binary redundancy at n=2^16 is {rho2:.4f}, need |. - 0.5| <= 0.02": abs(rho2 - 0.5) <= 0.02,
        f"ternary redundancy at n=256 is {rho3:.4f}, need |. - 1.0| <= 0.1": abs(rho3 - 1.0) <= 0.1,
    }
    ok, detail = _all(checks)
    return ok, detail if not ok else f"pmf err {pmf_err:.1e}, rho2 {rho2:.4f}, rho3 {rho3:.4f}"


@criterion(6, "universal code rate on geometric multisets")
def c06():
    finals = []
    for seed in range(8):
        rng = np.random.default_rng(seed)
        rates = [len(universal_encode(rng.geometric(0.5, 2**e))) / 2**e for e in range(8, 15)]
        if not all(b < a for a, b in zip(rates, rates[1:])):
            return False, f"seed {seed}: bits/n not decreasing {np.round(rates, 4).tolist()}"
        finals.append(rates[-1])
    return max(finals) <= 1.15, f"decreasing for 8 seeds; bits/n at 2^14 <= {max(finals):.4f} (limit 1.15)"


def _bounded_by_geometric_decay(nd: dict[int, float], ratio_max: float = 0.75) -> tuple[bool, float]:
    """Bounded on the grid if doubling increments of n D_n shrink geometrically."""
    ns = [4, 8, 16, 32, 64, 128]
    inc = [nd[b] - nd[a] for a, b in zip(ns, ns[1:])]
    ratio = max(b / a for a, b in zip(inc[-4:], inc[-3:]) if a > 0)
    return ratio <= ratio_max, ratio


@criterion(7, "zero-rate order-statistic distortion")
def c07():
    checks = {}
    notes = []
    for p in UNIT_VARIANCE_PARENTS:
        curve = zero_rate_curve(p, 128)
        d = dict(curve.points)
        nd = {n: n * v for n, v in d.items()}
        bounded, ratio = _bounded_by_geometric_decay(nd)
        name = p.family.value
        checks[f"{name} monotone"] = curve.is_nonincreasing()
        checks[f"{name} D_1 = 1 (got {d[1]:.9f})"] = abs(d[1] - 1) <= 1e-6
        checks[f"{name} n*D_n bounded (128*D_128 = {nd[128]:.3f}, increment ratio {ratio:.3f} > 0.75)"] = bounded
        if name == "gaussian":
            checks[f"gaussian D_2 = 1 - 1/pi (got {d[2]:.9f})"] = abs(d[2] - (1 - 1 / math.pi)) <= 1e-6
        notes.append(f"{name} 128*D_128={nd[128]:.3f}")
    ok, detail = _all(checks)
    return ok, detail if not ok else ", ".join(notes)


@criterion(8, "1-bit sorted-pair Lloyd design and interchange")
def c08():
    res = os_quantizer_2d_gaussian(1, n_samples=1 << 20, seed=0)
    target = (2 * math.pi - 4) / math.pi
    a = math.sqrt(2 / math.pi)
    prod = rotated_product_codebook(a)
    inter = interchange_check(prod)
    cone = ordered_restriction(prod).points
    gap = float(np.abs(np.sort(res.codebook.points, axis=0) - cone).max())
    return _all({
        f"D = {res.distortion_total:.6f} vs {target:.6f} (tol 1e-3)": abs(res.distortion_total - target) <= 1e-3,
        "interchange holds on the 2-bit product codebook": inter.ok,
        f"cone points match the design (gap {gap:.1e})": gap <= 5e-3,
    })


@criterion(9, "high-rate scheme ledger at K=2")
def c09():
    led = scheme_ledger(2)
    s2 = led.row(2).rate_reduction_bits
    s3 = led.row(3).rate_reduction_bits
    hr = high_rate_validate(ContinuousParent.gaussian(), 2, 2.0**-6, n_letters=10**7, seed=SeedSpec(0))
    measured3 = hr.rate[1] - hr.rate[3]
    measured2 = hr.rate[1] - hr.rate[2]
    return _all({
        f"scheme-2 reduction {s2:.5f} bits (measured {measured2:.4f}) vs 0.5": abs(s2 - 0.5) <= 1e-9,
        f"scheme-3 reduction {s3:.5f} bits vs 0.5": abs(s3 - 0.5) <= 1e-9,
        f"scheme-3 measured {measured3:.4f} within 0.05 of 0.5": abs(measured3 - 0.5) <= 0.05,
    })


@criterion(10, "error-frequency R(D) against Blahut-Arimoto")
def c10():
    pmf = (0.25, 0.5, 0.25)
    d = error_frequency_matrix(3)
    worst = 0.0
    for beta in np.geomspace(0.05, 40, 200):
        R, D, _ = blahut_arimoto_point(pmf, d, float(beta))
        worst = max(worst, abs(erokhin_rate_at(pmf, D) - R))
    pts = erokhin_rd(pmf).points
    e0 = max(abs(pts[0][0] - 1.5), abs(pts[0][1]))
    e1 = max(abs(pts[-1][0]), abs(pts[-1][1] - 0.5))
    return _all({
        f"max |R - R_BA| = {worst:.1e} (tol 1e-3)": worst <= 1e-3,
        f"endpoint (1.5, 0) err {e0:.1e}": e0 <= 1e-9,
        f"endpoint (0, 0.5) err {e1:.1e}": e1 <= 1e-9,
    })


@criterion(11, "Shannon lower and upper bounds for sorted Gaussian pairs")
def c11():
    grid = BREAK_2 * np.arange(1, 1001) / 1001
    gap = min(sub_os_gaussian(float(D)) - slb_os_gaussian(float(D)) for D in grid)
    cont1 = abs(sub_branch(1, BREAK_1) - sub_branch(2, BREAK_1))
    cont2 = abs(sub_branch(2, BREAK_2) - sub_branch(3, BREAK_2))
    c = 0.5 * math.log2(4 - 8 / math.pi)
    offset = max(abs(sub_os_gaussian(float(D)) - math.log2(1 / D) - c) for D in grid[grid <= BREAK_1])
    return _all({
        f"SUB > SLB on 1000 points (min gap {gap:.2e})": gap > 0,
        f"continuity at breakpoints ({cont1:.1e}, {cont2:.1e})": cont1 <= 1e-12 and cont2 <= 1e-12,
        "SUB(2 - 2/pi) = 0": sub_os_gaussian(BREAK_2) == 0.0,
        f"low-distortion offset constant (err {offset:.1e})": offset <= 1e-9,
        "curves well formed": bound_curve("sub").is_monotone() and bound_curve("slb").is_monotone(),
    })


@criterion(12, "sorted Gaussian pair covariance")
def c12():
    mc = os_covariance_monte_carlo(10**7, SeedSpec(0))
    err = float(np.abs(mc - os_covariance_gaussian_k2()).max())
    eig = np.sort(np.linalg.eigvalsh(os_covariance_gaussian_k2()))
    eig_err = float(np.abs(eig - np.sort(os_covariance_eigenvalues())).max())
    return _all({f"MC entrywise err {err:.1e} (tol 1e-3)": err <= 1e-3, f"eigenvalue err {eig_err:.1e}": eig_err <= 1e-12})


@criterion(13, "lossy multiset budget grows like log n")
def c13():
    N, R = 2, 1.0
    M = math.ceil(2 ** (N * R))
    ratios = []
    for e in range(4, 21):
        n = 2**e
        bits = lossy_logn_budget(n, N, R)
        cap = (M - 1) * math.log2(n / N + 1) + 1
        if bits > cap:
            return False, f"n=2^{e}: {bits} bits exceeds (M-1) log2(n/N+1) + 1 = {cap:.2f}"
        ratios.append(bits / e)
    return max(ratios) <= 2 * (M - 1), f"bits/log2 n in [{min(ratios):.3f}, {max(ratios):.3f}]"


@criterion(14, "binary k-gram multiset counts")
def c14():
    rows = kgram_count_table(16, (1, 2, 3), 2)
    with tempfile.TemporaryDirectory() as d:
        out = Path(d) / "counts.csv"
        code = cli_run(["table", "--kgram-counts", "--grams", "1,2,3", "--n-max", "16", "--out", str(out)])
        emitted = list(csv.DictReader(out.open()))
    by_n: dict[int, list[int]] = {}
    for r in emitted:
        by_n.setdefault(int(r["n"]), []).append(int(r["distinct"]))
    return _all({
        "cli exit 0": code == 0,
        "all counts within (n+1)^(2^k)": all(r.distinct <= r.bound for r in rows),
        "k=1 count is n+1": all(r.distinct == r.n + 1 for r in rows if r.k == 1),
        "emitted counts monotone in k": all(v == sorted(v) for v in by_n.values()),
        "emitted rows match the library": [int(r["distinct"]) for r in emitted] == [r.distinct for r in rows],
    })


@criterion(15, "entropy table monotone and within enumeration bounds")
def c15():
    corpora = st.integers(2, 10).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=1, max_size=60)
    )

    @settings(max_examples=300, derandomize=True, deadline=None)
    @given(corpora)
    def prop(corpus):
        t = empirical_entropy_table(corpus, grams=(1, 2, 3, 4))
        assert t.is_monotone() and t.within_bounds()

    try:
        prop()
    except AssertionError as exc:
        return False, f"counterexample: {exc}"
    full = list(itertools.product((0, 1), repeat=8))
    t = empirical_entropy_table(full)
    ok = t.is_monotone() and t.within_bounds()
    return ok, "300 generated corpora plus the full binary n=8 corpus"


def evaluate(num: int) -> tuple[bool, str]:
    title, fn = CRITERIA[num]
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title}: {detail}"
    print(line)
    return ok, line


@pytest.mark.parametrize("num", sorted(CRITERIA), ids=lambda k: f"{k:02d}-{CRITERIA[k][0].split()[0]}")
def test_criterion(num):
    ok, line = evaluate(num)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(k)[0] for k in sorted(CRITERIA)]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
