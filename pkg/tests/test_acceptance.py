"""Acceptance suite: one test per documented acceptance criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion clause.

Three clauses encode targets that are mathematically or numerically
unattainable as stated; they are implemented faithfully and left red, each
with the measured value and a short analysis in its output:

* criterion 4b: the partial sums of 6/(k(k-1)(k-2)) up to M = 1e6 sit
  exactly 3/(M(M-1)) ~ 3.0e-12 away from the closed form, above the 1e-12
  target;
* criterion 6b: the relative gap between the sphere quadrature and the
  plug-in value at theta = pi/2 grows with dimension (the plug-in is not
  an asymptotic equivalent), so it cannot decrease over d = 10..80;
* criterion 9a: at (eps, delta, alpha) = (1e-2, 1e-3, 1e-2) the doubled-B
  pattern of the three-arc construction cannot be acute (that requires
  alpha << eps^2), pinning the obtuse probability near 0.55 rather than
  4/9; the 4/9 limit is demonstrated at valid parameters in criterion 9e.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np

from conftest import OCTAHEDRON_EXACT, UNIT_SQUARE_EXACT
from obtri.bounds import (
    asymptotic_bound,
    binom3,
    closed_form_2d,
    closed_form_3d,
    limit_bound,
    recursion_step,
    tail_sum,
)
from obtri.constructions import (
    ArcTripleParams,
    ArcTripleSampler,
    SelfSimilarParams,
    arc_triple_pattern_report,
    maximize_acute,
    mc_self_similar,
)
from obtri.geometry import Configuration, TriangleClass, classify_batch, count_nonacute
from obtri.mc import estimate
from obtri.search import SearchParams, enumerate_exact, search_min
from obtri.sphere import asymptotic_sphere, obtuse_prob_sphere, sample_sphere

PINNED_ARC = ArcTripleParams(alpha=1e-2, delta=1e-3, eps=1e-2)
DEMO_ARC = ArcTripleParams(alpha=1e-4, delta=8e-6, eps=0.05)
P_STAR = (22.0 - math.sqrt(133.0)) / 13.0
X_STAR = (2.0 * math.sqrt(133.0) - 17.0) / 9.0
OBTUSE_STAR = 1.0 - X_STAR

# Reference table of extrapolated lower bounds for d = 4..8 (3 significant
# figures, labeled approximate at the source).
REFERENCE_TABLE = {4: 7.91e-3, 5: 1.73e-3, 6: 4.07e-4, 7: 9.89e-5, 8: 2.43e-5}


def report(tag: str, ok: bool, detail: str) -> bool:
    print(f"[criterion {tag}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_01_recursion_closed_form_equivalence():
    start = time.perf_counter()
    t = closed_form_2d(4)
    ok2 = True
    for n in range(4, 10_000):
        t = recursion_step(t, n)
        if t != closed_form_2d(n + 1):
            ok2 = False
            break
    t = closed_form_3d(6)
    ok3 = True
    for n in range(6, 10_000):
        t = recursion_step(t, n)
        if t != closed_form_3d(n + 1):
            ok3 = False
            break
    elapsed = time.perf_counter() - start
    ok = ok2 and ok3 and elapsed < 1.0
    assert report("01", ok,
                  f"closed forms solve the recursion exactly for n <= 1e4 "
                  f"(2-D: {ok2}, 3-D: {ok3}) in {elapsed:.2f}s")


def test_criterion_02_limit_bounds_2d_3d():
    start = time.perf_counter()
    res2 = limit_bound(2, 10 ** 6)
    t2 = time.perf_counter() - start
    start = time.perf_counter()
    res3 = limit_bound(3, 10 ** 6)
    t3 = time.perf_counter() - start
    in2 = Fraction(1, 3) - Fraction(1, 10 ** 5) <= res2.lower_bound <= Fraction(1, 3)
    in3 = Fraction(1, 11) - Fraction(1, 10 ** 5) <= res3.lower_bound <= Fraction(1, 11)
    ok = in2 and in3 and res2.monotone and res3.monotone and t2 < 10 and t3 < 10
    assert report("02", ok,
                  f"d=2: {float(res2.lower_bound):.9f} in [1/3-1e-5, 1/3] ({t2:.1f}s); "
                  f"d=3: {float(res3.lower_bound):.9f} in [1/11-1e-5, 1/11] ({t3:.1f}s); "
                  f"monotone: {res2.monotone and res3.monotone}")


def test_criterion_03_extrapolated_table():
    start = time.perf_counter()
    rows = {}
    ok = True
    for d, ref in REFERENCE_TABLE.items():
        lb = float(limit_bound(d, 10 ** 6).lower_bound)
        rows[d] = lb
        if abs(lb / ref - 1.0) > 0.02:
            ok = False
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    detail = ", ".join(f"d={d}: {lb:.4g} (ref {REFERENCE_TABLE[d]:.3g})"
                       for d, lb in rows.items())
    assert report("03", ok, f"{detail}; {elapsed:.1f}s")


def test_criterion_04a_asymptotic_formula_exact():
    ok = all(
        asymptotic_bound(d) == Fraction(3, (2 ** d - 1) * (2 ** d - 2))
        for d in range(2, 16)
    )
    assert report("04a", ok, "asymptotic bound equals 3/((2^d-1)(2^d-2)) exactly")


def test_criterion_04b_partial_sums_within_1e12():
    # Faithful to the stated target: |sum_{k=m}^{M} 6/(k(k-1)(k-2))
    # - 3/((m-1)(m-2))| <= 1e-12 with M = 1e6.  The telescoping identity
    # gives the distance exactly: 3/(M(M-1)) = 3.000003e-12 > 1e-12, for
    # any m, independent of arithmetic.  The target is unattainable by a
    # factor of three; see the exact-identity check in tests/test_bounds.py
    # for the correct finite-M statement.
    m_values = (4, 16, 64)
    M = 10 ** 6
    gaps = {}
    ok = True
    for m in m_values:
        partial = math.fsum(6.0 / (k * (k - 1.0) * (k - 2.0)) for k in range(m, M + 1))
        target = 3.0 / ((m - 1) * (m - 2))
        gaps[m] = abs(partial - target)
        exact_gap = Fraction(3, (m - 1) * (m - 2)) - tail_sum(m, M)
        assert exact_gap == Fraction(3, M * (M - 1))  # the analysis, verified
        if gaps[m] > 1e-12:
            ok = False
    detail = ", ".join(f"m={m}: gap {gaps[m]:.3e}" for m in m_values)
    assert report(
        "04b", ok,
        f"{detail} vs target 1e-12; the true distance is exactly "
        f"3/(M(M-1)) = {float(Fraction(3, M * (M - 1))):.6e}"
    )


def test_criterion_05_sphere_exact_values():
    start = time.perf_counter()
    q3 = obtuse_prob_sphere(3)
    q2 = obtuse_prob_sphere(2)
    ok_q = abs(q3 - 0.5) <= 1e-8 and abs(q2 - 0.75) <= 1e-8
    n = 10 ** 6
    rng = np.random.default_rng(20240805)
    pts = sample_sphere(2, rng, 3 * n).reshape(n, 3, 2)
    codes = classify_batch(pts[:, 0], pts[:, 1], pts[:, 2])
    p_hat = float(np.mean(codes == 2))
    sigma = math.sqrt(0.75 * 0.25 / n)
    ok_mc = abs(p_hat - 0.75) <= 3.0 * sigma
    elapsed = time.perf_counter() - start
    ok = ok_q and ok_mc and elapsed < 5.0
    assert report("05", ok,
                  f"quad d=3: {q3:.10f} (target 0.5+-1e-8); quad d=2: {q2:.10f} "
                  f"(target 0.75+-1e-8); MC d=2: {p_hat:.5f}+-{3 * sigma:.5f}; {elapsed:.1f}s")


def test_criterion_06a_plugin_value_d3():
    value = asymptotic_sphere(3)
    expected = 1.5 * (1.0 - math.sqrt(0.5))
    ok = abs(value - expected) <= 1e-12
    assert report("06a", ok, f"plug-in at d=3: {value:.15f} vs (3/2)(1-sqrt(1/2))")


def test_criterion_06b_relative_gap_decreasing():
    # Faithful to the stated target: |quadrature/plug-in - 1| strictly
    # decreasing over d in {10, 20, 40, 80}.  The gap in fact grows without
    # bound: the angle density concentrates at pi/2 at width ~ d^(-1/2),
    # but log I_{z}((d-1)/2, 1/2) varies at rate ~ d in z across that
    # width, so the expectation exceeds the plug-in by a factor growing
    # exponentially in d (both still tend to zero absolutely).
    dims = (10, 20, 40, 80)
    gaps = [abs(obtuse_prob_sphere(d) / asymptotic_sphere(d) - 1.0) for d in dims]
    ok = all(b < a for a, b in zip(gaps, gaps[1:]))
    detail = ", ".join(f"d={d}: {g:.3g}" for d, g in zip(dims, gaps))
    assert report("06b", ok, f"relative gaps {detail} (target: strictly decreasing)")


def test_criterion_07a_sphere_beats_nested_caps_at_d6():
    q6 = obtuse_prob_sphere(6)
    ok = q6 < OBTUSE_STAR
    assert report("07a", ok, f"sphere d=6: {q6:.6f} < {OBTUSE_STAR:.6f}")


def test_criterion_07b_nested_caps_beat_sphere_at_d5():
    # Faithful to the stated target: 0.326097 < sphere obtuse probability at
    # d=5.  The quadrature gives exactly 17/70 = 0.242857 (confirmed by the
    # a=2 closed form by hand and by direct MC), already below the 3-D
    # nested-cap value: the 3-D construction's number stops beating the
    # sphere after d=4, not d=5.
    q5 = obtuse_prob_sphere(5)
    ok = OBTUSE_STAR < q5
    assert report("07b", ok,
                  f"sphere d=5: {q5:.6f} (= 17/70) vs target "
                  f"> {OBTUSE_STAR:.6f}; crossover is between d=4 "
                  f"({obtuse_prob_sphere(4):.4f}) and d=5")


def test_criterion_08_fixed_point_optimum():
    opt = maximize_acute()
    ok = (abs(opt.p - P_STAR) <= 1e-9
          and abs(opt.acute - X_STAR) <= 1e-9
          and abs(opt.residual) <= 1e-12)
    assert report("08", ok,
                  f"p* = {opt.p:.12f} (err {abs(opt.p - P_STAR):.1e}), "
                  f"x* = {opt.acute:.12f} (err {abs(opt.acute - X_STAR):.1e}), "
                  f"residual {abs(opt.residual):.1e}")


def test_criterion_09a_arc_triple_pinned_obtuse():
    # Faithful to the stated target: 1e6 triples at
    # (eps, delta, alpha) = (1e-2, 1e-3, 1e-2) giving obtuse in 4/9 +- 0.02.
    # At these parameters the BBA pattern cannot be acute: the apex point at
    # A wanders transverse to BA by ~ delta*alpha/2 = 5e-6, far beyond the
    # B-arc half-length eps^2*delta/2 = 5e-8 (acuteness needs
    # alpha << eps^2).  The construction's true obtuse probability here is
    # 5/9 - O(eps) ~ 0.554.  See criterion 9e for the valid regime.
    start = time.perf_counter()
    est = estimate(ArcTripleSampler(PINNED_ARC), 10 ** 6, seed=20240801)
    elapsed = time.perf_counter() - start
    lo, hi = 4.0 / 9.0 - 0.02, 4.0 / 9.0 + 0.02
    ok = lo <= est.p_hat <= hi
    assert report("09a", ok,
                  f"obtuse {est.p_hat:.4f} vs [{lo:.4f}, {hi:.4f}]; "
                  f"BBA acute requires alpha << eps^2 "
                  f"(here alpha/eps^2 = {PINNED_ARC.alpha / PINNED_ARC.eps ** 2:.0f}); {elapsed:.1f}s")


def test_criterion_09b_same_arc_triples_all_obtuse():
    sampler = ArcTripleSampler(PINNED_ARC)
    rng = np.random.default_rng(20240806)
    bad = 0
    total = 0
    for pattern in ("AAA", "BBB", "CCC"):
        tri = sampler.sample_pattern(rng, pattern, 10_000)
        codes = classify_batch(tri[:, 0], tri[:, 1], tri[:, 2], tol=0.0)
        bad += int(np.sum(codes != 2))
        total += codes.size
    ok = bad == 0
    assert report("09b", ok, f"{total - bad}/{total} same-arc triples obtuse "
                             f"(sign-exact classification)")


def test_criterion_09c_one_per_arc_triples_all_acute():
    sampler = ArcTripleSampler(PINNED_ARC)
    rng = np.random.default_rng(20240807)
    tri = sampler.sample_pattern(rng, "ACB", 30_000)
    codes = classify_batch(tri[:, 0], tri[:, 1], tri[:, 2], tol=0.0)
    bad = int(np.sum(codes != 0))
    ok = bad == 0
    assert report("09c", ok, f"{codes.size - bad}/{codes.size} one-per-arc triples acute")


def test_criterion_09d_halving_moves_toward_four_ninths():
    # Stratified estimates (exact pattern weights x measured class rates)
    # make the small trend resolvable at practical sample sizes.
    #
    # Interpretation note: at the default relative tolerance the movement
    # toward 4/9 under halving is dominated by thin-triangle margins
    # falling below tol*scale (obtuse mass absorbed into the Right class),
    # not by the BBA pattern coming alive -- uniform halving keeps
    # alpha/eps^2 growing, away from the construction's validity regime.
    # The genuine 4/9 mechanism is exercised in criterion 9e.
    start = time.perf_counter()
    estimates = []
    for k in range(3):
        f = 0.5 ** k
        params = ArcTripleParams(alpha=PINNED_ARC.alpha * f,
                                 delta=PINNED_ARC.delta * f,
                                 eps=PINNED_ARC.eps * f)
        rep = arc_triple_pattern_report(params, 400_000, seed=20240808)
        estimates.append(rep.overall_obtuse)
    elapsed = time.perf_counter() - start
    target = 4.0 / 9.0
    dist = [abs(e - target) for e in estimates]
    ok = dist[1] < dist[0] and dist[2] < dist[1] and elapsed < 60.0
    assert report("09d", ok,
                  f"stratified obtuse under halving: "
                  f"{estimates[0]:.4f} -> {estimates[1]:.4f} -> {estimates[2]:.4f} "
                  f"(distances to 4/9: {dist[0]:.4f}, {dist[1]:.4f}, {dist[2]:.4f}); "
                  f"{elapsed:.1f}s")


def test_criterion_09e_demonstration_regime_reaches_four_ninths():
    # Supplementary: at parameters inside the construction's validity regime
    # (alpha ~ eps^2 scale, delta << alpha, all margins resolvable) the
    # obtuse probability lands within 4/9 +- 0.02 and every pattern behaves
    # as designed.
    start = time.perf_counter()
    rep = arc_triple_pattern_report(DEMO_ARC, 100_000, seed=20240809, tol=0.0)
    est = rep.overall_obtuse
    elapsed = time.perf_counter() - start
    rows = {r.pattern: r for r in rep.rows}
    ok = (abs(est - 4.0 / 9.0) <= 0.02
          and rows["ABC"].acute_rate == 1.0
          and all(rows[p].obtuse_rate == 1.0 for p in ("AAA", "BBB", "CCC"))
          and all(rows[p].acute_rate >= 1.0 - 3.0 * DEMO_ARC.eps
                  for p in ("AAC", "BBA", "CCB")))
    assert report("09e", ok,
                  f"obtuse {est:.4f} in 4/9 +- 0.02 at "
                  f"(eps, delta, alpha) = ({DEMO_ARC.eps}, {DEMO_ARC.delta}, "
                  f"{DEMO_ARC.alpha}); AAC/BBA/CCB acute "
                  f"{rows['AAC'].acute_rate:.3f}/{rows['BBA'].acute_rate:.3f}/"
                  f"{rows['CCB'].acute_rate:.3f}; {elapsed:.1f}s")


def test_criterion_10_self_similar_construction():
    start = time.perf_counter()
    rep = mc_self_similar(SelfSimilarParams(p=P_STAR), 10 ** 6, seed=20240901)
    elapsed = time.perf_counter() - start
    in_window = abs(rep.obtuse_hat - OBTUSE_STAR) <= 0.01
    consistent = abs(rep.accounting_gap) <= 3.0 * rep.accounting_sigma + 1e-9
    ok = in_window and consistent and elapsed < 120.0
    assert report("10", ok,
                  f"obtuse {rep.obtuse_hat:.4f} vs {OBTUSE_STAR:.4f} +- 0.01; "
                  f"pattern-decomposition gap {rep.accounting_gap:.2e} "
                  f"(3 sigma = {3 * rep.accounting_sigma:.2e}); {elapsed:.1f}s")


def test_criterion_11_counting_bound_consistency():
    start = time.perf_counter()
    rng = np.random.default_rng(20241001)
    ok_random = True
    for d, base, closed in ((2, 4, closed_form_2d), (3, 6, closed_form_3d)):
        for _ in range(500):
            n = int(rng.integers(base, 11))
            pts = rng.standard_normal((n, d))
            if count_nonacute(Configuration(points=pts)) < closed(n):
                ok_random = False
    ok_search = True
    for n, d, seed in ((4, 2, 1), (6, 2, 2), (8, 2, 3), (6, 3, 4), (8, 3, 5)):
        result = search_min(SearchParams(n=n, d=d, mode="non-acute", seed=seed,
                                         iterations=2000, restarts=2))
        if result.best_count < result.bound:
            ok_search = False  # search_min would already have raised
    square = enumerate_exact(UNIT_SQUARE_EXACT)
    octa = enumerate_exact(OCTAHEDRON_EXACT)
    ok_exact = (square.count(TriangleClass.OBTUSE) == 0 and square.exact_coordinates
                and octa.count(TriangleClass.OBTUSE) == 0 and octa.exact_coordinates)
    strict_sq = search_min(SearchParams(n=4, d=2, mode="strict-obtuse", seed=6,
                                        iterations=2000, restarts=2))
    strict_oct = search_min(SearchParams(n=6, d=3, mode="strict-obtuse", seed=7,
                                         iterations=2000, restarts=2))
    ok_strict = strict_sq.best_count == 0 and strict_oct.best_count == 0
    elapsed = time.perf_counter() - start
    ok = ok_random and ok_search and ok_exact and ok_strict
    assert report("11", ok,
                  f"1000 random configs >= closed-form bounds: {ok_random}; "
                  f"search never below bound: {ok_search}; exact square/octahedron "
                  f"have 0 obtuse: {ok_exact}; strict-obtuse search attains 0: "
                  f"{ok_strict}; {elapsed:.1f}s")


def test_criterion_12_integer_identities():
    start = time.perf_counter()
    ok_ratio = all(binom3(n) * (n + 1) == binom3(n + 1) * (n - 2)
                   for n in range(4, 10 ** 5 + 1))
    ok_mod = all(binom3(n) % 3 == (n // 3) % 3 for n in range(4, 10 ** 5 + 1))
    elapsed = time.perf_counter() - start
    ok = ok_ratio and ok_mod
    assert report("12", ok,
                  f"C(n,3)(n+1)/(n-2) = C(n+1,3) and C(n,3) mod 3 = floor(n/3) mod 3 "
                  f"for 4 <= n <= 1e5; {elapsed:.1f}s")


def test_criterion_13_mc_determinism_across_workers(tmp_path):
    from obtri.cli import main
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "sphere", "params": {"d": 3}}))
    blobs = []
    for workers in (1, 4, 16):
        out = tmp_path / f"out_{workers}.json"
        code = main(["mc", "--spec", str(spec), "--samples", "262144",
                     "--seed", "20241101", "--workers", str(workers),
                     "--output", str(out)])
        assert code == 0
        counts = json.loads(out.read_text())["result"]["counts"]
        blobs.append(json.dumps(counts, sort_keys=True).encode())
    ok = blobs[0] == blobs[1] == blobs[2]
    assert report("13", ok,
                  f"class counts byte-identical across workers 1/4/16: "
                  f"{json.loads(blobs[0])}")
