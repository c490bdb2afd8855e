"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
printed with output capture disabled so they appear in any log.
"""

import time

import numpy as np
import pytest

from hexopt import (
    PAPER_MATERIALS,
    GammaLinkedProblem,
    Infeasible,
    NondimDesign,
    ReferenceScales,
    ThicknessConstrainedProblem,
    axial_conduction_parameter,
    builtin_paper_scenario,
    dimensionalize,
    effectiveness_kroeger,
    effectiveness_limit,
    evaluate,
    grid_oracle,
    maximize,
    nondimensionalize,
    parse_scenario,
    power_density_nondim,
    run_effectiveness_sweep,
    run_scenario,
    run_thickness_sweep,
    serialize_scenario,
    solve_length_for_effectiveness,
)
from hexopt.runner import ScenarioContext

import reference_data as ref

NONDIM_TOL = 5e-3
DIM_TOL = 1e-2


def _report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def _rel(value, expected):
    return abs(value - expected) / abs(expected)


class _Mismatches:
    def __init__(self, tol):
        self.tol = tol
        self.items = []
        self.checked = 0
        self.worst = (0.0, "")

    def rel(self, where, value, expected):
        err = _rel(value, expected)
        self.checked += 1
        if err > self.worst[0]:
            self.worst = (err, where)
        if err > self.tol:
            self.items.append(f"{where} {err:.2%}")

    def flag(self, where, ok):
        self.checked += 1
        if not ok:
            self.items.append(where)

    def summary(self):
        head = f"{self.checked} checks, worst {self.worst[0]:.3%} ({self.worst[1]})"
        if not self.items:
            return head
        return f"{head}; {len(self.items)} out of tolerance: " + ", ".join(self.items)


def _rows_by_material(scenario, strategy):
    rows = run_scenario(builtin_paper_scenario(scenario))
    return {r.material: r for r in rows if r.strategy == strategy}, rows


def test_criterion_1_unconstrained_table(capsys):
    start = time.perf_counter()
    rows, all_rows = _rows_by_material("table2", "gamma_linked")
    elapsed = time.perf_counter() - start
    mm = _Mismatches(NONDIM_TOL)
    base = all_rows[0]
    for name, value, expected in zip(
        ("L*", "D*", "t*", "Q", "IF"),
        (base.L_star, base.D_star, base.t_star, base.q_nondim * 1e6, base.improvement_factor),
        ref.BASELINE_NONDIM,
    ):
        mm.rel(f"baseline {name}", value, expected)
    for m, (L, D, t, q, IF) in ref.GAMMA_LINKED.items():
        r = rows[m]
        mm.rel(f"{m} L*", r.L_star, L)
        mm.rel(f"{m} D*", r.D_star, D)
        mm.rel(f"{m} t*", r.t_star, t)
        mm.rel(f"{m} Q", r.q_nondim * 1e6, q)
        mm.rel(f"{m} IF", r.improvement_factor, IF)
    ok = not mm.items and elapsed < 5.0
    _report(capsys, "criterion 1 unconstrained optimum table (0.5%, < 5 s)", ok, f"{mm.summary()}; {elapsed:.2f} s")
    assert ok, mm.summary()


def test_criterion_2_constrained_table(capsys):
    start = time.perf_counter()
    mm = _Mismatches(NONDIM_TOL)
    copper_infeasible = False
    for strategy, table in ref.CONSTRAINED.items():
        rows, _ = _rows_by_material(ref.STRATEGY_SCENARIO[strategy], strategy)
        for m, (L, D, t, q, active) in table.items():
            r = rows[m]
            tag = f"{strategy}/{m}"
            mm.rel(f"{tag} t*", r.t_star, t)
            mm.rel(f"{tag} D*", r.D_star, D)
            mm.rel(f"{tag} L*", r.L_star, L)
            mm.rel(f"{tag} Q", r.q_nondim * 1e6, q)
            mm.flag(f"{tag} fouling flag", r.fouling_active == active)
        if strategy == "am_reference":
            copper_infeasible = not rows["copper"].feasible
    elapsed = time.perf_counter() - start
    mm.flag("am_reference/copper infeasible", copper_infeasible)
    ok = not mm.items and elapsed < 10.0
    _report(capsys, "criterion 2 constrained optimum table, 23 rows (0.5%, < 10 s)", ok, f"{mm.summary()}; {elapsed:.2f} s")
    assert ok, mm.summary()


def _dim_checks(mm, tag, r, expected, with_flow):
    L, D, t, W, n, dens = expected[:6]
    mm.rel(f"{tag} L", r.L * 1e3, L)
    mm.rel(f"{tag} D", r.D * 1e3, D)
    mm.rel(f"{tag} t", r.t * 1e3, t)
    mm.rel(f"{tag} W", r.W * 1e3, W)
    mm.rel(f"{tag} power density", r.power_density / 1e5, dens)
    mm.flag(f"{tag} n {r.n} vs {n}", abs(r.n - n) <= 1)
    if with_flow:
        mm.rel(f"{tag} m'", r.mdot_per_width, expected[6])


def test_criterion_3_dimensional_tables(capsys):
    mm = _Mismatches(DIM_TOL)
    rows, all_rows = _rows_by_material("table2", "gamma_linked")
    _dim_checks(mm, "baseline", all_rows[0], ref.BASELINE_DIM, True)
    for m, expected in ref.GAMMA_LINKED_DIM.items():
        _dim_checks(mm, f"gamma_linked/{m}", rows[m], expected, True)
    for strategy, table in ref.CONSTRAINED_DIM.items():
        rows, _ = _rows_by_material(ref.STRATEGY_SCENARIO[strategy], strategy)
        for m, expected in table.items():
            _dim_checks(mm, f"{strategy}/{m}", rows[m], expected, False)
    ok = not mm.items
    _report(capsys, "criterion 3 dimensional tables (1%, n +-1)", ok, mm.summary())
    assert ok, mm.summary()


def test_criterion_4_baseline_closure(capsys, table2):
    ctx = ScenarioContext.from_spec(table2)
    perf = evaluate(ctx.baseline_design, table2.fluid, table2.baseline.material, ctx.scales)
    ok = 0.789 <= perf.effectiveness <= 0.793 and _rel(perf.q_nondim, 1.138e-6) <= NONDIM_TOL
    _report(
        capsys,
        "criterion 4 baseline closure",
        ok,
        f"eps={perf.effectiveness:.6f} in [0.789, 0.793], Q={perf.q_nondim:.6e} vs 1.138e-06 ({_rel(perf.q_nondim, 1.138e-6):.3%})",
    )
    assert ok


def test_criterion_5_copper_limit(capsys, table2):
    spec = builtin_paper_scenario("table3-am-reference")
    ctx = ScenarioContext.from_spec(spec)
    copper = PAPER_MATERIALS["copper"]
    design = NondimDesign(1.0, spec.baseline.D / spec.t_ref, copper.min_thickness / spec.t_ref)
    m = axial_conduction_parameter(design, spec.fluid, copper, ctx.scales)
    limit = effectiveness_limit(m)
    ok = 0.52 <= m <= 0.54 and 0.735 <= limit <= 0.745
    _report(capsys, "criterion 5 copper feasibility limit", ok, f"M={m:.4f} in [0.52, 0.54], eps_limit={limit:.4f} in [0.735, 0.745]")
    assert ok


def test_criterion_6_oracle_equivalence(capsys, table2):
    scales = ReferenceScales.from_fluid(table2.fluid, table2.t_ref, table2.reference_dp, table2.dp)
    worst_q = worst_d = 0.0
    fails = []
    count = 0
    for m in PAPER_MATERIALS.values():
        for problem in (
            GammaLinkedProblem(0.79, 0.16, m, table2.fluid, scales),
            ThicknessConstrainedProblem(0.79, 0.5e-3 / table2.t_ref, m, table2.fluid, scales),
        ):
            count += 1
            fast, oracle = maximize(problem), grid_oracle(problem)
            eq = _rel(fast.performance.q_nondim, oracle.performance.q_nondim)
            ed = _rel(fast.design.D_star, oracle.design.D_star)
            worst_q, worst_d = max(worst_q, eq), max(worst_d, ed)
            if eq > 1e-3 or ed > 1e-2:
                fails.append(f"{type(problem).__name__}/{m.name}")
    ok = count == 12 and not fails
    detail = f"{count} instances, worst Q {worst_q:.2e}, worst D* {worst_d:.2e}" + (f"; failing {fails}" if fails else "")
    _report(capsys, "criterion 6 fast optimizer vs grid oracle (0.1% Q, 1% D*)", ok, detail)
    assert ok


def test_criterion_7_property_suites(capsys, table2):
    rng = np.random.default_rng(20240601)
    results = {}

    n = np.geomspace(1e-3, 1e3, 2001)
    results["classic limit"] = max(abs(effectiveness_kroeger(v, 0.0) - v / (1 + v)) for v in n) <= 1e-12

    pairs = zip(10 ** rng.uniform(-3, 3, 2000), 10 ** rng.uniform(-6, 3, 2000))
    results["ceiling"] = all(effectiveness_kroeger(a, b) < effectiveness_limit(b) for a, b in pairs)

    scales = ReferenceScales.from_fluid(table2.fluid, table2.t_ref, table2.reference_dp, table2.dp)
    steel = PAPER_MATERIALS["austenitic_steel"]
    mono = True
    for L, D, t in zip(10 ** rng.uniform(0, 4, 300), 10 ** rng.uniform(-1, 1.3, 300), rng.uniform(0.01, 5, 300)):
        a = evaluate(NondimDesign(L, D, t), table2.fluid, steel, scales).effectiveness
        b = evaluate(NondimDesign(L * 1.01, D, t), table2.fluid, steel, scales).effectiveness
        mono &= b >= a
    results["monotone in L*"] = mono
    anti = all(
        effectiveness_kroeger(a, b * 1.01) <= effectiveness_kroeger(a, b)
        for a, b in zip(10 ** rng.uniform(-3, 3, 1000), 10 ** rng.uniform(-6, 3, 1000))
    )
    results["anti-monotone in M"] = anti

    ctx = ScenarioContext.from_spec(table2)
    rt = conserve = True
    for L, D, t in zip(10 ** rng.uniform(-1, 4, 300), 10 ** rng.uniform(-1.3, 1.7, 300), rng.uniform(0, 10, 300)):
        design = NondimDesign(L, D, t)
        dim = dimensionalize(design, 0.8, ctx.baseline, table2.fluid)
        back = nondimensionalize(dim, table2.t_ref)
        rt &= all(
            abs(x - y) <= 1e-14 * max(y, 1e-300)
            for x, y in zip((back.L_star, back.D_star, back.t_star), (L, D, t))
        )
        flow = dim.n * dim.W * dim.mdot_per_width / ctx.baseline.total_flow_product
        conserve &= dim.n == 1 or abs(flow - 1) <= 1 / dim.n
    results["dimensional roundtrip"] = rt
    results["flow conservation"] = conserve

    from hexopt import BUILTIN_SCENARIOS

    results["parse/serialize roundtrip"] = all(
        parse_scenario(serialize_scenario(builtin_paper_scenario(s))) == builtin_paper_scenario(s) for s in BUILTIN_SCENARIOS
    )
    ok = all(results.values())
    detail = ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in results.items())
    _report(capsys, "criterion 7 property suites", ok, detail)
    assert ok, detail


def test_criterion_8_trends(capsys):
    fig3 = run_effectiveness_sweep(builtin_paper_scenario("fig3-sweep"))
    decreasing = True
    for m in PAPER_MATERIALS:
        qs = [r.q_nondim for r in fig3 if r.material == m]
        decreasing &= all(a > b for a, b in zip(qs, qs[1:]))

    spec = builtin_paper_scenario("fig4-sweep")
    fig4 = run_thickness_sweep(spec)
    non_increasing = True
    for m in spec.materials:
        for e in spec.eps_grid:
            qs = [r.q_nondim for r in fig4 if r.material == m.name and r.eps_d == e]
            non_increasing &= all(a >= b for a, b in zip(qs, qs[1:]))

    point = run_thickness_sweep(spec, t_grid=[0.1e-3], eps_set=[0.6], material=["austenitic_steel", "plastic"])
    q = {r.material: r.q_nondim for r in point}
    ratio = q["austenitic_steel"] / q["plastic"]
    ok = decreasing and non_increasing and 1.00 <= ratio <= 1.05
    detail = (
        f"Q strictly decreasing in eps_d: {decreasing}; Q non-increasing in t_d: {non_increasing}; "
        f"steel/plastic at eps_d=0.6, t=0.1 mm = {ratio:.4f} in [1.00, 1.05]"
    )
    _report(capsys, "criterion 8 sweep trends", ok, detail)
    assert ok


def test_criterion_9_external_solver(capsys):
    with capsys.disabled():
        print("\n[SKIP] criterion 9 CFD effectiveness comparison: needs an external commercial solver; no check")
    pytest.skip("external CFD comparison is out of scope")


def test_diagnostic_reference_points_on_constraint(capsys):
    """Not a numbered criterion: explains criteria 1-3 when they fail.

    Each published interior optimum is fed through the length solve at its
    own (D*, t*). If that reproduces the published L* and Q, the published
    point is a feasible design; the optimizer's higher Q then shows the
    published point is not the maximum.
    """
    mm = _Mismatches(NONDIM_TOL)
    dominated = []
    spec = builtin_paper_scenario("table2")
    ctx = ScenarioContext.from_spec(spec)
    tables = {"gamma_linked": ref.GAMMA_LINKED, **ref.CONSTRAINED}
    for strategy, table in tables.items():
        rows, _ = _rows_by_material(ref.STRATEGY_SCENARIO.get(strategy), strategy)
        for m, values in table.items():
            L, D, t, q = values[:4]
            material = PAPER_MATERIALS[m]
            try:
                L_solved = solve_length_for_effectiveness(D, t, spec.eps_d, material, spec.fluid, ctx.scales)
            except Infeasible:
                mm.flag(f"{strategy}/{m} infeasible at published point", False)
                continue
            q_solved = power_density_nondim(NondimDesign(L_solved, D, t), spec.eps_d, ctx.scales)
            mm.rel(f"{strategy}/{m} L*", L_solved, L)
            mm.rel(f"{strategy}/{m} Q", q_solved * 1e6, q)
            # D* is printed to three decimals; closer than that is the same point
            if abs(rows[m].D_star - D) > 5e-4 and rows[m].q_nondim > q_solved:
                dominated.append(f"{strategy}/{m} +{rows[m].q_nondim / q_solved - 1:.2%}")
    ok = not mm.items
    detail = mm.summary() + "; optimizer finds a different, higher optimum for " + (", ".join(dominated) or "none")
    _report(capsys, "diagnostic published points satisfy eps_d constraint", ok, detail)
    assert ok
