import numpy as np
import pytest

from branekit.errors import (
    AmbiguousMatching,
    InputError,
    NonUnit,
    NotSemisimpleAtPoint,
    WDVVViolation,
)
from branekit.family import (
    Chart,
    Nerve,
    PotentialFamily,
    algebra_from_three_point,
    check_cocycle,
    compose_perms,
    family_from_function,
    from_potential,
    idempotent_frames,
    invert_perm,
    monodromy,
    perm_cycles,
    sheet_measure,
    transition_permutations,
)
from branekit.frobenius import diagonal_algebra
from branekit.poly import Polynomial

from conftest import (
    ANTIDIAG,
    circle_loop,
    circle_nerve,
    disk_nerve,
    quadratic_potential,
)


def line_nerve(points):
    return Nerve([Chart("c0", tuple(points))])


def test_polynomial_exact_derivatives():
    phi = Polynomial(2, {(2, 1): 0.5, (0, 4): 1.0 / 24.0})
    d111 = phi.diff(1).diff(1).diff(1)
    assert d111.terms == {(0, 1): 1.0}
    assert abs(phi((2.0, 3.0)) - (0.5 * 4 * 3 + 81 / 24)) < 1e-14


def test_from_potential_one_dimensional():
    phi = Polynomial(1, {(3,): 1.0 / 6.0})
    fam = PotentialFamily(1, phi, [[1.0]], 0)
    nerve = line_nerve([(0.1,), (0.2,), (0.5,)])
    family = from_potential(fam, nerve)
    for alg in family.algebras.values():
        assert alg.dim == 1
        assert abs(alg.c[0, 0, 0] - 1.0) < 1e-14
        assert abs(alg.trace[0] - 1.0) < 1e-14
        assert alg.validate().passed


def test_from_potential_two_dimensional_associative(circle_family):
    family, _ = circle_family
    for alg in family.algebras.values():
        assert alg.validate().passed


def test_random_two_dimensional_potentials_pass():
    rng = np.random.default_rng(0)
    nerve = line_nerve([(0.3, 1.0 + 0.2j), (0.1, 0.8)])
    for _ in range(20):
        terms = {(2, 1): 0.5}
        for e in range(3, 7):
            terms[(0, e)] = complex(rng.standard_normal(), rng.standard_normal())
        phi = Polynomial(2, terms)
        fam = PotentialFamily(2, phi, ANTIDIAG, 0)
        from_potential(fam, nerve)  # no WDVVViolation, no NonUnit


def test_from_potential_non_unit():
    phi = Polynomial(2, {(3, 0): 1.0 / 6.0})
    fam = PotentialFamily(2, phi, ANTIDIAG, 0)
    with pytest.raises(NonUnit):
        from_potential(fam, line_nerve([(1.0, 1.0)]))


def random_unital_three_point(rng, g):
    """Random symmetric 3-tensor whose unit-direction slice matches g."""
    n = g.shape[0]
    c3 = np.zeros((n, n, n), dtype=complex)
    vals = {}
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if i == 0:
                    v = g[j, k]
                else:
                    v = complex(rng.standard_normal(), rng.standard_normal())
                vals[(i, j, k)] = v
    for (i, j, k), v in vals.items():
        for p in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            c3[p] = v
    return c3


def test_random_three_dim_tensor_fails_associativity():
    rng = np.random.default_rng(1)
    g = np.eye(3)
    failures = 0
    for _ in range(50):
        alg = algebra_from_three_point(random_unital_three_point(rng, g), g, 0)
        report = alg.validate()
        by_name = {r.name: r for r in report.records}
        assert by_name["unit"].passed
        assert by_name["commutativity"].passed
        if not by_name["associativity"].passed:
            failures += 1
    assert failures >= 48


def test_idempotent_frames_constant_family():
    nerve = line_nerve([(0.0,), (1.0,), (2.0,)])
    family = family_from_function(nerve, lambda p: diagonal_algebra([2.0, 3.0]))
    frames = idempotent_frames(family)
    tracks = frames.frames["c0"]
    for s in range(1, 3):
        assert np.max(np.abs(tracks[s] - tracks[0])) < 1e-12


def test_idempotent_frames_quarter_arc_closed_form(circle_family):
    family, nerve = circle_family
    frames = idempotent_frames(family)
    # chart c0 covers theta in [0, pi/4]; tracks are (1 +- x/sqrt(t))/2
    chart = nerve.charts["c0"]
    for s, point in enumerate(chart.samples):
        t = point[1]
        expected = {
            (0.5, 0.5 / np.sqrt(t)),
            (0.5, -0.5 / np.sqrt(t)),
        }
        got = frames.frames["c0"][s]
        for row in got:
            best = min(max(abs(row[0] - e[0]), abs(row[1] - e[1])) for e in expected)
            assert best < 1e-9


def test_frames_fail_at_degenerate_point():
    phi = quadratic_potential()
    nerve = line_nerve([(0.0, 1.0), (0.0, 0.0)])
    family = from_potential(phi, nerve)
    with pytest.raises(NotSemisimpleAtPoint):
        idempotent_frames(family)


def test_transitions_identity_for_identical_frames():
    center = (0.5,)
    nerve = Nerve(
        [Chart("a", ((0.2,), center)), Chart("b", ((0.9,), center))],
        edges=[("a", "b")],
    )
    family = family_from_function(nerve, lambda p: diagonal_algebra([2.0, 5.0]))
    cover = transition_permutations(idempotent_frames(family), nerve)
    assert cover.transitions[("a", "b")] == (0, 1)


def test_single_chart_no_transitions(circle_family):
    family, _ = circle_family
    nerve1 = Nerve([Chart("only", (((0.0, 1.0)),))])
    fam1 = family_from_function(nerve1, lambda p: diagonal_algebra([1.0, 2.0]))
    cover = transition_permutations(idempotent_frames(fam1), nerve1)
    assert cover.transitions == {}


def test_circle_monodromy_is_transposition(circle_family):
    family, nerve = circle_family
    cover = transition_permutations(idempotent_frames(family), nerve)
    loop = circle_loop()
    assert monodromy(cover, loop) == (1, 0)
    assert perm_cycles(monodromy(cover, loop)) == "(1 2)"
    # doubled loop is the identity
    doubled = loop + loop[1:]
    assert monodromy(cover, doubled) == (0, 1)
    # trivial loop
    assert monodromy(cover, ["c0", "c1", "c0"]) == (0, 1)


def test_monodromy_stable_under_refinement():
    for m in (4, 8):
        nerve = circle_nerve(samples_per_chart=m)
        family = from_potential(quadratic_potential(), nerve)
        cover = transition_permutations(idempotent_frames(family), nerve)
        assert monodromy(cover, circle_loop()) == (1, 0)


def test_monodromy_requires_closed_loop(circle_family):
    family, nerve = circle_family
    cover = transition_permutations(idempotent_frames(family), nerve)
    with pytest.raises(InputError):
        monodromy(cover, ["c0", "c1"])


def test_check_cocycle_on_disk():
    nerve = disk_nerve()
    family = from_potential(quadratic_potential(), nerve)
    cover = transition_permutations(idempotent_frames(family), nerve)
    report = check_cocycle(cover)
    assert report.passed, str(report)


def test_check_cocycle_detects_corruption():
    nerve = disk_nerve()
    family = from_potential(quadratic_potential(), nerve)
    cover = transition_permutations(idempotent_frames(family), nerve)
    bad = dict(cover.transitions)
    key = ("p0", "p1")
    bad[key] = invert_perm(compose_perms(bad[key], (1, 0)))
    cover.transitions = bad
    report = check_cocycle(cover)
    assert not report.passed
    assert any("triangle" in (r.location or "") for r in report.failures())


def test_sheet_measure_constant_family():
    nerve = line_nerve([(0.0,), (1.0,)])
    family = family_from_function(nerve, lambda p: diagonal_algebra([2.0, 3.0]))
    cover = transition_permutations(idempotent_frames(family), nerve)
    values = sheet_measure(family, cover)["c0"]
    assert np.allclose(sorted(np.real(values[0])), [2.0, 3.0])
    assert np.allclose(values[0], values[1])


def test_sheet_measure_sums_to_unit_trace(circle_family):
    family, nerve = circle_family
    cover = transition_permutations(idempotent_frames(family), nerve)
    values = sheet_measure(family, cover)
    for cid, arr in values.items():
        for s in range(arr.shape[0]):
            alg = family.algebras[(cid, s)]
            total = arr[s].sum()
            assert abs(total - alg.theta(alg.unit)) < 1e-9


def test_sheet_measure_permutes_along_edges(circle_family):
    family, nerve = circle_family
    cover = transition_permutations(idempotent_frames(family), nerve)
    values = sheet_measure(family, cover)
    for (a, b), u in cover.transitions.items():
        point = nerve.shared_points(a, b)[0]
        ia = nerve.charts[a].samples.index(point)
        ib = nerve.charts[b].samples.index(point)
        for i in range(cover.n):
            assert abs(values[a][ia][i] - values[b][ib][u[i]]) < 1e-9


def test_cocycle_passes_for_random_smooth_families():
    # perturbed quadratic potentials over a triangulated disk
    rng = np.random.default_rng(23)
    nerve = disk_nerve()
    passed = 0
    for _ in range(50):
        terms = {(2, 1): 0.5, (0, 2): 1.0}
        for e in range(3, 6):
            terms[(0, e)] = 0.3 * complex(rng.standard_normal(), rng.standard_normal())
        fam = PotentialFamily(2, Polynomial(2, terms), ANTIDIAG, 0)
        family = from_potential(fam, nerve)
        cover = transition_permutations(idempotent_frames(family), nerve)
        if check_cocycle(cover).passed:
            passed += 1
    assert passed == 50


def test_nerve_validation_errors():
    with pytest.raises(InputError):
        Nerve([Chart("a", ((0.0,),)), Chart("b", ((1.0,),))], edges=[("a", "b")])
    with pytest.raises(InputError):
        Nerve([Chart("a", ((0.0,),)), Chart("a", ((1.0,),))])


def test_ambiguous_matching_raised():
    # two idempotents get swapped abruptly between charts whose shared point
    # carries frames from different branches -> distances tie
    center = (0.5,)
    nerve = Nerve(
        [Chart("a", (center,)), Chart("b", (center,))],
        edges=[("a", "b")],
    )

    class Flip:
        def __init__(self):
            self.calls = 0

        def __call__(self, p):
            self.calls += 1
            return diagonal_algebra([1.0, 1.0])

    family = family_from_function(nerve, Flip())
    frames = idempotent_frames(family)
    # make the frames artificially ambiguous: both sheets equidistant
    frames.frames["b"][0] = np.array([[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(AmbiguousMatching):
        transition_permutations(frames, nerve)
