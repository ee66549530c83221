import cmath
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from jacklab.asymptotics import (
    BoundaryPoint,
    ConvergenceReport,
    VKRecipe,
    convergence_experiment,
    default_grid,
    moment_convergence_check,
    phi1_limit,
    psi_limit,
    psi_prelimit,
    psi_tilde,
    vk_sequence,
)
from jacklab.asymptotics import _block_rows
from jacklab.errors import CapacityError, DomainError
from jacklab.integral_reps import log_gamma_complex
from jacklab.partitions import Partition, Signature, conjugate, frobenius, split_signature

ALPHA = BoundaryPoint(alpha_plus=(0.3,))
BETA = BoundaryPoint(beta_minus=(0.4,))
GAMMA = BoundaryPoint(gamma_plus=1.0)
MIXED = BoundaryPoint(alpha_plus=(0.5, 0.2), beta_plus=(0.2,), gamma_plus=0.5,
                      alpha_minus=(0.25,), beta_minus=(0.2,), gamma_minus=0.3)

fractions01 = st.lists(st.floats(0, 0.4), max_size=2).map(lambda v: sorted(v, reverse=True))
boundary_points = st.builds(
    BoundaryPoint, alpha_plus=fractions01, beta_plus=fractions01, gamma_plus=st.floats(0, 2),
    alpha_minus=fractions01, beta_minus=fractions01, gamma_minus=st.floats(0, 2),
)


def test_boundary_point_validation():
    with pytest.raises(DomainError):
        BoundaryPoint(alpha_plus=(0.1, 0.3))
    with pytest.raises(DomainError):
        BoundaryPoint(beta_plus=(-0.1,))
    with pytest.raises(DomainError):
        BoundaryPoint(beta_plus=(0.7,), beta_minus=(0.4,))
    with pytest.raises(DomainError):
        BoundaryPoint(gamma_minus=math.inf)
    assert MIXED.delta_plus == pytest.approx(0.5 + 0.7 + 0.2)
    assert MIXED.delta_minus == pytest.approx(0.3 + 0.25 + 0.2)


def test_boundary_point_json():
    assert BoundaryPoint.from_json(MIXED.to_json()) == MIXED
    assert BoundaryPoint.from_json('{"gamma_plus": 1}') == GAMMA
    for bad in ('{"gamma_plus":', "[1]", '{"delta": 1}', '{"gamma_plus": "x"}', '{"alpha_plus": [true]}'):
        with pytest.raises(DomainError):
            BoundaryPoint.from_json(bad)


@settings(max_examples=50, deadline=None)
@given(boundary_points)
def test_boundary_point_json_roundtrip(om):
    assert BoundaryPoint.from_json(om.to_json()) == om


def test_psi_limit_examples():
    for z in (0.3 + 0.2j, 2.0, cmath.exp(1j)):
        assert psi_limit(z, BoundaryPoint(), 1.5) == 1
        assert psi_limit(z, BoundaryPoint(gamma_plus=2.0), 0.5) == pytest.approx(cmath.exp(2 * (z - 1)), rel=1e-15)
    for om in (ALPHA, BETA, GAMMA, MIXED):
        for t in (0.5, 1, 2.75):
            assert psi_limit(1, om, t) == 1
    with pytest.raises(DomainError):
        psi_limit(0, MIXED, 1)


def test_psi_tilde_examples():
    assert psi_tilde(3 + 1j, BoundaryPoint(), 1) == 1
    assert psi_tilde(3, BoundaryPoint(beta_plus=(0.5,)), 1) == pytest.approx(1.25, rel=1e-15)
    with pytest.raises(DomainError):
        psi_tilde(0.5, ALPHA, 1)


@pytest.mark.parametrize("om", [ALPHA, BETA, GAMMA, MIXED])
@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0, 2.75])
def test_bridge_identity(om, theta):
    # ten points in the strip 0 < Re y < 0.3
    for k in range(10):
        y = 0.02 + 0.03 * k + 0.05j * (k - 5)
        a = psi_tilde(theta / (1 - cmath.exp(-y)), om, theta)
        b = psi_limit(cmath.exp(y), om, theta)
        assert abs(a - b) <= 1e-12 * abs(b)


def test_prelimit_single_variable():
    # N = 1, lam = (0), theta = 1: e^{H(z)} Gamma(z) / Gamma(z + 1) = e^{H(z)} / z
    z = 2.5 + 0.5j
    H = z * cmath.log(z) - (z - 1) * cmath.log(z - 1) - 1
    assert psi_prelimit(z, (0,), 1) == pytest.approx(cmath.exp(H) / z, rel=1e-13)
    # general N: direct product of Gamma ratios
    lam, t, N = (2, 0, -1), 0.5, 3
    Hz = z * cmath.log(z) - (z - t) * cmath.log(z - t) - t
    direct = N * Hz + t * N * math.log(N)
    for i, l in enumerate(lam, start=1):
        direct += log_gamma_complex(N * z + 1 - l - t * (N - i + 1)) - log_gamma_complex(N * z + 1 - l - t * (N - i))
    assert psi_prelimit(z, lam, t) == pytest.approx(cmath.exp(direct), rel=1e-12)
    with pytest.raises(DomainError):
        psi_prelimit(0.5, lam, t)


def test_prelimit_zero_signature_tends_to_phi1():
    for t in (0.5, 1.0, 2.0):
        z = t + 2
        errs = [abs(psi_prelimit(z, (0,) * N, t) - phi1_limit(z, t)) for N in (10, 20, 40, 80)]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-2


def test_prelimit_one_row_convergence():
    for t in (1.0, 2.0):
        z = t + 2
        target = phi1_limit(z, t) * psi_tilde(z, ALPHA, t)
        errs = [abs(psi_prelimit(z, vk_sequence(VKRecipe(ALPHA), N), t) - target) for N in (10, 20, 40, 80)]
        assert all(a > b for a, b in zip(errs, errs[1:]))


def test_vk_sequence_examples():
    assert vk_sequence(VKRecipe(ALPHA), 10) == Signature([3] + [0] * 9)
    assert vk_sequence(VKRecipe(BoundaryPoint(beta_minus=(0.5,))), 8) == Signature([0] * 4 + [-1] * 4)
    lam = vk_sequence(VKRecipe(GAMMA), 16)
    assert lam.parts[:4] == (4, 4, 4, 4) and all(v == 0 for v in lam.parts[4:])
    assert frobenius(Partition(lam.parts)).d == 4


def test_vk_sequence_unrealizable():
    rec = VKRecipe(BoundaryPoint(beta_plus=(0.7,), beta_minus=(0.3,), alpha_plus=(0.2,)))
    assert not rec.realizable(10)
    with pytest.raises(DomainError):
        vk_sequence(rec, 10)
    with pytest.raises(DomainError):
        vk_sequence(VKRecipe(ALPHA), 0)


def test_block_rows_exact_area_self_conjugate():
    for area in range(0, 300):
        rows = _block_rows(area)
        assert sum(rows) == area
        assert all(a >= b for a, b in zip(rows, rows[1:]))
        if area != 2:
            assert tuple(rows) == conjugate(rows).parts
    assert _block_rows(16) == [4, 4, 4, 4]


@pytest.mark.parametrize("om", [ALPHA, BETA, GAMMA, MIXED])
def test_vk_statistics(om):
    # |lam+-|/N -> delta+-; overlaps with the block are O(sqrt N) cells
    rec = VKRecipe(om)
    Ns = (20, 40, 80, 160, 320)
    sides = ((om.delta_plus, om.alpha_plus, om.beta_plus, om.gamma_plus),
             (om.delta_minus, om.alpha_minus, om.beta_minus, om.gamma_minus))
    for k, (delta, alpha, beta, gamma) in enumerate(sides):
        errs = [abs(split_signature(vk_sequence(rec, N))[k].size / N - delta) for N in Ns]
        assert errs[-1] < errs[0] or errs[0] == errs[-1] == 0
        # rows sit to the right of the columns and the block, which is at most 2 sqrt(gamma N) + 1 wide
        N, p, q = Ns[-1], len(alpha), len(beta)
        b = 2 * math.sqrt(gamma * N) + 1
        assert errs[-1] <= (p * (q + b) + q * b + p + q + 1) / N


@pytest.mark.parametrize("om", [ALPHA, BETA, GAMMA, MIXED])
@pytest.mark.parametrize("k", [2, 3])
def test_moment_convergence(om, k):
    rep = moment_convergence_check(VKRecipe(om), k, [20, 40, 80, 160])
    assert rep.decreased()


def test_moment_examples():
    rep = moment_convergence_check(VKRecipe(ALPHA), 2, [10, 20, 40])
    # one row of length 0.3N: a_1 = 0.3N - 1/2
    assert rep.a_plus == pytest.approx([abs((0.3 * N - 0.5) ** 2 / N**2 - 0.09) for N in (10, 20, 40)])
    zero = moment_convergence_check(VKRecipe(BoundaryPoint()), 2, [10, 20])
    assert zero.a_plus == zero.b_plus == zero.a_minus == zero.b_minus == [0, 0]
    with pytest.raises(DomainError):
        moment_convergence_check(VKRecipe(ALPHA), 1, [10])


def test_default_grid():
    g = default_grid(1)
    assert len(g) == 16
    mods = sorted(round(abs(p[0]), 12) for p in g)
    assert mods.count(1.0) == 6 and mods.count(0.97) == 5 and mods.count(1.03) == 5
    assert all(abs(p[0] - 1) > 0.1 for p in g)
    assert len(default_grid(2)) == 256
    with pytest.raises(DomainError):
        default_grid(3)


def test_convergence_zero_recipe_is_exact():
    for m, Ns in ((1, [10, 20]), (2, [4, 9])):
        rep = convergence_experiment(VKRecipe(BoundaryPoint()), 1, m, Ns)
        assert rep.errors == [0.0] * len(Ns)


def test_convergence_alpha_theta1_decreasing():
    rep = convergence_experiment(VKRecipe(ALPHA), 1, 1, [20, 40, 80])
    assert rep.strictly_decreasing()
    assert rep.engines == ["residue"] * 3


def test_convergence_contour_engine_for_fractional_theta():
    rep = convergence_experiment(VKRecipe(ALPHA), 0.5, 1, [10, 20], grid=[(0.9,), (1.1j,)])
    assert rep.engines[0] == "contour-inside+contour-outside"
    assert rep.strictly_decreasing()


def test_convergence_gamma_m2():
    rep = convergence_experiment(VKRecipe(GAMMA), 2, 2, [9, 16, 25])
    assert rep.strictly_decreasing()


def test_convergence_errors():
    with pytest.raises(DomainError):
        convergence_experiment(VKRecipe(ALPHA), 1, 1, [10], engine="magic")
    with pytest.raises(CapacityError):
        convergence_experiment(VKRecipe(ALPHA), 1, 2, [80])
    with pytest.raises(DomainError):
        convergence_experiment(VKRecipe(ALPHA), 1, 1, [10], grid=[(0.5, 0.5)])


def test_convergence_report_roundtrip():
    rep = convergence_experiment(VKRecipe(ALPHA), 1, 1, [10, 20], grid=[(1j,), (0.97,)])
    back = ConvergenceReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep
    assert rep.csv().splitlines()[0] == "N,sup_error"
    assert len(rep.csv().splitlines()) == 3
