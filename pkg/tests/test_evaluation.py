import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggmrecon.errors import DegenerateInputError, InputError
from ggmrecon.evaluation import (
    MaskSpec,
    apply_mask,
    correlation,
    mse,
    quantize,
    sweep_p,
)
from ggmrecon.ggm import GgmParams, sample
from ggmrecon.graph import make_lattice
from ggmrecon.inference import ReconstructionResult

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_mask_spec_validation():
    with pytest.raises(InputError):
        MaskSpec()
    with pytest.raises(InputError):
        MaskSpec(p=0.5, indices=(1,))
    with pytest.raises(InputError):
        MaskSpec(p=1.5)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_boundary_probabilities_exhaust_redraws(p):
    with pytest.raises(DegenerateInputError):
        apply_mask(np.zeros(5), MaskSpec(p=p))


def test_explicit_masks():
    with pytest.raises(InputError):
        apply_mask(np.zeros(5), MaskSpec(indices=()))
    with pytest.raises(InputError):
        apply_mask(np.zeros(5), MaskSpec(indices=(5,)))
    draw = apply_mask(np.arange(5.0), MaskSpec(indices=(3, 1, 3)))
    assert draw.observation.missing.tolist() == [1, 3] and draw.redraws == 0


def test_redraw_is_recorded():
    # a single vertex can never be both missing and observed
    with pytest.raises(DegenerateInputError):
        apply_mask(np.zeros(1), MaskSpec(p=0.5))
    # two vertices at p=0.5: half of all draws are degenerate, find one that needs a redraw
    seen = {apply_mask(np.zeros(2), MaskSpec(p=0.5, seed=s)).redraws for s in range(40)}
    assert 0 in seen and max(seen) >= 1


def test_mask_fraction_concentrates():
    draw = apply_mask(np.zeros(10000), MaskSpec(p=0.8, seed=7))
    frac = draw.observation.missing.size / 10000
    assert 0.79 <= frac <= 0.81


def test_mask_deterministic():
    a = apply_mask(np.zeros(50), MaskSpec(p=0.3, seed=9))
    b = apply_mask(np.zeros(50), MaskSpec(p=0.3, seed=9))
    assert np.array_equal(a.observation.missing, b.observation.missing)


def test_mse_examples():
    assert mse([1.0, 2.0], [1.0, 4.0], [1]) == 4.0
    assert mse([1.0, 2.0], [1.0, 2.0], [0, 1]) == 0.0
    res = ReconstructionResult(np.array([0.0, 3.0]), 0, True, 0.0)
    assert mse([1.0, 2.0], res, [0, 1]) == 1.0
    with pytest.raises(DegenerateInputError):
        mse([1.0], [1.0], [])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=2, max_size=30), finite, st.data())
def test_mse_shift_and_locality(pairs, c, data):
    t = np.array([a for a, _ in pairs])
    r = np.array([b for _, b in pairs])
    m = np.array(sorted(data.draw(st.sets(st.integers(0, len(t) - 1), min_size=1))))
    base = mse(t, r, m)
    assert base >= 0
    shifted = r.copy()
    shifted[m] -= c
    err = t[m] - r[m]
    assert mse(t, shifted, m) == pytest.approx(np.mean((err + c) ** 2), rel=1e-9, abs=1e-9)
    # values outside M do not matter
    other = r.copy()
    outside = np.setdiff1d(np.arange(len(t)), m)
    other[outside] += 17.0
    assert mse(t, other, m) == base
    # zero for a perfect reconstruction, positive for any error that survives squaring
    if np.array_equal(t[m], r[m]):
        assert base == 0
    if np.max(np.abs(err)) > 1e-150:
        assert base > 0


def test_correlation_examples(rng):
    t = rng.normal(size=20)
    m = np.arange(20)
    assert correlation(t, t, m) == pytest.approx(1.0)
    assert correlation(t, 3.0 - t, m) == pytest.approx(-1.0)
    r = rng.normal(size=20)
    # textbook form: (n sum xy - sum x sum y) / sqrt((n sum x^2 - (sum x)^2)(n sum y^2 - (sum y)^2))
    n = 20
    num = n * np.sum(t * r) - t.sum() * r.sum()
    den = np.sqrt((n * np.sum(t * t) - t.sum() ** 2) * (n * np.sum(r * r) - r.sum() ** 2))
    assert correlation(t, r, m) == pytest.approx(num / den, rel=1e-12)


def test_correlation_degenerate():
    with pytest.raises(DegenerateInputError):
        correlation([1.0, 2.0], [1.0, 2.0], [0])
    with pytest.raises(DegenerateInputError):
        correlation([1.0, 2.0, 3.0], [5.0, 5.0, 0.0], [0, 1])


def test_correlation_ignores_outside(rng):
    t, r = rng.normal(size=10), rng.normal(size=10)
    m = [1, 4, 6, 8]
    r2 = r.copy()
    r2[[0, 2, 3]] = 99.0
    assert correlation(t, r, m) == correlation(t, r2, m)


def test_quantize_bins():
    v = np.array([0.0, 0.01, 0.03, 0.031, 0.06, 0.09, 0.12, 0.15, 0.2])
    assert quantize(v).tolist() == [0, 0, 0, 1, 1, 2, 3, 4, 4]


def trivial_setup(n_rows=40):
    g = make_lattice(4, 5)
    p = GgmParams(np.linspace(0.0, 1.0, 20), xi=0.3, j=1.0)
    return g, p, sample(g, p, n_rows, seed=21)


def test_sweep_with_perfect_oracle_is_zero():
    g, p, data = trivial_setup()

    def oracle(g_, p_, obs):
        # knows the hidden row: the held-out row is the only one agreeing on O
        row = next(r for r in data if np.array_equal(r[obs.observed], obs.y))
        return ReconstructionResult(row.copy(), 0, True, 0.0)

    res = sweep_p(g, p, data, [0.5], trials=1, reconstructor=oracle)
    assert res.mean.tolist() == [0.0] and res.trials.tolist() == [1]


def test_sweep_deterministic_and_shaped():
    g, p, data = trivial_setup()
    a = sweep_p(g, p, data, [0.2, 0.6], trials=12, seed=5)
    b = sweep_p(g, p, data, [0.2, 0.6], trials=12, seed=5)
    assert a.mean.tobytes() == b.mean.tobytes() and a.stderr.tobytes() == b.stderr.tobytes()
    assert np.all(a.stderr >= 0) and np.all(a.trials >= 1)
    assert [r[0] for r in a.rows()] == [0.2, 0.6]


def test_sweep_thread_count_does_not_matter(monkeypatch):
    g, p, data = trivial_setup()
    monkeypatch.setenv("GGM_THREADS", "1")
    a = sweep_p(g, p, data, [0.4], trials=10, seed=3)
    monkeypatch.setenv("GGM_THREADS", "4")
    b = sweep_p(g, p, data, [0.4], trials=10, seed=3)
    assert a.mean.tobytes() == b.mean.tobytes()


def test_sweep_mse_increases_with_p():
    g, p, data = trivial_setup(100)
    res = sweep_p(g, p, data, [0.2, 0.5, 0.8], trials=100, seed=1)
    for k in range(2):
        gap = res.mean[k] - res.mean[k + 1]
        assert gap <= 2 * np.hypot(res.stderr[k], res.stderr[k + 1])


def test_sweep_stderr_scales_as_inverse_sqrt_trials():
    g, p, data = trivial_setup(100)
    small = sweep_p(g, p, data, [0.5], trials=50, seed=2).stderr[0]
    large = sweep_p(g, p, data, [0.5], trials=800, seed=2).stderr[0]
    ratio = small / large
    # sqrt(800 / 50) = 4, accepted within a factor 2 band
    assert 2.0 <= ratio <= 8.0


def test_sweep_loo_refit_runs():
    g, p, data = trivial_setup(30)
    res = sweep_p(g, p, data, [0.5], trials=3, seed=0, refit="loo")
    assert np.isfinite(res.mean[0]) and res.metadata["refit"] == "loo"


def test_sweep_validation():
    g, p, data = trivial_setup()
    with pytest.raises(InputError):
        sweep_p(g, p, data[:1], [0.5], trials=1)
    with pytest.raises(InputError):
        sweep_p(g, p, data, [0.5], trials=0)
    with pytest.raises(InputError):
        sweep_p(g, p, data, [0.5], trials=1, refit="always")
