import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import leadlag as ll
from leadlag.errors import DataError
from leadlag.ingest import (
    AlignedReturns,
    TickSeries,
    align_to_grid,
    previous_tick_fill,
    read_csv,
    returns_from_sample,
    write_aligned_csv,
)
from leadlag.simulate import PathSample


def chi_weighted_returns(increments, missing):
    """Direct evaluation of the interpolation weight expansion.

    The pseudo return over (k, k+1] is sum_alpha chi_k(alpha) * increment
    (k - alpha), where chi_k(0) = 1 - delta_(k+1) and chi_k(alpha) keeps the
    product of delta over the alpha preceding grid points. Deliberately
    independent of the package implementation.
    """
    n = len(increments)
    delta = [1 if m else 0 for m in missing]
    out = [0.0] * n
    for k in range(n):
        total = 0.0
        for alpha in range(0, k + 1):
            chi = 1 - delta[k + 1]
            for l in range(1, alpha + 1):
                chi *= delta[k + 1 - l]
                if chi == 0:
                    break
            if chi:
                total += increments[k - alpha]
        out[k] = total
    return np.array(out)


def make_sample(increments, miss1, miss2, seed=0):
    n = len(increments[0])
    return PathSample(
        returns1=np.asarray(increments[0], dtype=float),
        returns2=np.asarray(increments[1], dtype=float),
        mask1=np.asarray(miss1, dtype=bool),
        mask2=np.asarray(miss2, dtype=bool),
        seed=seed,
    )


class TestReadCsv:
    def test_well_formed(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("timestamp,price\n0.0,100.0\n1.5,101.0\n2.0,100.5\n")
        ticks = read_csv(p)
        assert len(ticks) == 3
        assert ticks.timestamps[1] == 1.5
        assert ticks.prices[2] == 100.5

    def test_decreasing_timestamp_names_row(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("timestamp,price\n0.0,100.0\n-1.0,101.0\n2.0,100.5\n")
        with pytest.raises(DataError, match="row 2"):
            read_csv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("")
        with pytest.raises(DataError, match="no ticks"):
            read_csv(p)

    def test_header_only(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("timestamp,price\n")
        with pytest.raises(DataError, match="no ticks"):
            read_csv(p)

    def test_non_positive_price(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("timestamp,price\n0.0,100.0\n1.0,0.0\n")
        with pytest.raises(DataError, match="non-positive price"):
            read_csv(p)

    def test_missing_columns(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("time,px\n0.0,100.0\n")
        with pytest.raises(DataError, match="header"):
            read_csv(p)

    def test_comment_lines_skipped(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("# produced by a tool\ntimestamp,price\n0.0,100.0\n1.0,101.0\n")
        assert len(read_csv(p)) == 2

    def test_log_scale_passthrough(self, tmp_path):
        p = tmp_path / "ticks.csv"
        p.write_text("timestamp,price\n0.0,-0.5\n1.0,0.5\n")
        ticks = read_csv(p, scale="log_price")
        assert np.allclose(ticks.log_values(), [-0.5, 0.5])


class TestAlignToGrid:
    def test_ticks_on_every_grid_point(self):
        prices = np.array([100.0, 101.0, 99.0, 102.0])
        ticks = TickSeries(np.arange(4.0), prices)
        aligned = align_to_grid(ticks, t0=0.0, tau=1.0, n=3)
        assert np.allclose(aligned.returns, np.diff(np.log(prices)))
        assert aligned.observed.all()

    def test_missing_middle_point_telescopes(self):
        # values x0 at k=0 and x2 at k=2, nothing in between
        ticks = TickSeries(np.array([0.0, 2.0]), np.array([0.3, 0.9]), scale="log_price")
        aligned = align_to_grid(ticks, t0=0.0, tau=1.0, n=2)
        assert aligned.returns == pytest.approx([0.0, 0.6])
        assert list(aligned.observed) == [True, False, True]

    def test_last_tick_in_interval_wins(self):
        ticks = TickSeries(
            np.array([0.0, 0.4, 0.9, 1.0]), np.array([1.0, 2.0, 3.0, 4.0]), scale="log_price"
        )
        aligned = align_to_grid(ticks, t0=0.0, tau=1.0, n=1)
        # grid point 1 takes the tick at exactly t=1.0
        assert aligned.returns == pytest.approx([3.0])

    def test_no_tick_before_origin(self):
        ticks = TickSeries(np.array([5.0]), np.array([1.0]))
        with pytest.raises(DataError, match="grid origin"):
            align_to_grid(ticks, t0=4.0, tau=1.0, n=1)

    def test_nonpositive_step_count(self):
        ticks = TickSeries(np.array([0.0]), np.array([1.0]))
        with pytest.raises(DataError, match="positive number of grid steps"):
            align_to_grid(ticks, t0=0.0, tau=1.0, n=0)

    def test_idempotence_on_fully_observed_grid(self):
        rng = np.random.default_rng(5)
        values = rng.standard_normal(50).cumsum()
        ticks = TickSeries(np.arange(50.0), values, scale="log_price")
        aligned = align_to_grid(ticks, t0=0.0, tau=1.0, n=49)
        again = TickSeries(np.arange(50.0), values, scale="log_price")
        aligned2 = align_to_grid(again, t0=0.0, tau=1.0, n=49)
        assert np.array_equal(aligned.returns, aligned2.returns)
        assert np.array_equal(aligned.returns, np.diff(values))


class TestReturnsFromSample:
    def test_zero_masks_reproduce_increments(self):
        rng = np.random.default_rng(0)
        inc = rng.standard_normal((2, 20))
        scheme = ll.ObservationScheme(tau=1.0, n=20)
        sample = make_sample(inc, np.zeros(21, bool), np.zeros(21, bool))
        r1, r2 = returns_from_sample(sample, scheme)
        assert np.allclose(r1.returns, inc[0], atol=1e-15)
        assert np.allclose(r2.returns, inc[1], atol=1e-15)

    def test_all_missing_after_origin(self):
        inc = np.ones((2, 5))
        mask = np.ones(6, bool)
        mask[0] = False
        scheme = ll.ObservationScheme(tau=1.0, n=5)
        r1, _ = returns_from_sample(make_sample(inc, mask, mask), scheme)
        assert np.all(r1.returns == 0.0)
        assert not r1.observed[1:].any()

    def test_spec_example_pattern(self):
        # observed at 0 and 2, missing at 1: returns (0, x2 - x0)
        inc = np.array([[0.4, 0.6], [0.0, 0.0]])
        mask = np.array([False, True, False])
        scheme = ll.ObservationScheme(tau=1.0, n=2)
        r1, _ = returns_from_sample(make_sample(inc, mask, np.zeros(3, bool)), scheme)
        assert r1.returns == pytest.approx([0.0, 1.0])

    def test_length_mismatch_rejected(self):
        inc = np.ones((2, 5))
        mask = np.zeros(6, bool)
        scheme = ll.ObservationScheme(tau=1.0, n=4)
        with pytest.raises(DataError, match="mismatch"):
            returns_from_sample(make_sample(inc, mask, mask), scheme)

    def test_telescoping_sum(self):
        rng = np.random.default_rng(8)
        inc = rng.standard_normal((2, 64))
        mask = np.concatenate(([False], rng.random(64) < 0.4))
        scheme = ll.ObservationScheme(tau=1.0, n=64)
        r1, _ = returns_from_sample(make_sample(inc, mask, mask), scheme)
        levels = np.concatenate(([0.0], np.cumsum(inc[0])))
        observed = ~mask
        last_filled = levels[np.flatnonzero(observed)[-1]]
        assert r1.returns.sum() == pytest.approx(last_filled - levels[0], abs=1e-12)

    @given(st.data())
    @settings(max_examples=120, deadline=None)
    def test_chi_oracle_equivalence(self, data):
        n = data.draw(st.integers(min_value=1, max_value=64))
        miss = np.array([False] + [data.draw(st.booleans()) for _ in range(n)])
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        inc = rng.standard_normal((2, n))
        scheme = ll.ObservationScheme(tau=1.0, n=n)
        r1, _ = returns_from_sample(make_sample(inc, miss, np.zeros(n + 1, bool)), scheme)
        oracle = chi_weighted_returns(inc[0], miss)
        assert np.max(np.abs(r1.returns - oracle)) < 1e-12

    def test_alignment_route_matches_mask_route(self):
        # previous-tick through timestamps must agree with the mask path
        rng = np.random.default_rng(21)
        n = 48
        inc = rng.standard_normal((2, n)) * 0.01
        mask = np.concatenate(([False], rng.random(n) < 0.5))
        scheme = ll.ObservationScheme(tau=1.0, n=n)
        r_mask, _ = returns_from_sample(make_sample(inc, mask, mask), scheme)
        levels = np.concatenate(([0.0], np.cumsum(inc[0])))
        keep = ~mask
        ticks = TickSeries(np.arange(n + 1.0)[keep], levels[keep], scale="log_price")
        r_ticks = align_to_grid(ticks, t0=0.0, tau=1.0, n=n)
        assert np.allclose(r_mask.returns, r_ticks.returns, atol=1e-15)
        assert np.array_equal(r_mask.observed, r_ticks.observed)


class TestAlignedContainer:
    def test_previous_tick_fill(self):
        vals = np.array([1.0, 2.0, 3.0, 4.0])
        obs = np.array([True, False, True, False])
        assert np.allclose(previous_tick_fill(vals, obs), [1.0, 1.0, 3.0, 3.0])

    def test_origin_must_be_observed(self):
        with pytest.raises(DataError, match="origin"):
            AlignedReturns(
                t0=0.0, tau=1.0, n=1, returns=np.zeros(1), observed=np.array([False, True])
            )

    def test_shape_validation(self):
        with pytest.raises(DataError, match="flags"):
            AlignedReturns(
                t0=0.0, tau=1.0, n=2, returns=np.zeros(2), observed=np.array([True])
            )

    def test_csv_round_shape(self, tmp_path):
        aligned = AlignedReturns(
            t0=0.0,
            tau=1.0,
            n=3,
            returns=np.array([0.1, 0.0, -0.2]),
            observed=np.array([True, True, False, True]),
        )
        out = tmp_path / "aligned.csv"
        with open(out, "w") as fh:
            write_aligned_csv(aligned, fh)
        lines = out.read_text().strip().splitlines()
        assert lines[1] == "k,return,observed"
        assert lines[2].startswith("0,0.1,1")
        assert lines[3] == "1,0.0,0"
