import io
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicite import lawfit
from multicite.errors import CiteError
from multicite.fields import PUBLISHED_PAIRS
from multicite.ingest import parse_ratio_pairs

# Closed-form oracle evaluated with math.log over the printed pairs.
PUBLISHED_ALPHA_ORACLE = 0.8248980934089161


def oracle_alpha(pairs):
    num = sum(math.log(t) * math.log(h) for t, h in pairs)
    den = sum(math.log(t) ** 2 for t, _ in pairs)
    return num / den


def sse(pairs, a):
    return sum((math.log(h) - a * math.log(t)) ** 2 for t, h in pairs)


class TestFit:
    def test_published_pairs(self):
        fit = lawfit.fit_alpha(PUBLISHED_PAIRS)
        assert oracle_alpha(PUBLISHED_PAIRS) == pytest.approx(PUBLISHED_ALPHA_ORACLE, abs=1e-15)
        assert fit.alpha == pytest.approx(PUBLISHED_ALPHA_ORACLE, rel=1e-12)
        assert 0.81 <= fit.alpha <= 0.83
        assert len(fit.residuals) == 8
        assert fit.max_abs_residual == max(abs(r) for r in fit.residuals)

    def test_identity(self):
        assert lawfit.fit_alpha([(7.0, 7.0)]).alpha == pytest.approx(1.0)

    def test_half(self):
        assert lawfit.fit_alpha([(math.e ** 2, math.e)]).alpha == pytest.approx(0.5)

    def test_no_informative_pairs(self):
        with pytest.raises(CiteError, match="no_informative_pairs"):
            lawfit.fit_alpha([(1, 1), (1, 1)])

    @pytest.mark.parametrize("pair", [(0, 1), (2, 0), (-1, 3)])
    def test_non_positive(self, pair):
        with pytest.raises(CiteError, match="non_positive"):
            lawfit.fit_alpha([pair, (5, 3)])

    def test_warns_on_inconsistent_base(self):
        with pytest.warns(UserWarning):
            fit = lawfit.fit_alpha([(1, 2), (4, 2)])
        assert fit.alpha == pytest.approx(0.5)

    def test_bundled_pairs_file(self, data_dir):
        pairs = parse_ratio_pairs(data_dir / "published_pairs.csv")
        assert [(t, h) for _, t, h in pairs] == [tuple(map(float, p)) for p in PUBLISHED_PAIRS]


class TestPredict:
    def test_power(self):
        assert lawfit.predict_power(1, 0.37) == 1
        assert lawfit.predict_power(9, 0.82) == pytest.approx(6.06, abs=0.005)
        assert abs(lawfit.predict_power(9, 0.82) - 6) < 0.1
        assert lawfit.predict_power(78, 0.82) == pytest.approx(35.6, abs=0.05)

    def test_power_rejects(self):
        with pytest.raises(CiteError):
            lawfit.predict_power(0, 0.8)

    def test_two_thirds(self):
        assert lawfit.predict_two_thirds(15) == 10
        assert lawfit.predict_two_thirds(3) == 2
        assert lawfit.predict_two_thirds(78) == 52
        assert lawfit.predict_two_thirds(19) == Fraction(38, 3)
        assert lawfit.predict_two_thirds(1.5) == 1


class TestResiduals:
    def test_power_rule(self):
        rows = lawfit.residual_report(lawfit.fit_alpha(PUBLISHED_PAIRS), "power")
        direct = max(abs(h - t ** PUBLISHED_ALPHA_ORACLE) for t, h in PUBLISHED_PAIRS)
        assert lawfit.max_abs_residual(rows) == pytest.approx(direct)
        assert direct <= 1.5

    def test_two_thirds_excludes_78(self):
        rows = lawfit.residual_report(lawfit.fit_alpha(PUBLISHED_PAIRS), "two_thirds")
        assert [r.T for r in rows if r.excluded] == [78.0]
        direct = max(abs(2 * t / 3 - h) for t, h in PUBLISHED_PAIRS if t != 78 and t != 1)
        assert lawfit.max_abs_residual(rows) == pytest.approx(direct)
        assert lawfit.max_abs_residual(rows) <= 1
        assert lawfit.max_abs_residual(rows, include_excluded=True) == pytest.approx(15)

    def test_only_base_pair(self):
        fit = lawfit.FitResult(alpha=0.8, pairs_used=((1.0, 1.0),), residuals=(0.0,), max_abs_residual=0.0)
        rows = lawfit.residual_report(fit, "two_thirds", exclude_t=frozenset())
        assert [r for r in rows if r.informative] == []

    def test_unknown_rule(self):
        with pytest.raises(CiteError):
            lawfit.residual_report(lawfit.fit_alpha(PUBLISHED_PAIRS), "cubic")

    def test_csv_footer(self):
        buf = io.StringIO()
        lawfit.write_fit_report(lawfit.fit_alpha(PUBLISHED_PAIRS), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "field,T,H,H_pred,residual"
        assert lines[-1] == "alpha,0.82"
        assert len(lines) == 10

    def test_plot_data(self):
        fit = lawfit.fit_alpha(PUBLISHED_PAIRS)
        points, curve = lawfit.plot_data(fit, n_curve=5)
        assert points.shape == (8, 3)
        assert curve[0, 0] == pytest.approx(1) and curve[-1, 0] == pytest.approx(78)
        buf = io.StringIO()
        lawfit.write_plot_data(fit, buf, n_curve=5)
        assert len(buf.getvalue().splitlines()) == 1 + 8 + 5


pair_st = st.tuples(st.floats(1.01, 500), st.floats(0.05, 500))


@settings(max_examples=200, deadline=None)
@given(st.lists(pair_st, min_size=1, max_size=10), st.randoms(use_true_random=False))
def test_reorder_and_duplicate(pairs, rnd):
    a = lawfit.fit_alpha(pairs).alpha
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    assert lawfit.fit_alpha(shuffled).alpha == pytest.approx(a, rel=1e-12, abs=1e-12)
    assert lawfit.fit_alpha(pairs + pairs).alpha == pytest.approx(a, rel=1e-12, abs=1e-12)
    assert a == pytest.approx(oracle_alpha(pairs), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(pair_st)
def test_single_pair_inverts(pair):
    t, h = pair
    assert lawfit.predict_power(t, lawfit.fit_alpha([pair]).alpha) == pytest.approx(h, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(pair_st, min_size=1, max_size=8), st.data())
def test_monotone_in_h(pairs, data):
    i = data.draw(st.integers(0, len(pairs) - 1))
    bump = data.draw(st.floats(1.01, 5))
    t, h = pairs[i]
    bumped = pairs[:i] + [(t, h * bump)] + pairs[i + 1:]
    assert lawfit.fit_alpha(bumped).alpha > lawfit.fit_alpha(pairs).alpha


@settings(max_examples=200, deadline=None)
@given(st.lists(pair_st, min_size=1, max_size=8))
def test_alpha_minimizes_log_sse(pairs):
    a = lawfit.fit_alpha(pairs).alpha
    base = sse(pairs, a)
    tol = 1e-12 * max(1.0, base)
    assert sse(pairs, a + 1e-3) >= base - tol
    assert sse(pairs, a - 1e-3) >= base - tol
