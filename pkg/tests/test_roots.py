import mpmath
import pytest

from src.core.errors import NoSignChange, StalledBeforeTol
from src.ival.interval import Interval, cos
from src.ival.roots import bisect_root


def test_square_root_of_two():
    root = bisect_root(lambda x: x * x - 2.0, Interval(1.0, 2.0), 1e-10)
    assert root.contains(1.41421356237)
    assert mpmath.mpf(root.lo) <= mpmath.sqrt(2) <= mpmath.mpf(root.hi)
    assert root.width <= 1e-10


def test_root_of_cosine():
    root = bisect_root(cos, Interval(1.0, 2.0), 1e-12)
    assert mpmath.mpf(root.lo) <= mpmath.pi / 2 <= mpmath.mpf(root.hi)


def test_exact_zero_at_endpoint():
    assert bisect_root(lambda x: x - 1.0, Interval(1.0, 3.0), 1e-9) == Interval(1.0)


def test_same_signs_raise():
    with pytest.raises(NoSignChange):
        bisect_root(lambda x: x * x + 1.0, Interval(-1.0, 1.0), 1e-9)


def test_undecidable_sign_stalls_with_bracket():
    # the enclosure of f straddles zero on the whole middle third
    def fuzzy(x: Interval) -> Interval:
        if x.hi < -0.3:
            return Interval(-1.0)
        if x.lo > 0.3:
            return Interval(1.0)
        return Interval(-1.0, 1.0)

    with pytest.raises(StalledBeforeTol) as info:
        bisect_root(fuzzy, Interval(-1.0, 1.0), 1e-12)
    bracket = info.value.bracket
    assert bracket.lo <= -0.3 and bracket.hi >= 0.3
