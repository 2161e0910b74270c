from typing import Callable, Optional

from src.core.errors import NoSignChange, StalledBeforeTol
from src.ival import rounding as rd
from src.ival.interval import Interval
from src.observability.logger import get_logger

logger = get_logger(__name__)

MAX_STALLS = 200

SignFn = Callable[[Interval], Interval]


def _sign_at(f: SignFn, x: float) -> Optional[int]:
    return f(Interval(x)).sign()


def bisect_root(f: SignFn, bracket: Interval, tol: float, max_stalls: int = MAX_STALLS) -> Interval:
    """
    Bisection driven by interval signs. A probe whose sign cannot be certified
    leaves the bracket unchanged and the next probe moves toward the other end.
    """
    a, b = bracket.lo, bracket.hi
    sa = _sign_at(f, a)
    sb = _sign_at(f, b)
    if sa == 0:
        return Interval(a)
    if sb == 0:
        return Interval(b)
    if sa is None or sb is None or sa == sb:
        raise NoSignChange("no verified sign change on bracket", bracket=str(bracket), left=sa, right=sb)

    stalls = 0
    while rd.sub_up(b, a) > tol and a < 0.5 * a + 0.5 * b < b:
        fraction = 0.5
        moved = False
        while not moved:
            for probe_fraction in (fraction, 1.0 - fraction) if fraction != 0.5 else (0.5,):
                m = a + (b - a) * probe_fraction
                if not a < m < b:
                    continue
                sm = _sign_at(f, m)
                if sm == 0:
                    return Interval(m)
                if sm is None:
                    stalls += 1
                    if stalls >= max_stalls:
                        logger.warning("bisection stalled", lo=a, hi=b, stalls=stalls)
                        raise StalledBeforeTol(
                            "sign undecidable before reaching tolerance",
                            bracket=Interval(a, b),
                            width=b - a,
                            tol=tol,
                        )
                    continue
                if sm == sa:
                    a = m
                else:
                    b = m
                moved = True
                break
            if not moved:
                fraction /= 2.0
                if a + (b - a) * fraction <= a:
                    # no float strictly inside the shrunken probe range
                    raise StalledBeforeTol(
                        "sign undecidable before reaching tolerance",
                        bracket=Interval(a, b),
                        width=b - a,
                        tol=tol,
                    )
    return Interval(a, b)
