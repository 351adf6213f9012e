"""Exception hierarchy shared by every module in the package.

Data-shape problems (bad files, short series) and numerical failures
(conditioning, negative norms, divergence) are kept on separate branches so
the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class MbrError(Exception):
    """Base class for all errors raised by this package."""


class DataError(MbrError):
    """Input data is unusable: malformed file, too short, wrong shape."""


class NumericalError(MbrError):
    """A computation failed for numerical reasons."""


class SeriesTooShort(DataError):
    """The series does not contain enough points for the requested operation."""


class ParseError(DataError):
    def __init__(self, line_no: int, content: str):
        super().__init__(f"line {line_no}: cannot parse {content!r}")
        self.line_no = line_no
        self.content = content


class MixedColumnCount(DataError):
    def __init__(self, line_no: int, expected: int, found: int):
        super().__init__(
            f"line {line_no}: expected {expected} column(s), found {found}"
        )
        self.line_no = line_no
        self.expected = expected
        self.found = found


class NotEnoughNeighbors(DataError):
    """Fewer embedded candidates with successors than requested neighbours."""


class DivergedOrbit(NumericalError):
    def __init__(self, step: int, value: float, bound: float):
        super().__init__(
            f"orbit magnitude {value:g} exceeded {bound:g} at iterate {step}"
        )
        self.step = step
        self.value = value
        self.bound = bound


class DerivativeVanished(NumericalError):
    def __init__(self, step: int, x: float):
        super().__init__(f"|f'(x)| below 1e-300 at iterate {step} (x={x!r})")
        self.step = step
        self.x = x


class OverflowRisk(NumericalError):
    """Requested moment order would overflow double precision."""


class IllConditioned(NumericalError):
    """The empirical measure cannot support orthogonalization at this degree.

    ``index`` is the failing polynomial degree: an int in one dimension, an
    ``(i, j)`` pair in two.
    """

    def __init__(self, index, detail: str = ""):
        super().__init__(f"ill-conditioned at degree {index}" + (f": {detail}" if detail else ""))
        self.index = index


class NegativeNorm(NumericalError):
    """A squared norm came out negative in the defective 2D recursion."""

    def __init__(self, i: int, j: int, value: float, trace=None):
        super().__init__(f"N[{i},{j}] = {value:g} is negative")
        self.i = i
        self.j = j
        self.value = value
        self.trace = trace


class PredictionDiverged(NumericalError):
    """Iterated prediction escaped the divergence bound.

    ``prefix`` holds the points computed before the escape.
    """

    def __init__(self, prefix, step: int, value):
        super().__init__(f"prediction escaped at step {step}")
        self.prefix = prefix
        self.step = step
        self.value = value


class SingularNormalEquations(NumericalError):
    """Least-squares design matrix is rank deficient."""
