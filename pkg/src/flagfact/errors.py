"""Exception hierarchy shared by all modules."""


class FlagFactError(Exception):
    """Base class for every error raised by flagfact."""


class InstanceMismatch(FlagFactError):
    """Operands belong to different algebra instances."""


class NotInvertible(FlagFactError):
    """An element failed the relative smallest-singular-value test.

    ``smallest`` is the offending relative singular value and ``index``
    the grid sample where it occurred (always 0 for dense instances).
    """

    def __init__(self, smallest, index=0, message=None):
        self.smallest = float(smallest)
        self.index = int(index)
        if message is None:
            message = (f"element is not invertible: relative smallest singular "
                       f"value {self.smallest:.3e} at sample {self.index}")
        super().__init__(message)


class NotInCorner(FlagFactError):
    """An element x does not satisfy pxp = x for the given idempotent."""


class NotIdempotent(FlagFactError):
    pass


class NotEquivalent(FlagFactError):
    """Idempotents p, q fail pq = q, qp = p."""


class BadFlag(FlagFactError):
    """Chain is not strictly increasing, or members do not commute."""


class BadPartition(FlagFactError):
    pass


class CornerNotInvertible(FlagFactError):
    """Corner p_j g p_j is singular in p_j A p_j (the element is outside Omega)."""

    def __init__(self, corner, smallest, message=None):
        self.corner = int(corner)
        self.smallest = float(smallest)
        if message is None:
            message = (f"corner {self.corner} is not invertible "
                       f"(relative smallest singular value {self.smallest:.3e})")
        super().__init__(message)


class NotPositive(FlagFactError):
    def __init__(self, points, message=None):
        self.points = list(points)
        if message is None:
            shown = ", ".join(f"{complex(z):.4g}" for z in self.points[:8])
            message = f"spectrum not contained in (0, inf): offending points {shown}"
        super().__init__(message)


class OutOfChart(FlagFactError):
    pass


class BadWitness(FlagFactError):
    pass


class NonHermitianWarning(UserWarning):
    """Issued when an algorithm that assumes a hermitian algebra runs on one
    whose sampled witness test failed."""
