"""Exception types shared across the package."""


class VolselError(Exception):
    """Base class for all library errors."""


class ZeroRow(VolselError):
    """A projection pivot row has (numerically) zero length."""


class ConvergenceFailure(VolselError):
    """The Jacobi eigensolver did not converge within the sweep cap."""


class RankError(VolselError):
    """Requested subset size exceeds the numerical rank of the matrix."""


class DomainError(VolselError):
    """An argument is outside the domain of the operation."""


class Degenerate(RankError):
    """All candidate weights vanished; no feasible row remains.

    Subclasses RankError because a degenerate round means the matrix has
    fewer independent rows than the requested subset size.
    """


class TooLarge(VolselError):
    """Exhaustive enumeration would exceed the subset-count guard."""


class InfeasiblePrefix(VolselError):
    """The conditioning prefix has zero probability."""


class IllConditioned(VolselError):
    """Matrix condition number exceeds the guard for a determinant check."""


class NonRectangular(VolselError):
    """CSV rows have inconsistent lengths."""


class NonFinite(VolselError):
    """Input contains NaN or infinite entries."""


class ParseError(VolselError):
    """A CSV cell failed to parse; carries 1-based file coordinates."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(f"{message} (row {row}, column {col})")
        self.row = row
        self.col = col
