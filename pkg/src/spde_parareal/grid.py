"""Two-level time grid: N coarse intervals, J fine sub-steps each."""

from dataclasses import dataclass

__all__ = ["TimeGrid"]


@dataclass(frozen=True)
class TimeGrid:
    """Final time T split into N coarse intervals of J fine steps each.

    dT = T/N and dt = T/(N*J) are always derived from (T, N, J) so the
    identities N*dT = T and J*dt = dT hold by construction.
    """

    T: float
    N: int
    J: int

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError(f"final time must be > 0, got {self.T}")
        if self.N < 1 or self.J < 1:
            raise ValueError(f"need N >= 1 and J >= 1, got N={self.N}, J={self.J}")

    @property
    def dT(self) -> float:
        """Coarse step size T/N."""
        return self.T / self.N

    @property
    def dt(self) -> float:
        """Fine step size T/(N*J)."""
        return self.T / (self.N * self.J)

    @property
    def n_fine(self) -> int:
        """Total number of fine steps N*J."""
        return self.N * self.J

    def t(self, n: int) -> float:
        """Coarse node t_n = n*dT."""
        return n * self.dT

    def t_fine(self, ell: int) -> float:
        """Fine node at global index ell, i.e. ell*dt."""
        return ell * self.dt
