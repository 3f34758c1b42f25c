from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    dense_lattice_max: int = 20
    existence_frame_max: int = 16
    existence_candidates_max: int = 50_000
    vertex_combinations_max: int = 200_000
    search_budget: int = 100_000
    stochastic_restarts: int = 32

    def override(self, **changes) -> "Limits":
        """Copy with the non-None entries of ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULT_LIMITS = Limits()
