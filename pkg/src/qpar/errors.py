from .circuit import CircuitError

STAIRCASE_MESSAGE = (
    "controlled-U gates that are neither diagonal nor off-diagonal (e.g. a "
    "staircase of controlled-H) have no log-depth construction here; such "
    "staircases are conjectured to need linear depth"
)


class NotParallelizable(CircuitError):
    """The circuit lies outside the gate class a pass handles."""


class NonCommuting(NotParallelizable):
    pass


def check_not_staircase_gate(g) -> None:
    """Raise for a controlled-U whose block is neither diagonal nor off-diagonal."""
    if g.kind != "CU":
        return
    blk = abs(g.block)
    if max(blk[0, 1], blk[1, 0]) > 1e-12 and max(blk[0, 0], blk[1, 1]) > 1e-12:
        raise NotParallelizable(f"controlled-U {g}: {STAIRCASE_MESSAGE}")
