"""Exception hierarchy shared across the library.

Two broad classes matter downstream: plain usage errors (bad arguments,
non-composable pairs) and *hypothesis violations*, which mean the scenario
itself breaks an assumption every construction relies on (constant rank,
condition (6), ...).  Batch runners short-circuit on the latter.
"""

from __future__ import annotations


class FolioidError(Exception):
    """Base class for all library errors."""


class StructureError(FolioidError):
    """A finite table is malformed (id out of range, non-total map)."""


class NotComposable(FolioidError):
    """A product was requested for a pair that is not composable."""


class TangentNotComposable(NotComposable):
    """Base points compose but the tangent vectors do not."""


class SamplerError(FolioidError):
    """A scenario sampler produced an invalid sample."""


class NumericalBlowup(FolioidError):
    """A numerical evaluation produced non-finite values."""


class FlowEscapedBox(FolioidError):
    """An integration step left the chart box.

    Carries the last state known to be inside the box and the time reached.
    """

    def __init__(self, message: str, last_state=None, time: float = 0.0):
        super().__init__(message)
        self.last_state = last_state
        self.time = time


class SpanDeficiency(FolioidError):
    """A linear solve did not have enough independent directions."""


class HypothesisViolation(FolioidError):
    """A structural assumption of the construction fails on this scenario."""


class RankDrift(HypothesisViolation):
    """A distribution's numerical rank is not constant over the region."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class LiftFailed(HypothesisViolation):
    """No vector in the distribution projects onto the requested base vector."""


class TransportFailed(HypothesisViolation):
    """Leafwise transport did not reach the requested target."""


class Condition6Violated(HypothesisViolation):
    """Left translates of unit-leaf fibers do not fill the target fiber leaf.

    When this holds the quotient multiplication would be ill defined.
    """


class WellDefinednessViolated(HypothesisViolation):
    """A quotient-level value changed under a change of representative."""


class ThetaIllDefined(FolioidError):
    """A coset action table gives conflicting values on one coset."""
