"""Exception types shared across the package."""

from __future__ import annotations


class TaskGraphError(ValueError):
    """Base class for all domain errors raised by this package."""


# model
class CycleDetected(TaskGraphError):
    def __init__(self, cycle: list[str]) -> None:
        self.cycle = tuple(cycle)
        super().__init__("task graph contains a cycle: " + " -> ".join(cycle))


class WeightOutOfRange(TaskGraphError):
    pass


class NonPositiveSize(TaskGraphError):
    pass


class DanglingEdge(TaskGraphError):
    pass


class DuplicateEdge(TaskGraphError):
    pass


class SelfLoop(TaskGraphError):
    pass


class DuplicateNode(TaskGraphError):
    pass


class NonPositiveScale(TaskGraphError):
    pass


class EmptyGraph(TaskGraphError):
    pass


class MissingExpertise(TaskGraphError):
    pass


class UnknownSubtask(TaskGraphError):
    pass


class InvalidWorker(TaskGraphError):
    pass


class ParseError(TaskGraphError):
    """Malformed JSON input (bad structure, unknown keys, wrong types)."""


# execution
class UnknownWorker(TaskGraphError):
    pass


class AllocationNegative(TaskGraphError):
    pass


class MalformedAssignment(TaskGraphError):
    pass


class PositivityViolated(TaskGraphError):
    pass


class InconsistentObservations(TaskGraphError):
    pass


# capacity
class ZeroInterdependency(TaskGraphError):
    pass


class InfeasibleInput(TaskGraphError):
    pass


class SearchBudgetExceeded(TaskGraphError):
    pass


# lpp
class DegenerateThreshold(TaskGraphError):
    pass


class InvalidEcosystem(TaskGraphError):
    pass


# occupations
class EmptyOccupation(TaskGraphError):
    pass


class OverlappingOccupations(TaskGraphError):
    pass


class DeadlineExceeded(TaskGraphError):
    pass


class NonPositiveExpertise(TaskGraphError):
    pass


class DegenerateScenario(TaskGraphError):
    pass


# analysis
class SchemaMismatch(TaskGraphError):
    pass


class EmptyFile(TaskGraphError):
    pass


class NoMatchingActivities(TaskGraphError):
    pass


class ZeroVariance(TaskGraphError):
    pass


class LengthMismatch(TaskGraphError):
    pass


class RankDeficient(TaskGraphError):
    pass


class IoFailure(TaskGraphError):
    pass
