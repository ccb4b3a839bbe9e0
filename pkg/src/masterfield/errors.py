"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`MasterFieldError`, grouped by the subsystem that raises it.
"""


class MasterFieldError(Exception):
    """Base class for all package errors."""


# combinatorial maps and loops
class MapError(MasterFieldError):
    pass


class NotInvolution(MapError):
    pass


class NotPermutation(MapError):
    pass


class NegativeGenus(MapError):
    pass


class DisconnectedMap(MapError):
    pass


class BoundaryAdjacent(MapError):
    pass


class HasBoundary(MapError):
    pass


class NotALoop(MapError):
    pass


class EdgeReused(MapError):
    pass


class VertexOverused(MapError):
    pass


class NotACrossing(MapError):
    pass


class NotOnMap(MapError):
    pass


# discrete forms and homology
class HomologyError(MasterFieldError):
    pass


class DegreeMismatch(HomologyError):
    pass


class BasisNotIndependent(HomologyError):
    pass


class NonZeroHomology(HomologyError):
    pass


class NotTame(HomologyError):
    pass


# free moments and planar evaluation
class EvaluationError(MasterFieldError):
    pass


class NegativeOrder(EvaluationError):
    pass


class NegativeTime(EvaluationError):
    pass


class UnknownGenerator(EvaluationError):
    pass


class WrongBoundaryCount(EvaluationError):
    pass


class WrongGenus(EvaluationError):
    pass


class AreaMismatch(EvaluationError):
    pass


class BoundaryOfSimplex(EvaluationError):
    pass


# universal cover
class CoverError(MasterFieldError):
    pass


class NoPolygonStructure(CoverError):
    pass


class NotRegularWrtPolygon(CoverError):
    pass


# matrix groups
class GroupError(MasterFieldError):
    pass


class UnsupportedFamily(GroupError):
    pass


class NotInGroup(GroupError):
    pass


# moment ODE closure
class ClosureExplosion(MasterFieldError):
    pass


# file formats and command line
class SchemaError(MasterFieldError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class DanglingId(SchemaError):
    pass


class UsageError(MasterFieldError):
    exit_code = 2


class GateFailure(MasterFieldError):
    exit_code = 1
