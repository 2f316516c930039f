"""Exception hierarchy shared by the package."""


class VEMError(Exception):
    """Base class for all package errors."""


class MeshError(VEMError):
    pass


class MalformedFileError(MeshError):
    """A mesh file could not be parsed."""


class TopologyError(MeshError):
    """A cell is not a closed, consistently oriented surface."""


class PlanarityError(MeshError):
    pass


class GeometryError(MeshError):
    """An entity has zero or negative measure."""


class StarShapeError(MeshError):
    """A centroid-based simplex decomposition produced an inverted simplex."""


class DegenerateSystemError(VEMError):
    """Every degree of freedom is constrained by the boundary conditions."""


class SolverFailure(VEMError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
