"""Exception hierarchy shared by all modules."""


class CKNError(Exception):
    """Base class for every error raised by the package."""


# parameters and constants
class ParameterError(CKNError, ValueError):
    pass


class QOutOfRange(ParameterError):
    pass


class LambdaBelowHardy(ParameterError):
    pass


class BadFactorization(ParameterError):
    pass


class CHatUnjustified(ParameterError):
    pass


class MuNonpositive(ParameterError):
    pass


# spherical harmonics and groups
class SphericalError(CKNError, ValueError):
    pass


class EllZeroRejected(SphericalError):
    pass


class FullGroupRejected(SphericalError):
    pass


class UnsupportedGroup(SphericalError):
    pass


class OriginEvaluation(SphericalError):
    pass


# discretization and quadrature
class SpectralError(CKNError):
    pass


class TruncationError(SpectralError):
    pass


class ResolutionError(SpectralError):
    pass


class SingularIntegralError(SpectralError, ValueError):
    pass


# energies
class EnergyError(CKNError, ValueError):
    pass


class ZeroFunction(EnergyError):
    pass


class NegativeValues(EnergyError):
    pass


# extension
class ExtensionError(CKNError):
    pass


class YTruncationError(ExtensionError):
    pass


class GridResolutionError(ExtensionError):
    pass


# perturbation and certificates
class PerturbError(CKNError, ValueError):
    pass


class PartitionMismatch(PerturbError):
    pass


class NonRadialSource(PerturbError):
    pass


class UnconvergedInput(PerturbError):
    pass


# minimization
class MinimizeError(CKNError):
    pass


class NotConverged(MinimizeError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateStart(MinimizeError, ValueError):
    pass


class ModeTruncationError(MinimizeError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class RadialCollapse(MinimizeError):
    pass


class SweepInconclusive(MinimizeError):
    pass
