"""Exception hierarchy shared by every module."""


class DualityLabError(ValueError):
    """Base class for all errors raised by :mod:`duality_lab`."""


class DegenerateSpectrumError(DualityLabError):
    """Two eigenvalues (or twist entries) collide within the separation tolerance."""


class NumericError(DualityLabError):
    """A floating point computation failed to meet its residual bound."""


class RankError(DualityLabError):
    """A matrix expected to have rank one does not."""


class GenericityError(DualityLabError):
    """Coincident positions, poles or a vanishing denominator in a model formula."""


class PoleError(GenericityError):
    """Evaluation requested at a pole of a multi-pole Lax matrix."""


class GaugeError(DualityLabError):
    """No consistent diagonal gauge relates two matrices within tolerance."""
