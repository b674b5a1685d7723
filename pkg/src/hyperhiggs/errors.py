"""Exception hierarchy shared by every layer of the toolkit."""


class HiggsError(Exception):
    """Base class for all errors raised by hyperhiggs."""


class DomainError(HiggsError, ValueError):
    """An argument lies outside the supported domain."""


class PoleOfGamma(DomainError):
    def __init__(self, z, nearest):
        self.z = z
        self.nearest = nearest
        super().__init__(f"Gamma has a pole at {nearest} (argument {z!r})")


class ParameterDegenerate(DomainError):
    def __init__(self, c):
        self.c = c
        super().__init__(f"hypergeometric parameter c={c!r} is a nonpositive integer")


class NoConvergence(HiggsError, ArithmeticError):
    """An iterative procedure did not reach its tolerance."""


class OnPole(DomainError):
    def __init__(self, which_factor, argument):
        self.which_factor = which_factor
        self.argument = argument
        super().__init__(f"Gamma factor {which_factor} evaluated at its pole {argument!r}")


class KZero(DomainError):
    """Scattering determinant requested at k = 0."""


class DegenerateMu(DomainError):
    """mu = -1/2: the two Frobenius exponents coincide (logarithmic case)."""


class DegenerateK(DomainError):
    """ik is an integer: the two branches at infinity are not independent."""


class InvalidMode(DomainError):
    """A Fourier/angular index is not allowed for the model."""


class StepFailure(HiggsError, ArithmeticError):
    """The ODE step controller failed."""


class MatchingIllConditioned(HiggsError, ArithmeticError):
    """Plane-wave matching system is numerically singular."""


class ContourTooClose(HiggsError, ArithmeticError):
    """A zero or pole lies (almost) on the integration contour."""


class NonIntegerWinding(HiggsError, ArithmeticError):
    """The contour integral is not close to an integer."""


class TruncationSuspect(HiggsError, ArithmeticError):
    """Eigenvalues of the truncated problem are sensitive to the box size."""


class IncompleteEnumeration(UserWarning):
    """Truncation indices do not provably exhaust the requested window."""
