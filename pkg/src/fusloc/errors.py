"""Exception types shared across the toolkit."""


class FuslocError(Exception):
    """Base class for all toolkit errors."""


class ClosureTooLarge(FuslocError):
    """Group closure exceeded the configured element cap."""


class NotSubgroup(FuslocError):
    """An operation expected a subgroup relation that does not hold."""


class NotPGroup(FuslocError):
    """The given group does not have prime-power order."""


class NotRealizable(FuslocError):
    """A construction needs a realizing ambient group that is absent."""


class FreenessViolated(FuslocError):
    """A right action that must be free has a nontrivial stabilizer."""


class ConstructionFailed(FuslocError):
    """A guaranteed construction step failed; falsifies the guarantee."""


class NotCentralizing(FuslocError):
    """The element does not centralize the embedded copy of the subgroup."""


class NotTransporter(FuslocError):
    """The element does not conjugate the source into the target subgroup."""


class NotComposable(FuslocError):
    """Morphism endpoints do not match."""


class LiftImpossible(FuslocError):
    """No automorphism of the biset realizes the requested fusion map."""


class FunctorialityFailure(FuslocError):
    """A functor value or map violates an internal consistency law."""


class NotClosed(FuslocError):
    """The class set is not closed under subconjugacy."""


class NotMinimal(FuslocError):
    """The class is not minimal outside the given closed set."""


class TraceNotIso(FuslocError):
    """The trace map between cofixed and fixed points is not bijective."""


class ComplementIdentityFailure(FuslocError):
    """A compatible-complement identity fails numerically."""


class NoSolution(FuslocError):
    """A linear system has no solution modulo the given moduli.

    When raised while solving a coboundary equation this signals a nonzero
    cohomology class.
    """


class CocycleNotClosed(FuslocError):
    """An extracted cochain failed the cocycle condition."""


class CentricDecompositionFailure(FuslocError):
    """A centralizer did not split as (center) x (p'-part) as required."""


class LiftingObstruction(FuslocError):
    """A section-lifting step failed with a certified obstruction."""
