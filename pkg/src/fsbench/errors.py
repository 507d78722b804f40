"""Exception hierarchy.

Every mathematical check that fails raises a subclass of :class:`CheckFailed`
carrying the offending indices and a numeric witness; malformed input raises a
subclass of :class:`InputError`. The CLI maps the two families to exit codes
1 and 2.
"""


class WorkbenchError(Exception):
    """Base class for all errors raised by fsbench."""


class InputError(WorkbenchError):
    """Malformed or inconsistent input (usage error)."""


class CheckFailed(WorkbenchError):
    """A mathematical identity did not hold within tolerance."""


# -- shapes and structural input ------------------------------------------------

class ShapeMismatch(InputError):
    pass


class SystemMismatch(InputError):
    """Objects built over different systems were combined."""


class MiddleMismatch(InputError):
    """Bimodules whose middle algebras or systems disagree were tensored."""


class NotCommutative(InputError):
    pass


class UnknownGalleryName(InputError):
    pass


class ParseError(InputError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class UnresolvedReference(InputError):
    def __init__(self, name):
        super().__init__(f"unresolved reference {name!r}")
        self.name = name


class ShapeError(InputError):
    def __init__(self, path, message=""):
        super().__init__(f"{path}: {message}" if message else str(path))
        self.path = path


# -- groups ---------------------------------------------------------------------

class GroupError(CheckFailed):
    pass


class NotAPermutationRow(GroupError):
    def __init__(self, row, kind="row"):
        super().__init__(f"{kind} {row} is not a permutation")
        self.row = row
        self.kind = kind


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    def __init__(self, g):
        super().__init__(f"element {g} has no two-sided inverse")
        self.g = g


class NotAssociative(GroupError):
    def __init__(self, g, h, k):
        super().__init__(f"(g h) k != g (h k) for triple {(g, h, k)}")
        self.triple = (g, h, k)


class NotIsomorphism(CheckFailed):
    pass


# -- systems --------------------------------------------------------------------

class SystemAxiomError(CheckFailed):
    pass


class NotUnitaryCocycle(SystemAxiomError):
    def __init__(self, g, h, residual):
        super().__init__(f"sigma({g},{h}) is not unitary (residual {residual:.3e})")
        self.pair = (g, h)
        self.residual = residual


class AutomorphismTwistMismatch(SystemAxiomError):
    def __init__(self, g, h, residual):
        super().__init__(
            f"alpha_{g} alpha_{h} != Ad(sigma({g},{h})) alpha_{{{g}{h}}} (residual {residual:.3e})")
        self.pair = (g, h)
        self.residual = residual


class CocycleIdentityFails(SystemAxiomError):
    def __init__(self, g, h, k, residual):
        super().__init__(f"cocycle identity fails at {(g, h, k)} (residual {residual:.3e})")
        self.triple = (g, h, k)
        self.residual = residual


class NotNormalized(SystemAxiomError):
    def __init__(self, g, residual=None):
        msg = f"normalization fails at element {g}"
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        super().__init__(msg)
        self.g = g
        self.residual = residual


class NotUnitModulus(SystemAxiomError):
    def __init__(self, g, h, value):
        super().__init__(f"|omega({g},{h})| = {abs(value):.6g} != 1")
        self.pair = (g, h)
        self.value = value


class NotCentral(SystemAxiomError):
    def __init__(self, g, h, residual):
        super().__init__(f"eta({g},{h}) is not central (residual {residual:.3e})")
        self.pair = (g, h)
        self.residual = residual


class NotUnitary(CheckFailed):
    def __init__(self, where, residual):
        super().__init__(f"{where} is not unitary (residual {residual:.3e})")
        self.where = where
        self.residual = residual


class NotConjugate(CheckFailed):
    def __init__(self, which, g, residual, h=None):
        where = f"g={g}" if h is None else f"(g,h)=({g},{h})"
        super().__init__(f"group conjugacy condition ({which}) fails at {where} "
                         f"(residual {residual:.3e})")
        self.which = which
        self.g = g
        self.h = h
        self.residual = residual


# -- modules and representations ------------------------------------------------

class AxiomFails(CheckFailed):
    def __init__(self, which, g=None, h=None, witness=None):
        where = ", ".join(f"{n}={v}" for n, v in (("g", g), ("h", h)) if v is not None)
        msg = f"axiom ({which}) fails"
        if where:
            msg += f" at {where}"
        if witness is not None:
            msg += f" (witness {witness:.3e})"
        super().__init__(msg)
        self.which = which
        self.g = g
        self.h = h
        self.witness = witness


class NotARepresentation(CheckFailed):
    def __init__(self, g, h, residual):
        super().__init__(f"w({g}) w({h}) != w({g}{h}) or not unitary (residual {residual:.3e})")
        self.pair = (g, h)
        self.residual = residual


# -- coefficient maps -----------------------------------------------------------

class PDDisagreement(CheckFailed):
    """The Choi decision procedure and the direct matrix condition disagree."""


class NotPD(CheckFailed):
    def __init__(self, index, min_eigenvalue):
        super().__init__(f"net member {index} is not positive definite "
                         f"(min eigenvalue {min_eigenvalue:.3e})")
        self.index = index
        self.min_eigenvalue = min_eigenvalue


class ResidualTooLarge(CheckFailed):
    def __init__(self, g, a, value):
        super().__init__(f"||T_{g}({a}) - {a}|| = {value:.6g} exceeds epsilon")
        self.g = g
        self.a = a
        self.value = value


class TransportError(CheckFailed):
    pass


class IntertwinerFails(CheckFailed):
    def __init__(self, g, residual):
        super().__init__(f"phi^-1 beta_phi(g) phi != Ad(w(g)) alpha_g at g={g} "
                         f"(residual {residual:.3e})")
        self.g = g
        self.residual = residual


class OmegaNotCentral(CheckFailed):
    def __init__(self, g, h, residual):
        super().__init__(f"omega({g},{h}) is not central (residual {residual:.3e})")
        self.pair = (g, h)
        self.residual = residual


# -- Morita ---------------------------------------------------------------------

class BimoduleError(CheckFailed):
    pass


class InnerNotPositive(BimoduleError):
    def __init__(self, side, value):
        super().__init__(f"{side} inner product Gram matrix not positive (min eig {value:.3e})")
        self.side = side
        self.value = value


class NotFullLeft(BimoduleError):
    def __init__(self, rank, dim):
        super().__init__(f"left inner products span {rank} of {dim} dimensions")
        self.rank = rank
        self.dim = dim


class NotFullRight(BimoduleError):
    def __init__(self, rank, dim):
        super().__init__(f"right inner products span {rank} of {dim} dimensions")
        self.rank = rank
        self.dim = dim


class CompatibilityFails(BimoduleError):
    def __init__(self, i, j, k, residual):
        super().__init__(f"<z_{i}, z_{j}>_A . z_{k} != z_{i} . <z_{j}, z_{k}>_B "
                         f"(residual {residual:.3e})")
        self.triple = (i, j, k)
        self.residual = residual


class NormMismatch(BimoduleError):
    def __init__(self, witness, residual):
        super().__init__(f"left and right norms differ on vector {witness} "
                         f"(residual {residual:.3e})")
        self.witness = witness
        self.residual = residual


class ModuleAxiomFails(BimoduleError):
    def __init__(self, which, residual):
        super().__init__(f"module axiom '{which}' fails (residual {residual:.3e})")
        self.which = which
        self.residual = residual


class BulletFails(CheckFailed):
    def __init__(self, which, g, h=None, witness=None):
        where = f"g={g}" if h is None else f"g={g}, h={h}"
        msg = f"compatibility bullet {which} fails at {where}"
        if witness is not None:
            msg += f" (residual {witness:.3e})"
        super().__init__(msg)
        self.which = which
        self.g = g
        self.h = h
        self.witness = witness


class FrameSolveFailed(CheckFailed):
    def __init__(self, residual):
        super().__init__(f"partition of unity residual {residual:.3e} above tolerance")
        self.residual = residual


class ReconstructionResidual(CheckFailed):
    def __init__(self, value):
        super().__init__(f"span reconstruction residual {value:.3e} above tolerance")
        self.value = value


class PhiInconsistent(CheckFailed):
    def __init__(self, residual):
        super().__init__(f"no consistent phi with phi(A<z,z'>) = <z',z>_B "
                         f"(residual {residual:.3e})")
        self.residual = residual
