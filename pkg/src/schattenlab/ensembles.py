"""Scalar fields, gas-ensemble parameters and the Schatten-ball to ensemble mapping."""

import math
from dataclasses import dataclass

__all__ = [
    "Quaternion",
    "EnsembleParams",
    "SchattenSpec",
    "GasMapping",
    "ensemble_of",
    "BETA",
    "FIELDS",
    "SUBSPACES",
]

FIELDS = ("R", "C", "H")
SUBSPACES = ("Full", "SelfAdjoint", "AntiSymHermitian", "ComplexSymmetric")
BETA = {"R": 1, "C": 2, "H": 4}


@dataclass(frozen=True)
class Quaternion:
    """A quaternion w + x*i + y*j + z*k with Hamilton multiplication."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other):
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        a, b, c, d = self.w, self.x, self.y, self.z
        e, f, g, h = other.w, other.x, other.y, other.z
        return Quaternion(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self):
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __abs__(self):
        return math.sqrt(self.norm_sq())

    @property
    def scalar(self):
        return self.w

    def vector_norm(self):
        """Magnitude of the non-scalar part."""
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters (a, b, c) of the gas density on R^n.

    The density is prod_{i<j} |x_i^a - x_j^a|^b * prod_i |x_i|^c; the total
    degree d = a*b*n(n-1)/2 + (c+1)*n is always recomputed, never stored.
    """

    a: int
    b: int
    c: int
    n: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1 or self.c < 0 or self.n < 1:
            raise ValueError(f"illegal ensemble parameters {(self.a, self.b, self.c, self.n)}")

    @property
    def d(self):
        """Total degree a*b*n(n-1)/2 + (c+1)*n (also the matrix-subspace dimension)."""
        return self.a * self.b * self.n * (self.n - 1) // 2 + (self.c + 1) * self.n

    @property
    def degree(self):
        """Positive-homogeneity degree of the unweighted density, d - n."""
        return self.d - self.n


@dataclass(frozen=True)
class SchattenSpec:
    """A Schatten p-norm unit ball: field, matrix subspace, size n and exponent p.

    p = math.inf is the operator norm and is kept as the exact IEEE infinity,
    never a large float stand-in.
    """

    field: str
    subspace: str
    n: int
    p: float

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        if self.subspace not in SUBSPACES:
            raise ValueError(f"unknown subspace {self.subspace!r}")
        if self.subspace in ("AntiSymHermitian", "ComplexSymmetric") and self.field != "C":
            raise ValueError(f"{self.subspace} requires field C, got {self.field}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if not (self.p >= 1):
            raise ValueError("p must satisfy p >= 1")

    @property
    def beta(self):
        return BETA[self.field]

    @property
    def dim(self):
        """Real dimension of the matrix subspace."""
        n, beta = self.n, self.beta
        if self.subspace == "Full":
            return beta * n * n
        if self.subspace == "SelfAdjoint":
            return n + beta * n * (n - 1) // 2
        if self.subspace == "AntiSymHermitian":
            return n * (n - 1) // 2
        return n * (n + 1)  # ComplexSymmetric


@dataclass(frozen=True)
class GasMapping:
    """Result of mapping a Schatten ball onto its singular-value gas.

    multiplicity counts how often each gas coordinate appears among the matrix
    singular values; signed marks eigenvalue (rather than singular value)
    coordinates; forced_zero records the extra zero singular value of
    odd-size anti-symmetric Hermitian matrices.
    """

    params: EnsembleParams
    multiplicity: int
    signed: bool
    forced_zero: bool
    note: str


def ensemble_of(spec):
    """Map a SchattenSpec to the (a, b, c) gas on its natural coordinate count.

    Full and ComplexSymmetric matrices keep n gas coordinates, SelfAdjoint uses
    signed eigenvalue coordinates, and AntiSymHermitian reduces to floor(n/2)
    coordinates each counted twice.
    """
    n, beta = spec.n, spec.beta
    if spec.subspace == "Full":
        params = EnsembleParams(a=2, b=beta, c=beta - 1, n=n)
        return GasMapping(params, 1, signed=False, forced_zero=False,
                          note="singular values, one gas coordinate each")
    if spec.subspace == "SelfAdjoint":
        params = EnsembleParams(a=1, b=beta, c=0, n=n)
        return GasMapping(params, 1, signed=True, forced_zero=False,
                          note="signed eigenvalue coordinates; take |x_i| for singular values")
    if spec.subspace == "ComplexSymmetric":
        params = EnsembleParams(a=2, b=1, c=1, n=n)
        return GasMapping(params, 1, signed=False, forced_zero=False,
                          note="singular values, one gas coordinate each")
    # AntiSymHermitian: i * (real antisymmetric); singular values pair up.
    s, r = divmod(n, 2)
    if s < 1:
        raise ValueError("AntiSymHermitian needs n >= 2")
    params = EnsembleParams(a=2, b=2, c=2 * r, n=s)
    note = "gas on floor(n/2) coordinates, each a doubled singular value"
    if r:
        note += "; one additional zero singular value"
    return GasMapping(params, 2, signed=False, forced_zero=bool(r), note=note)
