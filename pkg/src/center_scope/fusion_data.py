"""Grothendieck data of a fusion 2-category and the induction Gram matrix.

A :class:`TwoCategoryData` holds one :class:`FusionRing` per object (the
endomorphism fusion categories) and one :class:`BimoduleBlock` per unordered
pair of objects. From it we build the Gram matrix of induced simples, the
padded dimension vectors, and the global dimension.

Index conventions (all arrays are integer numpy arrays):

* ``FusionRing.N[i, j, l]`` is the multiplicity of ``X_l`` in ``X_i X_j``.
* ``BimoduleBlock.left[x, m, m2]`` is the multiplicity of ``m2`` in ``x . m``
  for ``x`` a simple of the left object.
* ``BimoduleBlock.right[y, m, m2]`` is the multiplicity of ``m2`` in ``m . y``
  for ``y`` a simple of the right object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cyclotomic import CycloNumber, to_complex_approx
from .errors import InconsistentData, InvariantViolation

__all__ = [
    "FusionRing",
    "BimoduleBlock",
    "TwoCategoryData",
    "Violation",
    "ValidationReport",
    "DecompositionProblem",
    "validate",
    "fp_dimension_check",
    "global_dimension",
    "build_gram_matrix",
    "build_dimension_vectors",
    "build_problem",
]


@dataclass(frozen=True, eq=False)
class FusionRing:
    name: str
    N: np.ndarray
    dims: tuple[CycloNumber, ...]
    simple_names: tuple[str, ...] = ()
    unit_index: int = 0

    def __post_init__(self):
        N = np.asarray(self.N, dtype=np.int64)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.simple_names:
            object.__setattr__(self, "simple_names", tuple(f"{self.name}[{i}]" for i in range(self.rank)))

    @property
    def rank(self) -> int:
        return self.N.shape[0]

    @property
    def conductor(self) -> int:
        return self.dims[0].conductor

    def dual_map(self) -> list[int | None]:
        """dual[i] = the unique j with X_unit in X_i X_j, or None if that fails."""
        u = self.unit_index
        out: list[int | None] = []
        for i in range(self.rank):
            js = [j for j in range(self.rank) if self.N[i, j, u] != 0]
            out.append(js[0] if len(js) == 1 and self.N[i, js[0], u] == 1 else None)
        return out

    def fusion_matrix(self, i: int) -> np.ndarray:
        """Left multiplication by X_i: entry [j, l] = N[i, j, l]."""
        return self.N[i]

    def reordered(self, order) -> "FusionRing":
        order = list(order)
        N = self.N[np.ix_(order, order, order)]
        return FusionRing(
            self.name,
            N,
            tuple(self.dims[i] for i in order),
            tuple(self.simple_names[i] for i in order),
            order.index(self.unit_index),
        )


@dataclass(frozen=True, eq=False)
class BimoduleBlock:
    """Bimodule category between two objects: ``left_object`` acts on the left."""

    left_object: str
    right_object: str
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left", np.asarray(self.left, dtype=np.int64))
        object.__setattr__(self, "right", np.asarray(self.right, dtype=np.int64))

    @property
    def simple_count(self) -> int:
        return self.left.shape[1]


@dataclass(frozen=True, eq=False)
class TwoCategoryData:
    conductor: int
    objects: tuple[FusionRing, ...]
    blocks: tuple[BimoduleBlock, ...] = ()

    def ring(self, name: str) -> FusionRing:
        for r in self.objects:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def layout(self) -> tuple[int, ...]:
        return tuple(r.rank for r in self.objects)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.objects)

    def block(self, a: str, b: str) -> tuple[BimoduleBlock, bool]:
        """The block joining ``a`` and ``b``, and whether it is stored as (b, a)."""
        for blk in self.blocks:
            if (blk.left_object, blk.right_object) == (a, b):
                return blk, False
            if (blk.left_object, blk.right_object) == (b, a):
                return blk, True
        raise KeyError(f"no bimodule block between {a!r} and {b!r}")


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, where: str, message: str) -> None:
        self.violations.append(Violation(code, where, message))

    def __str__(self):
        if self.ok:
            return "pass"
        return "\n".join(str(v) for v in self.violations)


def _check_ring(ring: FusionRing, report: ValidationReport) -> None:
    N = ring.N
    k = ring.rank
    where = f"ring {ring.name}"
    if N.shape != (k, k, k):
        report.add("shape", where, f"structure constants have shape {N.shape}")
        return
    if (N < 0).any():
        report.add("negative", where, "negative structure constant")
    if len(ring.dims) != k:
        report.add("shape", where, f"{len(ring.dims)} dimensions for {k} simples")
        return
    u = ring.unit_index
    eye = np.eye(k, dtype=np.int64)
    if not (N[u] == eye).all():
        report.add("unit", where, "left unit does not act as the identity")
    if not (N[:, u, :] == eye).all():
        report.add("unit", where, "right unit does not act as the identity")

    # (X_i X_j) X_l = X_i (X_j X_l)
    lhs = np.einsum("ijm,mlp->ijlp", N, N)
    rhs = np.einsum("jlm,imp->ijlp", N, N)
    for i, j, l, p in zip(*np.nonzero(lhs != rhs)):
        report.add("associativity", where, f"(X{i} X{j}) X{l} vs X{i} (X{j} X{l}) differ at X{p}")
        break

    dual = ring.dual_map()
    for i, d in enumerate(dual):
        if d is None:
            report.add("frobenius", where, f"X{i} has no unique dual")
        elif dual[d] != i:
            report.add("frobenius", where, f"duality is not an involution at X{i}")

    for i, d in enumerate(ring.dims):
        if d.conductor != ring.conductor:
            report.add("conductor", where, f"dimension {i} has conductor {d.conductor}")
            return
    for i, d in enumerate(ring.dims):
        z = to_complex_approx(d)
        if not (z.real > 0 and abs(z.imag) <= 1e-9 * max(1.0, abs(z))):
            report.add("dimension", where, f"dim X{i} = {z} is not positive real")
    for i, j in itertools.product(range(k), repeat=2):
        prod = ring.dims[i] * ring.dims[j]
        total = sum((int(N[i, j, l]) * ring.dims[l] for l in range(k) if N[i, j, l]), 0 * prod)
        if prod != total:
            report.add("multiplicativity", where, f"dim X{i} * dim X{j} != sum of fusion outcomes")


def _check_block(blk: BimoduleBlock, A: FusionRing, B: FusionRing, report: ValidationReport) -> None:
    L, Rt = blk.left, blk.right
    s = blk.simple_count
    where = f"bimodule {A.name}|{B.name}"
    if L.shape != (A.rank, s, s) or Rt.shape != (B.rank, s, s):
        report.add("shape", where, f"actions have shapes {L.shape} and {Rt.shape}")
        return
    if (L < 0).any() or (Rt < 0).any():
        report.add("negative", where, "negative multiplicity")
    eye = np.eye(s, dtype=np.int64)
    if not (L[A.unit_index] == eye).all():
        report.add("unit", where, "left unit does not act as the identity")
    if not (Rt[B.unit_index] == eye).all():
        report.add("unit", where, "right unit does not act as the identity")
    # x.(x2.m) = (x x2).m   <=>   L[x2] @ L[x] == sum_y N[x, x2, y] L[y]
    for x, x2 in itertools.product(range(A.rank), repeat=2):
        if not (L[x2] @ L[x] == np.einsum("y,yab->ab", A.N[x, x2], L)).all():
            report.add("module", where, f"left action not associative at ({x}, {x2})")
            break
    # (m.y).y2 = m.(y y2)   <=>   Rt[y] @ Rt[y2] == sum_z N[y, y2, z] Rt[z]
    for y, y2 in itertools.product(range(B.rank), repeat=2):
        if not (Rt[y] @ Rt[y2] == np.einsum("z,zab->ab", B.N[y, y2], Rt)).all():
            report.add("module", where, f"right action not associative at ({y}, {y2})")
            break
    for x, y in itertools.product(range(A.rank), range(B.rank)):
        if not (L[x] @ Rt[y] == Rt[y] @ L[x]).all():
            report.add("bimodule", where, f"left X{x} and right Y{y} do not commute")
            break


def validate(data: TwoCategoryData) -> ValidationReport:
    """Check every structural invariant exactly; failures become report entries."""
    report = ValidationReport()
    names = [r.name for r in data.objects]
    if len(set(names)) != len(names):
        report.add("objects", "objects", "duplicate object names")
    for ring in data.objects:
        _check_ring(ring, report)
        if ring.dims and ring.conductor != data.conductor:
            report.add("conductor", f"ring {ring.name}", f"conductor {ring.conductor} != {data.conductor}")
    for a, b in itertools.combinations(names, 2):
        try:
            blk, _ = data.block(a, b)
        except KeyError:
            report.add("bimodule", f"{a}|{b}", "missing bimodule block")
            continue
        _check_block(blk, data.ring(blk.left_object), data.ring(blk.right_object), report)
    for blk in data.blocks:
        if blk.left_object not in names or blk.right_object not in names:
            report.add("bimodule", f"{blk.left_object}|{blk.right_object}", "unknown object")
    return report


def fp_dimension_check(ring: FusionRing, rtol: float = 1e-8) -> bool:
    """Numeric check that ``dims`` is the Frobenius-Perron dimension vector."""
    d = np.array([to_complex_approx(x) for x in ring.dims])
    if np.abs(d.imag).max() > 1e-9 * np.abs(d).max():
        return False
    d = d.real
    if (d <= 0).any() or abs(d[ring.unit_index] - 1) > rtol:
        return False
    for i in range(ring.rank):
        Ni = ring.fusion_matrix(i).astype(float)
        if np.abs(Ni @ d - d[i] * d).max() > rtol * max(1.0, np.abs(d[i] * d).max()):
            return False
        pf = np.abs(np.linalg.eigvals(Ni)).max()
        if abs(pf - d[i]) > rtol * max(1.0, d[i]) * 10:
            return False
    return True


def global_dimension(ring: FusionRing) -> CycloNumber:
    """Sum of squared dimensions of the simples."""
    return sum((d * d for d in ring.dims[1:]), ring.dims[0] * ring.dims[0])


def _ring_block(ring: FusionRing) -> np.ndarray:
    # G[X, Y] = sum_{W, Z} mult(W in Y Z) * mult(W in Z X)
    N = ring.N
    return np.einsum("yzw,zxw->xy", N, N)


def _bimodule_block(blk: BimoduleBlock) -> np.ndarray:
    # G[X, Y] = sum_{W, Z} mult(W in Z . Y) * mult(W in X . Z), X left, Y right
    return np.einsum("xzw,yzw->xy", blk.left, blk.right)


def build_gram_matrix(data: TwoCategoryData) -> np.ndarray:
    """Gram matrix of induced simples, rows/columns in concatenated object order."""
    offsets = np.concatenate([[0], np.cumsum(data.layout)])
    n = int(offsets[-1])
    M = np.zeros((n, n), dtype=np.int64)
    for a, A in enumerate(data.objects):
        sa = slice(offsets[a], offsets[a + 1])
        G = _ring_block(A)
        if not (G == G.T).all():
            raise InvariantViolation(f"diagonal Gram block of {A.name} is not symmetric")
        M[sa, sa] = G
        for b in range(a + 1, len(data.objects)):
            B = data.objects[b]
            sb = slice(offsets[b], offsets[b + 1])
            blk, flipped = data.block(A.name, B.name)
            G = _bimodule_block(blk)
            if flipped:
                G = G.T
            M[sa, sb] = G
            M[sb, sa] = G.T
    if (M < 0).any():
        raise InvariantViolation("negative Gram matrix entry")
    return M


def build_dimension_vectors(data: TwoCategoryData) -> list[list[CycloNumber]]:
    n = sum(data.layout)
    zero = CycloNumber.from_rational(data.conductor, 0)
    vs = []
    offset = 0
    for ring in data.objects:
        v = [zero] * n
        v[offset : offset + ring.rank] = ring.dims
        vs.append(v)
        offset += ring.rank
    return vs


@dataclass(frozen=True, eq=False)
class DecompositionProblem:
    """The triple (M, {v_i}, D) handed to the solver.

    ``layout`` gives per-object row counts so a solution can be split back into
    induction matrices; ``names`` labels those blocks.
    """

    M: np.ndarray
    vs: tuple[tuple[CycloNumber, ...], ...]
    D: CycloNumber
    conductor: int
    layout: tuple[int, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        M = np.asarray(self.M, dtype=np.int64)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "vs", tuple(tuple(v) for v in self.vs))
        n = M.shape[0]
        if M.shape != (n, n) or not (M == M.T).all():
            raise ValueError("M must be a symmetric square matrix")
        if (M < 0).any():
            raise ValueError("M must have non-negative entries")
        for v in self.vs:
            if len(v) != n:
                raise ValueError(f"dimension vector of length {len(v)} for {n}x{n} M")
            if any(x.conductor != self.conductor for x in v):
                raise ValueError("dimension vector with a foreign conductor")
        if self.D.conductor != self.conductor:
            raise ValueError("D has a foreign conductor")
        if not self.layout:
            object.__setattr__(self, "layout", (n,))
        if sum(self.layout) != n:
            raise ValueError(f"layout {self.layout} does not cover {n} rows")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"block{i}" for i in range(len(self.layout))))

    @property
    def size(self) -> int:
        return self.M.shape[0]


def build_problem(data: TwoCategoryData, fp_rtol: float = 1e-6) -> DecompositionProblem:
    """Bundle M, the padded dimension vectors and the global dimension.

    Also checks that every object gives the same global dimension and that the
    Frobenius-Perron eigenvalue of M equals (number of objects) * D.
    """
    dims = [global_dimension(r) for r in data.objects]
    for r, d in zip(data.objects[1:], dims[1:]):
        if d != dims[0]:
            raise InconsistentData(
                f"global dimension of {r.name} ({d}) differs from {data.objects[0].name} ({dims[0]})"
            )
    D = dims[0]
    M = build_gram_matrix(data)
    fp = float(np.linalg.eigvalsh(M.astype(float))[-1])
    expected = len(data.objects) * to_complex_approx(D).real
    if abs(fp - expected) > fp_rtol * abs(expected):
        raise InconsistentData(
            f"Frobenius-Perron eigenvalue {fp} of M differs from k*D = {expected}"
        )
    return DecompositionProblem(
        M=M,
        vs=build_dimension_vectors(data),
        D=D,
        conductor=data.conductor,
        layout=data.layout,
        names=data.names,
    )
