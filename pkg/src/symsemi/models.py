"""Finite cochain models of closed manifolds.

Three flavours feed the cone machinery:

* ``CDGAModel``: a free graded-commutative algebra on named generators with
  a differential extended by the graded Leibniz rule.  Monomials are sorted
  generator tuples; reordering picks up Koszul signs, odd generators square
  to zero, and even generators are capped at a finite power (quotient
  semantics; the cap never binds for the builtins, which have no even
  generators).
* Chevalley-Eilenberg complexes ``ce_complex(n, structure)`` of Lie
  algebras, a CDGAModel on degree-1 generators with d e^k determined by the
  structure constants; d^2 = 0 is exactly the Jacobi identity.
* ``FormalModel``: zero differential with explicit degree +2 multiplication
  matrices (cohomology given directly, as for simply connected spaces).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Mapping, Sequence

from .qlinalg import SparseMat, kernel_basis
from .complexes import GradedComplex, OmegaMap


class JacobiViolation(ValueError):
    """The differential fails d(d(x)) = 0; for Chevalley-Eilenberg input
    this is a failure of the Jacobi identity."""


class ShapeMismatch(ValueError):
    """Graded dimensions and supplied matrices disagree."""


class NotClosed(ValueError):
    """A form required to be closed has nonzero differential."""


class UnknownName(KeyError):
    """Generator or builtin-model name not recognised."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


class Element:
    """Formal rational combination of monomials in a fixed CDGAModel."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: "CDGAModel",
                 coeffs: Mapping[tuple[int, ...], object]):
        self.model = model
        clean: dict[tuple[int, ...], Fraction] = {}
        for mono, raw in coeffs.items():
            val = raw if isinstance(raw, Fraction) else Fraction(raw)
            if val:
                clean[mono] = val
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Common degree of all monomials; raises on mixed-degree sums."""
        degs = {self.model.mono_degree(m) for m in self.coeffs}
        if len(degs) > 1:
            raise ValueError(f"element of mixed degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def __add__(self, other: "Element") -> "Element":
        if other.model is not self.model:
            raise ValueError("elements of different models")
        out = dict(self.coeffs)
        for mono, v in other.coeffs.items():
            s = out.get(mono, 0) + v
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Element(self.model, out)

    def __neg__(self) -> "Element":
        return Element(self.model, {m: -v for m, v in self.coeffs.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, factor) -> "Element":
        f = Fraction(factor)
        return Element(self.model, {m: f * v for m, v in self.coeffs.items()})

    def __mul__(self, other: "Element") -> "Element":
        """Graded-commutative product with Koszul signs."""
        if other.model is not self.model:
            raise ValueError("elements of different models")
        model = self.model
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, a in self.coeffs.items():
            for m2, b in other.coeffs.items():
                mono, sign = model.sort_sign(m1 + m2)
                if not sign:
                    continue
                s = out.get(mono, 0) + sign * a * b
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return Element(model, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Element) and other.model is self.model
                and other.coeffs == self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.model.generators
        parts = []
        for mono in sorted(self.coeffs):
            term = "^".join(names[i].name for i in mono) if mono else "1"
            parts.append(f"({self.coeffs[mono]})*{term}")
        return " + ".join(parts)


class CDGAModel:
    """Free graded-commutative algebra with differential, truncated to
    degrees 0..manifold_dim.

    ``differential`` maps generator names to term lists
    ``[(coeff, [factor names...]), ...]``; d extends by the graded Leibniz
    rule and d^2 = 0 is checked on every generator at construction
    (JacobiViolation on failure).
    """

    def __init__(self, generators: Sequence[tuple[str, int] | Generator],
                 differential: Mapping[str, Sequence] | None,
                 manifold_dim: int, power_cap: int | None = None):
        gens = []
        for g in generators:
            gens.append(g if isinstance(g, Generator) else Generator(*g))
        self.generators: tuple[Generator, ...] = tuple(gens)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if any(g.degree < 1 for g in self.generators):
            raise ValueError("generator degrees must be >= 1")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        if manifold_dim < 0:
            raise ValueError("manifold_dim must be >= 0")
        self.manifold_dim = manifold_dim
        self.power_cap = manifold_dim if power_cap is None else power_cap
        self._basis_cache: dict[int, list[tuple[int, ...]]] = {}
        self._complex: GradedComplex | None = None

        self._dgen: list[Element] = [self.zero()] * len(self.generators)
        if differential:
            for name, terms in differential.items():
                if name not in self.index:
                    raise UnknownName(name)
                elt = terms if isinstance(terms, Element) else self.form(terms)
                gi = self.index[name]
                want = self.generators[gi].degree + 1
                if not elt.is_zero() and elt.degree() != want:
                    raise ShapeMismatch(
                        f"d {name} has degree {elt.degree()}, expected {want}")
                self._dgen[gi] = elt
        for g, dg in zip(self.generators, self._dgen):
            rem = self.d(dg)
            if not rem.is_zero():
                raise JacobiViolation(f"d(d {g.name}) = {rem!r} != 0")

    # -- element builders ------------------------------------------------

    def zero(self) -> Element:
        return Element(self, {})

    def unit(self) -> Element:
        return Element(self, {(): Fraction(1)})

    def gen(self, name: str) -> Element:
        if name not in self.index:
            raise UnknownName(name)
        return Element(self, {(self.index[name],): Fraction(1)})

    def form(self, terms: Sequence) -> Element:
        """Build an element from ``[(coeff, [generator names...]), ...]``."""
        out = self.zero()
        for coeff, factors in terms:
            seq = []
            for name in factors:
                if name not in self.index:
                    raise UnknownName(name)
                seq.append(self.index[name])
            mono, sign = self.sort_sign(tuple(seq))
            if sign:
                out = out + Element(self, {mono: sign * Fraction(coeff)})
        return out

    # -- monomial arithmetic ---------------------------------------------

    def mono_degree(self, mono: tuple[int, ...]) -> int:
        return sum(self.generators[i].degree for i in mono)

    def sort_sign(self, seq: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
        """Canonical sorted monomial and Koszul sign; sign 0 if the monomial
        dies (odd generator repeated, or an even power above the cap)."""
        arr = list(seq)
        sign = 1
        for i in range(1, len(arr)):
            j = i
            while j > 0 and arr[j - 1] > arr[j]:
                if (self.generators[arr[j - 1]].degree % 2
                        and self.generators[arr[j]].degree % 2):
                    sign = -sign
                arr[j - 1], arr[j] = arr[j], arr[j - 1]
                j -= 1
        count = 1
        for k in range(1, len(arr) + 1):
            if k < len(arr) and arr[k] == arr[k - 1]:
                count += 1
                continue
            if count > 1:
                if self.generators[arr[k - 1]].degree % 2:
                    return (), 0
                if count > self.power_cap:
                    return (), 0
            count = 1
        return tuple(arr), sign

    def d_mono(self, mono: tuple[int, ...]) -> Element:
        """Leibniz rule: d picks up (-1)^(degree of the passed prefix)."""
        out = self.zero()
        prefix_deg = 0
        for i, gi in enumerate(mono):
            dg = self._dgen[gi]
            if not dg.is_zero():
                sign0 = -1 if prefix_deg % 2 else 1
                terms: dict[tuple[int, ...], Fraction] = {}
                for dmono, c in dg.coeffs.items():
                    combined, s = self.sort_sign(
                        mono[:i] + dmono + mono[i + 1:])
                    if s:
                        terms[combined] = terms.get(combined, 0) + sign0 * s * c
                out = out + Element(self, terms)
            prefix_deg += self.generators[gi].degree
        return out

    def d(self, elt: Element) -> Element:
        out = self.zero()
        for mono, c in elt.coeffs.items():
            out = out + self.d_mono(mono).scale(c)
        return out

    # -- graded bases and matrices ---------------------------------------

    def basis(self, k: int) -> list[tuple[int, ...]]:
        """Sorted monomials of degree k, lexicographic in generator indices."""
        if k < 0:
            return []
        if k not in self._basis_cache:
            out: list[tuple[int, ...]] = []

            def extend(idx: int, remaining: int, current: list[int]):
                if remaining == 0:
                    out.append(tuple(current))
                    return
                if idx == len(self.generators):
                    return
                g = self.generators[idx]
                limit = 1 if g.degree % 2 else self.power_cap
                extend(idx + 1, remaining, current)
                reps = 0
                while reps < limit and (reps + 1) * g.degree <= remaining:
                    reps += 1
                    extend(idx + 1, remaining - reps * g.degree,
                           current + [idx] * reps)

            extend(0, k, [])
            self._basis_cache[k] = sorted(out)
        return self._basis_cache[k]

    def element_vector(self, elt: Element, k: int) -> SparseMat:
        """Coordinates of a degree-k element in basis(k), as a column."""
        basis = self.basis(k)
        pos = {m: i for i, m in enumerate(basis)}
        entries = {}
        for mono, c in elt.coeffs.items():
            if mono not in pos:
                raise ShapeMismatch(f"monomial {mono} not of degree {k}")
            entries[(pos[mono], 0)] = c
        return SparseMat(len(basis), 1, entries)

    def d_matrix(self, k: int) -> SparseMat:
        src = self.basis(k)
        tgt = {m: i for i, m in enumerate(self.basis(k + 1))}
        entries = {}
        for j, mono in enumerate(src):
            for out_mono, c in self.d_mono(mono).coeffs.items():
                entries[(tgt[out_mono], j)] = c
        return SparseMat(len(tgt), len(src), entries)

    def complex(self) -> GradedComplex:
        """Cochain complex in degrees 0..manifold_dim."""
        if self._complex is None:
            top = self.manifold_dim
            dims = [len(self.basis(k)) for k in range(top + 1)]
            for mono in self.basis(top):
                if not self.d_mono(mono).is_zero():
                    raise ShapeMismatch(
                        "differential does not vanish at the top degree; "
                        "the range 0..manifold_dim does not close")
            self._complex = GradedComplex(
                dims, [self.d_matrix(k) for k in range(top)])
        return self._complex


# -- Chevalley-Eilenberg -------------------------------------------------


def ce_complex(n: int, structure: Mapping[tuple[int, int, int], object]
               ) -> CDGAModel:
    """Chevalley-Eilenberg model of an n-dimensional Lie algebra.

    ``structure[(i, j, k)]`` with 1-based i < j is the coefficient of e_k in
    [e_i, e_j]; the differential is d e^k = -sum c^k_ij e^i e^j.  The d^2
    check performed by the model constructor is exactly the Jacobi identity
    (JacobiViolation on failure).
    """
    if n < 1:
        raise ValueError("need at least one generator")
    terms: dict[str, list] = {}
    for (i, j, k), raw in structure.items():
        if not (1 <= i < j <= n and 1 <= k <= n):
            raise ValueError(f"bad structure index ({i},{j},{k})")
        c = Fraction(raw)
        if c:
            terms.setdefault(f"e{k}", []).append((-c, [f"e{i}", f"e{j}"]))
    return CDGAModel([(f"e{i}", 1) for i in range(1, n + 1)], terms,
                     manifold_dim=n)


def random_nilpotent_ce(n: int, rng: Random) -> CDGAModel:
    """Random nilpotent Chevalley-Eilenberg model.

    d e^k is sampled from the closed 2-forms of the generators built so far
    (random central extension), so the structure constants are strictly
    triangular and d^2 = 0 holds by construction.
    """
    structure: dict[tuple[int, int, int], Fraction] = {}
    for k in range(2, n + 1):
        partial = ce_complex(k - 1, {key: v for key, v in structure.items()
                                     if key[1] < k})
        closed = kernel_basis(partial.d_matrix(2))
        basis2 = partial.basis(2)
        if closed.cols == 0:
            continue
        weights = [Fraction(rng.randint(-2, 2)) for _ in range(closed.cols)]
        for (row, col), v in closed.entries.items():
            coeff = weights[col] * v
            if coeff:
                gi, gj = basis2[row]
                key = (gi + 1, gj + 1, k)
                prev = structure.get(key, Fraction(0)) - coeff
                if prev:
                    structure[key] = prev
                else:
                    structure.pop(key, None)
    return ce_complex(n, structure)


def random_closed_two_form(m: CDGAModel, rng: Random) -> Element:
    """Random element of the kernel of d on degree 2 (may be zero)."""
    closed = kernel_basis(m.d_matrix(2))
    basis2 = m.basis(2)
    out: dict[tuple[int, ...], Fraction] = {}
    weights = [Fraction(rng.randint(-2, 2)) for _ in range(closed.cols)]
    if closed.cols and all(w == 0 for w in weights):
        weights[rng.randrange(closed.cols)] = Fraction(1)
    for (row, col), v in closed.entries.items():
        s = out.get(basis2[row], 0) + weights[col] * v
        if s:
            out[basis2[row]] = s
        else:
            out.pop(basis2[row], None)
    return Element(m, out)


# -- formal models -------------------------------------------------------


class FormalModel:
    """Zero-differential model: graded dimensions plus Lefschetz matrices.

    ``lefschetz[k]`` is the matrix of multiplication by the distinguished
    2-class from degree k to degree k+2 (k = 0..top-2).
    """

    def __init__(self, dims: Sequence[int], lefschetz: Sequence[SparseMat],
                 manifold_dim: int | None = None):
        self.dims = tuple(int(v) for v in dims)
        if not self.dims or any(v < 0 for v in self.dims):
            raise ShapeMismatch("bad graded dimensions")
        self.manifold_dim = (len(self.dims) - 1 if manifold_dim is None
                             else manifold_dim)
        if self.manifold_dim != len(self.dims) - 1:
            raise ShapeMismatch("manifold_dim must match the top degree")
        top = len(self.dims) - 1
        if len(lefschetz) != max(top - 1, 0):
            raise ShapeMismatch(
                f"expected {max(top - 1, 0)} Lefschetz matrices, "
                f"got {len(lefschetz)}")
        for k, mat in enumerate(lefschetz):
            want = (self.dim(k + 2), self.dims[k])
            if mat.shape != want:
                raise ShapeMismatch(
                    f"lefschetz[{k}] has shape {mat.shape}, expected {want}")
        self.lefschetz = tuple(lefschetz)
        self._complex: GradedComplex | None = None

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def complex(self) -> GradedComplex:
        if self._complex is None:
            zero_d = [SparseMat.zeros(self.dims[k + 1], self.dims[k])
                      for k in range(len(self.dims) - 1)]
            self._complex = GradedComplex(self.dims, zero_d)
        return self._complex

    def omega_map(self) -> OmegaMap:
        return OmegaMap(self.complex(), list(self.lefschetz))

    def omega_vector(self) -> SparseMat:
        """The distinguished 2-class: image of the degree-0 unit."""
        if self.dim(0) < 1:
            raise ShapeMismatch("formal model has empty degree 0")
        unit = SparseMat(self.dims[0], 1, {(0, 0): Fraction(1)})
        return self.omega_map().map(0) @ unit


def formal_model(dims: Sequence[int],
                 lefschetz: Sequence[SparseMat]) -> FormalModel:
    """Formal model from graded dimensions and degree +2 matrices."""
    return FormalModel(dims, lefschetz)


# -- tensor products -----------------------------------------------------


def tensor_product(a, b):
    """Tensor product of two models of the same kind.

    CDGA x CDGA concatenates generator lists (colliding names from the
    right factor get a ``_2`` suffix); formal x formal takes the graded
    tensor product with Lefschetz map L_a (x) 1 + 1 (x) L_b.
    """
    if isinstance(a, CDGAModel) and isinstance(b, CDGAModel):
        return _tensor_cdga(a, b)
    if isinstance(a, FormalModel) and isinstance(b, FormalModel):
        return _tensor_formal(a, b)
    raise ShapeMismatch("tensor_product requires two models of the same kind")


def _tensor_cdga(a: CDGAModel, b: CDGAModel) -> CDGAModel:
    taken = {g.name for g in a.generators}
    rename = {}
    for g in b.generators:
        name = g.name
        while name in taken:
            name = name + "_2"
        rename[g.name] = name
        taken.add(name)
    gens = [(g.name, g.degree) for g in a.generators]
    gens += [(rename[g.name], g.degree) for g in b.generators]
    diff: dict[str, list] = {}
    for g, dg in zip(a.generators, a._dgen):
        if not dg.is_zero():
            diff[g.name] = [(c, [a.generators[i].name for i in mono])
                            for mono, c in dg.coeffs.items()]
    for g, dg in zip(b.generators, b._dgen):
        if not dg.is_zero():
            diff[rename[g.name]] = [
                (c, [rename[b.generators[i].name] for i in mono])
                for mono, c in dg.coeffs.items()]
    return CDGAModel(gens, diff, a.manifold_dim + b.manifold_dim,
                     power_cap=max(a.power_cap, b.power_cap))


def _tensor_formal(a: FormalModel, b: FormalModel) -> FormalModel:
    top = (len(a.dims) - 1) + (len(b.dims) - 1)

    def pairs(k: int) -> list[tuple[int, int, int]]:
        out = []
        for i in range(0, k + 1):
            for ra in range(a.dim(i)):
                for rb in range(b.dim(k - i)):
                    out.append((i, ra, rb))
        return out

    index = {k: {key: pos for pos, key in enumerate(pairs(k))}
             for k in range(top + 1)}
    dims = [len(index[k]) for k in range(top + 1)]
    maps = []
    for k in range(top - 1):
        entries: dict[tuple[int, int], Fraction] = {}
        for (i, ra, rb), col in index[k].items():
            for (r2, c2), v in a.omega_map().map(i).entries.items():
                if c2 == ra:
                    row = index[k + 2][(i + 2, r2, rb)]
                    entries[(row, col)] = entries.get((row, col), 0) + v
            for (r2, c2), v in b.omega_map().map(k - i).entries.items():
                if c2 == rb:
                    row = index[k + 2][(i, ra, r2)]
                    entries[(row, col)] = entries.get((row, col), 0) + v
        maps.append(SparseMat(dims[k + 2], dims[k], entries))
    return FormalModel(dims, maps)


# -- symplectic checks ---------------------------------------------------


@dataclass(frozen=True)
class SymplecticVerdict:
    closed: bool
    nondegenerate: bool
    degree_ok: bool
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.closed and self.nondegenerate and self.degree_ok


def multiplication_matrix(m: CDGAModel, w: Element) -> OmegaMap:
    """Degreewise matrices of wedging with a closed 2-form w.

    Raises NotClosed if d w != 0 (the chain-map identity for the cone is
    exactly closedness of w).
    """
    if w.model is not m:
        raise ShapeMismatch("form belongs to a different model")
    if not w.is_zero() and w.degree() != 2:
        raise ShapeMismatch(f"form has degree {w.degree()}, expected 2")
    dw = m.d(w)
    if not dw.is_zero():
        raise NotClosed(f"d w = {dw!r} != 0")
    cx = m.complex()
    maps = []
    for k in range(max(cx.top - 1, 0)):
        tgt = {mono: i for i, mono in enumerate(m.basis(k + 2))}
        entries = {}
        for j, mono in enumerate(m.basis(k)):
            prod = w * Element(m, {mono: Fraction(1)})
            for out_mono, c in prod.coeffs.items():
                entries[(tgt[out_mono], j)] = c
        maps.append(SparseMat(len(tgt), cx.dim(k), entries))
    return OmegaMap(cx, maps)


def check_symplectic(model, w=None) -> SymplecticVerdict:
    """Closedness and nondegeneracy verdict; carries failures, never raises.

    CDGA models: w is an Element; nondegeneracy means w^(dim/2) != 0 in the
    algebra.  Formal models check their own distinguished 2-class (w, if
    given, must be its coordinate column).
    """
    if isinstance(model, CDGAModel):
        if w is None or not isinstance(w, Element) or w.model is not model:
            return SymplecticVerdict(False, False, False,
                                     "need a 2-form from this model")
        if model.manifold_dim % 2:
            return SymplecticVerdict(False, False, False,
                                     "odd manifold_dim")
        if w.is_zero() or w.degree() != 2:
            return SymplecticVerdict(False, False, False,
                                     "form is zero or not of degree 2")
        dw = model.d(w)
        closed = dw.is_zero()
        power = model.unit()
        for _ in range(model.manifold_dim // 2):
            power = power * w
        nondeg = not power.is_zero()
        detail = "" if closed else f"d w = {dw!r}"
        return SymplecticVerdict(closed, nondeg, True, detail)
    if isinstance(model, FormalModel):
        if model.manifold_dim % 2:
            return SymplecticVerdict(False, False, False, "odd manifold_dim")
        if w is not None and w != model.omega_vector():
            return SymplecticVerdict(
                True, False, False,
                "formal models only check their distinguished 2-class")
        if model.dim(0) < 1:
            return SymplecticVerdict(True, False, False, "empty degree 0")
        unit = SparseMat(model.dim(0), 1, {(0, 0): Fraction(1)})
        power = model.omega_map().power_map(0, model.manifold_dim // 2) @ unit
        return SymplecticVerdict(True, not power.is_zero(), True)
    return SymplecticVerdict(False, False, False, "unrecognised model kind")


# -- builtins ------------------------------------------------------------


def builtin(name: str):
    """Named example models: returns (model, omega).

    ``omega`` is an Element for CDGA-backed models and the distinguished
    degree-2 coordinate column for formal ones.  Conventions: tori use
    omega = e1^e2 (+ e3^e4); the nilmanifold model kodaira_thurston has the
    single relation d e4 = -e2^e3 and omega = e1^e2 + e3^e4 (e1^e4 is *not*
    closed here, so it cannot appear in omega).
    """
    if name == "t2":
        m = ce_complex(2, {})
        return m, m.form([(1, ["e1", "e2"])])
    if name == "t4":
        m = ce_complex(4, {})
        return m, m.form([(1, ["e1", "e2"]), (1, ["e3", "e4"])])
    if name == "kodaira_thurston":
        m = ce_complex(4, {(2, 3, 4): 1})
        return m, m.form([(1, ["e1", "e2"]), (1, ["e3", "e4"])])
    if name == "cp2":
        one = SparseMat.identity(1)
        m = FormalModel((1, 0, 1, 0, 1),
                        [one, SparseMat.zeros(0, 0), one])
        return m, m.omega_vector()
    if name == "s2xs2":
        s2 = FormalModel((1, 0, 1), [SparseMat.identity(1)])
        m = _tensor_formal(s2, s2)
        return m, m.omega_vector()
    raise UnknownName(name)


BUILTIN_NAMES = ("cp2", "s2xs2", "t2", "t4", "kodaira_thurston")


def model_cone_inputs(model, w=None) -> tuple[GradedComplex, OmegaMap]:
    """Uniform access to (complex, omega map) for any model kind."""
    if isinstance(model, CDGAModel):
        if w is None:
            raise ShapeMismatch("CDGA models need an explicit 2-form")
        return model.complex(), multiplication_matrix(model, w)
    if isinstance(model, FormalModel):
        return model.complex(), model.omega_map()
    raise ShapeMismatch("unrecognised model kind")
