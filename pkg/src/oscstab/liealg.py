"""Iterated Lie brackets, rank verification, and feedback-coefficient solves.

The bracket convention is ``[f, g](x) = Dg(x) f(x) - Df(x) g(x)``.  Bracket
fields are themselves jet-evaluable: nesting order-2 seeds of the operand
fields yields exact derivatives of the bracket, so depth-3 brackets such as
``[[f, g], h]`` come out to machine precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import DimensionMismatch, EvaluationError, SingularityError
from .jets import Jet2, SmoothVectorField, jet_d1, _zero_like

# Above this 1-norm condition estimate the feedback solve is refused:
# coefficients computed from a nearly singular matrix are meaningless and
# the rank hypothesis is effectively violated at that state.
SINGULARITY_COND_LIMIT = 1e8


def _push(f: SmoothVectorField, point, direction):
    """Df(point) . direction via first-order seeds (jet-generic)."""
    jpt = [Jet2(p, d, _zero_like(p)) for p, d in zip(point, direction)]
    return [jet_d1(o) for o in f.eval(jpt)]


def _bracket_eval(f: SmoothVectorField, g: SmoothVectorField, point):
    fv = f.eval(point)
    gv = g.eval(point)
    dg_f = _push(g, point, fv)
    df_g = _push(f, point, gv)
    return [a - b for a, b in zip(dg_f, df_g)]


def lie_bracket(f: SmoothVectorField, g: SmoothVectorField, x: Sequence) -> list:
    """[f, g](x) = Dg(x) f(x) - Df(x) g(x)."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"bracket operands differ in dimension: {f.dim} vs {g.dim}")
    return _bracket_eval(f, g, list(x))


def lie_bracket_field(f: SmoothVectorField, g: SmoothVectorField) -> SmoothVectorField:
    """The bracket [f, g] as a field, evaluable on floats and jets alike."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"bracket operands differ in dimension: {f.dim} vs {g.dim}")
    name = f"[{f.name or 'f'},{g.name or 'g'}]"
    return SmoothVectorField(f.dim, lambda pt: _bracket_eval(f, g, pt), name=name)


@dataclass(frozen=True)
class IndexSets:
    """Generator bookkeeping: which fields and brackets build the state space.

    ``s1`` holds input indices used directly, ``s2`` ordered pairs whose
    first-order brackets are used, ``s3`` ordered triples for second-order
    brackets.  Indices are 1-based input numbers, matching the usual control
    notation.
    """

    s1: tuple
    s2: tuple
    s3: tuple

    def __init__(self, s1=(), s2=(), s3=()):
        object.__setattr__(self, "s1", tuple(int(i) for i in s1))
        object.__setattr__(self, "s2", tuple((int(a), int(b)) for a, b in s2))
        object.__setattr__(self, "s3", tuple((int(a), int(b), int(c)) for a, b, c in s3))

    @property
    def total(self) -> int:
        return len(self.s1) + len(self.s2) + len(self.s3)

    def validate(self, n: int, m: int) -> None:
        if self.total != n:
            raise ValueError(
                f"|s1| + |s2| + |s3| = {self.total} must equal the state dimension {n}"
            )
        for label, entries, width in (("s1", self.s1, 1), ("s2", self.s2, 2), ("s3", self.s3, 3)):
            seen = set()
            for entry in entries:
                idxs = (entry,) if width == 1 else entry
                for i in idxs:
                    if not 1 <= i <= m:
                        raise ValueError(f"{label} entry {entry} uses input {i} outside 1..{m}")
                if entry in seen:
                    raise ValueError(f"duplicate {label} entry {entry}")
                seen.add(entry)

    def generator_labels(self) -> list:
        labels = [f"f{i}" for i in self.s1]
        labels += [f"[f{a},f{b}]" for a, b in self.s2]
        labels += [f"[[f{a},f{b}],f{c}]" for a, b, c in self.s3]
        return labels


@dataclass(frozen=True)
class BracketMatrix:
    """Generator matrix at a state, columns in fixed (s1, s2, s3) order."""

    entries: np.ndarray
    x: tuple
    cond: float
    lu: tuple = field(repr=False, compare=False, default=None)

    @property
    def abs_det(self) -> float:
        return abs(float(np.linalg.det(self.entries)))

    @property
    def inverse_norm(self) -> float:
        """Spectral norm of the inverse (sup over unit vectors)."""
        return float(np.linalg.norm(np.linalg.inv(self.entries), 2))


def _condition_estimate(mat: np.ndarray, lu, piv) -> float:
    """1-norm condition estimate from the LU factors (no SVD)."""
    anorm = float(np.linalg.norm(mat, 1))
    if anorm == 0.0:
        return float("inf")
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0.0:
        return float("inf")
    return 1.0 / float(rcond)


def assemble_F(fields: Sequence[SmoothVectorField], sets: IndexSets, x: Sequence) -> BracketMatrix:
    """Columns f_i, [f_j1, f_j2], [[f_l1, f_l2], f_l3] evaluated at x."""
    n = fields[0].dim
    sets.validate(n, len(fields))
    xs = [float(v) for v in x]
    cols = []
    for i in sets.s1:
        cols.append(fields[i - 1].eval(xs))
    for j1, j2 in sets.s2:
        cols.append(lie_bracket(fields[j1 - 1], fields[j2 - 1], xs))
    for l1, l2, l3 in sets.s3:
        inner = lie_bracket_field(fields[l1 - 1], fields[l2 - 1])
        cols.append(lie_bracket(inner, fields[l3 - 1], xs))
    mat = np.array(cols, dtype=float).T
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(mat, check_finite=False)
    cond = _condition_estimate(mat, lu, piv)
    return BracketMatrix(entries=mat, x=tuple(xs), cond=cond, lu=(lu, piv))


@dataclass(frozen=True)
class RankSample:
    x: tuple
    abs_det: float
    cond: float
    inverse_norm: float
    ok: bool
    error: Optional[str] = None


@dataclass(frozen=True)
class RankReport:
    samples: tuple
    passed: bool
    max_inverse_norm: Optional[float]
    alpha: Optional[float] = None
    alpha_ok: Optional[bool] = None


def check_rank(
    fields: Sequence[SmoothVectorField],
    sets: IndexSets,
    sample_points: Sequence[Sequence],
    cond_limit: float = SINGULARITY_COND_LIMIT,
    alpha: Optional[float] = None,
) -> RankReport:
    """Evaluate the generator matrix over sample states and grade each one.

    A point passes when the matrix evaluates cleanly and its condition
    estimate stays below ``cond_limit``.  When ``alpha`` is given, the
    report also states whether max ||F^-1|| over the samples stays below it.
    """
    if not sample_points:
        raise ValueError("check_rank requires at least one sample point")
    samples = []
    max_inv = None
    for pt in sample_points:
        try:
            fm = assemble_F(fields, sets, pt)
        except EvaluationError as err:
            samples.append(
                RankSample(
                    x=tuple(float(v) for v in pt),
                    abs_det=0.0,
                    cond=float("inf"),
                    inverse_norm=float("inf"),
                    ok=False,
                    error=str(err),
                )
            )
            continue
        ok = np.isfinite(fm.cond) and fm.cond <= cond_limit
        inv_norm = fm.inverse_norm if ok else float("inf")
        if ok:
            max_inv = inv_norm if max_inv is None else max(max_inv, inv_norm)
        samples.append(
            RankSample(
                x=fm.x,
                abs_det=fm.abs_det,
                cond=fm.cond,
                inverse_norm=inv_norm,
                ok=ok,
            )
        )
    passed = all(s.ok for s in samples)
    alpha_ok = None
    if alpha is not None:
        alpha_ok = passed and max_inv is not None and max_inv <= alpha
    return RankReport(
        samples=tuple(samples),
        passed=passed,
        max_inverse_norm=max_inv,
        alpha=alpha,
        alpha_ok=alpha_ok,
    )


def feedback_coefficients(
    Fmat: BracketMatrix, gamma: float, x: Sequence, x_star: Sequence
) -> np.ndarray:
    """Solve F(x) a = -gamma (x - x*) by LU with partial pivoting.

    Components come back ordered like the generator columns.  Refuses the
    solve when the condition estimate exceeds the singularity limit.
    """
    if gamma <= 0.0:
        raise ValueError(f"gain must be positive, got {gamma}")
    if not np.isfinite(Fmat.cond) or Fmat.cond > SINGULARITY_COND_LIMIT:
        raise SingularityError(
            f"generator matrix numerically singular at x = {Fmat.x} "
            f"(condition estimate {Fmat.cond:.3e})",
            where=Fmat.x,
            cond=Fmat.cond,
        )
    rhs = -gamma * (np.asarray(x, dtype=float) - np.asarray(x_star, dtype=float))
    return scipy.linalg.lu_solve(Fmat.lu, rhs, check_finite=False)
