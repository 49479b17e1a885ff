"""Return probabilities of a walk and things computed from them.

``I_n`` is the constant coefficient of ``chi(t)**n``.  It is computed by
iterated convolution with integer weights, so the only division happens
once per ``n`` when the result is turned back into a Fraction.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath import mpf

from ._numeric import DEFAULT_PRECISION, format_number, working_precision
from .errors import InsufficientData, ValidationError
from .walk_core import WalkShape

SPECTRUM_SCHEMA = "walkspec.spectrum/1"
EMPIRICAL_SCHEMA = "walkspec.empirical/1"

# samples per Monte Carlo chunk; chunk c draws from SeedSequence(seed).spawn()[c]
CHUNK = 1 << 16


@dataclass(frozen=True)
class Spectrum:
    """Return probabilities ``I_start, I_start+1, ...`` (``start`` is 1)."""

    values: Tuple[Fraction, ...]
    start: int = 1

    def __getitem__(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(1)
        i = n - self.start
        if i < 0 or i >= len(self.values):
            raise IndexError(n)
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def N(self) -> int:
        return self.start + len(self.values) - 1

    def to_json(self) -> dict:
        return {
            "schema": SPECTRUM_SCHEMA,
            "start": self.start,
            "values": [format_number(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Spectrum":
        start = int(data.get("start", 1))
        if start != 1:
            raise ValidationError("spectra must start at n = 1")
        try:
            values = tuple(Fraction(str(v)) for v in data["values"])
        except (KeyError, ValueError, ZeroDivisionError):
            raise ValidationError("spectrum 'values' must be rational strings") from None
        for v in values:
            if not 0 <= v <= 1:
                raise ValidationError(f"return probability {v} outside [0, 1]")
        return cls(values, start)


def _raw_constant_terms(shape: WalkShape, N: int) -> Tuple[int, List[int]]:
    """``(d, [d**n I_n for n = 1..N])`` as exact integers."""
    d, w = shape.integer_weights()
    e, f = shape.e, shape.f
    steps = sorted(w.items())
    # dense vector indexed by position + offset; positions are pruned once they
    # can no longer get back to 0 in the remaining steps
    lo, hi = 0, 0
    vec = [1]
    out = []
    for n in range(1, N + 1):
        left = N - n
        new_lo = max(lo - e, -left * f)
        new_hi = min(hi + f, left * e)
        new = [0] * (new_hi - new_lo + 1)
        for i, c in enumerate(vec):
            if not c:
                continue
            pos = lo + i
            for k, wk in steps:
                j = pos + k - new_lo
                if 0 <= j < len(new):
                    new[j] += c * wk
        lo, hi, vec = new_lo, new_hi, new
        out.append(vec[-lo] if lo <= 0 <= hi else 0)
    return d, out


def return_probabilities(shape: WalkShape, N: int) -> Spectrum:
    if N < 1:
        raise ValueError("N must be at least 1")
    d, raw = _raw_constant_terms(shape, N)
    return Spectrum(tuple(Fraction(c, d ** n) for n, c in enumerate(raw, start=1)))


def multinomial_constant_term(shape: WalkShape, n: int) -> Fraction:
    """``I_n`` by summing multinomial terms over step counts; an independent check."""
    items = shape.items
    total = Fraction(0)

    def rec(i, remaining, position, coef, prob):
        nonlocal total
        k, c = items[i]
        if i == len(items) - 1:
            if position + remaining * k == 0:
                total += coef * prob * c ** remaining
            return
        for j in range(remaining + 1):
            rec(i + 1, remaining - j, position + j * k,
                coef * math.comb(remaining, j), prob * c ** j)

    rec(0, n, 0, 1, Fraction(1))
    return total


@dataclass(frozen=True)
class Comparison:
    """Outcome of comparing two spectra through ``n_checked``."""

    n_checked: int
    first_difference: Optional[Tuple[int, Fraction, Fraction]] = None

    @property
    def equal(self) -> bool:
        return self.first_difference is None

    def describe(self) -> str:
        if self.equal:
            return f"equal through {self.n_checked}"
        n, a, b = self.first_difference
        return f"first difference at n={n}: {format_number(a)} != {format_number(b)}"


def isospectral_through(a: WalkShape, b: WalkShape, N: int) -> Comparison:
    if N < 1:
        raise ValueError("N must be at least 1")
    sa = return_probabilities(a, N)
    sb = return_probabilities(b, N)
    for n, (x, y) in enumerate(zip(sa.values, sb.values), start=1):
        if x != y:
            return Comparison(N, (n, x, y))
    return Comparison(N)


@dataclass(frozen=True)
class EmpiricalSpectrum:
    samples: int
    estimates: Tuple[float, ...]
    standard_errors: Tuple[float, ...]
    seed: int
    method: str = "frequency"

    @property
    def degenerate(self) -> bool:
        """True when too few samples were used for a standard error to mean anything."""
        return self.samples < 2

    def to_json(self) -> dict:
        return {
            "schema": EMPIRICAL_SCHEMA,
            "method": self.method,
            "seed": self.seed,
            "samples": self.samples,
            "degenerate": self.degenerate,
            "estimates": list(self.estimates),
            "standard_errors": list(self.standard_errors),
        }


def _step_sampler(shape: WalkShape):
    # exact step law: draw an integer in [0, d) and look it up in the cumulative weights
    d, w = shape.integer_weights()
    ks = np.array([k for k, _ in sorted(w.items())], dtype=np.int64)
    cum = np.cumsum([wk for _, wk in sorted(w.items())])
    if d >= 2 ** 62:
        raise ValidationError("coefficient denominators too large for exact sampling")

    def draw(rng: np.random.Generator, size):
        u = rng.integers(0, d, size=size, dtype=np.int64)
        return ks[np.searchsorted(cum, u, side="right")]

    return draw


def _chunk_returns(draw, seed_seq: np.random.SeedSequence, size: int, N: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    paths = np.cumsum(draw(rng, (size, N)), axis=1)
    return np.count_nonzero(paths == 0, axis=0)


def simulate(
    shape: WalkShape,
    N: int,
    samples: int,
    seed: int,
    method: str = "frequency",
    threads: int = 1,
) -> EmpiricalSpectrum:
    """Monte Carlo estimates of ``I_1..I_N``.

    ``method="frequency"`` runs ``samples`` independent walks of length N and
    counts returns.  ``method="s_statistic"`` runs one walk of length
    ``samples`` and uses the return-time ratio: with ``S`` the set of return
    times, ``I_n`` is estimated by the fraction of returns ``m`` for which
    ``m - n`` is also a return time (0 counts as one).  Its standard error
    uses the number of returns as the effective sample size.

    Randomness is PCG64.  The walk is cut into chunks of ``CHUNK`` samples
    (steps, for the single trajectory) and chunk ``c`` uses the ``c``-th child
    of ``SeedSequence(seed)``, so results do not depend on ``threads``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if N < 1:
        raise ValueError("N must be at least 1")
    draw = _step_sampler(shape)
    n_chunks = -(-samples // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK, samples - c * CHUNK) for c in range(n_chunks)]

    if method == "frequency":
        jobs = list(zip(children, sizes))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda job: _chunk_returns(draw, job[0], job[1], N), jobs))
        else:
            parts = [_chunk_returns(draw, s, size, N) for s, size in jobs]
        counts = np.sum(parts, axis=0)
        p = counts / samples
        se = np.sqrt(p * (1 - p) / samples)
        return EmpiricalSpectrum(samples, tuple(map(float, p)), tuple(map(float, se)), seed, method)

    if method == "s_statistic":
        steps = [draw(np.random.Generator(np.random.PCG64(s)), size) for s, size in zip(children, sizes)]
        position = np.cumsum(np.concatenate(steps))
        returns = np.flatnonzero(position == 0) + 1
        in_s = np.zeros(samples + 1, dtype=bool)
        in_s[0] = True
        in_s[returns] = True
        total = len(returns)
        est, se = [], []
        for n in range(1, N + 1):
            earlier = returns - n
            hits = int(np.count_nonzero(in_s[earlier[earlier >= 0]]))
            p = hits / total if total else 0.0
            est.append(p)
            se.append(math.sqrt(p * (1 - p) / total) if total else 0.0)
        return EmpiricalSpectrum(total, tuple(est), tuple(se), seed, method)

    raise ValueError(f"unknown method {method!r}")


def u1_invariant_dims(shape: WalkShape, N: int) -> Tuple[int, List[int]]:
    """``(d, [d**n I_n])``: invariant dimensions in ``V**n`` for the circle
    representation with weight ``k`` of multiplicity ``d * kappa_k``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    d, raw = _raw_constant_terms(shape, N)
    return d, raw


@dataclass(frozen=True)
class BiasVerdict:
    verdict: str
    evidence: Optional[dict] = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


CONSISTENT = "ConsistentWithUnbiased"
SUGGESTS_BIASED = "SuggestsBiased"

# slope threshold for log(L(s) sqrt(s)) against s; unbiased walks give 0
SLOPE_THRESHOLD = -0.02
LOW_CONFIDENCE_N = 32


def bias_diagnostic(spec: Spectrum, precision: int = DEFAULT_PRECISION) -> BiasVerdict:
    """Heuristic test of whether a spectrum could come from an unbiased walk.

    For an unbiased walk ``L(s) sqrt(s)`` tends to a constant; for a biased
    one ``L(s)`` decays exponentially.  ``log(L(s) sqrt(s))`` is fitted by
    ``a + b s + c/s`` on ``s`` in ``[N/16, N/4]``, where truncating the
    series after ``I_N`` is harmless, and ``b < -0.02`` counts as biased.
    With fewer than 32 values the window is too close to ``s = 0`` and
    unbiased walks can be flagged; the evidence then carries
    ``low_confidence``.
    """
    if len(spec) < 8:
        raise InsufficientData(f"need at least 8 return probabilities, got {len(spec)}")
    if all(v == 0 for v in spec.values):
        return BiasVerdict(SUGGESTS_BIASED, None)
    N = spec.N
    s_max = N / 4
    grid = np.linspace(s_max / 4, s_max, 12)
    with working_precision(precision):
        rows, rhs = [], []
        for s in grid:
            s_mp = mpf(s)
            term = mpf(1)
            acc = mpf(1)
            for n in range(1, N + 1):
                term = term * s_mp / n
                acc += term * (mpf(spec[n].numerator) / spec[n].denominator)
            val = mpmath.log(acc * mpmath.exp(-s_mp) * mpmath.sqrt(s_mp))
            rows.append([1.0, s, 1.0 / s])
            rhs.append(float(val))
    coef, residual, _, _ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    slope = float(coef[1])
    evidence = {
        "slope": slope,
        "threshold": SLOPE_THRESHOLD,
        "s_range": [float(grid[0]), float(grid[-1])],
        "residual": float(residual[0]) if len(residual) else 0.0,
        # below this the fit window sits at s of order 1, before the power law sets in
        "low_confidence": N < LOW_CONFIDENCE_N,
    }
    verdict = SUGGESTS_BIASED if slope < SLOPE_THRESHOLD else CONSISTENT
    return BiasVerdict(verdict, evidence)
