"""Instance generation and matrix file I/O.

Synthetic instances follow a spiked-covariance design: two planted spikes on
the first block of coordinates, a high flat block next to them, identity
elsewhere. Sample covariances are drawn with a counter-based Philox generator
and an explicit Box-Muller transform so instances are reproducible bit-for-bit
from a single integer seed.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParseError
from .linalg import SymmetricMatrix, _as_entries

DEFAULT_SPIKES = (55.0, 52.0, 50.0)

MM_HEADER = "%%MatrixMarket matrix coordinate real symmetric"


@dataclass(frozen=True)
class SpikedSpec:
    """Parameters of a spiked-covariance instance.

    ``ka`` is the planted support size (even, with ``2*ka <= d``); ``m_samples``
    is the number of Gaussian draws averaged into the sample covariance.
    ``spike_values = (s1, s2, s3)`` are the two spike strengths and the flat
    block level.
    """

    d: int
    ka: int
    m_samples: int
    seed: int = 0
    spike_values: tuple[float, float, float] = DEFAULT_SPIKES

    def __post_init__(self):
        if self.d < 1:
            raise InputError(f"d must be positive, got {self.d}")
        if self.ka < 2 or self.ka % 2 != 0:
            raise InputError(f"ka must be even and >= 2, got {self.ka}")
        if 2 * self.ka > self.d:
            raise InputError(f"need 2*ka <= d, got ka={self.ka}, d={self.d}")
        if self.m_samples < 1:
            raise InputError(f"m_samples must be positive, got {self.m_samples}")
        if any(s <= 0 for s in self.spike_values):
            raise InputError(f"spike values must be positive, got {self.spike_values}")


@dataclass(frozen=True)
class SampleMatrix:
    """Raw zero-mean samples, one per column (d rows, m columns)."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2:
            raise InputError(f"samples must be a 2-d array, got {arr.ndim}-d")
        if arr.shape[1] < 1:
            raise InputError("need at least one sample column")
        if not np.all(np.isfinite(arr)):
            raise InputError("samples have non-finite entries")
        object.__setattr__(self, "entries", arr)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


def population_spiked(spec: SpikedSpec) -> SymmetricMatrix:
    """Population covariance: spikes + flat block + identity tail.

    Block 1 (coords 0..ka-1): s1*u1@u1.T + s2*u2@u2.T with u1 constant and u2
    alternating-sign, both unit norm. Block 2 (coords ka..2ka-1): s3 * I.
    Remaining coordinates: identity.
    """
    d, ka = spec.d, spec.ka
    s1, s2, s3 = spec.spike_values
    u1 = np.full(ka, 1.0 / np.sqrt(ka))
    u2 = u1 * np.where(np.arange(ka) % 2 == 0, 1.0, -1.0)
    sigma = np.eye(d)
    sigma[:ka, :ka] = s1 * np.outer(u1, u1) + s2 * np.outer(u2, u2)
    sigma[ka : 2 * ka, ka : 2 * ka] = s3 * np.eye(ka)
    return SymmetricMatrix.from_array(sigma)


def spiked_unit_vectors(spec: SpikedSpec) -> tuple[np.ndarray, np.ndarray]:
    """The two planted directions, embedded in dimension d."""
    d, ka = spec.d, spec.ka
    u1 = np.zeros(d)
    u1[:ka] = 1.0 / np.sqrt(ka)
    u2 = u1 * np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
    u2[ka:] = 0.0
    return u1, u2


def _standard_normal(bits: np.random.Generator, shape) -> np.ndarray:
    """Box-Muller normals from a uniform stream (deterministic, portable)."""
    n = int(np.prod(shape))
    half = (n + 1) // 2
    # u1 in (0, 1] so log never sees zero
    u1 = 1.0 - bits.random(half)
    u2 = bits.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    return z.reshape(shape)


def _rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator on a fixed sub-stream of ``seed``."""
    seq = np.random.SeedSequence(seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(seq))


def sample_covariance(samples: SampleMatrix) -> SymmetricMatrix:
    """Empirical second moment (1/m) X X^T of the given sample columns."""
    x = samples.entries
    a = (x @ x.T) / samples.m
    return SymmetricMatrix.from_array(a)


def draw_spiked_samples(spec: SpikedSpec) -> SampleMatrix:
    """``m_samples`` i.i.d. draws from N(0, population_spiked(spec))."""
    sigma = population_spiked(spec)
    from .linalg import eigendecompose, psd_sqrt

    sigma_half = psd_sqrt(sigma, eigendecompose(sigma))
    z = _standard_normal(_rng(spec.seed, 0), (spec.d, spec.m_samples))
    return SampleMatrix(sigma_half @ z)


def generate_spiked_instance(spec: SpikedSpec) -> SymmetricMatrix:
    """Sample covariance of ``spec``; identical spec gives identical bytes."""
    return sample_covariance(draw_spiked_samples(spec))


def top_diagonal_subinstance(mat, n: int) -> tuple[np.ndarray, SymmetricMatrix]:
    """Indices of the ``n`` largest diagonal entries plus the principal slice.

    Returns (S, A[S, S]) with S ascending, 0-based; diagonal ties broken
    toward the smaller index.
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if not 1 <= n <= d:
        raise InputError(f"n={n} out of range [1, {d}]")
    diag = np.diagonal(a)
    # stable sort on -value: smaller index wins ties
    order = np.argsort(-diag, kind="stable")
    s = np.sort(order[:n])
    return s, SymmetricMatrix.from_array(a[np.ix_(s, s)])


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_dense_csv(path: str, mat) -> None:
    """Write the dense-csv format: first line d, then d comma-separated rows.

    Entries use 17 significant digits so a load round-trips bit-for-bit.
    """
    a = _as_entries(mat)
    lines = [str(a.shape[0])]
    for row in a:
        lines.append(",".join(format(v, ".17g") for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _load_dense_csv(path: str) -> np.ndarray:
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    try:
        d = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"expected integer dimension, got {lines[0]!r}", line=1)
    if d < 1:
        raise ParseError(f"dimension must be positive, got {d}", line=1)
    if len(lines) < d + 1:
        raise ParseError(f"expected {d} rows, file has {len(lines) - 1}",
                         line=len(lines))
    a = np.empty((d, d))
    for i in range(d):
        lineno = i + 2
        parts = lines[i + 1].split(",")
        if len(parts) != d:
            raise ParseError(f"expected {d} entries, got {len(parts)}", line=lineno)
        try:
            a[i] = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno)
    return a


def _load_matrix_market_sym(path: str) -> np.ndarray:
    """Coordinate-format symmetric matrix-market reader.

    Off-diagonal entries are mirrored; repeated coordinates accumulate.
    """
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    header = lines[0].strip().lower().split()
    want = MM_HEADER.lower().split()
    if header[: len(want)] != want:
        raise ParseError(
            f"expected header {MM_HEADER!r}, got {lines[0]!r}", line=1)
    idx = 1
    while idx < len(lines) and (not lines[idx].strip() or lines[idx].lstrip().startswith("%")):
        idx += 1
    if idx >= len(lines):
        raise ParseError("missing size line", line=len(lines))
    size_line = idx + 1
    parts = lines[idx].split()
    if len(parts) != 3:
        raise ParseError(f"size line needs 'rows cols nnz', got {lines[idx]!r}",
                         line=size_line)
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"size line needs integers, got {lines[idx]!r}",
                         line=size_line)
    if rows != cols:
        raise ParseError(f"matrix must be square, got {rows}x{cols}", line=size_line)
    a = np.zeros((rows, rows))
    seen = 0
    for off, raw in enumerate(lines[idx + 1 :]):
        lineno = size_line + 1 + off
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        fields = text.split()
        if len(fields) != 3:
            raise ParseError(f"entry needs 'i j value', got {raw!r}", line=lineno)
        try:
            i, j, v = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(f"bad entry {raw!r}", line=lineno)
        if not (1 <= i <= rows and 1 <= j <= rows):
            raise ParseError(f"index ({i}, {j}) out of range 1..{rows}", line=lineno)
        seen += 1
        a[i - 1, j - 1] += v
        if i != j:
            a[j - 1, i - 1] += v
    if seen != nnz:
        raise ParseError(f"size line promised {nnz} entries, found {seen}",
                         line=len(lines))
    return a


def load_matrix(path: str, fmt: str = "dense-csv",
                atol: float = 1e-9) -> SymmetricMatrix:
    """Load a symmetric matrix from ``path``.

    ``fmt`` is ``"dense-csv"`` or ``"matrix-market-sym"``. Asymmetry beyond
    ``atol`` is an error; below it the matrix is symmetrized exactly.
    """
    try:
        if fmt == "dense-csv":
            a = _load_dense_csv(path)
        elif fmt == "matrix-market-sym":
            a = _load_matrix_market_sym(path)
        else:
            raise InputError(f"unknown matrix format {fmt!r}")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return SymmetricMatrix.from_array(a, atol=atol)
