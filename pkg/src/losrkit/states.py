"""Complex linear algebra for labeled multipartite states.

Pure states and density matrices carry an explicit tuple of local dimensions;
every operation (tensor products, partial traces, local channels, Schmidt
spectra, Born-rule boxes) is a pure function of its inputs.  All values are
immutable after construction and safe to share across threads.

Dense eigendecompositions cap the practical total dimension at a few thousand;
everything here is meant for desk-scale checks, not bulk simulation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .config import _resolve, tolerances

# Auto-normalization threshold: small drifts are repaired with a warning,
# anything larger is treated as a malformed input rather than rescaled away.
NORM_REPAIR_LIMIT = 1e-3

# Dense positivity checks are skipped above this side length; only the cheap
# necessary conditions (Hermiticity, trace, nonnegative diagonal) remain.
_PSD_CHECK_MAX_DIM = 256


def _as_party_dims(party_dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in party_dims)
    if not dims:
        raise ValueError("party_dims must be nonempty")
    if any(d < 1 for d in dims):
        raise ValueError(f"party_dims must be positive, got {dims}")
    return dims


@dataclass(frozen=True)
class PureState:
    """A pure state as a flat complex amplitude vector over labeled parties.

    Amplitudes are row-major over the computational basis of the party
    dimensions.  Norm deviations below ``NORM_REPAIR_LIMIT`` are repaired
    (with a warning); larger deviations raise.
    """

    party_dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _as_party_dims(self.party_dims)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != int(np.prod(dims)):
            raise ValueError(
                f"amplitude length {amp.size} does not match dims {dims}"
            )
        nrm = float(np.linalg.norm(amp))
        dev = abs(nrm - 1.0)
        if dev > NORM_REPAIR_LIMIT:
            raise ValueError(f"state norm {nrm:.6g} too far from 1 to repair")
        if dev > tolerances.eps_norm:
            warnings.warn(f"renormalizing state (norm deviation {dev:.3g})")
            amp = amp / nrm
        amp.setflags(write=False)
        object.__setattr__(self, "party_dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_parties(self) -> int:
        return len(self.party_dims)

    @property
    def total_dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per party."""
        return self.amplitudes.reshape(self.party_dims)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.party_dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """A density operator over labeled parties (Hermitian, unit trace, PSD)."""

    party_dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _as_party_dims(self.party_dims)
        total = int(np.prod(dims))
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (total, total):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
        eps = tolerances.eps_norm
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > eps:
            raise ValueError(f"matrix not Hermitian (deviation {herm_dev:.3g})")
        tr_dev = abs(complex(np.trace(mat)) - 1.0)
        if tr_dev > eps:
            raise ValueError(f"trace deviates from 1 by {tr_dev:.3g}")
        if total <= _PSD_CHECK_MAX_DIM:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < -eps:
                raise ValueError(f"matrix has negative eigenvalue {lo:.3g}")
        elif float(np.min(mat.diagonal().real)) < -eps:
            raise ValueError("matrix has negative diagonal entry")
        mat.setflags(write=False)
        object.__setattr__(self, "party_dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def n_parties(self) -> int:
        return len(self.party_dims)

    @property
    def total_dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Bipartition:
    """A split of the parties into a nonempty proper subset and its complement."""

    left: frozenset[int]
    n_parties: int

    def __post_init__(self):
        left = frozenset(int(i) for i in self.left)
        n = int(self.n_parties)
        if not left or len(left) >= n:
            raise ValueError("left side must be a nonempty proper subset")
        if any(i < 0 or i >= n for i in left):
            raise ValueError(f"party index out of range for n={n}: {sorted(left)}")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "n_parties", n)

    @property
    def right(self) -> frozenset[int]:
        return frozenset(range(self.n_parties)) - self.left

    def singleton(self) -> int | None:
        """The lone party index if either side is a singleton, else None."""
        if len(self.left) == 1:
            return next(iter(self.left))
        if len(self.right) == 1:
            return next(iter(self.right))
        return None

    def label(self) -> str:
        letters = lambda s: "".join(chr(ord("A") + i) for i in sorted(s))
        return f"{letters(self.left)}|{letters(self.right)}"

    @classmethod
    def parse(cls, text: str, n_parties: int) -> Bipartition:
        """Parse a label like ``A|BC`` (letters name parties, A = party 0)."""
        parts = text.strip().upper().split("|")
        if len(parts) != 2:
            raise ValueError(f"bipartition must contain exactly one '|': {text!r}")
        sides = []
        for side in parts:
            idx = set()
            for ch in side:
                i = ord(ch) - ord("A")
                if i < 0 or i >= n_parties:
                    raise ValueError(f"unknown party letter {ch!r} for n={n_parties}")
                idx.add(i)
            sides.append(idx)
        if sides[0] | sides[1] != set(range(n_parties)) or sides[0] & sides[1]:
            raise ValueError(f"{text!r} is not a partition of {n_parties} parties")
        return cls(frozenset(sides[0]), n_parties)


def all_bipartitions(n_parties: int) -> list[Bipartition]:
    """Every bipartition of n parties, one representative per complement pair.

    The canonical representative is the side containing party 0.
    """
    if n_parties < 2:
        raise ValueError("need at least 2 parties")
    out = []
    rest = list(range(1, n_parties))
    for mask in range(2 ** (n_parties - 1)):
        left = {0} | {rest[i] for i in range(n_parties - 1) if mask >> i & 1}
        if len(left) < n_parties:
            out.append(Bipartition(frozenset(left), n_parties))
    return out


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending vector of squared Schmidt coefficients across a bipartition."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=float))[::-1].copy()
        eps = tolerances.eps_norm
        if vals.size and vals[-1] < -eps:
            raise ValueError(f"spectrum entry {vals[-1]:.3g} below zero")
        np.clip(vals, 0.0, None, out=vals)
        if abs(vals.sum() - 1.0) > eps:
            raise ValueError(f"spectrum sums to {vals.sum():.9g}, not 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def rank(self, tau_rank: float | None = None) -> int:
        return schmidt_rank(self, tau_rank)

    def truncated(self, tau_rank: float | None = None) -> np.ndarray:
        """Entries above the rank cutoff, still descending."""
        tau = _resolve(tau_rank, tolerances.tau_rank)
        return self.values[self.values > tau]

    def tensor(self, other: SchmidtSpectrum) -> SchmidtSpectrum:
        return SchmidtSpectrum(np.kron(self.values, other.values))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class LocalChannelFamily:
    """A classical mixture of tensor products of per-party CPTP maps.

    ``components`` is a tuple of ``(weight, per_party_kraus)`` pairs, where
    ``per_party_kraus[p]`` is a tuple of (possibly rectangular) Kraus
    operators for party p.  Rectangular operators change that party's local
    dimension; all components must agree on the output dimensions.
    """

    components: tuple[tuple[float, tuple[tuple[np.ndarray, ...], ...]], ...]

    def __post_init__(self):
        eps = tolerances.eps_norm
        comps = []
        weights = []
        out_dims = None
        in_dims = None
        for weight, per_party in self.components:
            w = float(weight)
            if w < -eps:
                raise ValueError(f"negative mixing weight {w}")
            weights.append(w)
            frozen_parties = []
            c_out, c_in = [], []
            for kraus_list in per_party:
                ops = tuple(np.asarray(k, dtype=complex) for k in kraus_list)
                if not ops:
                    raise ValueError("each party needs at least one Kraus operator")
                rows, cols = ops[0].shape
                if any(k.shape != (rows, cols) for k in ops):
                    raise ValueError("Kraus operators of one party must share a shape")
                comp = sum(k.conj().T @ k for k in ops)
                if float(np.max(np.abs(comp - np.eye(cols)))) > eps:
                    raise ValueError("Kraus operators are not trace preserving")
                for k in ops:
                    k.setflags(write=False)
                frozen_parties.append(ops)
                c_out.append(rows)
                c_in.append(cols)
            if out_dims is None:
                out_dims, in_dims = tuple(c_out), tuple(c_in)
            elif (tuple(c_out), tuple(c_in)) != (out_dims, in_dims):
                raise ValueError("components disagree on channel dimensions")
            comps.append((w, tuple(frozen_parties)))
        if abs(sum(weights) - 1.0) > eps:
            raise ValueError(f"mixing weights sum to {sum(weights):.9g}, not 1")
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "_in_dims", in_dims)
        object.__setattr__(self, "_out_dims", out_dims)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return self._in_dims

    @property
    def output_dims(self) -> tuple[int, ...]:
        return self._out_dims

    @classmethod
    def identity(cls, dims) -> LocalChannelFamily:
        per_party = tuple((np.eye(int(d), dtype=complex),) for d in dims)
        return cls(((1.0, per_party),))

    @classmethod
    def from_local_kraus(cls, per_party_kraus) -> LocalChannelFamily:
        """A single tensor-product channel (no classical mixing)."""
        return cls(((1.0, tuple(tuple(ops) for ops in per_party_kraus)),))


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Concatenate party lists and Kronecker the amplitudes."""
    return PureState(a.party_dims + b.party_dims, np.kron(a.amplitudes, b.amplitudes))


def permute_parties(state, perm) -> PureState | DensityMatrix:
    """Reorder parties so that new party i is old party ``perm[i]``."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(state.n_parties)):
        raise ValueError(f"perm {perm} is not a permutation of {state.n_parties} parties")
    new_dims = tuple(state.party_dims[p] for p in perm)
    if isinstance(state, PureState):
        t = state.tensor().transpose(perm)
        return PureState(new_dims, t.reshape(-1))
    n = state.n_parties
    t = state.matrix.reshape(state.party_dims * 2)
    t = t.transpose(tuple(perm) + tuple(n + p for p in perm))
    total = int(np.prod(new_dims))
    return DensityMatrix(new_dims, t.reshape(total, total))


def group_parties(state, groups) -> PureState | DensityMatrix:
    """Merge consecutive parties into composite parties.

    ``groups`` must list every current party index exactly once, in order;
    each group becomes one party whose dimension is the product of its
    members.  Amplitudes/matrix entries are unchanged.
    """
    flat = [i for g in groups for i in g]
    if flat != list(range(state.n_parties)):
        raise ValueError("groups must partition the parties in their current order")
    new_dims = tuple(int(np.prod([state.party_dims[i] for i in g])) for g in groups)
    if isinstance(state, PureState):
        return PureState(new_dims, state.amplitudes)
    return DensityMatrix(new_dims, state.matrix)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every party not in ``keep`` (kept parties stay in order)."""
    keep = sorted({int(i) for i in keep})
    if not keep:
        raise ValueError("keep must be nonempty")
    if any(i < 0 or i >= rho.n_parties for i in keep):
        raise ValueError(f"keep indices out of range: {keep}")
    n = rho.n_parties
    t = rho.matrix.reshape(rho.party_dims * 2)
    drop = [i for i in range(n) if i not in keep]
    for count, i in enumerate(drop):
        axis = i - sum(1 for j in drop[:count] if j < i)
        t = np.trace(t, axis1=axis, axis2=axis + (n - count))
    new_dims = tuple(rho.party_dims[i] for i in keep)
    d = int(np.prod(new_dims))
    return DensityMatrix(new_dims, t.reshape(d, d))


def schmidt_spectrum(psi: PureState, beta: Bipartition) -> SchmidtSpectrum:
    """Squared Schmidt coefficients of ``psi`` across ``beta``, descending.

    The returned vector has one entry per dimension of the left side
    (trailing zeros included); the eigendecomposition itself runs on the
    smaller side of the split.
    """
    if beta.n_parties != psi.n_parties:
        raise ValueError("bipartition does not match the state's party count")
    left = sorted(beta.left)
    right = sorted(beta.right)
    t = psi.tensor().transpose(left + right)
    d_left = int(np.prod([psi.party_dims[i] for i in left]))
    d_right = psi.total_dim // d_left
    m = t.reshape(d_left, d_right)
    if d_left <= d_right:
        evals = np.linalg.eigvalsh(m @ m.conj().T)
    else:
        evals = np.linalg.eigvalsh(m.conj().T @ m)
        evals = np.concatenate([np.zeros(d_left - d_right), evals])
    np.clip(evals, 0.0, None, out=evals)
    return SchmidtSpectrum(evals / evals.sum())


def schmidt_rank(spec: SchmidtSpectrum, tau_rank: float | None = None) -> int:
    """Number of spectrum entries strictly above the rank cutoff."""
    tau = _resolve(tau_rank, tolerances.tau_rank)
    if tau <= 0:
        raise ValueError("tau_rank must be positive")
    return int(np.sum(spec.values > tau))


def apply_channel(rho: DensityMatrix, ch: LocalChannelFamily) -> DensityMatrix:
    """Convex mixture over the family of the tensor-product channel action."""
    if ch.input_dims != rho.party_dims:
        raise ValueError(
            f"channel input dims {ch.input_dims} do not match state dims {rho.party_dims}"
        )
    d_out = int(np.prod(ch.output_dims))
    out = np.zeros((d_out, d_out), dtype=complex)
    for weight, per_party in ch.components:
        for combo in product(*per_party):
            k = combo[0]
            for op in combo[1:]:
                k = np.kron(k, op)
            out += weight * (k @ rho.matrix @ k.conj().T)
    return DensityMatrix(ch.output_dims, out)


def born_box(state: DensityMatrix, meas):
    """Born-rule box p(outcomes|settings) = Tr[rho (tensor of POVM elements)].

    ``meas`` is either an object exposing ``povms()`` or a nested sequence
    ``[party][setting][outcome]`` of POVM element matrices.
    """
    from .boxes import Box

    elements = meas.povms() if hasattr(meas, "povms") else meas
    eps = tolerances.eps_norm
    if len(elements) != state.n_parties:
        raise ValueError("measurement party count does not match the state")
    for p, settings in enumerate(elements):
        d = state.party_dims[p]
        for setting in settings:
            tot = np.zeros((d, d), dtype=complex)
            for e in setting:
                e = np.asarray(e)
                if e.shape != (d, d):
                    raise ValueError(f"POVM element shape {e.shape} != ({d},{d}) for party {p}")
                tot = tot + e
            if float(np.max(np.abs(tot - np.eye(d)))) > 1e-8:
                raise ValueError(f"POVM for party {p} does not sum to identity")
    settings_pp = tuple(len(s) for s in elements)
    outcomes_pp = tuple(len(s[0]) for s in elements)
    table = np.empty(settings_pp + outcomes_pp)
    for xs in product(*[range(s) for s in settings_pp]):
        for outs in product(*[range(o) for o in outcomes_pp]):
            op = elements[0][xs[0]][outs[0]]
            for p in range(1, state.n_parties):
                op = np.kron(op, elements[p][xs[p]][outs[p]])
            table[xs + outs] = float(np.trace(state.matrix @ op).real)
    return Box(state.n_parties, settings_pp, outcomes_pp, table)


# ---------------------------------------------------------------------------
# Text file format: line 1 holds the space-separated party dims, then one
# `re im` pair per line, row-major (amplitudes for pure states, matrix
# entries for density matrices -- told apart by the entry count).

def save_state(path, state: PureState | DensityMatrix) -> None:
    data = state.amplitudes if isinstance(state, PureState) else state.matrix.reshape(-1)
    with open(path, "w") as fh:
        fh.write(" ".join(str(d) for d in state.party_dims) + "\n")
        for z in data:
            fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")


def load_state(path) -> PureState | DensityMatrix:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty state file: {path}")
    dims = _as_party_dims(lines[0].split())
    total = int(np.prod(dims))
    entries = []
    for ln in lines[1:]:
        re_s, im_s = ln.split()
        entries.append(complex(float(re_s), float(im_s)))
    if len(entries) == total:
        return PureState(dims, np.array(entries))
    if len(entries) == total * total:
        return DensityMatrix(dims, np.array(entries).reshape(total, total))
    raise ValueError(
        f"{path}: {len(entries)} entries match neither a pure state ({total}) "
        f"nor a density matrix ({total * total})"
    )
