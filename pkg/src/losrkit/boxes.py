"""Multipartite boxes, the local polytope, and the Bell functionals.

A box is a dense conditional-probability table p(outcomes|settings).
Membership in the local polytope is decided by linear programming over the
deterministic-strategy vertices, returning a convex-weight certificate for
local boxes and a separating hyperplane for nonlocal ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import linprog

from .config import _resolve, tolerances

# Outcome encoding used by every correlator: outcome 0 -> +1, outcome 1 -> -1.
def outcome_sign(a: int) -> int:
    return 1 - 2 * a


_PROB_FLOOR = -1e-12
_COND_SUM_EPS = 1e-9
MAX_VERTICES = 10**6


@dataclass(frozen=True)
class Box:
    """p(outcomes|settings) for n parties as a dense real table.

    ``table`` is indexed ``[x_1, ..., x_n, a_1, ..., a_n]`` (settings first).
    """

    n_parties: int
    settings_per_party: tuple[int, ...]
    outcomes_per_party: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        n = int(self.n_parties)
        settings = tuple(int(s) for s in self.settings_per_party)
        outcomes = tuple(int(o) for o in self.outcomes_per_party)
        if len(settings) != n or len(outcomes) != n:
            raise ValueError("settings/outcomes lists must have one entry per party")
        if any(s < 1 for s in settings) or any(o < 1 for o in outcomes):
            raise ValueError("settings and outcomes counts must be positive")
        table = np.asarray(self.table, dtype=float).reshape(settings + outcomes)
        if float(table.min()) < _PROB_FLOOR:
            raise ValueError(f"negative probability {table.min():.3g}")
        sums = table.sum(axis=tuple(range(n, 2 * n)))
        if float(np.max(np.abs(sums - 1.0))) > _COND_SUM_EPS:
            raise ValueError("some conditional distribution does not sum to 1")
        table.setflags(write=False)
        object.__setattr__(self, "n_parties", n)
        object.__setattr__(self, "settings_per_party", settings)
        object.__setattr__(self, "outcomes_per_party", outcomes)
        object.__setattr__(self, "table", table)

    @property
    def shape(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.settings_per_party, self.outcomes_per_party


def is_no_signaling(b: Box, eps: float = 1e-9) -> bool:
    """True iff every party's marginal is independent of the others' settings."""
    n = b.n_parties
    outcome_axes = tuple(range(n, 2 * n))
    for p in range(n):
        # marginal of party p's outcome: sum out all other outcomes
        other_out = tuple(ax for ax in outcome_axes if ax != n + p)
        marg = b.table.sum(axis=other_out)  # [x_1..x_n, a_p]
        # must not vary with any other party's setting
        other_set = tuple(q for q in range(n) if q != p)
        hi = marg.max(axis=other_set)
        lo = marg.min(axis=other_set)
        if float(np.max(hi - lo)) > eps:
            return False
    return True


def deterministic_vertices(settings_per_party, outcomes_per_party) -> list[Box]:
    """All deterministic local strategies of the scenario, as boxes."""
    settings = tuple(int(s) for s in settings_per_party)
    outcomes = tuple(int(o) for o in outcomes_per_party)
    n = len(settings)
    count = 1
    for s, o in zip(settings, outcomes):
        count *= o**s
    if count > MAX_VERTICES:
        raise ValueError(f"scenario has {count} deterministic strategies (cap {MAX_VERTICES})")
    per_party = [list(product(range(o), repeat=s)) for s, o in zip(settings, outcomes)]
    verts = []
    for strat in product(*per_party):
        table = np.zeros(settings + outcomes)
        for xs in product(*[range(s) for s in settings]):
            outs = tuple(strat[p][xs[p]] for p in range(n))
            table[xs + outs] = 1.0
        verts.append(Box(n, settings, outcomes, table))
    return verts


@dataclass(frozen=True)
class LocalModel:
    """Convex weights over deterministic vertices reproducing the box table."""

    weights: np.ndarray
    reconstruction_error: float


@dataclass(frozen=True)
class NonlocalCertificate:
    """Hyperplane separating the box from the local polytope.

    ``functional . table <= local_bound`` holds on every deterministic
    vertex while ``functional . table = value > local_bound`` on the box.
    """

    functional: np.ndarray
    local_bound: float
    value: float

    @property
    def margin(self) -> float:
        return self.value - self.local_bound


def local_membership(b: Box, margin_eps: float = 1e-9) -> LocalModel | NonlocalCertificate:
    """Decide membership of ``b`` in the local polytope, with a certificate.

    Stage 1 solves the separation LP (maximize the gap between the box and
    the polytope under a box-normalized functional).  A positive optimal gap
    yields a NonlocalCertificate.  Otherwise stage 2 recovers convex weights,
    maximizing the minimum weight to stabilize degenerate faces.
    """
    if not is_no_signaling(b):
        raise ValueError("local_membership requires a no-signaling box")
    verts = deterministic_vertices(b.settings_per_party, b.outcomes_per_party)
    v_mat = np.array([v.table.reshape(-1) for v in verts])
    p_flat = b.table.reshape(-1)
    n_verts, dim = v_mat.shape

    # separation LP over (f, c): max f.p - c  s.t.  f.V_j <= c, -1 <= f <= 1
    cost = np.concatenate([-p_flat, [1.0]])
    a_ub = np.hstack([v_mat, -np.ones((n_verts, 1))])
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=np.zeros(n_verts),
        bounds=[(-1, 1)] * dim + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"separation LP failed: {res.message}")
    gap = -res.fun
    if gap > margin_eps:
        f = res.x[:dim]
        bound = float(np.max(v_mat @ f))
        return NonlocalCertificate(f, bound, float(f @ p_flat))

    # weights LP over (w, t): max t  s.t. |V^T w - p| <= delta, sum w = 1, w >= t
    delta = 1e-9
    cost = np.zeros(n_verts + 1)
    cost[-1] = -1.0
    a_ub = np.vstack(
        [
            np.hstack([v_mat.T, np.zeros((dim, 1))]),
            np.hstack([-v_mat.T, np.zeros((dim, 1))]),
            np.hstack([-np.eye(n_verts), np.ones((n_verts, 1))]),
        ]
    )
    b_ub = np.concatenate([p_flat + delta, -p_flat + delta, np.zeros(n_verts)])
    a_eq = np.zeros((1, n_verts + 1))
    a_eq[0, :n_verts] = 1.0
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, 1)] * n_verts + [(0, 1)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"weight-recovery LP failed: {res.message}")
    w = np.clip(res.x[:n_verts], 0.0, None)
    w /= w.sum()
    err = float(np.max(np.abs(v_mat.T @ w - p_flat)))
    return LocalModel(w, err)


# ---------------------------------------------------------------------------
# Bell functionals


def _require_shape(b: Box, settings, outcomes, name: str) -> None:
    if b.shape != (tuple(settings), tuple(outcomes)):
        raise ValueError(f"{name} expects scenario {settings}/{outcomes}, got {b.shape}")


@dataclass(frozen=True)
class CHSH:
    """E00 + E01 + E10 - E11 with +/-1 outcome correlators."""

    def coefficients(self) -> np.ndarray:
        c = np.zeros((2, 2, 2, 2))
        for x, y, a, b in product(range(2), repeat=4):
            sign = -1 if (x, y) == (1, 1) else 1
            c[x, y, a, b] = sign * outcome_sign(a) * outcome_sign(b)
        return c

    def evaluate(self, box: Box) -> float:
        _require_shape(box, (2, 2), (2, 2), "CHSH")
        return float(np.sum(self.coefficients() * box.table))


@dataclass(frozen=True)
class TiltedCHSH:
    """alpha <A0> + CHSH; the marginal term is averaged over Bob's settings."""

    alpha: float

    def coefficients(self) -> np.ndarray:
        c = CHSH().coefficients()
        for y, a, b in product(range(2), repeat=3):
            c[0, y, a, b] += self.alpha * outcome_sign(a) / 2.0
        return c

    def evaluate(self, box: Box) -> float:
        _require_shape(box, (2, 2), (2, 2), "TiltedCHSH")
        return float(np.sum(self.coefficients() * box.table))


@dataclass(frozen=True)
class HardyScore:
    """Success probability of Hardy's argument, gated by its zero constraints.

    Convention: constraints p(0,0|0,1) = p(0,0|1,0) = p(1,1|1,1) = 0, the
    objective is p(0,0|0,0).  Labelings differ across the literature; all
    results here are internal to this convention.
    """

    zero_entries: tuple[tuple[int, int, int, int], ...] = (
        (0, 1, 0, 0),
        (1, 0, 0, 0),
        (1, 1, 1, 1),
    )
    objective_entry: tuple[int, int, int, int] = (0, 0, 0, 0)

    def constraint_violation(self, box: Box) -> float:
        _require_shape(box, (2, 2), (2, 2), "HardyScore")
        return float(max(box.table[e] for e in self.zero_entries))

    def evaluate(self, box: Box, eps_hardy: float | None = None) -> float:
        """The objective probability if all zero constraints hold, else 0."""
        eps = _resolve(eps_hardy, tolerances.eps_hardy)
        if self.constraint_violation(box) > eps:
            return 0.0
        return float(box.table[self.objective_entry])


@dataclass(frozen=True)
class MerminGHZ:
    """Mean probability, over the four even-parity settings, that the
    outcome parity matches the OR of the settings (a+b+c = x|y|z mod 2)."""

    def coefficients(self) -> np.ndarray:
        c = np.zeros((2,) * 6)
        for x, y, z in product(range(2), repeat=3):
            if (x + y + z) % 2:
                continue
            for a, b, o in product(range(2), repeat=3):
                if (a + b + o) % 2 == (x | y | z):
                    c[x, y, z, a, b, o] = 0.25
        return c

    def evaluate(self, box: Box) -> float:
        _require_shape(box, (2, 2, 2), (2, 2, 2), "MerminGHZ")
        return float(np.sum(self.coefficients() * box.table))

    def setting_win_probabilities(self, box: Box) -> dict[tuple[int, int, int], float]:
        """Per-setting success probabilities on the four even-parity settings."""
        _require_shape(box, (2, 2, 2), (2, 2, 2), "MerminGHZ")
        out = {}
        for x, y, z in product(range(2), repeat=3):
            if (x + y + z) % 2:
                continue
            tot = 0.0
            for a, b, o in product(range(2), repeat=3):
                if (a + b + o) % 2 == (x | y | z):
                    tot += box.table[x, y, z, a, b, o]
            out[(x, y, z)] = tot
        return out


BellFunctional = CHSH | TiltedCHSH | HardyScore | MerminGHZ


def evaluate(functional: BellFunctional, b: Box) -> float:
    return functional.evaluate(b)


def mix_boxes(b1: Box, b2: Box, t: float) -> Box:
    """(1-t) b1 + t b2 for boxes of the same scenario."""
    if b1.shape != b2.shape:
        raise ValueError("boxes live in different scenarios")
    return Box(
        b1.n_parties,
        b1.settings_per_party,
        b1.outcomes_per_party,
        (1.0 - t) * b1.table + t * b2.table,
    )


def uniform_box(settings_per_party, outcomes_per_party) -> Box:
    settings = tuple(int(s) for s in settings_per_party)
    outcomes = tuple(int(o) for o in outcomes_per_party)
    table = np.full(settings + outcomes, 1.0 / int(np.prod(outcomes)))
    return Box(len(settings), settings, outcomes, table)


# ---------------------------------------------------------------------------
# Text file format: header `n_parties settings... outcomes...`, then one line
# per settings tuple (lexicographic) listing that conditional distribution in
# lexicographic outcome order.

def save_box(path, b: Box) -> None:
    with open(path, "w") as fh:
        header = [str(b.n_parties)]
        header += [str(s) for s in b.settings_per_party]
        header += [str(o) for o in b.outcomes_per_party]
        fh.write(" ".join(header) + "\n")
        for xs in product(*[range(s) for s in b.settings_per_party]):
            row = b.table[xs].reshape(-1)
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_box(path) -> Box:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty box file: {path}")
    head = lines[0].split()
    n = int(head[0])
    if len(head) != 1 + 2 * n:
        raise ValueError(f"{path}: header needs n_parties, {n} settings and {n} outcomes")
    settings = tuple(int(v) for v in head[1 : 1 + n])
    outcomes = tuple(int(v) for v in head[1 + n :])
    rows = [np.array([float(v) for v in ln.split()]) for ln in lines[1:]]
    n_rows = int(np.prod(settings))
    if len(rows) != n_rows:
        raise ValueError(f"{path}: expected {n_rows} distribution rows, got {len(rows)}")
    table = np.empty(settings + outcomes)
    for row, xs in zip(rows, product(*[range(s) for s in settings])):
        if row.size != int(np.prod(outcomes)):
            raise ValueError(f"{path}: row for settings {xs} has wrong length")
        table[xs] = row.reshape(outcomes)
    return Box(n, settings, outcomes, table)
