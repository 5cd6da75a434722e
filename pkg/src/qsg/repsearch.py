"""Numerical search for finite-dimensional *-representations.

Self-adjoint generators are parametrized as Hermitian matrices (d² real
numbers); every other generator takes 2d² real numbers.  The objective is
the sum over relations of the squared Frobenius norm of the relation
evaluated at the matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .ncpoly import NCPoly
from .presentation import Presentation


class DimensionMismatch(ValueError):
    pass


@dataclass
class SearchConfig:
    restarts: int = 8
    max_iters: int = 200
    armijo: float = 1e-4
    shrink: float = 0.5
    initial_step: float = 1.0
    seed: int = 0
    tolerance: float = 1e-10
    init_scale: float = 0.7
    polish: bool = True


@dataclass
class RepPoint:
    d: int
    matrices: dict  # generator name -> complex (d, d) array
    residual: float = 0.0
    restart: int = -1

    def export(self) -> str:
        lines = [f"dim {self.d}", f"residual {self.residual!r}"]
        for g, m in self.matrices.items():
            lines.append(f"matrix {g}")
            for row in m:
                lines.append(" ".join(_ctext(z) for z in row))
        return "\n".join(lines) + "\n"


def _ctext(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "-" if np.signbit(im) else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


class NotFound:
    """Budget statement: no certificate within the configured search."""

    def __init__(self, reason: str = "", best: RepPoint | None = None):
        self.reason = reason
        self.best = best

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotFound({self.reason!r})"


# ---------------------------------------------------------------------------
# Parametrization
# ---------------------------------------------------------------------------


class Layout:
    """Map between a flat real vector and per-generator matrices."""

    def __init__(self, P: Presentation, d: int):
        self.P, self.d = P, d
        self.gens = P.generators
        self.slices = {}
        pos = 0
        for g, sa in self.gens:
            size = d * d if sa else 2 * d * d
            self.slices[g] = (pos, pos + size, sa)
            pos += size
        self.size = pos
        self.iu = np.triu_indices(d, 1)

    def matrices(self, x: np.ndarray) -> dict:
        d, out = self.d, {}
        for g, (a, b, sa) in self.slices.items():
            v = x[a:b]
            if sa:
                m = np.diag(v[:d].astype(complex))
                k = len(self.iu[0])
                off = v[d:d + k] + 1j * v[d + k:d + 2 * k]
                m[self.iu] = off
                m[(self.iu[1], self.iu[0])] = off.conj()
            else:
                m = (v[: d * d] + 1j * v[d * d:]).reshape(d, d)
            out[g] = m
        return out

    def vector(self, mats: dict) -> np.ndarray:
        d, x = self.d, np.zeros(self.size)
        for g, (a, b, sa) in self.slices.items():
            m = np.asarray(mats[g], dtype=complex)
            if m.shape != (d, d):
                raise DimensionMismatch(f"{g}: expected {d}x{d}, got {m.shape}")
            if sa:
                k = len(self.iu[0])
                x[a:a + d] = m.diagonal().real
                x[a + d:a + d + k] = m[self.iu].real
                x[a + d + k:b] = m[self.iu].imag
            else:
                x[a:a + d * d] = m.real.ravel()
                x[a + d * d:b] = m.imag.ravel()
        return x

    def pull_back(self, K: dict) -> np.ndarray:
        """Real gradient from ``K_g`` with ``d f = 2 Re tr(K_g dM_g)``."""
        d, grad = self.d, np.zeros(self.size)
        for g, (a, b, sa) in self.slices.items():
            k = K.get(g)
            if k is None:
                continue
            gx, gy = 2 * k.T.real, -2 * k.T.imag
            if sa:
                n = len(self.iu[0])
                grad[a:a + d] = gx.diagonal()
                lo = (self.iu[1], self.iu[0])
                grad[a + d:a + d + n] = gx[self.iu] + gx[lo]
                grad[a + d + n:b] = gy[self.iu] - gy[lo]
            else:
                grad[a:a + d * d] = gx.ravel()
                grad[a + d * d:b] = gy.ravel()
        return grad


def _compiled(P: Presentation, polys=None) -> list:
    polys = P.relations if polys is None else polys
    return [[(complex(c), w) for w, c in p.terms.items()] for p in polys]


def _letter_mats(P: Presentation, mats: dict) -> dict:
    out = {}
    for g, sa in P.generators:
        k = P.alphabet.index(g)
        out[2 * k] = mats[g]
        out[2 * k + 1] = mats[g] if sa else mats[g].conj().T
    return out


def _word(letters: dict, w, d):
    m = np.eye(d, dtype=complex)
    for x in w:
        m = m @ letters[x]
    return m


def _check_dims(P: Presentation, mats: dict, d: int):
    for g, _ in P.generators:
        if g not in mats:
            raise DimensionMismatch(f"missing matrix for {g}")
        if np.shape(mats[g]) != (d, d):
            raise DimensionMismatch(f"{g}: expected {d}x{d}, got {np.shape(mats[g])}")


def evaluate_poly(P: Presentation, R: RepPoint, p: NCPoly) -> np.ndarray:
    _check_dims(P, R.matrices, R.d)
    letters = _letter_mats(P, R.matrices)
    out = np.zeros((R.d, R.d), dtype=complex)
    for w, c in p.terms.items():
        out += complex(c) * _word(letters, w, R.d)
    return out


def _relation_values(compiled, letters, d) -> list:
    vals = []
    for terms in compiled:
        r = np.zeros((d, d), dtype=complex)
        for c, w in terms:
            r += c * _word(letters, w, d)
        vals.append(r)
    return vals


def residual(P: Presentation, R: RepPoint, _compiled_rels=None) -> float:
    """Sum over relations of the squared Frobenius norm at ``R``."""
    _check_dims(P, R.matrices, R.d)
    comp = _compiled_rels or _compiled(P)
    letters = _letter_mats(P, R.matrices)
    return float(sum(np.vdot(r, r).real for r in _relation_values(comp, letters, R.d)))


def _value_and_grad(P, layout: Layout, comp, x):
    d = layout.d
    mats = layout.matrices(x)
    letters = _letter_mats(P, mats)
    sa_codes = {}
    for g, sa in P.generators:
        k = P.alphabet.index(g)
        sa_codes[2 * k] = (g, False)
        sa_codes[2 * k + 1] = (g, not sa)
    f, K = 0.0, {}
    eye = np.eye(d, dtype=complex)
    for terms in comp:
        r = np.zeros((d, d), dtype=complex)
        for c, w in terms:
            r += c * _word(letters, w, d)
        f += float(np.vdot(r, r).real)
        rh = r.conj().T
        for c, w in terms:
            # prefix/suffix products around each letter occurrence
            pre = [eye]
            for x_ in w:
                pre.append(pre[-1] @ letters[x_])
            suf = [eye]
            for x_ in reversed(w):
                suf.append(letters[x_] @ suf[-1])
            suf.reverse()
            for pos, x_ in enumerate(w):
                A, B = c * pre[pos], suf[pos + 1]
                g, conj = sa_codes[x_]
                # d||r||² = 2 Re tr(r^H A dM B); a starred letter contributes via dM^H
                term = A.conj().T @ r @ B.conj().T if conj else B @ rh @ A
                K[g] = K[g] + term if g in K else term
    return f, layout.pull_back(K)


def residual_gradient(P: Presentation, R: RepPoint) -> np.ndarray:
    """Gradient over the independent real coordinates (see ``Layout``)."""
    _check_dims(P, R.matrices, R.d)
    layout = Layout(P, R.d)
    return _value_and_grad(P, layout, _compiled(P), layout.vector(R.matrices))[1]


def residual_vector(P: Presentation, layout: Layout, comp, x) -> np.ndarray:
    letters = _letter_mats(P, layout.matrices(x))
    vals = _relation_values(comp, letters, layout.d)
    if not vals:
        return np.zeros(1)
    flat = np.concatenate([v.ravel() for v in vals])
    return np.concatenate([flat.real, flat.imag])


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def _descend(P, layout, comp, x, cfg: SearchConfig):
    f, g = _value_and_grad(P, layout, comp, x)
    step = cfg.initial_step
    for _ in range(cfg.max_iters):
        if f < cfg.tolerance * 1e-3:
            break
        gg = float(g @ g)
        if gg == 0.0:
            break
        while True:
            xn = x - step * g
            fn, gn = _value_and_grad(P, layout, comp, xn)
            if fn <= f - cfg.armijo * step * gg or step < 1e-14:
                break
            step *= cfg.shrink
        if fn > f:
            break
        x, f, g = xn, fn, gn
        step = min(step / cfg.shrink, 1e3)
    return x, f


def _polish(P, layout, comp, x):
    if not comp:
        return x
    sol = least_squares(
        lambda v: residual_vector(P, layout, comp, v), x, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
    )
    return sol.x


def _run_restart(P, layout, comp, d, cfg: SearchConfig, seed_seq, index: int) -> RepPoint:
    rng = np.random.default_rng(seed_seq)
    x = rng.normal(scale=cfg.init_scale, size=layout.size)
    x, f = _descend(P, layout, comp, x, cfg)
    if cfg.polish and f > 0:
        y = _polish(P, layout, comp, x)
        fy = float(np.sum(residual_vector(P, layout, comp, y) ** 2))
        if fy < f:
            x = y
    mats = layout.matrices(x)
    R = RepPoint(d, mats, 0.0, index)
    R.residual = residual(P, R, comp)
    return R


def restart_points(P: Presentation, d: int, cfg: SearchConfig):
    """One local minimum per restart, each from its own seed stream."""
    if d < 1:
        raise DimensionMismatch("dimension must be positive")
    layout = Layout(P, d)
    comp = _compiled(P)
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for k, s in enumerate(seqs):
        yield _run_restart(P, layout, comp, d, cfg, s, k)


def search_rep(P: Presentation, d: int, cfg: SearchConfig | None = None) -> RepPoint:
    """Best local minimum over the restarts (ties go to the lower index).

    Later restarts are skipped once a point has residual below
    ``tolerance²``; the outcome is still fixed by ``cfg``.
    """
    cfg = cfg or SearchConfig()
    best = None
    for R in restart_points(P, d, cfg):
        if best is None or R.residual < best.residual:
            best = R
        if best.residual <= cfg.tolerance**2:
            break
    return best


def _as_poly(P: Presentation, g) -> NCPoly:
    return P.poly(g) if isinstance(g, str) else g


def commutator_norm(P: Presentation, R: RepPoint, g, h) -> float:
    a, b = _as_poly(P, g), _as_poly(P, h)
    return float(np.linalg.norm(evaluate_poly(P, R, a * b - b * a)))


@dataclass
class Certificate:
    point: RepPoint
    commutator_norm: float
    recomputed_residual: float
    notes: list = field(default_factory=list)

    def __bool__(self):
        return True


def certify_noncommuting_pair(
    P: Presentation, g, h, d: int, cfg: SearchConfig | None = None, tol_rel: float = 1e-10, tol_nc: float = 1e-1
):
    """A representation with small residual where ``g`` and ``h`` fail to commute.

    Every restart is examined, not only the best one.  NotFound only says
    the budget ran out.
    """
    cfg = cfg or SearchConfig()
    best = None
    for R in restart_points(P, d, cfg):
        if best is None or R.residual < best.residual:
            best = R
        if R.residual >= tol_rel:
            continue
        nc = commutator_norm(P, R, g, h)
        if nc > tol_nc:
            again = residual(P, RepPoint(R.d, {k: v.copy() for k, v in R.matrices.items()}))
            if again < 2 * tol_rel:
                return Certificate(R, nc, again)
    return NotFound(f"no certificate in {cfg.restarts} restarts at d = {d}", best)
