"""Discrete-memoryless evaluation of the mutual-information regions.

Joint pmfs are dense tensors over the canonical variable order
(U, V, W1, W3, X1, X2, Y2, Y3); with the alphabet caps this stays at
desk scale.  All information quantities are in bits with 0 log 0 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ScalarChannel
from .mimo import MartonTerms, marton_region
from .regions import RateRegion

VARS = ("u", "v", "w1", "w3", "x1", "x2", "y2", "y3")
AXIS = {name: i for i, name in enumerate(VARS)}
NORM_TOL = 1e-6
CHANNEL_ALPHABET_CAP = 4


def _renormalize(t: np.ndarray, axes, what: str) -> np.ndarray:
    """Renormalize conditional slices; deviations beyond NORM_TOL are errors."""
    t = np.asarray(t, dtype=float)
    if np.any(t < -1e-15):
        raise ValueError(f"{what} has negative entries")
    s = t.sum(axis=axes, keepdims=True)
    if np.any(np.abs(s - 1.0) > NORM_TOL):
        raise ValueError(f"{what} slices deviate from normalization by more than {NORM_TOL}")
    return t / s


@dataclass(frozen=True)
class ChannelPmf:
    """Transition tensor p[y2, y3, x1, x2]."""

    p: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.p, dtype=float)
        if t.ndim != 4:
            raise ValueError("channel pmf must be a 4-way tensor (y2, y3, x1, x2)")
        if max(t.shape) > CHANNEL_ALPHABET_CAP:
            raise ValueError(f"channel alphabets are capped at {CHANNEL_ALPHABET_CAP}")
        object.__setattr__(self, "p", _renormalize(t, (0, 1), "channel pmf"))

    @property
    def nx1(self) -> int:
        return self.p.shape[2]

    @property
    def nx2(self) -> int:
        return self.p.shape[3]


def default_aux_cap(nx1: int, nx2: int) -> int:
    # the stated bound reads |X1| twice; |X1| |X2| + 1 is used, configurable
    return nx1 * nx2 + 3


@dataclass(frozen=True)
class InputFactorization:
    """Input distribution p(u) p(v, w1, w3, x1 | u) p(x2 | u)."""

    p_u: np.ndarray
    p_vwx_u: np.ndarray  # (U, V, W1, W3, X1)
    p_x2_u: np.ndarray  # (U, X2)
    aux_cap: int | None = None

    def __post_init__(self):
        pu = np.asarray(self.p_u, dtype=float)
        pv = np.asarray(self.p_vwx_u, dtype=float)
        px = np.asarray(self.p_x2_u, dtype=float)
        if pu.ndim != 1 or pv.ndim != 5 or px.ndim != 2:
            raise ValueError("factorization tensors have wrong ranks")
        if pv.shape[0] != pu.shape[0] or px.shape[0] != pu.shape[0]:
            raise ValueError("factor tensors disagree on |U|")
        object.__setattr__(self, "p_u", _renormalize(pu, 0, "p(u)"))
        object.__setattr__(self, "p_vwx_u", _renormalize(pv, (1, 2, 3, 4), "p(v,w1,w3,x1|u)"))
        object.__setattr__(self, "p_x2_u", _renormalize(px, 1, "p(x2|u)"))
        cap = self.aux_cap or default_aux_cap(pv.shape[4], px.shape[1])
        if max(pu.shape[0], pv.shape[1], pv.shape[2], pv.shape[3]) > cap:
            raise ValueError(f"auxiliary alphabets exceed the cardinality cap {cap}")

    @property
    def sizes(self) -> tuple:
        return (self.p_u.shape[0],) + self.p_vwx_u.shape[1:] + (self.p_x2_u.shape[1],)


def joint_pmf(ch: ChannelPmf, f: InputFactorization) -> np.ndarray:
    """Full tensor over (U, V, W1, W3, X1, X2, Y2, Y3)."""
    if ch.nx1 != f.p_vwx_u.shape[4] or ch.nx2 != f.p_x2_u.shape[1]:
        raise ValueError("channel and input alphabets disagree")
    j = np.einsum("u,uvwtx,uz,yYxz->uvwtxzyY", f.p_u, f.p_vwx_u, f.p_x2_u, ch.p,
                  optimize=True)
    return j


def entropy(j: np.ndarray, axes) -> float:
    """Joint entropy in bits of the variables on the given axes."""
    keep = tuple(sorted(axes))
    drop = tuple(i for i in range(j.ndim) if i not in keep)
    marg = j.sum(axis=drop) if drop else j
    p = marg.ravel()
    p = p[p > 1e-300]
    return float(-(p * np.log2(p)).sum())


def mutual_information(j: np.ndarray, a, b, c=()) -> float:
    """Conditional mutual information I(A; B | C) in bits over a joint tensor.

    Variable sets are names from VARS or axis indices; A, B, C must be disjoint.
    """
    def to_axes(v):
        if isinstance(v, (str, int)):
            v = (v,)
        return tuple(AXIS[x] if isinstance(x, str) else int(x) for x in v)

    a, b, c = to_axes(a), to_axes(b), to_axes(c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError("variable sets must be disjoint")
    val = entropy(j, a + c) + entropy(j, b + c) - entropy(j, a + b + c) - entropy(j, c)
    return max(0.0, val)


# --------------------------------------------------------------------------
# regions
# --------------------------------------------------------------------------

def region_thm1(ch: ChannelPmf, f: InputFactorization) -> RateRegion:
    """Two-message inner bound; requires trivial W1 and W3 alphabets."""
    if f.p_vwx_u.shape[2] != 1 or f.p_vwx_u.shape[3] != 1:
        raise ValueError("the two-message inner bound uses singleton W1, W3")
    j = joint_pmf(ch, f)
    r1 = mutual_information(j, "x1", "y2", ("u", "x2"))
    r2 = mutual_information(j, "x2", "y3", ("u", "v"))
    rsum = (mutual_information(j, "x1", "y2", ("u", "v", "x2"))
            + mutual_information(j, ("u", "v", "x2"), "y3"))
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), r1), ((0.0, 1.0), r2), ((1.0, 1.0), rsum)])


def region_thm2_outer(ch: ChannelPmf, p_x1x2: np.ndarray) -> RateRegion:
    """Two-message outer bound for one joint input pmf p(x1, x2)."""
    p = _renormalize(np.asarray(p_x1x2, dtype=float), (0, 1), "p(x1,x2)")
    j = np.einsum("xz,yYxz->xzyY", p, ch.p, optimize=True)
    x1, x2, y2, y3 = 0, 1, 2, 3
    r1 = mutual_information(j, x1, y2, (x2,))
    r2 = mutual_information(j, x2, y3, (x1,))
    rsum = mutual_information(j, x1, (y2, y3), (x2,)) + mutual_information(j, x2, y3)
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), r1), ((0.0, 1.0), r2), ((1.0, 1.0), rsum)])


def marton_terms(ch: ChannelPmf, f: InputFactorization) -> MartonTerms:
    j = joint_pmf(ch, f)
    return MartonTerms(
        mu1=mutual_information(j, "w1", "w3", ("u", "v")),
        mu2=mutual_information(j, "w1", "y2", ("u", "v", "x2")),
        mu3=mutual_information(j, ("v", "w1"), "y2", ("u", "x2")),
        mu4=mutual_information(j, "w3", "y3", ("u", "v", "x2")),
        mu5=mutual_information(j, "x2", "y3", ("u", "v", "w3")),
        mu6=mutual_information(j, ("w3", "x2"), "y3", ("u", "v")),
        mu7=mutual_information(j, ("u", "v", "w3", "x2"), "y3"),
    )


def region_thm3(ch: ChannelPmf, f: InputFactorization) -> RateRegion:
    """Marton-coded three-message inner bound for one factorization."""
    return marton_region(marton_terms(ch, f))


def region_thm5_outer(ch: ChannelPmf, p_uvx1x2: np.ndarray) -> RateRegion:
    """Three-message genie-aided outer bound for one joint p(u, v, x1, x2)."""
    p = _renormalize(np.asarray(p_uvx1x2, dtype=float), (0, 1, 2, 3), "p(u,v,x1,x2)")
    j = np.einsum("uvxz,yYxz->uvxzyY", p, ch.p, optimize=True)
    u, v, x1, x2, y2, y3 = range(6)
    r1a = mutual_information(j, u, y2, (x2,))
    r1b = mutual_information(j, x1, (y2, y3), (v, x2))
    r2 = mutual_information(j, x2, y3, (x1,))
    r3a = mutual_information(j, x1, (y2, y3), (u, x2))
    r3b = mutual_information(j, v, (y2, y3), (x2,))
    r13 = mutual_information(j, x1, (y2, y3), (x2,))
    r23 = mutual_information(j, (x1, x2), y3)
    rsum = r13 + mutual_information(j, x2, y3)
    return RateRegion.from_halfspaces([
        ((1, 0, 0), r1a), ((1, 0, 0), r1b), ((0, 1, 0), r2),
        ((0, 0, 1), r3a), ((0, 0, 1), r3b),
        ((1, 0, 1), r13), ((0, 1, 1), r23), ((1, 1, 1), rsum)])


def corollary_factorization(f: InputFactorization, which: int) -> InputFactorization:
    """Specialize a two-message factorization p(u)p(v,x1|u)p(x2|u) to the
    corollary settings: which=1 pins W3 = X1 (D2D splitting), which=2 pins
    W1 = X1 (uplink splitting); the other auxiliary stays a singleton."""
    if f.p_vwx_u.shape[2] != 1 or f.p_vwx_u.shape[3] != 1:
        raise ValueError("start from a factorization with singleton W1, W3")
    nu, nv, _, _, nx1 = f.p_vwx_u.shape
    if which == 1:
        pv = np.zeros((nu, nv, 1, nx1, nx1))
        for x in range(nx1):
            pv[:, :, 0, x, x] = f.p_vwx_u[:, :, 0, 0, x]
    elif which == 2:
        pv = np.zeros((nu, nv, nx1, 1, nx1))
        for x in range(nx1):
            pv[:, :, x, 0, x] = f.p_vwx_u[:, :, 0, 0, x]
    else:
        raise ValueError("which must be 1 or 2")
    return InputFactorization(f.p_u, pv, f.p_x2_u, aux_cap=max(f.sizes) + 1)


def thm5_joint_from_factorization(f: InputFactorization) -> np.ndarray:
    """Genie joint for the outer bound matched to an inner factorization:
    U <- (U, V, W1) and V <- (U, V, W3) as composite variables."""
    nu, nv, nw1, nw3, nx1 = f.p_vwx_u.shape
    nx2 = f.p_x2_u.shape[1]
    j = np.einsum("u,uvwtx,uz->uvwtxz", f.p_u, f.p_vwx_u, f.p_x2_u, optimize=True)
    out = np.zeros((nu * nv * nw1, nu * nv * nw3, nx1, nx2))
    for u in range(nu):
        for v in range(nv):
            for w1 in range(nw1):
                for w3 in range(nw3):
                    out[(u * nv + v) * nw1 + w1, (u * nv + v) * nw3 + w3] += j[u, v, w1, w3]
    return out


# --------------------------------------------------------------------------
# containment check for the coordination constraint
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Prop2Report:
    status: str  # "pass", "fail" or "skipped"
    mu: MartonTerms | None = None
    witness: np.ndarray | None = None
    detail: str = ""


def check_prop2(ch: ChannelPmf, f: InputFactorization, tol: float = 1e-9) -> Prop2Report:
    """Verify the containment chain behind dropping the mu1 <= mu2 + mu4
    constraint: unconstrained region (13) inside the reduced-form region,
    itself inside the region of the same pmf with W1 marginalized out."""
    m = marton_terms(ch, f)
    if m.mu1 <= m.mu2 + m.mu4 + 1e-12:
        return Prop2Report(status="skipped", mu=m, detail="mu1 <= mu2 + mu4")
    j = joint_pmf(ch, f)
    unconstrained = RateRegion.from_halfspaces([
        ((1, 0, 0), max(0.0, m.mu3)),
        ((0, 1, 0), max(0.0, m.mu5)),
        ((0, 1, 0), max(0.0, m.mu2 + m.mu6 - m.mu1)),
        ((1, 0, 1), max(0.0, m.mu3 + m.mu4 - m.mu1)),
        ((0, 1, 1), max(0.0, m.mu7)),
        ((1, 1, 1), max(0.0, m.mu2 + m.mu7 - m.mu1)),
        ((1, 1, 1), max(0.0, m.mu3 + m.mu6 - m.mu1)),
    ])
    r2_prime = RateRegion.from_halfspaces([
        ((0, 1, 0), m.mu5),
        ((0, 1, 0), mutual_information(j, "x2", "y3", ("u", "v"))),
        ((1, 0, 1), mutual_information(j, "v", "y2", ("u", "x2"))),
        ((1, 1, 1), mutual_information(j, ("u", "v", "x2"), "y3")),
    ])
    reduced = InputFactorization(f.p_u, f.p_vwx_u.sum(axis=2, keepdims=True),
                                 f.p_x2_u, aux_cap=f.aux_cap)
    dropped = region_thm3(ch, reduced)
    for inner, outer, name in ((unconstrained, r2_prime, "(13) in R2'"),
                               (r2_prime, dropped, "R2' in W1-dropped region")):
        for _, vert in inner.all_vertices():
            if not outer.membership(vert, tol=tol):
                return Prop2Report(status="fail", mu=m, witness=vert,
                                   detail=f"{name} violated")
    return Prop2Report(status="pass", mu=m)


# --------------------------------------------------------------------------
# random instances
# --------------------------------------------------------------------------

def random_channel(rng: np.random.Generator, nx1=2, nx2=2, ny2=2, ny3=2,
                   concentration: float = 1.0) -> ChannelPmf:
    p = rng.gamma(concentration, size=(ny2, ny3, nx1, nx2))
    return ChannelPmf(p / p.sum(axis=(0, 1), keepdims=True))


def random_factorization(rng: np.random.Generator, nu=2, nv=2, nw1=2, nw3=2,
                         nx1=2, nx2=2, concentration: float = 1.0) -> InputFactorization:
    pu = rng.gamma(concentration, size=nu)
    pv = rng.gamma(concentration, size=(nu, nv, nw1, nw3, nx1))
    px = rng.gamma(concentration, size=(nu, nx2))
    return InputFactorization(pu / pu.sum(),
                              pv / pv.sum(axis=(1, 2, 3, 4), keepdims=True),
                              px / px.sum(axis=1, keepdims=True),
                              aux_cap=max(nu, nv, nw1, nw3, nx1 * nx2 + 3))


def search_factorizations(ch: ChannelPmf, objective, draws: int, seed: int = 0,
                          sizes: dict | None = None):
    """Seeded Dirichlet-style random search over factorizations; returns the
    best (factorization, objective value) pair."""
    rng = np.random.default_rng(seed)
    sizes = sizes or {}
    best = None
    for _ in range(max(1, draws)):
        f = random_factorization(rng, nx1=ch.nx1, nx2=ch.nx2, **sizes)
        val = objective(ch, f)
        if best is None or val > best[1]:
            best = (f, val)
    return best


# --------------------------------------------------------------------------
# Gaussian sufficient-statistic identity (Monte-Carlo sanity check)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma1Report:
    max_deviation: float
    stderr: float
    analytic_lhs: float
    analytic_rhs: float
    mc_lhs: float
    mc_rhs: float


def _gaussian_cmi(cov: np.ndarray, a, b, c) -> float:
    """I(A; B | C) in bits for circularly symmetric Gaussians from a complex
    covariance matrix (indices select blocks)."""

    def logdet(idx):
        if not idx:
            return 0.0
        sub = cov[np.ix_(idx, idx)]
        sign, val = np.linalg.slogdet(sub)
        return val * LOG2E_

    a, b, c = list(a), list(b), list(c)
    return logdet(a + c) + logdet(b + c) - logdet(a + b + c) - logdet(c)


LOG2E_ = math.log2(math.e)


def lemma1_identity_check(ch: ScalarChannel, samples: int = 10 ** 6,
                          seed: int = 0) -> Lemma1Report:
    """Check I(X1; Y2, Y3 | U, X2) = I(X1; Y' | U, X2) for the matched-filter
    combination Y' of the two receive signals, under jointly Gaussian
    (U, X1, X2) with a random covariance.

    Both sides are computed analytically from covariance algebra and via
    Monte-Carlo averaging of conditional-density log ratios; the report
    carries the largest pairwise deviation.
    """
    if samples < 10 ** 4:
        raise ValueError("need at least 1e4 samples")
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / math.sqrt(2)
    base = a @ a.conj().T + 0.05 * np.eye(3)
    scale = np.diag([1.0, math.sqrt(ch.p1), math.sqrt(ch.p2)]) \
        / np.sqrt(np.diag(base.real))
    cov_uxx = scale @ base @ scale.conj().T  # (U, X1, X2) with matched powers

    g21, g31, g32 = ch.g21, ch.g31, ch.g32
    s2 = ch.sigma2
    norm = math.sqrt(abs(g21) ** 2 + abs(g31) ** 2)
    # linear maps to (U, X1, X2, Y2, Y3, Y') driven by (U, X1, X2, Z2, Z3)
    m = np.zeros((6, 5), dtype=complex)
    m[0, 0] = m[1, 1] = m[2, 2] = 1.0
    m[3, 1], m[3, 3] = g21, 1.0
    m[4, 1], m[4, 2], m[4, 4] = g31, g32, 1.0
    m[5] = (np.conj(g21) * m[3] + np.conj(g31) * m[4]) / norm
    cov_in = np.zeros((5, 5), dtype=complex)
    cov_in[:3, :3] = cov_uxx
    cov_in[3, 3] = cov_in[4, 4] = s2
    cov = m @ cov_in @ m.conj().T
    u_i, x1_i, x2_i, y2_i, y3_i, yp_i = range(6)
    an_lhs = _gaussian_cmi(cov, [x1_i], [y2_i, y3_i], [u_i, x2_i])
    an_rhs = _gaussian_cmi(cov, [x1_i], [yp_i], [u_i, x2_i])

    # Monte-Carlo: sample the driving variables, average the density log-ratio
    chol = np.linalg.cholesky(cov_uxx + 1e-12 * np.eye(3))
    zs = (rng.standard_normal((samples, 3)) + 1j * rng.standard_normal((samples, 3))) \
        / math.sqrt(2)
    uxx = zs @ chol.T
    noise = (rng.standard_normal((samples, 2)) + 1j * rng.standard_normal((samples, 2))) \
        * math.sqrt(s2 / 2)
    drive = np.hstack([uxx, noise])
    obs = drive @ m.T  # (samples, 6)

    def mc_cmi(target_idx):
        num = _conditional_logpdf(cov, obs, target_idx, [x1_i, u_i, x2_i])
        den = _conditional_logpdf(cov, obs, target_idx, [u_i, x2_i])
        vals = (num - den) * LOG2E_
        return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))

    mc_lhs, se1 = mc_cmi([y2_i, y3_i])
    mc_rhs, se2 = mc_cmi([yp_i])
    stderr = max(se1, se2)
    devs = [abs(an_lhs - an_rhs), abs(mc_lhs - an_lhs), abs(mc_rhs - an_rhs),
            abs(mc_lhs - mc_rhs)]
    return Lemma1Report(max_deviation=float(max(devs)), stderr=stderr,
                        analytic_lhs=an_lhs, analytic_rhs=an_rhs,
                        mc_lhs=mc_lhs, mc_rhs=mc_rhs)


def _conditional_logpdf(cov: np.ndarray, obs: np.ndarray, target, given) -> np.ndarray:
    """log p(target | given) natural-log densities for circular Gaussians."""
    t, g = list(target), list(given)
    ctt = cov[np.ix_(t, t)]
    if g:
        cgg = cov[np.ix_(g, g)]
        ctg = cov[np.ix_(t, g)]
        gain = ctg @ np.linalg.inv(cgg)
        mean = obs[:, g] @ gain.T
        resid_cov = ctt - gain @ ctg.conj().T
    else:
        mean = 0.0
        resid_cov = ctt
    resid_cov = 0.5 * (resid_cov + resid_cov.conj().T)
    diff = obs[:, t] - mean
    inv = np.linalg.inv(resid_cov)
    quad = np.einsum("ni,ij,nj->n", diff.conj(), inv, diff).real
    sign, logdet = np.linalg.slogdet(resid_cov)
    k = len(t)
    return -quad - logdet - k * math.log(math.pi)
