"""Vector-Gaussian dirty-paper-coding regions.

Three beamformed evaluations of the Marton-style inner bound, differing in
what the private-stream encoders treat as dirt versus noise, plus a covariance
assignment for the no-D2D case with a matching vector outer bound.  All
log-determinants are regularized with +eps*I so rank-deficient covariance
draws stay evaluable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import MimoChannel
from .regions import RateRegion

TRACE_TOL = 1e-9
_MU_GUARD = -1e-6

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class MartonTerms:
    """The seven mutual-information values feeding the Marton-style region."""

    mu1: float
    mu2: float
    mu3: float
    mu4: float
    mu5: float
    mu6: float
    mu7: float

    def as_tuple(self):
        return (self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu6, self.mu7)


class CovarianceSet:
    """Beamformer set (lambda_a..lambda_f) with derived covariances.

    Shapes: a, b, c, d live at node 1 (c = uplink-private, d = D2D-private);
    e, f at node 2 (f = downlink message).  a and e share the common relay
    dimension min(L1_tx, L2_tx).
    """

    SLOTS = ("a", "b", "c", "d", "e", "f")

    def __init__(self, ch: MimoChannel, lam_a, lam_b, lam_c, lam_d, lam_e, lam_f):
        self.ch = ch
        l1, l2t = ch.l1_tx, ch.l2_tx
        shared = min(l1, l2t)
        expected = {"a": (l1, shared), "b": (l1, l1), "c": (l1, l1),
                    "d": (l1, l1), "e": (l2t, shared), "f": (l2t, l2t)}
        self.lams = {}
        for name, lam in zip(self.SLOTS, (lam_a, lam_b, lam_c, lam_d, lam_e, lam_f)):
            lam = np.asarray(lam, dtype=complex)
            if lam.shape != expected[name]:
                raise ValueError(f"lambda_{name} must have shape {expected[name]}, "
                                 f"got {lam.shape}")
            self.lams[name] = lam
        t1 = sum(self.trace(s) for s in "abcd")
        t2 = sum(self.trace(s) for s in "ef")
        if t1 > ch.p1 + TRACE_TOL * max(1.0, ch.p1):
            raise ValueError(f"node-1 trace budget exceeded: {t1} > {ch.p1}")
        if t2 > ch.p2 + TRACE_TOL * max(1.0, ch.p2):
            raise ValueError(f"node-2 trace budget exceeded: {t2} > {ch.p2}")

    def lam(self, slot: str) -> np.ndarray:
        return self.lams[slot]

    def sigma(self, slot: str) -> np.ndarray:
        lam = self.lams[slot]
        return lam @ lam.conj().T

    def trace(self, slot: str) -> float:
        return float(np.sum(np.abs(self.lams[slot]) ** 2))

    def with_zero(self, *slots: str) -> "CovarianceSet":
        lams = dict(self.lams)
        for s in slots:
            lams[s] = np.zeros_like(lams[s])
        return CovarianceSet.build(self.ch, **lams)

    @classmethod
    def build(cls, ch: MimoChannel, **lams) -> "CovarianceSet":
        return cls(ch, lams["a"], lams["b"], lams["c"], lams["d"], lams["e"], lams["f"])

    @classmethod
    def zeros(cls, ch: MimoChannel) -> "CovarianceSet":
        l1, l2t = ch.l1_tx, ch.l2_tx
        shared = min(l1, l2t)
        return cls.build(ch, a=np.zeros((l1, shared)), b=np.zeros((l1, l1)),
                         c=np.zeros((l1, l1)), d=np.zeros((l1, l1)),
                         e=np.zeros((l2t, shared)), f=np.zeros((l2t, l2t)))


def lam_from_sigma(sigma: np.ndarray) -> np.ndarray:
    """Square factor lambda with lambda lambda^H = sigma (PSD input)."""
    sigma = np.asarray(sigma, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    if w.min() < -1e-9 * max(1.0, abs(w.max())):
        raise ValueError("covariance must be positive semidefinite")
    return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _logdet_ratio(num: np.ndarray, den: np.ndarray, eps: float) -> float:
    """log2 |num + eps I| - log2 |den + eps I| for Hermitian PSD arguments."""
    n = num.shape[0]
    eye = eps * np.eye(n)
    s1, d1 = np.linalg.slogdet(_herm(num) + eye)
    s2, d2 = np.linalg.slogdet(_herm(den) + eye)
    if s1 <= 0 or s2 <= 0:
        raise ValueError("log-determinant argument is not positive definite")
    return (d1 - d2) * LOG2E


def _psd_guard(m: np.ndarray, eps: float, label: str) -> np.ndarray:
    """Check a matrix is Hermitian PSD up to regularization scale."""
    m = _herm(m)
    w = np.linalg.eigvalsh(m)
    if w.min() < -1e3 * eps - 1e-9 * max(1.0, abs(w.max())):
        raise ValueError(f"{label} is not positive semidefinite (min eig {w.min():.3e})")
    return m


def _finalize(mus, label: str) -> MartonTerms:
    vals = []
    for i, m in enumerate(mus, start=1):
        if m < _MU_GUARD:
            raise ValueError(f"{label}: mu{i} = {m:.3e} is significantly negative")
        vals.append(max(0.0, float(m)))
    return MartonTerms(*vals)


def dpc_terms_variant1(ch: MimoChannel, cov: CovarianceSet,
                       strict_paper: bool = False) -> MartonTerms:
    """Uplink-priority evaluation: the D2D-private stream is dirt for the
    uplink-private encoder, so node 2 sees a clean channel for it."""
    s2 = ch.sigma2
    eps = 1e-12 * s2
    g21, g31, g32 = ch.g21, ch.g31, ch.g32
    sa, sb, sc, sd = (cov.sigma(s) for s in "abcd")
    se, sf = cov.sigma("e"), cov.sigma("f")
    eye2 = np.eye(ch.l2_rx)
    q = sc @ g21.conj().T @ np.linalg.inv(_herm(g21 @ sc @ g21.conj().T) + (s2 + eps) * eye2)
    mu1 = _logdet_ratio(sc + q @ g21 @ sd @ g21.conj().T @ q.conj().T, sc, eps)
    if strict_paper:
        m = np.eye(ch.l3_rx, ch.l2_rx) + g31 @ sc @ g21.conj().T / s2
        if m.shape[0] != m.shape[1]:
            raise ValueError("verbatim mu2 form needs matching node-2/node-3 antennas")
        mu2 = math.log2(abs(np.linalg.det(m))) + mu1
    else:
        mu2 = _logdet_ratio(s2 * eye2 + g21 @ sc @ g21.conj().T, s2 * eye2, eps) + mu1
    mu3 = _logdet_ratio(s2 * eye2 + g21 @ (sb + sc + sd) @ g21.conj().T,
                        s2 * eye2 + g21 @ (sc + sd) @ g21.conj().T, eps) + mu2
    eye3 = np.eye(ch.l3_rx)
    noise3 = s2 * eye3 + g31 @ sc @ g31.conj().T
    f3 = g32 @ sf @ g32.conj().T
    mu4 = _logdet_ratio(s2 * eye3 + g31 @ (sc + sd) @ g31.conj().T, noise3, eps)
    mu5 = _logdet_ratio(noise3 + f3, noise3, eps)
    mu6 = _logdet_ratio(s2 * eye3 + g31 @ (sc + sd) @ g31.conj().T + f3, noise3, eps)
    cross = g31 @ cov.lam("a") @ cov.lam("e").conj().T @ g32.conj().T
    phi = (g31 @ (sa + sb + sc + sd) @ g31.conj().T
           + g32 @ (se + sf) @ g32.conj().T + cross + cross.conj().T)
    phi = _psd_guard(phi, eps, "phi")
    mu7 = _logdet_ratio(s2 * eye3 + phi, noise3, eps)
    return _finalize((mu1, mu2, mu3, mu4, mu5, mu6, mu7), "variant1")


def _psi_matrix(ch: MimoChannel, sc, sd, q, eps: float) -> np.ndarray:
    g31 = ch.g31
    top = g31 @ sd + g31 @ sc @ g31.conj().T @ q.conj().T  # (L3, L1)
    mid = _herm(sd + q @ g31 @ sc @ g31.conj().T @ q.conj().T)
    psi = top @ np.linalg.inv(mid + eps * np.eye(mid.shape[0])) @ top.conj().T
    return _psd_guard(psi, eps, "psi")


def _variant23_common(ch: MimoChannel, cov: CovarianceSet, strict_paper: bool):
    """mu1..mu3, psi and the shared noise blocks of the D2D-priority variants."""
    s2 = ch.sigma2
    eps = 1e-12 * s2
    g21, g31 = ch.g21, ch.g31
    sb, sc, sd = (cov.sigma(s) for s in "bcd")
    eye3 = np.eye(ch.l3_rx)
    q = sd @ g31.conj().T @ np.linalg.inv(_herm(g31 @ sd @ g31.conj().T) + (s2 + eps) * eye3)
    mu1 = _logdet_ratio(sd + q @ g31 @ sc @ g31.conj().T @ q.conj().T, sd, eps)
    # the uplink decode happens at node 2; the verbatim text prints these two
    # ratios with g31, kept behind strict_paper
    g = g31 if strict_paper else g21
    eye = np.eye(g.shape[0])
    mu2 = _logdet_ratio(s2 * eye + g @ (sc + sd) @ g.conj().T,
                        s2 * eye + g @ sd @ g.conj().T, eps)
    mu3 = _logdet_ratio(s2 * eye + g @ (sb + sc + sd) @ g.conj().T,
                        s2 * eye + g @ sd @ g.conj().T, eps)
    psi = _psi_matrix(ch, sc, sd, q, eps)
    return s2, eps, mu1, mu2, mu3, psi


def _phi_matrix(ch: MimoChannel, cov: CovarianceSet, eps: float) -> np.ndarray:
    g31, g32 = ch.g31, ch.g32
    sa, sb, sc, sd = (cov.sigma(s) for s in "abcd")
    se, sf = cov.sigma("e"), cov.sigma("f")
    cross = g31 @ cov.lam("a") @ cov.lam("e").conj().T @ g32.conj().T
    phi = (g31 @ (sa + sb + sc + sd) @ g31.conj().T
           + g32 @ (se + sf) @ g32.conj().T + cross + cross.conj().T)
    return _psd_guard(phi, eps, "phi")


def dpc_terms_variant2(ch: MimoChannel, cov: CovarianceSet,
                       strict_paper: bool = False) -> MartonTerms:
    """D2D-priority evaluation with the downlink message decoded and
    subtracted first at node 3."""
    s2, eps, mu1, mu2, mu3, psi = _variant23_common(ch, cov, strict_paper)
    g31, g32 = ch.g31, ch.g32
    sc, sd, sf = cov.sigma("c"), cov.sigma("d"), cov.sigma("f")
    eye3 = np.eye(ch.l3_rx)
    a_blk = s2 * eye3 + g31 @ (sc + sd) @ g31.conj().T
    f_blk = g32 @ sf @ g32.conj().T
    mu4 = _logdet_ratio(s2 * eye3 + g31 @ sd @ g31.conj().T, s2 * eye3, eps) + mu1
    _psd_guard(a_blk + f_blk - psi, eps, "A + F - psi")
    mu5 = (_logdet_ratio(a_blk + f_blk, a_blk, eps) + mu4
           - _logdet_ratio(a_blk + f_blk, a_blk + f_blk - psi, eps))
    mu6 = _logdet_ratio(a_blk + f_blk, a_blk, eps) + mu4
    phi = _phi_matrix(ch, cov, eps)
    mu7 = _logdet_ratio(s2 * eye3 + phi, a_blk, eps) + mu4 - mu1
    return _finalize((mu1, mu2, mu3, mu4, mu5, mu6, mu7), "variant2")


def dpc_terms_variant3(ch: MimoChannel, cov: CovarianceSet,
                       strict_paper: bool = False) -> MartonTerms:
    """D2D-priority evaluation with the downlink message treated as noise."""
    s2, eps, mu1, mu2, mu3, psi = _variant23_common(ch, cov, strict_paper)
    g31, g32 = ch.g31, ch.g32
    sc, sd, sf = cov.sigma("c"), cov.sigma("d"), cov.sigma("f")
    eye3 = np.eye(ch.l3_rx)
    a_blk = s2 * eye3 + g31 @ (sc + sd) @ g31.conj().T
    f_blk = g32 @ sf @ g32.conj().T
    _psd_guard(a_blk - psi, eps, "A - psi")
    mu4 = _logdet_ratio(a_blk, a_blk - psi, eps)
    mu5 = (_logdet_ratio(a_blk + f_blk, a_blk, eps) + mu4
           - _logdet_ratio(s2 * eye3 + g31 @ sd @ g31.conj().T + f_blk,
                           s2 * eye3 + f_blk, eps) - mu1)
    mu6 = _logdet_ratio(a_blk + f_blk, a_blk, eps) + mu4
    phi = _phi_matrix(ch, cov, eps)
    mu7 = _logdet_ratio(s2 * eye3 + phi, a_blk, eps) + mu4 - mu1
    return _finalize((mu1, mu2, mu3, mu4, mu5, mu6, mu7), "variant3")


DPC_VARIANTS = {1: dpc_terms_variant1, 2: dpc_terms_variant2, 3: dpc_terms_variant3}


def marton_region(terms: MartonTerms) -> RateRegion:
    """Rate region implied by the seven Marton terms.

    When the coordination cost exceeds its budget (mu1 > mu2 + mu4) the
    region falls back to the one attainable with the uplink-private layer
    removed; its bounds follow from the chain-rule identities
    I(X2;Y3|U,V) = mu6 - mu4, I(V;Y2|U,X2) = mu3 - mu2 and
    I(U,V,X2;Y3) = mu7 - mu4.
    """
    m = terms
    if m.mu1 > m.mu2 + m.mu4 + 1e-12:
        return RateRegion.from_halfspaces([
            ((0.0, 1.0, 0.0), max(0.0, m.mu5)),
            ((0.0, 1.0, 0.0), max(0.0, m.mu6 - m.mu4)),
            ((1.0, 0.0, 1.0), max(0.0, m.mu3 - m.mu2)),
            ((1.0, 1.0, 1.0), max(0.0, m.mu7 - m.mu4)),
        ])
    clip = lambda x: max(0.0, x)
    return RateRegion.from_halfspaces([
        ((1.0, 0.0, 0.0), clip(m.mu3)),
        ((0.0, 1.0, 0.0), clip(m.mu5)),
        ((0.0, 1.0, 0.0), clip(m.mu2 + m.mu6 - m.mu1)),
        ((1.0, 0.0, 1.0), clip(m.mu3 + m.mu4 - m.mu1)),
        ((0.0, 1.0, 1.0), clip(m.mu7)),
        ((1.0, 1.0, 1.0), clip(m.mu2 + m.mu7 - m.mu1)),
        ((1.0, 1.0, 1.0), clip(m.mu3 + m.mu6 - m.mu1)),
    ])


def region_from_covariances(ch: MimoChannel, cov: CovarianceSet, variant: int,
                            strict_paper: bool = False) -> RateRegion:
    terms = DPC_VARIANTS[variant](ch, cov, strict_paper=strict_paper)
    return marton_region(terms)


# --------------------------------------------------------------------------
# randomized covariance search
# --------------------------------------------------------------------------

def _symmetric_rate(region: RateRegion) -> float:
    return max(0.0, region.ray_exit(np.ones(region.dim)))


def _project_budgets(ch: MimoChannel, lams: dict) -> dict:
    t1 = sum(float(np.sum(np.abs(lams[s]) ** 2)) for s in "abcd")
    t2 = sum(float(np.sum(np.abs(lams[s]) ** 2)) for s in "ef")
    out = dict(lams)
    if t1 > ch.p1:
        scale = math.sqrt(ch.p1 / t1)
        for s in "abcd":
            out[s] = lams[s] * scale
    if t2 > ch.p2:
        scale = math.sqrt(ch.p2 / t2)
        for s in "ef":
            out[s] = lams[s] * scale
    return out


def covariance_search(ch: MimoChannel, variant, budget: int, seed: int = 0,
                      objective=None):
    """Randomized beamformer search with coordinate refinement.

    variant may be 1, 2, 3 or "union" (the objective then sees the union of
    all three regions).  Returns (best CovarianceSet, best RateRegion,
    history of best objective values, one entry per evaluation).
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    objective = objective or _symmetric_rate
    variants = (1, 2, 3) if variant == "union" else (int(variant),)
    rng = np.random.default_rng(seed)
    l1, l2t = ch.l1_tx, ch.l2_tx
    shared = min(l1, l2t)
    shapes = {"a": (l1, shared), "b": (l1, l1), "c": (l1, l1),
              "d": (l1, l1), "e": (l2t, shared), "f": (l2t, l2t)}
    scale1 = math.sqrt(ch.p1 / (4 * l1))
    scale2 = math.sqrt(ch.p2 / (2 * l2t))

    def evaluate(lams):
        cov = CovarianceSet.build(ch, **lams)
        region = None
        for v in variants:
            r = region_from_covariances(ch, cov, v)
            region = r if region is None else region.union(r)
        return cov, region, objective(region)

    def random_lams():
        lams = {}
        for s, shp in shapes.items():
            sc = scale1 if s in "abcd" else scale2
            lams[s] = sc * (rng.standard_normal(shp) + 1j * rng.standard_normal(shp))
        return _project_budgets(ch, lams)

    evals = 0
    best = None
    history = []
    n_draws = max(1, budget // 2)
    while evals < n_draws:
        cand = evaluate(random_lams())
        evals += 1
        if best is None or cand[2] > best[2]:
            best = cand
        history.append(best[2])
    # coordinate refinement around the best draw
    step = 0.5 * max(scale1, scale2)
    lams = {s: best[0].lam(s).copy() for s in CovarianceSet.SLOTS}
    while evals < budget and step > 1e-4 * max(scale1, scale2):
        improved = False
        for s in CovarianceSet.SLOTS:
            it = np.nditer(lams[s], flags=["multi_index"])
            for _ in it:
                if evals >= budget:
                    break
                idx = it.multi_index
                for delta in (step, -step, 1j * step, -1j * step):
                    if evals >= budget:
                        break
                    trial = {k: v.copy() for k, v in lams.items()}
                    trial[s][idx] += delta
                    cand = evaluate(_project_budgets(ch, trial))
                    evals += 1
                    history.append(max(best[2], cand[2]))
                    if cand[2] > best[2]:
                        best = cand
                        lams = {k: best[0].lam(k).copy() for k in CovarianceSet.SLOTS}
                        improved = True
            if evals >= budget:
                break
        if not improved:
            step *= 0.5
    return best[0], best[1], history


# --------------------------------------------------------------------------
# no-D2D covariance assignment and vector outer bound
# --------------------------------------------------------------------------

def _waterfill_capacity(gram_eigs: np.ndarray, power: float) -> float:
    """max sum log2(1 + lam_i p_i) over p >= 0, sum p <= power."""
    lam = np.sort(gram_eigs[gram_eigs > 1e-300])[::-1]
    if lam.size == 0:
        return 0.0
    inv = 1.0 / lam
    for k in range(lam.size, 0, -1):
        nu = (power + inv[:k].sum()) / k
        if nu >= inv[k - 1]:
            p = np.clip(nu - inv[:k], 0.0, None)
            return float(np.log2(1.0 + lam[:k] * p).sum())
    return 0.0


def _channel_capacity(g: np.ndarray, power: float, sigma2: float) -> float:
    eigs = np.linalg.eigvalsh(_herm(g.conj().T @ g)) / sigma2
    return _waterfill_capacity(eigs, power)


def interference_residual(ch: MimoChannel) -> np.ndarray:
    """MMSE residual of a full-power node-1 input after observing the cross
    link: sigma^2 (sigma^2/P1 I + G31^H G31)^{-1}."""
    l1 = ch.l1_tx
    return ch.sigma2 * np.linalg.inv(
        (ch.sigma2 / ch.p1) * np.eye(l1) + _herm(ch.g31.conj().T @ ch.g31))


def no_d2d_covariances(ch: MimoChannel) -> CovarianceSet:
    """Closed-form assignment for the no-D2D scheme: private part set to the
    cross-link MMSE residual, remaining node-1 power on the common layer,
    full node-2 power on the downlink message."""
    l1, l2t = ch.l1_tx, ch.l2_tx
    s_priv = interference_residual(ch)
    tr = float(np.trace(s_priv).real)
    if tr >= ch.p1:
        s_priv = s_priv * (ch.p1 / tr)
        s_comm = np.zeros((l1, l1), dtype=complex)
    else:
        gamma = (ch.p1 - tr) / (l1 * ch.p1 - tr)
        s_comm = gamma * (ch.p1 * np.eye(l1) - s_priv)
    shared = min(l1, l2t)
    return CovarianceSet.build(
        ch,
        a=np.zeros((l1, shared)), b=lam_from_sigma(s_comm),
        c=lam_from_sigma(s_priv), d=np.zeros((l1, l1)),
        e=np.zeros((l2t, shared)),
        f=math.sqrt(ch.p2 / l2t) * np.eye(l2t))


def no_d2d_mimo_scheme(ch: MimoChannel) -> RateRegion:
    """2D (R1, R2) region of the no-D2D covariance assignment under the
    uplink-priority evaluation."""
    cov = no_d2d_covariances(ch)
    m = dpc_terms_variant1(ch, cov)
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), m.mu3),
        ((0.0, 1.0), min(m.mu5, m.mu2 + m.mu6 - m.mu1, m.mu7)),
        ((1.0, 1.0), min(m.mu2 + m.mu7, m.mu3 + m.mu6) - m.mu1),
    ])


def vector_outer_no_d2d(ch: MimoChannel, t_points: int = 21) -> RateRegion:
    """Cut-set style outer bound with covariance inputs.

    R1 and R2 are water-filling capacities of their links; the sum bound
    pairs the full node-3 reception (cross terms handled by a weighted
    operator AM-GM, minimized over the weight) with the uplink rate left
    after node 3's observation is accounted for.
    """
    s2 = ch.sigma2
    o1 = _channel_capacity(ch.g21, ch.p1, s2)
    o2 = _channel_capacity(ch.g32, ch.p2, s2)
    a_blk = ch.p1 * _herm(ch.g31 @ ch.g31.conj().T)
    b_blk = ch.p2 * _herm(ch.g32 @ ch.g32.conj().T)
    eye3 = np.eye(ch.l3_rx)
    best = math.inf
    for t in np.logspace(-2, 2, t_points):
        _, d = np.linalg.slogdet(s2 * eye3 + (1 + t) * a_blk + (1 + 1 / t) * b_blk)
        best = min(best, d * LOG2E - ch.l3_rx * math.log2(s2))
    stacked = np.hstack([ch.g31, ch.g32])
    best = min(best, _channel_capacity(stacked, ch.p1 + ch.p2, s2))
    resid = interference_residual(ch)
    tail = _logdet_ratio(s2 * np.eye(ch.l2_rx) + ch.g21 @ resid @ ch.g21.conj().T,
                         s2 * np.eye(ch.l2_rx), 1e-12 * s2)
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), o1),
        ((0.0, 1.0), o2),
        ((1.0, 1.0), best + tail),
    ])


def no_d2d_gap_allowance(ch: MimoChannel) -> float:
    """Gap budget max{min(L1+,L2-), min(L2+,L3-), min(L1+,L3-)/2} in bits."""
    return max(min(ch.l1_tx, ch.l2_rx), min(ch.l2_tx, ch.l3_rx),
               0.5 * min(ch.l1_tx, ch.l3_rx))
