"""Closed-form curvature of the (1,1) tensor bundle with the rescaled metric.

``R[a, b, c, d]`` is component ``d`` of R(E_a, E_b)E_c over adapted indices.
Every block is an index-by-index transcription of the printed formulas;
where a printed index is dangling or duplicated the repair is noted next to
the term.  :func:`compare_with_oracle` reports per-block deviations from the
induced-coordinate Riemann tensor, so transcription errors are surfaced
rather than absorbed.

Letters used for fiber pairs: a vertical index pairs an upper letter with a
lower one, e.g. ``(u, m)`` for t^u_m.  ``t[a, s]`` is t^a_s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import BaseGeometryAt, ManifoldChart, geometry_at, raise_riemann
from .errors import ShapeMismatch
from .frames import FiberPoint
from .oracle import oracle_at
from .sasaki import ATerms, RescaleAt, RescaleFunction, a_terms, bundle_at

__all__ = [
    "BLOCKS", "BundleCurvatureAt", "curvature_blocks", "curvature_closed_form",
    "printed_ricci", "scalar_formula", "constant_curvature_scalar", "fiber_norm2",
    "compare_with_oracle", "flatness_check", "contract_ricci", "contract_scalar",
    "PRINTED_HHV_GRADIENT_SIGNS", "HHV_GRADIENT_SIGNS", "block_deviation", "FlatnessReport",
]

# block name -> (slot kinds of X, Y, Z); "H" horizontal, "V" vertical
BLOCKS = {
    "R(H,H)H": "HHH", "R(V,H)H": "VHH", "R(H,V)H": "HVH", "R(V,V)H": "VVH",
    "R(H,H)V": "HHV", "R(H,V)V": "HVV", "R(V,H)V": "VHV", "R(V,V)V": "VVV",
}


def _e(spec, *ops):
    return np.einsum(spec, *ops, optimize=True)


# coefficients of the f-gradient terms in the horizontal part of R(E_m, E_l)E_{(i,j)}
PRINTED_HHV_GRADIENT_SIGNS = (-2.0, -2.0, -2.0, 2.0)
# antisymmetric in (m, l); confirmed against the oracle
HHV_GRADIENT_SIGNS = (-2.0, 2.0, 2.0, -2.0)


def curvature_blocks(t: np.ndarray, geom: BaseGeometryAt, f: RescaleAt, at: ATerms,
                     printed_signs: bool = False) -> np.ndarray:
    """Assemble the full adapted curvature array from the printed blocks.

    ``printed_signs`` keeps the printed f-gradient signs in R(H,H)V, which
    break antisymmetry in the first two slots; only affects non-constant f.
    """
    n = geom.n
    fs = PRINTED_HHV_GRADIENT_SIGNS if printed_signs else HHV_GRADIENT_SIGNS
    if t.shape != (n, n):
        raise ShapeMismatch("curvature blocks need a (1,1) fiber tensor")
    g, gi, R, nR = geom.g, geom.g_inv, geom.riemann, geom.nabla_riemann
    Rup = raise_riemann(geom)
    nRup = _e("as,bj,mablr->msjlr", gi, gi, nR)
    A, fg = at.A, f.grad
    fv = f.value
    c1 = 1.0 / (4 * fv)
    c2 = 1.0 / (4 * fv * fv)
    h2 = 1.0 / (2 * fv)
    d = np.eye(n)
    D = n + n * n
    out = np.zeros((D, D, D, D))
    H = slice(0, n)
    V = slice(n, D)

    def vert(x):  # [.., v, r] -> [.., (v r)]
        return x.reshape(x.shape[:-2] + (n * n,))

    # R(E_m, E_l)E_j
    hh_h = (
        R
        + c1 * (
            _e("ka,shmr,ljhp,as,kp->mljr", g, Rup, R, t, t)
            - _e("ka,shlr,mjhp,as,kp->mljr", g, Rup, R, t, t)
            - 2 * _e("ka,shjr,mlhp,as,kp->mljr", g, Rup, R, t, t)
        )
        + c1 * (
            _e("ka,shlr,mjpk,as,ph->mljr", g, Rup, R, t, t)
            - _e("ka,shmr,ljpk,as,ph->mljr", g, Rup, R, t, t)
            + 2 * _e("ka,shjr,mlpk,as,ph->mljr", g, Rup, R, t, t)
        )
        + c1 * (
            _e("hb,kplr,mjhs,pb,ks->mljr", gi, R, R, t, t)
            - _e("hb,kpmr,ljhs,pb,ks->mljr", gi, R, R, t, t)
            + 2 * _e("hb,kpjr,mlhs,pb,ks->mljr", gi, R, R, t, t)
        )
        + c1 * (
            _e("hb,ksmr,ljpk,sb,ph->mljr", gi, R, R, t, t)
            - _e("hb,kslr,mjpk,sb,ph->mljr", gi, R, R, t, t)
            - 2 * _e("hb,ksjr,mlpk,sb,ph->mljr", gi, R, R, t, t)
        )
        + at.combination
    )
    hh_v = (
        0.5 * (_e("mljrs,vs->mljvr", nR, t) - _e("lmjrs,vs->mljvr", nR, t))
        + 0.5 * (_e("lmjsv,sr->mljvr", nR, t) - _e("mljsv,sr->mljvr", nR, t))
        + c1 * (
            _e("mhrs,vs,hlj->mljvr", R, t, A) - _e("mhsv,sr,hlj->mljvr", R, t, A)
            - _e("lhrs,vs,hmj->mljvr", R, t, A) + _e("lhsv,sr,hmj->mljvr", R, t, A)
        )
    )
    out[H, H, H, H] = hh_h
    out[H, H, H, V] = vert(hh_v)

    # R(E_{(u,m)}, E_l)E_j
    vhh_h = (
        -h2 * _e("ua,lsmjr,as->umljr", g, nRup, t)
        + h2 * _e("mb,lusjr,sb->umljr", gi, nR, t)
        + c2 * (
            _e("ua,smhr,hlj,as->umljr", g, Rup, A, t)
            - _e("mb,ushr,hlj,sb->umljr", gi, R, A, t)
            + _e("mb,usjh,rlh,sb->umljr", gi, R, A, t)
            - _e("ua,smjh,rlh,as->umljr", g, Rup, A, t)
            + 2 * _e("l,ua,smjr,as->umljr", fg, g, Rup, t)
            - 2 * _e("l,mb,usjr,sb->umljr", fg, gi, R, t)
        )
    )
    vhh_v = (
        0.5 * _e("ljrm,uv->umljvr", R, d)
        - 0.5 * _e("ljuv,rm->umljvr", R, d)
        - c1 * _e("lhrs,ua,pmjh,vs,ap->umljvr", R, g, Rup, t, t)
        + c1 * _e("lhrs,mb,upjh,vs,pb->umljvr", R, gi, R, t, t)
        + c1 * _e("lhsv,ua,pmjh,sr,ap->umljvr", R, g, Rup, t, t)
        - c1 * _e("lhsv,mb,upjh,sr,pb->umljvr", R, gi, R, t, t)
    )
    out[V, H, H, H] = vhh_h.reshape(n * n, n, n, n)
    out[V, H, H, V] = vert(vhh_v).reshape(n * n, n, n, n * n)

    # R(E_m, E_{(c,l)})E_j
    hvh_h = (
        h2 * _e("ca,msljr,as->mcljr", g, nRup, t)
        - h2 * _e("lb,mcsjr,sb->mcljr", gi, nR, t)
        + c2 * (
            _e("ca,sljh,rmh,as->mcljr", g, Rup, A, t)
            - _e("lb,csjh,rmh,sb->mcljr", gi, R, A, t)
            + _e("lb,cshr,hmj,sb->mcljr", gi, R, A, t)
            - _e("ca,slhr,hmj,as->mcljr", g, Rup, A, t)
            # printed R^{s l}_j^{h} has a dangling h; the free index r is meant
            - 2 * _e("m,ca,sljr,as->mcljr", fg, g, Rup, t)
            + 2 * _e("m,lb,csjr,sb->mcljr", fg, gi, R, t)
        )
    )
    hvh_v = (
        -0.5 * _e("mjrl,cv->mcljvr", R, d)
        + 0.5 * _e("mjcv,rl->mcljvr", R, d)
        # printed g_{va} repeats the free index v; g_{ta} (here g_{ca}) is meant
        + c1 * _e("mhrs,ca,pljh,vs,ap->mcljvr", R, g, Rup, t, t)
        - c1 * _e("mhrs,lb,cpjh,vs,pb->mcljvr", R, gi, R, t, t)
        - c1 * _e("mhpv,ca,sljh,pr,as->mcljvr", R, g, Rup, t, t)
        + c1 * _e("mhsv,lb,cpjh,sr,pb->mcljvr", R, gi, R, t, t)
    )
    out[H, V, H, H] = hvh_h.reshape(n, n * n, n, n)
    out[H, V, H, V] = vert(hvh_v).reshape(n, n * n, n, n * n)

    # R(E_{(u,m)}, E_{(c,l)})E_j
    vvh_h = (
        (1.0 / fv) * _e("cu,mljr->umcljr", g, Rup)
        - (1.0 / fv) * _e("lm,cujr->umcljr", gi, R)
        + c2 * (
            _e("ua,smhr,cb,pljh,as,bp->umcljr", g, Rup, g, Rup, t, t)
            - _e("ca,slhr,ub,pmjh,as,bp->umcljr", g, Rup, g, Rup, t, t)
        )
        + c2 * (
            _e("ca,slhr,mb,upjh,as,pb->umcljr", g, Rup, gi, R, t, t)
            - _e("ua,smhr,lb,cpjh,as,pb->umcljr", g, Rup, gi, R, t, t)
        )
        + c2 * (
            _e("lb,cphr,ua,smjh,pb,as->umcljr", gi, R, g, Rup, t, t)
            - _e("mb,uphr,ca,sljh,pb,as->umcljr", gi, R, g, Rup, t, t)
        )
        + c2 * (
            # printed R_{tsj}^h leaves p dangling; R_{tpj}^h mirrors the second term
            _e("ma,ushr,lb,cpjh,sa,pb->umcljr", gi, R, gi, R, t, t)
            - _e("la,cshr,mb,upjh,sa,pb->umcljr", gi, R, gi, R, t, t)
        )
    )
    out[V, V, H, H] = vvh_h.reshape(n * n, n * n, n, n)

    # R(E_m, E_l)E_{(i,j)}
    hhv_h = (
        h2 * (_e("ia,msjlr,as->mlijr", g, nRup, t) - _e("ia,lsjmr,as->mlijr", g, nRup, t))
        + h2 * (_e("jb,lismr,sb->mlijr", gi, nR, t)
                - _e("jb,mislr,sb->mlijr", gi, nR, t))
        + c2 * (
            _e("ia,sjlh,rmh,as->mlijr", g, Rup, A, t)
            - _e("jb,islh,rmh,sb->mlijr", gi, R, A, t)
            + _e("jb,ismh,rlh,sb->mlijr", gi, R, A, t)
            - _e("ia,sjmh,rlh,as->mlijr", g, Rup, A, t)
            # printed R^{s j}_l^{h} has a dangling h; the free index r is meant
            + fs[0] * _e("m,ia,sjlr,as->mlijr", fg, g, Rup, t)
            + fs[1] * _e("m,jb,islr,sb->mlijr", fg, gi, R, t)
            + fs[2] * _e("l,ia,sjmr,as->mlijr", fg, g, Rup, t)
            + fs[3] * _e("l,jb,ismr,sb->mlijr", fg, gi, R, t)
        )
    )
    hhv_v = (
        _e("mliv,rj->mlijvr", R, d)
        - _e("mlrj,iv->mlijvr", R, d)
        + c1 * (
            _e("mhrs,ia,pjlh,vs,ap->mlijvr", R, g, Rup, t, t)
            - _e("lhrs,ia,pjmh,vs,ap->mlijvr", R, g, Rup, t, t)
        )
        + c1 * (
            # printed R_{lpm}^h leaves i dangling; R_{ipm}^h is meant
            _e("lhrs,jb,ipmh,vs,pb->mlijvr", R, gi, R, t, t)
            - _e("mhrs,jb,iplh,vs,pb->mlijvr", R, gi, R, t, t)
        )
        + c1 * (
            _e("lhpv,ia,sjmh,pr,as->mlijvr", R, g, Rup, t, t)
            - _e("mhpv,ia,sjlh,pr,as->mlijvr", R, g, Rup, t, t)
        )
        + c1 * (
            _e("mhsv,jb,iplh,sr,pb->mlijvr", R, gi, R, t, t)
            - _e("lhsv,jb,ipmh,sr,pb->mlijvr", R, gi, R, t, t)
        )
    )
    out[H, H, V, H] = hhv_h.reshape(n, n, n * n, n)
    out[H, H, V, V] = vert(hhv_v).reshape(n, n, n * n, n * n)

    # R(E_m, E_{(c,l)})E_{(i,j)}
    hvv_h = (
        -h2 * _e("ic,ljmr->mclijr", g, Rup)
        + h2 * _e("jl,icmr->mclijr", gi, R)
        # printed second factor R^{p l}_m^h repeats l and drops j; R^{p j}_m^h is meant
        - c2 * _e("ca,slhr,ib,pjmh,as,bp->mclijr", g, Rup, g, Rup, t, t)
        + c2 * _e("ca,slhr,jb,ipmh,as,pb->mclijr", g, Rup, gi, R, t, t)
        + c2 * _e("lb,cphr,ia,sjmh,pb,as->mclijr", gi, R, g, Rup, t, t)
        - c2 * _e("la,cshr,jb,ipmh,sa,pb->mclijr", gi, R, gi, R, t, t)
    )
    out[H, V, V, H] = hvv_h.reshape(n, n * n, n * n, n)

    # R(E_{(u,m)}, E_l)E_{(i,j)}
    vhv_h = (
        h2 * _e("iu,mjlr->umlijr", g, Rup)
        - h2 * _e("jm,iulr->umlijr", gi, R)
        + c2 * _e("ua,smhr,ib,pjlh,as,bp->umlijr", g, Rup, g, Rup, t, t)
        - c2 * _e("ua,smhr,jb,iplh,as,pb->umlijr", g, Rup, gi, R, t, t)
        # printed R^{s j}_m^h repeats m and drops l; R^{s j}_l^h is meant
        - c2 * _e("mb,uphr,ia,sjlh,pb,as->umlijr", gi, R, g, Rup, t, t)
        + c2 * _e("ma,ushr,jb,iplh,sa,pb->umlijr", gi, R, gi, R, t, t)
    )
    out[V, H, V, H] = vhv_h.reshape(n * n, n, n * n, n)
    # R(E_{m̄}, E_{l̄})E_{j̄} = 0
    return out


@dataclass
class BundleCurvatureAt:
    R: np.ndarray
    ricci: np.ndarray           # contraction of R
    ricci_printed: np.ndarray   # transcribed Ricci blocks
    scalar: float               # G^{ab} ricci_ab
    scalar_printed_ricci: float
    scalar_formula: float       # closed scalar formula
    fL: float
    n: int
    extra: dict = field(default_factory=dict)


def contract_ricci(R: np.ndarray) -> np.ndarray:
    """R_{bc} = R_{abc}^a."""
    return np.einsum("abca->bc", R)


def contract_scalar(ricci: np.ndarray, G_inv: np.ndarray) -> float:
    return float(np.einsum("bc,bc->", G_inv, ricci))


def printed_ricci(t: np.ndarray, geom: BaseGeometryAt, f: RescaleAt, at: ATerms) -> np.ndarray:
    """Transcription of the four printed Ricci blocks."""
    n = geom.n
    g, gi, R, nR = geom.g, geom.g_inv, geom.riemann, geom.nabla_riemann
    Rup = raise_riemann(geom)
    nRup = _e("as,bj,mablr->msjlr", gi, gi, nR)
    A, fg, fv = at.A, f.grad, f.value
    c1, c2, h2 = 1 / (4 * fv), 1 / (4 * fv * fv), 1 / (2 * fv)
    D = n + n * n
    out = np.zeros((D, D))
    trA = np.einsum("rrh->h", A)

    vv = (
        -c2 * _e("ca,slhr,ib,pjrh,as,bp->clij", g, Rup, g, Rup, t, t)
        + c2 * _e("ca,slhr,jb,iprh,as,pb->clij", g, Rup, gi, R, t, t)
        + c2 * _e("lb,cphr,ia,sjrh,pb,as->clij", gi, R, g, Rup, t, t)
        - c2 * _e("lb,cshr,ja,iprh,sb,pa->clij", gi, R, gi, R, t, t)
    )
    out[n:, n:] = vv.reshape(n * n, n * n)

    vh = (
        h2 * _e("ca,rsljr,as->clj", g, nRup, t)
        - h2 * _e("lb,rcsjr,sb->clj", gi, nR, t)
        + c2 * (
            _e("ca,sljh,h,as->clj", g, Rup, trA, t)
            - _e("lb,csjh,h,sb->clj", gi, R, trA, t)
            + _e("lb,cshr,hrj,sb->clj", gi, R, A, t)
            - _e("ca,slhr,hrj,as->clj", g, Rup, A, t)
            # dangling h in the printed f_r term; contracted with f_r instead
            - 2 * _e("r,ca,sljr,as->clj", fg, g, Rup, t)
            + 2 * _e("r,lb,csjr,sb->clj", fg, gi, R, t)
        )
    )
    out[n:, :n] = vh.reshape(n * n, n)

    hv = (
        h2 * _e("ia,rsjlr,as->lij", g, nRup, t)
        - h2 * _e("jb,rislr,sb->lij", gi, nR, t)
        + c2 * (
            _e("ia,sjlh,h,as->lij", g, Rup, trA, t)
            - _e("jb,islh,h,sb->lij", gi, R, trA, t)
            + _e("jb,isrh,rlh,sb->lij", gi, R, A, t)
            - _e("ia,sjrh,rlh,as->lij", g, Rup, A, t)
            - 2 * _e("r,ia,sjlr,as->lij", fg, g, Rup, t)
            + 2 * _e("r,jb,islr,sb->lij", fg, gi, R, t)
        )
    )
    out[:n, n:] = hv.reshape(n, n * n)

    hh = (
        geom.ricci
        - c1 * _e("ka,shlr,rjhp,as,kp->lj", g, Rup, R, t, t)
        - 2 * c1 * _e("ka,shjr,rlhp,as,kp->lj", g, Rup, R, t, t)
        - c1 * _e("lhrs,va,prjh,vs,ap->lj", R, g, Rup, t, t)
        - c1 * _e("hb,kslr,rjpk,sb,ph->lj", gi, R, R, t, t)
        - 2 * c1 * _e("hb,ksjr,rlpk,sb,ph->lj", gi, R, R, t, t)
        - c1 * _e("lhsv,rb,vpjh,sr,pb->lj", R, gi, R, t, t)
        + 2 * c1 * _e("ka,shjr,rlpk,as,ph->lj", g, Rup, R, t, t)
        + 2 * c1 * _e("hb,kpjr,rlhs,pb,ks->lj", gi, R, R, t, t)
        + np.einsum("rljr->lj", at.combination)
    )
    out[:n, :n] = hh
    return out


def fiber_norm2(t: np.ndarray, g: np.ndarray, g_inv: np.ndarray) -> float:
    """G(t, t) = g_{sp} g^{ab} t^s_a t^p_b."""
    return float(np.einsum("sp,ab,sa,pb->", g, g_inv, t, t))


def scalar_formula(t: np.ndarray, geom: BaseGeometryAt, f: RescaleAt, at: ATerms) -> float:
    """Closed scalar-curvature formula (quadratic curvature terms plus fL)."""
    g, gi, R = geom.g, geom.g_inv, geom.riemann
    fv = f.value
    c2 = 1 / (4 * fv * fv)
    # first quadratic term in its index-consistent form
    q1 = -c2 * _e("ab,hk,vr,lj,hvsl,krpj,sa,pb->", gi, gi, gi, g, R, R, t, t)
    q2 = -c2 * _e("cd,lj,hk,rv,rlhs,vjkp,cs,dp->", g, gi, gi, gi, R, R, t, t)
    q3 = 2 * c2 * _e("re,bz,cprh,hezs,cs,pb->", gi, gi, R, R, t, t)
    return float(geom.scalar / fv + q1 + q2 + q3 + at.fL)


def constant_curvature_scalar(kappa: float, n: int, f_value: float, t, g, g_inv,
                              fL: float = 0.0, printed: bool = False) -> float:
    """(1/f)(n-1)κ(n - ‖t‖²κ/f) + (1/f²)κ²((tr t)² - tr t²) + fL.

    ``printed=True`` uses 1/f on the trace term instead; the two agree when f = 1.
    """
    t = np.asarray(t, dtype=float).reshape(n, n)
    norm2 = fiber_norm2(t, g, g_inv)
    tr = np.trace(t)
    tr2 = np.trace(t @ t)
    trace_weight = 1.0 / f_value if printed else 1.0 / (f_value * f_value)
    return ((n - 1) * kappa * (n - norm2 * kappa / f_value) / f_value
            + kappa * kappa * (tr * tr - tr2) * trace_weight + fL)


def curvature_closed_form(chart: ManifoldChart, f: RescaleFunction, P: FiberPoint) -> BundleCurvatureAt:
    if (P.p, P.q) != (1, 1):
        raise ShapeMismatch("closed-form curvature is available for (1,1) fibers only")
    b = bundle_at(chart, f, P, derivs=3)
    t = P.tensor()
    R = curvature_blocks(t, b.geom, b.f, b.aterms)
    ric = contract_ricci(R)
    ric_p = printed_ricci(t, b.geom, b.f, b.aterms)
    return BundleCurvatureAt(
        R=R,
        ricci=ric,
        ricci_printed=ric_p,
        scalar=contract_scalar(ric, b.metric.G_inv),
        scalar_printed_ricci=contract_scalar(ric_p, b.metric.G_inv),
        scalar_formula=scalar_formula(t, b.geom, b.f, b.aterms),
        fL=b.aterms.fL,
        n=P.n,
        extra={"bundle": b},
    )


def _block_slices(n: int, D: int, kinds: str):
    sl = {"H": slice(0, n), "V": slice(n, D)}
    return tuple(sl[k] for k in kinds)


def block_deviation(R1: np.ndarray, R2: np.ndarray, n: int) -> dict:
    """Max |R1 - R2| per printed block, split by output component (h / v)."""
    D = R1.shape[0]
    out = {}
    for name, kinds in BLOCKS.items():
        s = _block_slices(n, D, kinds)
        for comp, cs in (("h", slice(0, n)), ("v", slice(n, D))):
            diff = R1[s + (cs,)] - R2[s + (cs,)]
            out[f"{name}.{comp}"] = float(np.abs(diff).max()) if diff.size else 0.0
    return out


def compare_with_oracle(chart: ManifoldChart, f: RescaleFunction, P: FiberPoint) -> dict:
    """Per-block deviations of the closed form from the induced-coordinate oracle."""
    cf = curvature_closed_form(chart, f, P)
    orc = oracle_at(chart, f, P, curvature=True)
    b = cf.extra["bundle"]
    ric_o = contract_ricci(orc.riemann)
    b_lit = curvature_blocks(P.tensor(), b.geom, b.f, b.aterms, printed_signs=True)
    return {
        "blocks": block_deviation(cf.R, orc.riemann, P.n),
        "blocks_printed_signs": block_deviation(b_lit, orc.riemann, P.n),
        "ricci_contracted": float(np.abs(cf.ricci - ric_o).max()),
        "ricci_printed": float(np.abs(cf.ricci_printed - ric_o).max()),
        "scalar_oracle": contract_scalar(ric_o, b.metric.G_inv),
        "scalar_contracted": cf.scalar,
        "scalar_printed_ricci": cf.scalar_printed_ricci,
        "scalar_formula": cf.scalar_formula,
        "closed": cf,
        "oracle": orc,
    }


@dataclass
class FlatnessReport:
    max_base_curvature: float
    max_combination: float
    max_bundle_curvature: float
    base_flat: bool
    combination_zero: bool
    predicted_flat: bool
    observed_flat: bool

    @property
    def verdict_matches(self) -> bool:
        return self.predicted_flat == self.observed_flat


def flatness_check(chart: ManifoldChart, f: RescaleFunction, points, tol: float = 1e-10,
                   bundle_curvature=None) -> list[FlatnessReport]:
    """Two-condition flatness verdict versus the bundle curvature, per point.

    ``points`` are FiberPoints; ``bundle_curvature`` defaults to the closed-form
    blocks (pass the oracle for an independent check).
    """
    reports = []
    for P in points:
        geom = geometry_at(chart, P.x, 3)
        at = a_terms(chart, f, P.x, geom)
        if bundle_curvature is None:
            Rb = curvature_closed_form(chart, f, P).R
        else:
            Rb = bundle_curvature(chart, f, P)
        mb = float(np.abs(geom.riemann).max())
        mc = float(np.abs(at.combination).max())
        mR = float(np.abs(Rb).max())
        reports.append(FlatnessReport(mb, mc, mR, mb < tol, mc < tol,
                                      mb < tol and mc < tol, mR < tol))
    return reports
