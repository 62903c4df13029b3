"""Builtin scenario families.

Each family assembles a groupoid with exact (affine) structure maps and
samplers, the distribution under study, first-integral leaf labels, the
explicit quotient structure on labels, and a section of the labeling for
round trips.  Families:

* ``pair``: pair groupoid on R^m with a product distribution D x D.
* ``vb_trivial``: trivial vector-bundle groupoid R^k x M with W x F.
* ``group_action_pair``: pair groupoid with the vertical distribution of a
  one-parameter translation action; leaves are the orbits.
* ``presymplectic_pair_dirac``: pair groupoid carrying the difference of
  two copies of a constant two-form graph; the distribution is the kernel
  directions.
* ``finite``: discrete instances for the exact quotient constructions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import fingroupoid as fin
from . import linalg
from .dirac import DiracStructure, from_two_form, minus_double
from .geomcore import ChartManifold, SmoothMap, VectorField, constant_field
from .leafspace import LeafChart
from .liegroupoid import SmoothGroupoid
from .multdist import Distribution
from .params import DEFAULT_PARAMS

SAMPLE_HALF_WIDTH = 2.0


def affine_map(domain: ChartManifold, codomain: ChartManifold,
               matrix, offset=None, name: str = "") -> SmoothMap:
    a = np.asarray(matrix, dtype=float)
    b = np.zeros(codomain.dim) if offset is None else np.asarray(offset, dtype=float)
    return SmoothMap(domain, codomain, lambda x: a @ x + b, jac=lambda x: a, name=name)


def _uniform(rng, dim: int) -> np.ndarray:
    return rng.uniform(-SAMPLE_HALF_WIDTH, SAMPLE_HALF_WIDTH, size=dim)


def _complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal complement of the span of ``basis`` columns in R^dim."""
    if basis.size == 0:
        return np.eye(dim)
    return linalg.null_basis(np.asarray(basis, dtype=float).T, DEFAULT_PARAMS.tol_rank)


def pair_groupoid_maps(m: int) -> SmoothGroupoid:
    """Pair groupoid on R^m: an arrow (a, b) runs from b to a."""
    space = ChartManifold(2 * m)
    base = ChartManifold(m)
    eye = np.eye(m)
    zero = np.zeros((m, m))
    src = affine_map(space, base, np.hstack([zero, eye]), name="s")
    tgt = affine_map(space, base, np.hstack([eye, zero]), name="t")
    unit = affine_map(base, space, np.vstack([eye, eye]), name="unit")
    inv = affine_map(space, space,
                     np.block([[zero, eye], [eye, zero]]), name="inv")
    pair_chart = ChartManifold(4 * m)
    mul_matrix = np.zeros((2 * m, 4 * m))
    mul_matrix[:m, :m] = eye            # target slot of g
    mul_matrix[m:, 3 * m:] = eye        # source slot of h
    mul = affine_map(pair_chart, space, mul_matrix, name="mul")

    def sample_arrow(rng):
        return _uniform(rng, 2 * m)

    def sample_object(rng):
        return _uniform(rng, m)

    def sample_arrow_to(rng, p):
        return np.concatenate([np.asarray(p, dtype=float), _uniform(rng, m)])

    return SmoothGroupoid(space, base, src, tgt, unit, inv, mul,
                          sample_arrow=sample_arrow, sample_object=sample_object,
                          sample_arrow_to=sample_arrow_to, name=f"pair(R^{m})")


def vb_groupoid_maps(k: int, m: int) -> SmoothGroupoid:
    """Trivial vector-bundle groupoid R^k x R^m with fiberwise addition."""
    space = ChartManifold(k + m)
    base = ChartManifold(m)
    proj = np.hstack([np.zeros((m, k)), np.eye(m)])
    src = affine_map(space, base, proj, name="s")
    tgt = affine_map(space, base, proj, name="t")
    unit = affine_map(base, space,
                      np.vstack([np.zeros((k, m)), np.eye(m)]), name="unit")
    inv_matrix = np.block([[-np.eye(k), np.zeros((k, m))],
                           [np.zeros((m, k)), np.eye(m)]])
    inv = affine_map(space, space, inv_matrix, name="inv")
    pair_chart = ChartManifold(2 * (k + m))
    mul_matrix = np.zeros((k + m, 2 * (k + m)))
    mul_matrix[:k, :k] = np.eye(k)                      # x
    mul_matrix[:k, k + m: 2 * k + m] = np.eye(k)        # + y
    mul_matrix[k:, k: k + m] = np.eye(m)                # base point of g
    mul = affine_map(pair_chart, space, mul_matrix, name="mul")

    def sample_arrow(rng):
        return _uniform(rng, k + m)

    def sample_object(rng):
        return _uniform(rng, m)

    def sample_arrow_to(rng, p):
        return np.concatenate([_uniform(rng, k), np.asarray(p, dtype=float)])

    return SmoothGroupoid(space, base, src, tgt, unit, inv, mul,
                          sample_arrow=sample_arrow, sample_object=sample_object,
                          sample_arrow_to=sample_arrow_to,
                          name=f"vb(R^{k} x R^{m})")


def gauge_groupoid_maps(b: int) -> SmoothGroupoid:
    """Product of the pair groupoid on R^b with the additive line.

    Arrows (a, c, x): target label a, source label c, group part x.  This
    is the quotient shape of a free one-parameter action on a pair
    groupoid.
    """
    space = ChartManifold(2 * b + 1)
    base = ChartManifold(b)
    eye = np.eye(b)
    src_matrix = np.zeros((b, 2 * b + 1))
    src_matrix[:, b: 2 * b] = eye
    tgt_matrix = np.zeros((b, 2 * b + 1))
    tgt_matrix[:, :b] = eye
    src = affine_map(space, base, src_matrix, name="s")
    tgt = affine_map(space, base, tgt_matrix, name="t")
    unit = affine_map(base, space, np.vstack([eye, eye, np.zeros((1, b))]), name="unit")
    inv_matrix = np.zeros((2 * b + 1, 2 * b + 1))
    inv_matrix[:b, b: 2 * b] = eye
    inv_matrix[b: 2 * b, :b] = eye
    inv_matrix[2 * b, 2 * b] = -1.0
    inv = affine_map(space, space, inv_matrix, name="inv")
    pair_chart = ChartManifold(2 * (2 * b + 1))
    mul_matrix = np.zeros((2 * b + 1, 2 * (2 * b + 1)))
    mul_matrix[:b, :b] = eye                                 # target of g
    mul_matrix[b: 2 * b, (2 * b + 1) + b: (2 * b + 1) + 2 * b] = eye  # source of h
    mul_matrix[2 * b, 2 * b] = 1.0                           # x
    mul_matrix[2 * b, 2 * (2 * b + 1) - 1] = 1.0             # + y
    mul = affine_map(pair_chart, space, mul_matrix, name="mul")

    def sample_arrow(rng):
        return _uniform(rng, 2 * b + 1)

    def sample_object(rng):
        return _uniform(rng, b)

    def sample_arrow_to(rng, p):
        rest = _uniform(rng, b + 1)
        return np.concatenate([np.asarray(p, dtype=float), rest])

    return SmoothGroupoid(space, base, src, tgt, unit, inv, mul,
                          sample_arrow=sample_arrow, sample_object=sample_object,
                          sample_arrow_to=sample_arrow_to,
                          name=f"pair(R^{b}) x line")


@dataclass
class FiniteInstance:
    groupoid: fin.FiniteGroupoid
    normal: frozenset
    nss: fin.NormalSubgroupoidSystem
    expected_duality: str  # "isomorphic" or "different"


@dataclass
class Scenario:
    name: str
    family: str
    params: dict = field(default_factory=dict)
    groupoid: Optional[SmoothGroupoid] = None
    dist: Optional[Distribution] = None
    chart: Optional[LeafChart] = None
    base_fields: List[VectorField] = field(default_factory=list)
    complete: bool = False
    quotient: Optional[SmoothGroupoid] = None
    quotient_section: Optional[SmoothMap] = None
    dirac: Optional[DiracStructure] = None
    finite: Optional[FiniteInstance] = None
    expected: dict = field(default_factory=dict)


def pair_scenario(m_dim: int = 2, d_basis=((1.0, 0.0),)) -> Scenario:
    """Pair groupoid on R^m with the product distribution D x D."""
    gd = pair_groupoid_maps(m_dim)
    d = linalg.orth_basis(np.asarray(d_basis, dtype=float).T)
    comp = _complement(d, m_dim)
    r = d.shape[1]

    gens = []
    for j in range(r):
        gens.append(constant_field(gd.space, np.concatenate([d[:, j], np.zeros(m_dim)]),
                                   name=f"D_left[{j}]"))
        gens.append(constant_field(gd.space, np.concatenate([np.zeros(m_dim), d[:, j]]),
                                   name=f"D_right[{j}]"))
    dist = Distribution(gd.space, gens, rank=2 * r, name="DxD")

    label_dim = m_dim - r
    lg_matrix = np.zeros((2 * label_dim, 2 * m_dim))
    lg_matrix[:label_dim, :m_dim] = comp.T
    lg_matrix[label_dim:, m_dim:] = comp.T
    chart = LeafChart(
        affine_map(gd.space, ChartManifold(2 * label_dim), lg_matrix, name="labels"),
        affine_map(gd.base, ChartManifold(label_dim), comp.T, name="base labels"))

    quotient = pair_groupoid_maps(label_dim)
    section_matrix = np.zeros((2 * m_dim, 2 * label_dim))
    section_matrix[:m_dim, :label_dim] = comp
    section_matrix[m_dim:, label_dim:] = comp
    section = affine_map(chart.lambda_g.codomain, gd.space, section_matrix,
                         name="label section")

    base_fields = [constant_field(gd.base, d[:, j], name=f"D[{j}]") for j in range(r)]
    return Scenario(
        name=f"pair(R^{m_dim}, D rank {r})", family="pair",
        params={"m_dim": m_dim, "d_basis": np.asarray(d_basis, dtype=float).tolist()},
        groupoid=gd, dist=dist, chart=chart, base_fields=base_fields, complete=True,
        quotient=quotient, quotient_section=section,
        expected={"rank_S": 2 * r, "rank_S_cap_TP": r, "rank_S_t": r,
                  "object_label_dim": label_dim, "arrow_label_dim": 2 * label_dim})


def vb_scenario(k: int = 2, w_basis=((1.0, 0.0),), m_dim: int = 2,
                f_basis=((1.0, 0.0),)) -> Scenario:
    """Vector-bundle groupoid R^k x M with the distribution W x F."""
    gd = vb_groupoid_maps(k, m_dim)
    w = linalg.orth_basis(np.asarray(w_basis, dtype=float).T)
    f = linalg.orth_basis(np.asarray(f_basis, dtype=float).T)
    cw = _complement(w, k)
    cf = _complement(f, m_dim)
    nw, nf = w.shape[1], f.shape[1]

    gens = []
    for j in range(nw):
        gens.append(constant_field(gd.space, np.concatenate([w[:, j], np.zeros(m_dim)]),
                                   name=f"W[{j}]"))
    for j in range(nf):
        gens.append(constant_field(gd.space, np.concatenate([np.zeros(k), f[:, j]]),
                                   name=f"F[{j}]"))
    dist = Distribution(gd.space, gens, rank=nw + nf, name="WxF")

    fiber_labels = k - nw
    base_labels = m_dim - nf
    lg_matrix = np.zeros((fiber_labels + base_labels, k + m_dim))
    lg_matrix[:fiber_labels, :k] = cw.T
    lg_matrix[fiber_labels:, k:] = cf.T
    chart = LeafChart(
        affine_map(gd.space, ChartManifold(fiber_labels + base_labels), lg_matrix,
                   name="labels"),
        affine_map(gd.base, ChartManifold(base_labels), cf.T, name="base labels"))

    quotient = vb_groupoid_maps(fiber_labels, base_labels)
    section_matrix = np.zeros((k + m_dim, fiber_labels + base_labels))
    section_matrix[:k, :fiber_labels] = cw
    section_matrix[k:, fiber_labels:] = cf
    section = affine_map(chart.lambda_g.codomain, gd.space, section_matrix,
                         name="label section")

    base_fields = [constant_field(gd.base, f[:, j], name=f"F[{j}]") for j in range(nf)]
    return Scenario(
        name=f"vb(R^{k} x R^{m_dim}, W rank {nw}, F rank {nf})", family="vb_trivial",
        params={"k": k, "w_basis": np.asarray(w_basis, dtype=float).tolist(),
                "m_dim": m_dim, "f_basis": np.asarray(f_basis, dtype=float).tolist()},
        groupoid=gd, dist=dist, chart=chart, base_fields=base_fields, complete=True,
        quotient=quotient, quotient_section=section,
        expected={"rank_S": nw + nf, "rank_S_cap_TP": nf, "rank_S_t": nw,
                  "object_label_dim": base_labels,
                  "arrow_label_dim": fiber_labels + base_labels})


def group_action_pair_scenario(m_dim: int = 2, direction=(1.0, 0.0)) -> Scenario:
    """Pair groupoid with the orbit distribution of diagonal translations.

    The translations along ``direction`` act on both slots at once; the
    orbit distribution is spanned by the single diagonal field and the
    leaf space is the pair groupoid of the translation quotient times an
    additive line recording the relative offset.
    """
    gd = pair_groupoid_maps(m_dim)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    comp = _complement(u.reshape(-1, 1), m_dim)
    b = m_dim - 1

    gens = [constant_field(gd.space, np.concatenate([u, u]), name="orbit")]
    dist = Distribution(gd.space, gens, rank=1, name="orbit span")

    lg_matrix = np.zeros((2 * b + 1, 2 * m_dim))
    lg_matrix[:b, :m_dim] = comp.T
    lg_matrix[b: 2 * b, m_dim:] = comp.T
    lg_matrix[2 * b, :m_dim] = u
    lg_matrix[2 * b, m_dim:] = -u
    chart = LeafChart(
        affine_map(gd.space, ChartManifold(2 * b + 1), lg_matrix, name="labels"),
        affine_map(gd.base, ChartManifold(b), comp.T, name="base labels"))

    quotient = gauge_groupoid_maps(b)
    section_matrix = np.zeros((2 * m_dim, 2 * b + 1))
    section_matrix[:m_dim, :b] = comp
    section_matrix[:m_dim, 2 * b] = u
    section_matrix[m_dim:, b: 2 * b] = comp
    section = affine_map(chart.lambda_g.codomain, gd.space, section_matrix,
                         name="label section")

    base_fields = [constant_field(gd.base, u, name="orbit base")]
    return Scenario(
        name=f"translation action on pair(R^{m_dim})", family="group_action_pair",
        params={"m_dim": m_dim, "direction": np.asarray(direction, dtype=float).tolist()},
        groupoid=gd, dist=dist, chart=chart, base_fields=base_fields, complete=True,
        quotient=quotient, quotient_section=section,
        expected={"rank_S": 1, "rank_S_cap_TP": 1, "rank_S_t": 0,
                  "object_label_dim": b, "arrow_label_dim": 2 * b + 1})


def presymplectic_pair_dirac_scenario(omega=None, m_dim: int = 3) -> Scenario:
    """Pair groupoid on R^m carrying the difference of two-form graphs.

    The distribution is the kernel of the form in both slots; the labels
    drop the kernel directions and the quotient is the pair groupoid of
    the reduced space, where the pushed-forward structure is the graph of
    an invertible bivector.
    """
    if omega is None:
        omega = np.zeros((m_dim, m_dim))
        omega[0, 1], omega[1, 0] = 1.0, -1.0
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (m_dim, m_dim) or np.max(np.abs(omega + omega.T)) > 0:
        raise ValueError("omega must be an antisymmetric m x m matrix")

    gd = pair_groupoid_maps(m_dim)
    kernel = linalg.null_basis(omega)
    z = kernel.shape[1]
    comp = _complement(kernel, m_dim)

    dirac_m = from_two_form(ChartManifold(m_dim), omega, name="graph(omega)")
    dirac_g = minus_double(dirac_m)

    gens = []
    for j in range(z):
        gens.append(constant_field(gd.space,
                                   np.concatenate([kernel[:, j], np.zeros(m_dim)]),
                                   name=f"ker_left[{j}]"))
        gens.append(constant_field(gd.space,
                                   np.concatenate([np.zeros(m_dim), kernel[:, j]]),
                                   name=f"ker_right[{j}]"))
    dist = Distribution(gd.space, gens, rank=2 * z, name="kernel x kernel")

    label_dim = m_dim - z
    lg_matrix = np.zeros((2 * label_dim, 2 * m_dim))
    lg_matrix[:label_dim, :m_dim] = comp.T
    lg_matrix[label_dim:, m_dim:] = comp.T
    chart = LeafChart(
        affine_map(gd.space, ChartManifold(2 * label_dim), lg_matrix, name="labels"),
        affine_map(gd.base, ChartManifold(label_dim), comp.T, name="base labels"))

    quotient = pair_groupoid_maps(label_dim)
    section_matrix = np.zeros((2 * m_dim, 2 * label_dim))
    section_matrix[:m_dim, :label_dim] = comp
    section_matrix[m_dim:, label_dim:] = comp
    section = affine_map(chart.lambda_g.codomain, gd.space, section_matrix,
                         name="label section")

    base_fields = [constant_field(gd.base, kernel[:, j], name=f"ker[{j}]")
                   for j in range(z)]
    reduced = comp.T @ omega @ comp
    return Scenario(
        name=f"presymplectic pair on R^{m_dim}", family="presymplectic_pair_dirac",
        params={"m_dim": m_dim, "omega": omega.tolist()},
        groupoid=gd, dist=dist, chart=chart, base_fields=base_fields, complete=True,
        quotient=quotient, quotient_section=section, dirac=dirac_g,
        expected={"rank_S": 2 * z, "rank_S_cap_TP": z, "rank_S_t": z,
                  "reduced_omega": reduced.tolist(),
                  "object_label_dim": label_dim, "arrow_label_dim": 2 * label_dim})


def finite_scenario(instance: str = "ex_basegp") -> Scenario:
    """Discrete instances exercising both quotient constructions."""
    if instance == "ex_basegp":
        g = fin.pair_groupoid(4)
        blocks = [[0, 1], [2, 3]]
        normal = fin.pair_block_subgroupoid(4, blocks)
        nss = fin.pair_block_nss(4, blocks)
        expected = "isomorphic"
    elif instance == "ex_vb":
        g = fin.group_bundle_groupoid(4, 2)
        normal = frozenset(m * 4 + x for m in range(2) for x in (0, 2))
        nss = fin.group_bundle_nss(4, 2, [0, 2])
        expected = "different"
    else:
        raise ValueError(f"unknown finite instance {instance!r}")
    return Scenario(
        name=f"finite {instance}", family="finite", params={"instance": instance},
        finite=FiniteInstance(g, normal, nss, expected))


FAMILIES = {
    "finite": finite_scenario,
    "pair": pair_scenario,
    "vb_trivial": vb_scenario,
    "group_action_pair": group_action_pair_scenario,
    "presymplectic_pair_dirac": presymplectic_pair_dirac_scenario,
}

FAMILY_DESCRIPTIONS = {
    "finite": "Discrete quotient instances (params: instance = ex_basegp | ex_vb).",
    "pair": "Pair groupoid on R^m with a product distribution "
            "(params: m_dim, d_basis = rows spanning D).",
    "vb_trivial": "Trivial vector-bundle groupoid R^k x M with W x F "
                  "(params: k, w_basis, m_dim, f_basis).",
    "group_action_pair": "Pair groupoid with a free diagonal translation action "
                         "(params: m_dim, direction).",
    "presymplectic_pair_dirac": "Pair groupoid with the difference of constant "
                                "two-form graphs (params: m_dim, omega matrix).",
}


def build_scenario(family: str, params: dict) -> Scenario:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    builder = FAMILIES[family]
    kwargs = dict(params or {})
    return builder(**kwargs)
