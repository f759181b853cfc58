"""Cluster construction for lattice subsystems.

For a subsystem F the gap space at level n joins, over interior cut points
r, the tensor products of the complements of F_r and F_{n-r}; its
orthocomplement is an inclusion system containing F whose generated
product system is the cluster of F.  For a unit-generated F the cluster
inclusion carries a vacuum + one-excitation structure, and the cluster is
the full system.

Gap and inclusion levels depend only on the level-1 space, so they are
memoised by its basis bytes and grown lazily with depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lattice import (
    LatticeInclusionSystem,
    LatticeProductSystem,
    LatticeSubsystem,
    generate_product_system,
    unit_line_subsystem,
    unit_section,
)
from .linalg import (
    Subspace,
    complement,
    contains,
    join,
    ominus,
    orthonormalize,
    span,
    subspace_distance,
    tensor,
    zero_space,
)

CHECK_TOL = 1e-8

_CACHE: dict = {}


def _cluster_data(sub: LatticeSubsystem, depth: int) -> dict:
    """Complements, gap levels and inclusion levels of F up to ``depth``.

    Level n uses only data below n, so the cached lists extend in place
    when a deeper request arrives.
    """
    key = (sub.parent.slot_dim, sub.level1.basis.tobytes())
    entry = _CACHE.setdefault(key, {"comp": [], "gap": [], "incl": []})
    g = sub.parent.slot_dim
    while len(entry["incl"]) < depth:
        n = len(entry["incl"]) + 1
        entry["comp"].append(complement(sub.level(n)))
        cols = [np.kron(entry["comp"][r - 1].basis, entry["comp"][n - r - 1].basis)
                for r in range(1, n)
                if entry["comp"][r - 1].rank and entry["comp"][n - r - 1].rank]
        if cols:
            gap = orthonormalize(np.hstack(cols))
        else:
            gap = zero_space(g ** n)
        entry["gap"].append(gap)
        entry["incl"].append(complement(gap))
    return entry


def ominus_levels(sub: LatticeSubsystem, depth: Optional[int] = None) -> list[Subspace]:
    """Gap spaces: level n is the join over cuts 0 < r < n of
    complement(F_r) (x) complement(F_{n-r}).  Level 1 is the zero space."""
    if depth is None:
        depth = sub.depth
    return list(_cluster_data(sub, depth)["gap"][:depth])


def cluster_inclusion(sub: LatticeSubsystem, depth: Optional[int] = None,
                      check: bool = False) -> LatticeInclusionSystem:
    """Orthocomplements of the gap spaces, as an inclusion system.

    Contains the input subsystem at every level.  With ``check`` on, the
    two tensor-stability inclusions (and their versions relative to F) are
    asserted for all split points.
    """
    if depth is None:
        depth = sub.depth
    levels = _cluster_data(sub, depth)["incl"][:depth]
    inc = LatticeInclusionSystem(sub.parent, levels)
    for n in range(1, depth + 1):
        if not contains(levels[n - 1], sub.level(n)):
            raise AssertionError(f"cluster inclusion does not contain F at level {n}")
    if check:
        for s in range(1, depth):
            for t in range(1, depth - s + 1):
                big = levels[s + t - 1]
                if not contains(big, tensor(levels[s - 1], sub.level(t))):
                    raise AssertionError(f"stability fails at ({s},{t})")
                if not contains(big, tensor(sub.level(s), levels[t - 1])):
                    raise AssertionError(f"stability fails at ({s},{t}) (left)")
                strict_s = ominus(levels[s - 1], sub.level(s))
                strict_big = ominus(big, sub.level(s + t))
                if not contains(strict_big, tensor(strict_s, sub.level(t))):
                    raise AssertionError(f"strict stability fails at ({s},{t})")
    return inc


def cluster_system(sub: LatticeSubsystem, depth: Optional[int] = None) -> LatticeSubsystem:
    """Product system generated by the cluster inclusion of the subsystem."""
    return generate_product_system(cluster_inclusion(sub, depth))


def pair_cluster(f1: LatticeInclusionSystem, f2: LatticeInclusionSystem,
                 depth: Optional[int] = None) -> LatticeInclusionSystem:
    """Cluster inclusion of an ordered pair of inclusion systems.

    Level n is the orthocomplement of the join over 0 < r < n of
    complement(F1_r) (x) complement(F2_{n-r}); it contains both inputs and
    coincides with the single-system cluster inclusion when F1 = F2.
    """
    if f1.parent.slot_dim != f2.parent.slot_dim:
        raise ValueError("inclusion systems live over different slot spaces")
    if depth is None:
        depth = min(f1.depth, f2.depth)
    g = f1.parent.slot_dim
    comp1 = [complement(f1.level(n)) for n in range(1, depth + 1)]
    comp2 = [complement(f2.level(n)) for n in range(1, depth + 1)]
    levels = []
    for n in range(1, depth + 1):
        acc = zero_space(g ** n)
        for r in range(1, n):
            acc = join(acc, tensor(comp1[r - 1], comp2[n - r - 1]))
        levels.append(complement(acc))
    out = LatticeInclusionSystem(f1.parent, levels)
    for n in range(1, depth + 1):
        if not (contains(out.level(n), f1.level(n))
                and contains(out.level(n), f2.level(n))):
            raise AssertionError(f"pair cluster does not contain its inputs at level {n}")
    return out


def excitation_space(system: LatticeProductSystem, n: int) -> Subspace:
    """Non-vacuum part of the cluster inclusion of the unit line.

    Level n of the cluster inclusion of Cu, with the line through u^(x)n
    removed; it is spanned by the single-excitation vectors and has
    dimension n(g-1).  Depends only on data up to level n.
    """
    line = unit_line_subsystem(system, max(n, 1))
    entry = _cluster_data(line, n)
    exc = entry.setdefault("exc", [])
    while len(exc) < n:
        m = len(exc) + 1
        exc.append(ominus(entry["incl"][m - 1], span(system.unit_fiber(m))))
    return exc[n - 1]


def excitation_decomposition_check(system: LatticeProductSystem, m: int, n: int,
                                   tol: float = CHECK_TOL) -> bool:
    """X_{m+n} = (X_m (x) u^n) + (u^m (x) X_n), with orthogonal summands."""
    xm = excitation_space(system, m)
    xn = excitation_space(system, n)
    xmn = excitation_space(system, m + n)
    left = tensor(xm, span(system.unit_fiber(n)))
    right = tensor(span(system.unit_fiber(m)), xn)
    overlap = left.basis.conj().T @ right.basis
    if overlap.size and np.max(np.abs(overlap)) > 1e-12:
        return False
    return subspace_distance(xmn, join(left, right)) < tol


def shift_orthogonality_check(system: LatticeProductSystem, m: int, max_level: int) -> bool:
    """Shifted excitation vectors stay orthogonal to unshifted ones.

    Checks <u^m (x) z (x) u^p, x (x) u^(s+p)> = 0 for all z in X_s and
    x in X_m, over every padding with total level at most ``max_level``.
    This is the finite-level content of pure isometry of the unit shift.
    """
    u = system.reference_unit
    xm = excitation_space(system, m)
    if xm.rank == 0:
        return True
    for s in range(1, max_level - m + 1):
        xs = excitation_space(system, s)
        for p in range(0, max_level - m - s + 1):
            pad_front = unit_section(u, m)
            pad_back = unit_section(u, p)
            tail = unit_section(u, s + p)
            for zi in range(xs.rank):
                shifted = np.kron(np.kron(pad_front, xs.basis[:, zi]), pad_back)
                for xi in range(xm.rank):
                    fixed = np.kron(xm.basis[:, xi], tail)
                    if abs(np.vdot(shifted, fixed)) > 1e-12:
                        return False
    return True


@dataclass
class ClusterReport:
    """Per-level summary of the cluster construction for one subsystem."""

    slot_dim: int
    depth: int
    input_dims: list[int]
    ominus_dims: list[int]
    inclusion_dims: list[int]
    generated_dims: list[int]
    excitation_dims: list[int] = field(default_factory=list)
    containment_ok: bool = True
    generation_defect: float = 0.0

    def as_dict(self) -> dict:
        return {
            "slot_dim": self.slot_dim,
            "depth": self.depth,
            "input_dims": self.input_dims,
            "ominus_dims": self.ominus_dims,
            "inclusion_dims": self.inclusion_dims,
            "generated_dims": self.generated_dims,
            "excitation_dims": self.excitation_dims,
            "containment_ok": self.containment_ok,
            "generation_defect": self.generation_defect,
        }


def cluster_report(sub: LatticeSubsystem, depth: Optional[int] = None,
                   check: bool = True) -> ClusterReport:
    """Run the full cluster pipeline on a subsystem and tabulate dimensions."""
    if depth is None:
        depth = sub.depth
    gaps = ominus_levels(sub, depth)
    inc = cluster_inclusion(sub, depth, check=check)
    gen = cluster_system(sub, depth)
    ok = all(
        contains(inc.level(n), sub.level(n)) and contains(gen.level(n), inc.level(n))
        for n in range(1, depth + 1))
    unit_generated = sub.level1.rank == 1 and contains(
        sub.level1, span(sub.parent.reference_unit))
    exc = []
    if unit_generated:
        exc = [excitation_space(sub.parent, n).rank for n in range(1, depth + 1)]
    return ClusterReport(
        slot_dim=sub.parent.slot_dim,
        depth=depth,
        input_dims=[sub.level(n).rank for n in range(1, depth + 1)],
        ominus_dims=[s.rank for s in gaps],
        inclusion_dims=[inc.level(n).rank for n in range(1, depth + 1)],
        generated_dims=[gen.level(n).rank for n in range(1, depth + 1)],
        excitation_dims=exc,
        containment_ok=ok,
        generation_defect=gen.generation_defect or 0.0,
    )
