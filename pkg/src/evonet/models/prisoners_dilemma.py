"""Spatial prisoner's dilemma with best-neighbor imitation (Nowak-May).

Each round, every node accumulates payoffs from one game against each
neighbor plus one game against itself, then adopts the cooperation flag of
the best-performing agent in its closed neighborhood. The update is
synchronous: all payoffs come from the same snapshot.

Strategy encoding (4 states, cooperation = even value):

    0  cooperator      (cooperated last round too)
    1  defector        (defected last round too)
    2  new cooperator  (was a defector)
    3  new defector    (was a cooperator)

Ties keep the node's own flag when its payoff matches the neighborhood
maximum; otherwise the lowest-id maximal neighbor wins. Payoffs accumulate
over neighbors in ascending id order with the self-interaction term added
last, so results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import ClassVar

import numpy as np

from ..errors import ModelError
from ..graph import Graph


def _load_meta():
    from . import meta_from_json

    path = resources.files(__package__).joinpath("prisonersDilemma.json")
    with resources.as_file(path) as p:
        return meta_from_json(p)


@dataclass(frozen=True)
class PDParams:
    """Weak PD payoffs: only the temptation is tunable; R, P, S are fixed."""

    temptation: float
    REWARD: ClassVar[float] = 1.0
    PUNISHMENT: ClassVar[float] = 0.0
    SUCKER: ClassVar[float] = 0.0

    def __post_init__(self):
        if not 0.0 <= self.temptation <= 10.0:
            raise ModelError(f"temptation {self.temptation} outside declared range [0,10]")


def pd_payoff(a_cooperates: bool, b_cooperates: bool, params: PDParams) -> float:
    """Payoff to A for one game of A against B."""
    if a_cooperates:
        return PDParams.REWARD if b_cooperates else PDParams.SUCKER
    return params.temptation if b_cooperates else PDParams.PUNISHMENT


def pd_accumulate(graph: Graph, node_id: int, params: PDParams) -> float:
    """Total payoff of one node: every neighbor (ascending) plus itself."""
    strat = graph.column("strategy")
    me = int(strat[node_id]) % 2 == 0
    total = 0.0
    for nb in graph.neighbors(node_id):
        total += pd_payoff(me, int(strat[nb]) % 2 == 0, params)
    total += pd_payoff(me, me, params)
    return total


class PrisonersDilemma:
    """Vectorized implementation of the imitation dynamics above."""

    def init(self, ctx) -> bool:
        g = ctx.graph
        if "strategy" not in g.node_schema:
            return ctx.fail("prisonersDilemma needs a 'strategy' node attribute")
        strat = np.asarray(g.column("strategy"))
        if strat.size and not np.isin(strat, (0, 1, 2, 3)).all():
            bad = int(strat[~np.isin(strat, (0, 1, 2, 3))][0])
            return ctx.fail(f"strategy value {bad} outside {{0,1,2,3}}")
        try:
            self._params = PDParams(temptation=ctx.params["temptation"].value)
        except KeyError:
            return ctx.fail("prisonersDilemma needs a 'temptation' parameter")
        except ModelError as exc:
            return ctx.fail(str(exc))
        # Flattened adjacency, cached once: topology is static for a trial.
        indptr = g.adj_indptr
        self._dst = g.adj_targets
        self._src = np.repeat(np.arange(g.node_count, dtype=np.int64), np.diff(indptr))
        self._deg = np.diff(indptr)
        if len(self._dst):
            self._red_idx = np.minimum(indptr[:-1], len(self._dst) - 1)
        else:
            self._red_idx = None
        return True

    def step(self, ctx) -> None:
        g = ctx.graph
        n = g.node_count
        if n == 0:
            return
        p = self._params
        strat = g.column("strategy")
        coop = (strat & 1) == 0
        src, dst = self._src, self._dst

        # Phase 1: payoffs from the current snapshot. bincount accumulates
        # in CSR order (ascending neighbor id per node); self term last.
        if len(dst):
            c_src, c_dst = coop[src], coop[dst]
            w = np.where(
                c_src,
                np.where(c_dst, p.REWARD, p.SUCKER),
                np.where(c_dst, p.temptation, p.PUNISHMENT),
            )
            payoff = np.bincount(src, weights=w, minlength=n)
        else:
            payoff = np.zeros(n, dtype=np.float64)
        payoff += np.where(coop, p.REWARD, p.PUNISHMENT)

        # Phase 2: adopt the flag of the neighborhood maximum; own payoff
        # matching the max keeps the own flag, otherwise the lowest-id
        # maximal neighbor wins.
        if self._red_idx is not None:
            nbr_payoff = payoff[dst]
            nbr_max = np.maximum.reduceat(nbr_payoff, self._red_idx)
            nbr_max[self._deg == 0] = -np.inf
        else:
            nbr_max = np.full(n, -np.inf)
        keep = payoff >= nbr_max
        winner = np.arange(n, dtype=np.int64)
        if self._red_idx is not None:
            cand = np.where(nbr_payoff == nbr_max[src], dst, n)
            best_nbr = np.minimum.reduceat(cand, self._red_idx)
            winner = np.where(keep, winner, best_nbr)
        new_coop = coop[winner]

        # Phase 3: recode to the 4-state scheme.
        changed = new_coop != coop
        new_strat = np.where(new_coop, np.where(changed, 2, 0), np.where(changed, 3, 1))
        g.set_column("strategy", new_strat.astype(np.int64))

    def converged(self, ctx) -> bool:
        return False


PD_META = _load_meta()
