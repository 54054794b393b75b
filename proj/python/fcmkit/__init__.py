"""Fuzzy cognitive map toolkit.

Models, hierarchies and corpora are native objects; reports, simulation
results and comparisons are returned as plain dicts.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping, Optional, Sequence

from . import _core
from ._core import (
    Corpus as _Corpus,
    FcmError,
    Hierarchy,
    Model,
    beta_from_tuple,
    condense,
    defuzzify,
    generate_corpus,
    normalize_numeric,
    preset_names,
    term_label,
    tuple_from_beta,
)

__all__ = [
    "Corpus",
    "FcmError",
    "Hierarchy",
    "Model",
    "aggregate",
    "beta_from_tuple",
    "centrality",
    "compare",
    "condense",
    "defuzzify",
    "generate_corpus",
    "normalize_numeric",
    "preset_names",
    "simulate",
    "term_label",
    "tuple_from_beta",
]

_EQUAL = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def _dump(spec: Optional[Mapping[str, Any]]) -> str:
    return json.dumps(dict(spec)) if spec else ""


def centrality(model: Model, weights: Sequence[float] = _EQUAL, edge_length: str = "inverse") -> dict:
    """Per-node degree, closeness, betweenness, CCM and credibility, plus map-level scores."""
    return json.loads(_core._centrality(model, list(weights), edge_length))


def aggregate(
    maps: Iterable[Model],
    cw: Optional[Sequence[float]] = None,
    stakeholder: str = "social",
    kind: str = "social",
) -> tuple[Model, list[str]]:
    """Credibility-weighted sum of maps; `cw` defaults to each map's consensus centrality."""
    return _core._aggregate(list(maps), None if cw is None else list(cw), stakeholder, kind)


def simulate(model: Model, spec: Optional[Mapping[str, Any]] = None, hierarchy: Optional[Hierarchy] = None) -> dict:
    """Run a scenario (initial_state, preset, clamps, lambda, ...) to its steady state."""
    return json.loads(_core._simulate(model, _dump(spec), hierarchy))


def compare(
    model: Model,
    policy: Mapping[str, Any],
    baseline: Optional[Mapping[str, Any]] = None,
    targets: Sequence[str] = (),
    hierarchy: Optional[Hierarchy] = None,
) -> dict:
    """Steady-state deltas of `policy` against `baseline`, node by node."""
    return json.loads(_core._compare(model, _dump(baseline), _dump(policy), list(targets), hierarchy))


class Corpus:
    """A loaded stakeholder corpus with group and social maps at every level."""

    def __init__(self, native: _Corpus):
        self._native = native

    @classmethod
    def load(
        cls,
        manifest: str,
        threads: int = 0,
        social_from_groups: bool = False,
        weights: Sequence[float] = _EQUAL,
    ) -> "Corpus":
        return cls(_Corpus.load(manifest, threads, social_from_groups, list(weights)))

    @property
    def model_ids(self) -> list[str]:
        return self._native.model_ids

    @property
    def warnings(self) -> list[str]:
        return self._native.warnings

    @property
    def hierarchy(self) -> Hierarchy:
        return self._native.hierarchy

    def model(self, model_id: str) -> Model:
        return self._native.model(model_id)

    def social(self, level: str) -> Model:
        return self._native.social(level)

    def drill(
        self,
        parent: str,
        spec: Optional[Mapping[str, Any]] = None,
        clamp_value: float = 1.0,
        trajectories: bool = False,
    ) -> dict:
        """Clamp each child of `parent` in turn and report deltas against the baseline."""
        return json.loads(self._native._drill(parent, _dump(spec), clamp_value, trajectories))

    def rank(
        self,
        parent: str,
        spec: Optional[Mapping[str, Any]] = None,
        weights: Sequence[float] = (0.25, 0.25, 0.5),
        targets: Optional[Mapping[str, Any]] = None,
    ) -> dict:
        """Rank the children of `parent` by importance, feasibility and influence."""
        return json.loads(self._native._rank(parent, _dump(spec), list(weights), _dump(targets)))
