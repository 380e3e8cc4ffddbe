"""Simulator and statistical audit engine for Bell-type experiments.

Thin wrapper over the C++ extension module ``_bellsim``: operations that
produce reports return them as plain dicts/lists parsed from the same JSON
the command-line tool emits, so results are directly comparable across the
two front ends.

Model ids: ``singlet | sign | leak | resultleak | dice:w1,w2[,...] |
randfac:k:seed``.
"""

import csv
import io
import json

try:
    from . import _bellsim as _core
except ImportError:  # in-tree builds put the extension next to the package
    import _bellsim as _core

__version__ = _core.version()

InvalidArgument = _core.InvalidArgument
ParseError = _core.ParseError

__all__ = [
    "InvalidArgument",
    "ParseError",
    "audit",
    "audit_data",
    "chsh",
    "chsh_data",
    "exact_expectation",
    "play",
    "simulate",
    "strategy_ids",
    "sweep",
    "theorem_chain",
    "zoo_ids",
]


def simulate(model_id, n, seed=0, threads=1):
    """Simulate ``n`` runs; returns the ensemble as an NDJSON string.

    Identical inputs give a byte-identical string at any thread count.
    """
    return _core.simulate_ndjson(model_id, n, seed, threads)


def chsh(model_id, n=None, seed=0):
    """CHSH report at the canonical four directions.

    Exact when ``n`` is None, otherwise estimated from a fresh simulation of
    ``n`` runs. Keys: E_ab, E_abp, E_apb, E_apbp, S, stderr, method.
    """
    if n is None:
        return json.loads(_core.chsh_exact_json(model_id))
    return json.loads(_core.chsh_mc_json(model_id, n, seed))


def chsh_data(ndjson_text):
    """CHSH report estimated from a serialized ensemble."""
    return json.loads(_core.chsh_data_json(ndjson_text))


def exact_expectation(model_id, a, b):
    """Exact correlation E(a, b); ``a`` and ``b`` are 3-vectors."""
    return _core.exact_e(model_id, list(a), list(b))


def audit(model_id, n=None, seed=0, bins=16, alpha=1e-3, tol=1e-9):
    """Audit every independence condition plus the structural wiring check.

    Exact mode (``n`` is None) reads the model's joint table; empirical mode
    simulates ``n`` runs and tests the sample at significance ``alpha``.
    Returns the report dict: {"audits": [...], "all_passed": bool}.
    """
    if n is None:
        return json.loads(_core.audit_exact_json(model_id, tol))
    return json.loads(_core.audit_empirical_json(model_id, n, seed, bins, alpha))


def audit_data(ndjson_text, bins=16, alpha=1e-3):
    """Audit a serialized ensemble produced by :func:`simulate`."""
    return json.loads(_core.audit_data_json(ndjson_text, bins, alpha))


def play(strategy_id, rounds=10000, leak=False, seed=0, transcript=False):
    """Play the two-player question game with a shipped strategy.

    Returns the score dict; with ``transcript=True`` returns
    ``(score, transcript_ndjson)`` instead. ``leak=True`` opens the channel
    that shows player 1 the remote question (required by "pilotwave").
    """
    score_json, transcript_ndjson = _core.game_json(strategy_id, rounds, leak, seed)
    score = json.loads(score_json)
    if transcript:
        return score, transcript_ndjson
    return score


def sweep(model_id, thetas, n=20000, seed=0):
    """Tabulate E(theta) exactly and by simulation over ``thetas`` (radians).

    Returns a list of dicts with keys theta_rad, E_exact, E_mc, stderr.
    """
    text = _core.sweep_csv(model_id, list(thetas), n, seed)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({k: float(v) for k, v in row.items()})
    return rows


def theorem_chain(n_models=50, k_max=8, seed=0, tol=1e-12):
    """End-to-end bound check over random factorizable models plus the
    microstate-leak model and its ablation. Returns the report dict."""
    return json.loads(_core.theorem_chain_json(n_models, k_max, seed, tol))


def zoo_ids():
    """Model ids of the canonical zoo instances."""
    return list(_core.zoo_ids())


def strategy_ids():
    """Shipped game strategy ids."""
    return list(_core.strategy_ids())
