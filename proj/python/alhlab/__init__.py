"""Python access to the alh-lab core."""

import json

from ._alhlab import (
    NumericalFailure,
    UsageError,
    indicial_roots,
    is_ricci_flat,
    json_to_csv,
    l2_hodge_dim,
    moduli_dim,
    run,
    symmetrize,
    wh_interval,
)

__all__ = [
    "NumericalFailure",
    "UsageError",
    "indicial_roots",
    "is_ricci_flat",
    "json_to_csv",
    "l2_hodge_dim",
    "moduli_dim",
    "run",
    "run_json",
    "symmetrize",
    "wh_interval",
]


def run_json(*args):
    """Run a subcommand and return the parsed artifact; raises on a nonzero exit."""
    code, out, err = run([str(a) for a in args])
    if code != 0:
        raise RuntimeError(f"alh-lab exited with {code}: {err.strip()}")
    return json.loads(out)
