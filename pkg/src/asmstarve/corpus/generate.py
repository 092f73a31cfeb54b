"""Regenerates the bundled data files from the builders.

The .asm sources, environment scripts, and the manifest of expected verdicts
all come from here; tests pin the bundled files against this module so the
two can never drift.  Run as ``python -m asmstarve.corpus.generate`` to
rewrite data/ in place.
"""
from __future__ import annotations

import json
from pathlib import Path

from .builders import aodv_source, dining_philosophers_source

ENV_SCRIPTS: dict[str, dict] = {
    # no responder ever: the initiator's request falls into the void
    "aodv2_partitioned.json": {"steps": {}},
    # sever every link before the first move and never reply
    "aodv3_partitioned.json": {
        "steps": {
            "0": [
                {"location": "neighb(h1)", "value": []},
                {"location": "neighb(h2)", "value": []},
                {"location": "neighb(h3)", "value": []},
            ]
        }
    },
    # intact line h1-h2-h3: the route reply for the 2-hop path arrives at
    # step 4, two steps per hop
    "aodv3_line.json": {
        "steps": {
            "4": [
                {"location": "replies(h1)", "value": [2, 1]},
            ]
        }
    },
}

DP_EXPECTED = {
    "risky_functions": ["owner"],
    "predicates": {"eating": "not-risky", "thinking": "risky"},
    "vulnerable": ["Philosopher.takeForks"],
    "certificate": False,
}
DP_BAKERY_EXPECTED = {
    "risky_functions": ["isMyTurn", "owner"],
    "predicates": {"eating": "not-risky", "thinking": "risky"},
    "vulnerable": ["Philosopher.takeForks"],
    "certificate": False,
}
AODV_NT_EXPECTED = {
    "risky_functions": ["neighb", "replies", "routingTable", "waiting", "wishToInitiate"],
    "predicates": {"waiting": "risky"},
    "vulnerable": ["Initiator.awaitReply"],
    "certificate": False,
}
AODV_T_EXPECTED = {
    "risky_functions": ["neighb", "replies", "routingTable", "wishToInitiate"],
    "predicates": {"waiting": "not-risky"},
    "vulnerable": [],
    "certificate": True,
}


def manifest() -> dict:
    def dp(name: str, n: int, variant: str, expected: dict) -> dict:
        return {
            "name": name,
            "file": f"{name}.asm",
            "builder": "build_dining_philosophers",
            "params": {"n": n, "variant": variant},
            "env_files": [],
            "expected": expected,
        }

    def aodv(name: str, hosts: int, topology: str, with_timeout: bool, envs: list[str], expected: dict) -> dict:
        return {
            "name": name,
            "file": f"{name}.asm",
            "builder": "build_aodv",
            "params": {
                "hosts": hosts,
                "topology": topology,
                "with_timeout": with_timeout,
                "timeout_init": 5,
            },
            "env_files": envs,
            "expected": expected,
        }

    return {
        "entries": [
            dp("dining_philosophers", 5, "baseline", DP_EXPECTED),
            dp("dining_philosophers_bakery", 5, "bakery", DP_BAKERY_EXPECTED),
            dp("dp2", 2, "baseline", DP_EXPECTED),
            dp("dp3", 3, "baseline", DP_EXPECTED),
            dp("dp3_bakery", 3, "bakery", DP_BAKERY_EXPECTED),
            aodv("aodv_no_timeout", 2, "partitioned", False, ["aodv2_partitioned.json"], AODV_NT_EXPECTED),
            aodv("aodv_timeout", 2, "partitioned", True, ["aodv2_partitioned.json"], AODV_T_EXPECTED),
            aodv(
                "aodv3_no_timeout",
                3,
                "line",
                False,
                ["aodv3_partitioned.json", "aodv3_line.json"],
                AODV_NT_EXPECTED,
            ),
            aodv(
                "aodv3_timeout",
                3,
                "line",
                True,
                ["aodv3_partitioned.json", "aodv3_line.json"],
                AODV_T_EXPECTED,
            ),
        ]
    }


def sources() -> dict[str, str]:
    """Filename -> .asm source for every bundled model."""
    out: dict[str, str] = {}
    for row in manifest()["entries"]:
        params = row["params"]
        if row["builder"] == "build_dining_philosophers":
            src = dining_philosophers_source(params["n"], params["variant"])
        else:
            src = aodv_source(
                params["hosts"], params["topology"], params["with_timeout"], params["timeout_init"]
            )
        out[row["file"]] = src + "\n"
    return out


def write_data_files(target: Path) -> list[Path]:
    target.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for fname, src in sources().items():
        path = target / fname
        path.write_text(src)
        written.append(path)
    for fname, data in ENV_SCRIPTS.items():
        path = target / fname
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        written.append(path)
    path = target / "corpus.json"
    path.write_text(json.dumps(manifest(), indent=2) + "\n")
    written.append(path)
    return written


if __name__ == "__main__":
    from .registry import DATA_DIR

    for p in write_data_files(DATA_DIR):
        print(p)
