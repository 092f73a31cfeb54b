"""Bundled example machines with frozen analysis expectations."""
from .builders import (
    AODV_TOPOLOGIES,
    DP_VARIANTS,
    aodv_source,
    build_aodv,
    build_dining_philosophers,
    dining_philosophers_source,
)
from .registry import DATA_DIR, CorpusEntry, entries, entry, load_manifest, load_model

__all__ = [
    "AODV_TOPOLOGIES",
    "DP_VARIANTS",
    "aodv_source",
    "build_aodv",
    "build_dining_philosophers",
    "dining_philosophers_source",
    "DATA_DIR",
    "CorpusEntry",
    "entries",
    "entry",
    "load_manifest",
    "load_model",
]
