"""Bundled example systems on X = [0, 1].

1. Two IFSs with four distinct translations (1/5, 3/5 and 1/6, 1/2), all
   ratios 1/5, unequal map probabilities.
2. The same maps with every probability 1/2 (homogeneous pressure).
3. Ratio 0.2 in the first IFS and 0.3 in the second, translations 0 and 0.7,
   probabilities (0.4, 0.6); zeta = (1/2, 1/2).
"""
from __future__ import annotations

import json
from importlib import resources

from .core import RifsSpec, spec_from_dict

EXAMPLE_IDS = (1, 2, 3)


def example_text(k: int) -> str:
    if k not in EXAMPLE_IDS:
        raise ValueError(f"unknown example {k}; choose one of {EXAMPLE_IDS}")
    return resources.files("rifsquant.data").joinpath(f"example{k}.json").read_text()


def example_spec(k: int) -> RifsSpec:
    text = example_text(k)
    return spec_from_dict(json.loads(text), text)
