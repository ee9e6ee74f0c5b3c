#!/usr/bin/env python3
"""Replay the metadata-evolution walkthrough against the bundled demo dataset.

Starts from cube data, finds the measure and goals behind it, charts the NPA
series, and inspects how the NPA definition, a bank's attributes, and the
events affecting it changed over time.
"""

from __future__ import annotations

import json

from metarepo.fixtures import build_demo_repository
from metarepo.scenarios import scenario_metadata_evolution


def main() -> None:
    repo = build_demo_repository()
    for i, step in enumerate(scenario_metadata_evolution(repo), start=1):
        print(f"step {i}: {step['step']}")
        if "window" in step:
            print(f"  window: {step['window'][0]} .. {step['window'][1]}")
        print(f"  {json.dumps(step['result'])}")


if __name__ == "__main__":
    main()
