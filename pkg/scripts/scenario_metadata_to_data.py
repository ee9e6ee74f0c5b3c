#!/usr/bin/env python3
"""Replay the metadata-to-data walkthrough against the bundled demo dataset.

Walks from the supervision department through its goals and measures to the
warehouse, aggregates, records the conclusion as an evaluation, and finds it
again via navigation.
"""

from __future__ import annotations

import json

from metarepo.fixtures import build_demo_repository
from metarepo.scenarios import scenario_metadata_to_data


def main() -> None:
    repo = build_demo_repository()
    for i, step in enumerate(scenario_metadata_to_data(repo), start=1):
        print(f"step {i}: {step['step']}")
        if "query" in step:
            print(f"  query: {step['query']}")
        print(f"  {json.dumps(step['result'])}")


if __name__ == "__main__":
    main()
