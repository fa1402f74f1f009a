#!/usr/bin/env python3
"""Run one scenario end to end and print the certificate summary.

Usage: python scripts/run_demo.py [configs/demo.cfg]
"""

import argparse
import sys
from pathlib import Path

from pipestab.cli import execute_run
from pipestab.config import ScenarioConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config", nargs="?", default="configs/demo.cfg")
    args = parser.parse_args()

    cfg = ScenarioConfig.from_file(args.config)
    report, summary = execute_run(cfg)

    c = report.constants
    print(f"scenario            {args.config}")
    print(f"verdict             {report.verdict}")
    print(f"certified rate mu   {c.mu:.6g}")
    print(f"fitted decay rate   {summary['fitted_rate']:.6g}  "
          f"(r^2 = {summary['r_squared']:.4f})")
    print(f"rate gap delta      {c.delta:.6g}")
    print(f"Gronwall constant   {c.Cg:.6g}")
    print(f"worst E margin      {report.bounds['worst_energy_margin']:.6g}")
    print(f"worst H margin      {report.bounds['worst_h1_margin']:.6g}")
    print(f"max |u| over run    {summary['max_u']:.6g}")
    print(f"outputs             {cfg['output.csv_path']}, "
          f"{cfg['output.report_path']}(.json)")
    return 0 if report.verdict != "bound_violated" else 2


if __name__ == "__main__":
    sys.exit(main())
