"""Run the bundled crossing example end to end and print what each step yields.

    python3 scripts/run_stvo26.py [--out DIR]
"""

import argparse
import shutil
import tempfile
from pathlib import Path

import nba
from nba.cli import main


def run(project: Path) -> None:
    for argv in (["check", "--project", str(project / "scenario1.cfg")],
                 ["check", "--project", str(project)],
                 ["infer", "--project", str(project), "--scenario", "S1"],
                 ["verify", "--project", str(project)],
                 ["trace", "--project", str(project), "--scenario", "S1",
                  "--fact", "anhalten_in(ego, zoneBlau1)"]):
        print(f"$ nba {' '.join(argv)}")
        code = main(argv)
        print(f"[exit {code}]\n")


def cli() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, help="copy the project here and keep outputs")
    args = parser.parse_args()
    if args.out:
        shutil.copytree(nba.bundled_project(), args.out, dirs_exist_ok=True)
        run(args.out)
        print(f"outputs in {args.out / 'out'}")
        return
    with tempfile.TemporaryDirectory() as tmp:
        project = Path(tmp) / "stvo26"
        shutil.copytree(nba.bundled_project(), project)
        run(project)


if __name__ == "__main__":
    cli()
