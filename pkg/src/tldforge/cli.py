"""Command line driver.

Exit codes: 0 success, 1 diagnostics with errors or a failed stage,
2 usage error.  Diagnostics print as ``file:line:col: severity[code]:
message`` on stderr; generated code goes to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ForgeError, MultipleOrdersError
from .workspace import (STAGE_NAMES, load_workspace, run_oracle, run_pipeline,
                        suggest_skeleton)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tld-forge",
        description="Turn typed logic descriptions into analyzed Prolog and "
                    "Mercury procedures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pred_required=False):
        p.add_argument("--manifest", required=True, help="workspace manifest file")
        p.add_argument("--pred", required=pred_required,
                       help="procedure name (default: every described procedure)")

    p = sub.add_parser("check", help="load the workspace and report diagnostics")
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("skeleton", help="suggest a description skeleton")
    common(p, pred_required=True)
    p.add_argument("param", help="induction parameter name")

    p = sub.add_parser("transform", help="print the untyped description")
    common(p)
    p.add_argument("--emit-stage", choices=STAGE_NAMES, default="simplified")

    p = sub.add_parser("derive", help="print the derived clauses")
    common(p)
    p.add_argument("--emit-stage", choices=STAGE_NAMES, default="derived")

    p = sub.add_parser("analyze", help="reorder, eliminate and report determinism")
    common(p)
    p.add_argument("--dir-index", type=int, default=1, help="1-based directionality")
    p.add_argument("--level", choices=("paper-compat", "none"), default="paper-compat")

    p = sub.add_parser("gen", help="emit code")
    p.add_argument("target", choices=("prolog", "mercury"))
    common(p)
    p.add_argument("--dir-index", type=int, default=1)
    p.add_argument("--level", choices=("paper-compat", "none"), default="paper-compat")
    p.add_argument("--cuts", action="store_true", help="introduce cuts on switches")
    p.add_argument("--split", action="store_true",
                   help="emit one suffixed procedure per directionality")
    p.add_argument("--emit-stage", choices=STAGE_NAMES,
                   help="dump an intermediate stage instead of final code")

    p = sub.add_parser("oracle", help="bounded-universe verification")
    p.add_argument("action", choices=("equiv",))
    common(p, pred_required=True)
    p.add_argument("--depth", type=int, default=2, help="universe depth bound")

    return parser


def _load(path: str):
    result = load_workspace(Path(path))
    for d in result.diagnostics:
        print(d.format(), file=sys.stderr)
    return result


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    loaded = _load(args.manifest)
    if args.command == "check":
        if loaded.ok:
            ws = loaded.workspace
            print(f"ok: {len(ws.tlds)} descriptions, "
                  f"{len(ws.specs)} specifications, "
                  f"{len(ws.env.defs)} types")
            return 0
        return 1
    if not loaded.ok:
        return 1
    ws = loaded.workspace

    try:
        if args.command == "skeleton":
            print(suggest_skeleton(ws, args.pred, args.param), end="")
            return 0
        if args.command == "oracle":
            report = run_oracle(ws, args.pred, depth=args.depth)
            print(report.describe())
            return 0 if report.ok else 1
        preds = [args.pred] if args.pred else list(ws.tlds)
        if not preds:
            print("nothing to do: the workspace has no descriptions", file=sys.stderr)
            return 1
        failed = False
        outputs = []
        for pred in preds:
            if args.command == "transform":
                r = run_pipeline(ws, pred, stage=args.emit_stage)
                outputs.append(r.code)
            elif args.command == "derive":
                r = run_pipeline(ws, pred, stage=args.emit_stage)
                outputs.append(r.code)
            elif args.command == "analyze":
                r = run_pipeline(ws, pred, level=args.level,
                                 dir_index=args.dir_index - 1)
                outputs.append(r.report)
                if not r.ok:
                    print(r.failure, file=sys.stderr)
                    failed = True
            elif args.command == "gen":
                r = run_pipeline(ws, pred, target=args.target, level=args.level,
                                 dir_index=args.dir_index - 1, cuts=args.cuts,
                                 split=args.split, stage=args.emit_stage)
                if not r.ok:
                    print(r.failure, file=sys.stderr)
                    failed = True
                    continue
                outputs.append(r.code)
                for w in r.warnings:
                    print(f"warning: {w}", file=sys.stderr)
                if ws.out_dir is not None and args.emit_stage is None:
                    ws.out_dir.mkdir(parents=True, exist_ok=True)
                    ext = ".pl" if args.target == "prolog" else ".m"
                    (ws.out_dir / f"{pred}{ext}").write_text(r.code)
            else:  # pragma: no cover
                raise AssertionError(args.command)
        print("\n".join(outputs), end="")
        return 1 if failed else 0
    except MultipleOrdersError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ForgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
