"""Command-line entry points: replay, ground, synth, train, serve."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .grammar import Grammar, ParseFailure, Parser
from .grounding import (
    CorpusError,
    GroundingFailure,
    NonSeparable,
    ground,
    load_weights,
    parse_corpus,
    save_weights,
    train,
)
from .ltlspec import SpecSyntaxError, parse_spec
from .scenario import ScenarioError, load_scenario, replay, replay_artifacts
from .symbols import SymbolError, instantiate_symbols
from .synthesis import controller_to_dot, controller_to_json, synthesize
from .worldmodel import WorldError, parse_world

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNREALIZABLE = 2


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def cmd_replay(args) -> int:
    try:
        scenario, world = load_scenario(args.scenario)
    except (ScenarioError, WorldError, OSError) as exc:
        return _fail(str(exc))
    config = load_config(args.config)
    weights = load_weights(config.weights_text())
    result = replay(scenario, world, weights=weights,
                    transit_ticks=config.transit_ticks)
    artifacts = replay_artifacts(result)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in artifacts.items():
            (out_dir / name).write_text(text, encoding="utf-8")
    if args.events:
        Path(args.events).write_text(artifacts["events.jsonl"], encoding="utf-8")
    for turn in result.session.transcript:
        prefix = "H" if turn.speaker == "human" else "R"
        print(f"{prefix}: {turn.text}")
    if not result.ok:
        print(result.diff, end="")
        return EXIT_ERROR
    return EXIT_OK


def cmd_ground(args) -> int:
    try:
        world = parse_world(Path(args.world).read_text("utf-8"))
    except (WorldError, OSError) as exc:
        return _fail(str(exc))
    config = load_config(args.config)
    weights = load_weights(config.weights_text())
    parser = Parser.for_world(world, Grammar.from_text(config.grammar_text()))
    space = instantiate_symbols(world)
    try:
        tree = parser.parse(args.utterance)
        result = ground(tree, space, world, weights)
    except (ParseFailure, GroundingFailure) as exc:
        return _fail(str(exc))
    print(result.true_symbol.literal())
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = parse_spec(Path(args.spec).read_text("utf-8"))
    except (SpecSyntaxError, OSError) as exc:
        return _fail(str(exc))
    config = load_config(args.config)
    outcome = synthesize(spec, max_props=config.max_props)
    if not outcome.realizable:
        print("UNREALIZABLE")
        print(f"losing initial states: {[list(s) for s in outcome.losing_initial]}")
        print(f"winning region size: {outcome.winning_region_size}")
        print(f"per-goal winning sizes: {list(outcome.per_goal_sizes)}")
        return EXIT_UNREALIZABLE
    print("REALIZABLE")
    import json

    doc = controller_to_json(outcome.controller)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(controller_to_dot(outcome.controller), encoding="utf-8")
    if not args.out:
        print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_train(args) -> int:
    try:
        items = parse_corpus(Path(args.corpus).read_text("utf-8"))
        weights = train(items, max_epochs=args.max_epochs)
    except NonSeparable as exc:
        print(f"error: {exc} (mistakes in last epoch: {exc.mistakes})", file=sys.stderr)
        return EXIT_ERROR
    except (CorpusError, ParseFailure, SymbolError, OSError) as exc:
        return _fail(str(exc))
    Path(args.out).write_text(save_weights(weights), encoding="utf-8")
    print(f"wrote {len(weights)} weights to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    config = load_config(args.config)
    host, _, port = config.listen.partition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gr1chat")
    ap.add_argument("--config", default=None, help="key=value config file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="run a scenario headless, diffing goldens")
    p.add_argument("scenario")
    p.add_argument("--out", default=None, help="directory for replay artifacts")
    p.add_argument("--events", default=None, help="write the event stream to a file")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("ground", help="print the grounded symbol of an utterance")
    p.add_argument("utterance")
    p.add_argument("--world", required=True)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("synth", help="synthesize a controller from a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default=None, help="write controller JSON here")
    p.add_argument("--dot", default=None, help="write a DOT rendering here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit grounding weights from a corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--max-epochs", type=int, default=1000)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("serve", help="run the chat service")
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
