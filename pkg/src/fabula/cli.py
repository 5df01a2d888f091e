"""Command-line front end: scenario runner, interactive REPL, HTTP server.

Exit codes for ``run``: 0 on success, 1 on a scenario error (reported with
file:line:col), 2 on an I/O or format error in the input files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import List, Optional, TextIO

import click

from .config import EngineConfig, load_config
from .dictionary import load_dictionary
from .engine import Engine
from .errors import ConfigError, DictionaryFormatError, EngineError, ParseError
from .parser import Directive, SceneBreak, SentenceAst, parse_line, pretty, resolve, strip_comment
from .render import render_candidates, render_focus, render_shadow

RESULT_FORMAT_VERSION = 1

_DIRECTIVES = {"confabulate", "cloze", "hls", "dump"}


class ScenarioError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(message)
        self.line = line
        self.col = col


def build_engine(
    dict_path: str,
    config_path: Optional[str] = None,
    oracle_mode: bool = False,
) -> Engine:
    with open(dict_path, "r", encoding="utf-8") as fh:
        dictionary = load_dictionary(fh.read())
    config = EngineConfig()
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = load_config(fh.read())
    if oracle_mode:
        config = EngineConfig.oracle_mode(config)
    return Engine(dictionary, config)


def _int_arg(directive: Directive, index: int, line: int, minimum: int) -> int:
    try:
        value = int(directive.args[index])
    except ValueError:
        raise ScenarioError(line, 1, f"!{directive.name}: argument {directive.args[index]!r} is not an integer") from None
    if value < minimum:
        raise ScenarioError(line, 1, f"!{directive.name}: argument must be >= {minimum}")
    return value


def _run_directive(engine: Engine, directive: Directive, line: int) -> dict:
    arity = {"confabulate": 1, "cloze": 1, "hls": 1, "dump": 1}
    if directive.name not in _DIRECTIVES:
        raise ScenarioError(line, 1, f"unknown directive !{directive.name}")
    if len(directive.args) != arity[directive.name]:
        raise ScenarioError(line, 1, f"!{directive.name} takes exactly {arity[directive.name]} argument(s)")
    if directive.name == "confabulate":
        steps = _int_arg(directive, 0, line, minimum=1)
        inserted = engine.confabulate(steps)
        return {
            "name": "confabulate",
            "line": line,
            "steps": steps,
            "inserted": [
                {"vi": vi_id, "verbs": dict(engine.entities[vi_id].verbs.items())}
                for vi_id in inserted
            ],
        }
    if directive.name == "cloze":
        position = _int_arg(directive, 0, line, minimum=0)
        candidates = engine.cloze_infer(position, top=5)
        return {
            "name": "cloze",
            "line": line,
            "position": position,
            "candidates": render_candidates(candidates),
        }
    if directive.name == "hls":
        top = _int_arg(directive, 0, line, minimum=1)
        candidates = engine.build_continuations(top)
        return {"name": "hls", "line": line, "top": top, "candidates": render_candidates(candidates)}
    engine.snapshot(directive.args[0])
    return {"name": "dump", "line": line, "path": directive.args[0], "written": True}


def run_scenario(engine: Engine, text: str) -> dict:
    """Execute a scenario and return the result document."""
    insertions: List[dict] = []
    directives: List[dict] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        try:
            outcome = parse_line(line)
            if isinstance(outcome, SceneBreak):
                engine.story_break()
                continue
            if isinstance(outcome, Directive):
                directives.append(_run_directive(engine, outcome, lineno))
                continue
            template = resolve(
                outcome, engine.focus_instances(), engine.dictionary, engine.config.reference_threshold
            )
            vi_id = engine.insert_vi(template)
            insertions.append({"line": lineno, "vi": vi_id, "sentence": pretty(outcome)})
        except ScenarioError:
            raise
        except ParseError as exc:
            raise ScenarioError(lineno, exc.col, str(exc)) from exc
        except EngineError as exc:
            raise ScenarioError(lineno, 1, str(exc)) from exc
    return {
        "format_version": RESULT_FORMAT_VERSION,
        "insertions": insertions,
        "directives": directives,
        "state_hash": engine.state_hash(),
    }


def _result_text(result: dict, pretty_tables: bool) -> str:
    if not pretty_tables:
        return json.dumps(result, sort_keys=True, indent=2) + "\n"
    lines = ["insertions:"]
    for ins in result["insertions"]:
        lines.append(f"  line {ins['line']:>4}  vi {ins['vi']:>5}  {ins['sentence']}")
    for directive in result["directives"]:
        lines.append(f"{directive['name']} (line {directive['line']}):")
        for key, value in directive.items():
            if key in ("name", "line"):
                continue
            lines.append(f"  {key}: {json.dumps(value, sort_keys=True)}")
    lines.append(f"state_hash: {result['state_hash']}")
    return "\n".join(lines) + "\n"


def _attach_trace(engine: Engine, stream: TextIO) -> None:
    def trace(tick, kind, owner, memory, delta, weight):
        stream.write(f"{tick}\t{kind}\t{owner}\t{memory}\t{delta!r}\t{weight!r}\n")

    engine.trace = trace


@click.group()
def main() -> None:
    """Narrative reasoning engine over a controlled story language."""


@main.command()
@click.argument("scenario", type=click.Path())
@click.option("--dict", "dict_path", required=True, type=click.Path(), help="Dictionary file.")
@click.option("--config", "config_path", type=click.Path(), help="key = value config file.")
@click.option("--out", "out_path", type=click.Path(), help="Write the result document here instead of stdout.")
@click.option("--trace", is_flag=True, help="Emit one line per shadow update to stderr.")
@click.option("--pretty", is_flag=True, help="Human-readable tables instead of JSON.")
@click.option("--oracle-mode", is_flag=True, help="Apply the oracle preset on top of the config.")
def run(scenario, dict_path, config_path, out_path, trace, pretty, oracle_mode) -> None:
    """Run a scenario file and emit a result document."""
    try:
        engine = build_engine(dict_path, config_path, oracle_mode)
        with open(scenario, "r", encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, DictionaryFormatError, ConfigError, EngineError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if trace:
        _attach_trace(engine, sys.stderr)
    try:
        result = run_scenario(engine, text)
    except ScenarioError as exc:
        click.echo(f"{scenario}:{exc.line}:{exc.col}: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    rendered = _result_text(result, pretty)
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(rendered)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    else:
        click.echo(rendered, nl=False)
    sys.exit(0)


def repl_loop(engine: Engine, in_stream: TextIO, out_stream: TextIO, prompt: bool = False) -> None:
    """Process REPL lines until :quit or end of input. Survives per-line errors."""

    def emit(payload) -> None:
        out_stream.write(json.dumps(payload, sort_keys=True) + "\n")

    while True:
        if prompt:
            out_stream.write("> ")
            out_stream.flush()
        raw = in_stream.readline()
        if raw == "":
            return
        line = raw.rstrip("\n")
        try:
            if line.startswith(":"):
                parts = line.split()
                command, args = parts[0], parts[1:]
                if command == ":quit":
                    return
                elif command == ":focus":
                    emit(render_focus(engine))
                elif command == ":shadows" and len(args) == 1:
                    emit(render_shadow(engine, int(args[0])))
                elif command == ":hls":
                    top = int(args[0]) if args else 5
                    emit({"candidates": render_candidates(engine.build_continuations(top))})
                elif command == ":confab" and len(args) == 1:
                    inserted = engine.confabulate(int(args[0]))
                    emit({"inserted": inserted})
                elif command == ":cloze" and len(args) == 1:
                    candidates = engine.cloze_infer(int(args[0]), top=5)
                    emit({"candidates": render_candidates(candidates)})
                elif command == ":save" and len(args) == 1:
                    engine.snapshot(args[0])
                    emit({"saved": args[0]})
                elif command == ":hash":
                    emit({"hash": engine.state_hash()})
                else:
                    out_stream.write(f"error: unknown command {line!r}\n")
                continue
            stripped = strip_comment(line)
            if not stripped.strip():
                continue
            vi_id = engine.narrate_line(stripped)
            if vi_id is None:
                emit({"scene_break": True, "story_id": engine.story_id})
            else:
                emit({"inserted": vi_id})
        except (EngineError, ValueError, OSError) as exc:
            out_stream.write(f"error: {exc}\n")


@main.command()
@click.option("--dict", "dict_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path())
@click.option("--oracle-mode", is_flag=True)
def repl(dict_path, config_path, oracle_mode) -> None:
    """Interactive session: pidgin lines plus :focus/:shadows/:hls/:confab/:cloze/:save/:quit."""
    try:
        engine = build_engine(dict_path, config_path, oracle_mode)
    except (OSError, EngineError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    repl_loop(engine, sys.stdin, sys.stdout, prompt=sys.stdin.isatty())


@main.command()
@click.option("--dict", "dict_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path())
@click.option("--port", default=8844, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(),
    help="Directory of built UI files to serve at /. Defaults to ./frontend/dist when present.",
)
@click.option("--oracle-mode", is_flag=True)
def serve(dict_path, config_path, port, host, ui_dir, oracle_mode) -> None:
    """Serve the HTTP API (and the web UI, when built) for one engine instance."""
    import uvicorn

    from .api import create_app

    try:
        engine = build_engine(dict_path, config_path, oracle_mode)
    except (OSError, EngineError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        if (default_ui / "index.html").exists():
            ui_dir = str(default_ui)
    uvicorn.run(create_app(engine, ui_dir=ui_dir), host=host, port=port)


if __name__ == "__main__":
    main()
