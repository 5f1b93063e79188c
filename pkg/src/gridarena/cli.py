"""Command-line surface: bench, run, replay, serve."""

from __future__ import annotations

import argparse
import json
import sys

from gridarena.errors import ConfigError


def _add_env_argument(parser):
    parser.add_argument("--env", default="rws", help="environment name")
    parser.add_argument("--seed", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridarena",
        description="Layered grid-world engine: benchmark, scripted runs, "
                    "replay verification, and a live play service.")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="throughput benchmark with random agents")
    _add_env_argument(bench)
    bench.add_argument("--episodes", type=int, default=1000)
    bench.add_argument("--steps", type=int, default=1000,
                       help="max steps per episode")
    bench.add_argument("--observation", choices=("rgb", "none"), default="rgb")
    bench.add_argument("--players", type=int, default=2)
    bench.add_argument("--backend", choices=("native", "python", "both"),
                       default=None, help="engine backend (default: best available)")
    bench.add_argument("--json", action="store_true", help="machine-readable output")

    run = sub.add_parser("run", help="headless episodes with scripted bots")
    _add_env_argument(run)
    run.add_argument("--bots", default="random,random",
                     help="comma-separated policy per player")
    run.add_argument("--episodes", type=int, default=10)
    run.add_argument("--record", metavar="PATH", default=None,
                     help="write an episode record file")
    run.add_argument("--timer", type=int, default=None,
                     help="override the episode step timer")
    run.add_argument("--json", action="store_true")

    replay = sub.add_parser("replay", help="re-simulate a record and verify it")
    replay.add_argument("path", help="episode record file")

    serve = sub.add_parser("serve", help="live play service (web client + bots)")
    _add_env_argument(serve)
    serve.add_argument("--seats", default="human,bot:collect-rock",
                       help="comma-separated seat spec: human | bot:<policy>")
    serve.add_argument("--tick-ms", type=int, default=200,
                       help="fixed-rate tick interval; 0 selects lockstep")
    serve.add_argument("--lockstep", action="store_true",
                       help="wait for all human actions each step")
    serve.add_argument("--lockstep-timeout-ms", type=int, default=5000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8712)
    serve.add_argument("--timer", type=int, default=None)
    serve.add_argument("--map", metavar="PATH", default=None,
                       help="custom map file (size checks relaxed)")
    serve.add_argument("--spawn-orientations", default=None,
                       help="per-spawn facing, e.g. east,west")
    serve.add_argument("--token", default=None,
                       help="fixed session token (default: random)")
    serve.add_argument("--static-dir", default=None,
                       help="web client bundle directory")
    return parser


def cmd_bench(args) -> int:
    from gridarena.harness import run_benchmark

    if args.steps < 1 or args.episodes < 1:
        print("bench: --steps and --episodes must be >= 1", file=sys.stderr)
        return 2
    backends = [args.backend]
    if args.backend == "both":
        backends = ["native", "python"]
    reports = []
    for name in backends:
        try:
            reports.append(run_benchmark(
                env_name=args.env, episodes=args.episodes, steps=args.steps,
                observation=args.observation, seed=args.seed,
                players=args.players, kernel_name=name))
        except ImportError:
            print(f"bench: backend {name!r} is not built", file=sys.stderr)
            return 2
    if args.json:
        print(json.dumps(reports if len(reports) > 1 else reports[0], indent=2))
    else:
        for r in reports:
            print(f"env={r['env']} backend={r['backend']} "
                  f"observation={r['observation']} players={r['players']}")
            print(f"  steps: {r['total_steps']} in {r['seconds']:.3f}s")
            print(f"  steps/sec:  {r['steps_per_sec']:,.0f}")
            print(f"  frames/sec: {r['frames_per_sec']:,.0f}")
            print(f"  checksum: {r['checksum']}")
    return 0


def cmd_run(args) -> int:
    from gridarena.harness import run_episodes

    bot_names = [b.strip() for b in args.bots.split(",") if b.strip()]
    env_options = {}
    if args.timer is not None:
        env_options["timer"] = args.timer
    summary = run_episodes(args.env, bot_names, args.episodes, args.seed,
                           record_path=args.record, env_options=env_options)
    if args.json:
        print(json.dumps({
            "episodes": summary.episodes, "bots": summary.bots,
            "mean_rewards": summary.mean_rewards,
            "terminations": summary.terminations,
            "mean_steps": summary.mean_steps,
            "record": summary.record_path,
        }, indent=2))
        return 0
    print(f"episodes: {summary.episodes}  mean steps: {summary.mean_steps:.1f}")
    for p, (bot, r) in enumerate(zip(summary.bots, summary.mean_rewards)):
        print(f"  player {p} ({bot}): mean reward {r:+.4f}")
    hist = ", ".join(f"{k} {v}" for k, v in sorted(summary.terminations.items()))
    print(f"  terminations: {hist}")
    if summary.record_path:
        print(f"  recorded to {summary.record_path}")
    return 0


def cmd_replay(args) -> int:
    from gridarena.record import RecordError, replay_record

    try:
        report = replay_record(args.path)
    except RecordError as exc:
        print(f"REPLAY CORRUPT: {exc}", file=sys.stderr)
        return 2
    if report.ok:
        print(f"REPLAY OK: {report.episodes} episodes, {report.steps} steps")
        return 0
    print(f"REPLAY DIVERGED: {report.divergence}", file=sys.stderr)
    return 1


def cmd_serve(args) -> int:
    from gridarena.service import SessionConfig, serve

    seats = [s.strip() for s in args.seats.split(",") if s.strip()]
    env_options = {}
    if args.timer is not None:
        env_options["timer"] = args.timer
    if args.map is not None:
        with open(args.map, encoding="utf-8") as fh:
            env_options["map_text"] = fh.read()
        env_options["strict_size"] = False
    if args.spawn_orientations is not None:
        env_options["spawn_orientations"] = tuple(
            o.strip() for o in args.spawn_orientations.split(","))
    tick = "lockstep" if (args.lockstep or args.tick_ms == 0) else "fixed"
    config = SessionConfig(
        env_name=args.env, seats=seats, seed=args.seed,
        tick_policy=tick, tick_ms=args.tick_ms,
        lockstep_timeout_ms=args.lockstep_timeout_ms,
        env_options=env_options, token=args.token)
    serve(config, host=args.host, port=args.port, static_dir=args.static_dir)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "serve":
            return cmd_serve(args)
    except ConfigError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
