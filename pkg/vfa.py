#!/usr/bin/env python3
"""
Vertex-Frequency Analysis

Generates graphs, computes Laplacian spectra, windowed graph Fourier
transforms, frame bounds, localization checks and clusterings. Results are
written as CSV / PGM / JSON files to --out-dir.

Usage:
    python3 vfa.py gen-graph --type path --n 180
    python3 vfa.py spectrum --graph-spec path:500
    python3 vfa.py spectrogram --graph-file graph.csv --signal f.csv --tau 300 --normalize
    python3 vfa.py frame-report --graph-specs path:500 comet:500:200 --taus 0.5 5 50
    python3 vfa.py reconstruct --graph-file graph.csv --signal f.csv
    python3 vfa.py cluster --graph-file graph.csv --signal f.csv --tau 0.3 --alpha 0.75 --k 6
    python3 vfa.py check-bounds --graph-spec path:10 --kind poly --degree 2 --vertex 5
    python3 vfa.py --version            # Show version
    python3 vfa.py --list-commands      # Show available commands
"""

import argparse
import logging
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from src.clustering import signal_adapted_cluster, spectral_cluster
from src.errors import (
    EXIT_DATA,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    BoundViolation,
    InfeasibleSpec,
    VertexFrequencyError,
)
from src.graph_core import (
    Graph,
    GraphKind,
    GraphSpec,
    Variant,
    generate_graph,
    geodesic_distances,
    read_edge_list,
    write_coordinates,
    write_edge_list,
)
from src.lib.formatters import (
    CSVTableFormatter,
    get_formatter,
    read_signal_csv,
    signal_rows,
)
from src.lib.spectrum_cache import SpectrumCache
from src.localization import (
    POLY_OUTSIDE_TOL,
    graph_spread,
    modulation_concentration,
    modulation_concentration_normalized,
    poly_localization_check,
    smooth_decay_bound,
    tau_for_spread,
    translation_norm_bounds,
    translation_norm_bounds_normalized,
)
from src.operators import Kernel, translate, translate_normalized, window_hat
from src.spectral import Spectrum, coherence, eigenvalue_table, eigenvector_bytes, spectrum_from_graph
from src.version import __version__, get_commands, get_full_version_string
from src.wgft import frame_bounds, reconstruct, spectrogram, transform


# Configuration
DEFAULT_MAX_VERTICES = 3000
BOUND_KINDS = ("poly", "decay", "norm", "spread", "modulation")
BOUNDS_HEADER = ["bound_name", "lhs", "rhs", "satisfied", "vacuous"]


# =============================================================================
# Run configuration
# =============================================================================

@dataclass
class RunConfig:
    """Flags shared by every command."""
    command: str
    seed: int = 0
    graph_file: Optional[Path] = None
    graph_spec: Optional[str] = None
    out_dir: Path = Path(".")
    variant: Variant = Variant.COMBINATORIAL
    verbose: bool = False
    workers: int = 1
    max_vertices: int = DEFAULT_MAX_VERTICES
    cache_dir: Optional[Path] = None
    use_cache: bool = True

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            seed=args.seed,
            graph_file=getattr(args, "graph_file", None),
            graph_spec=getattr(args, "graph_spec", None),
            out_dir=Path(args.out_dir),
            variant=Variant(getattr(args, "variant", Variant.COMBINATORIAL.value)),
            verbose=args.verbose,
            workers=getattr(args, "workers", 1),
            max_vertices=getattr(args, "max_vertices", DEFAULT_MAX_VERTICES),
            cache_dir=getattr(args, "cache_dir", None),
            use_cache=not getattr(args, "no_cache", False),
        )


def parse_graph_spec(text: str, seed: int = 0) -> GraphSpec:
    """
    Parse ``kind:n[:params]`` into a GraphSpec.

        path:N   ring:N   comet:N:CENTER_DEGREE   random_regular:N:DEGREE
        sensor:N[:SIGMA1:SIGMA2]   swiss_roll:N[:SIGMA1:SIGMA2]
    """
    parts = text.split(":")
    try:
        kind = GraphKind(parts[0])
        n = int(parts[1])
        params = parts[2:]
        if kind is GraphKind.COMET:
            return GraphSpec(kind, n, center_degree=int(params[0]), seed=seed)
        if kind is GraphKind.RANDOM_REGULAR:
            return GraphSpec(kind, n, degree=int(params[0]), seed=seed)
        if kind in (GraphKind.SENSOR, GraphKind.SWISS_ROLL) and params:
            return GraphSpec(kind, n, sigma1=float(params[0]), sigma2=float(params[1]), seed=seed)
        if params and kind in (GraphKind.PATH, GraphKind.RING):
            raise ValueError("unexpected parameters")
        return GraphSpec(kind, n, seed=seed)
    except (ValueError, IndexError) as e:
        raise InfeasibleSpec(f"Bad graph spec '{text}': {e}") from e


def window_from_args(args: argparse.Namespace) -> Kernel:
    """Window kernel from --kernel-json or --window/--tau/--coeffs/--normalize."""
    if getattr(args, "kernel_json", None):
        try:
            return Kernel.from_json(args.kernel_json)
        except (KeyError, ValueError, TypeError) as e:
            raise InfeasibleSpec(f"Bad kernel JSON: {e}") from e
    if args.window == "polynomial":
        if not args.coeffs:
            raise InfeasibleSpec("--window polynomial needs --coeffs")
        try:
            coeffs = [float(a) for a in args.coeffs.split(",")]
        except ValueError as e:
            raise InfeasibleSpec(f"Bad --coeffs: {e}") from e
        return Kernel.polynomial(coeffs, normalized=args.normalize)
    return Kernel.heat(args.tau, normalized=args.normalize)


def find_duplicate_flags(argv: Sequence[str]) -> List[str]:
    seen, duplicates = set(), []
    for token in argv:
        if token.startswith("--"):
            flag = token.split("=", 1)[0]
            if flag in seen and flag not in duplicates:
                duplicates.append(flag)
            seen.add(flag)
    return duplicates


# =============================================================================
# Runner
# =============================================================================

class Runner:
    def __init__(self, config: RunConfig, args: argparse.Namespace):
        self.config = config
        self.args = args
        self.verbose = config.verbose
        self.cache = SpectrumCache(config.cache_dir) if config.use_cache else None
        self.written_files = []

    def log(self, message, level="info"):
        """Print log message with formatting."""
        icons = {
            "info": "\033[94m[i]\033[0m",
            "success": "\033[92m[+]\033[0m",
            "warning": "\033[93m[!]\033[0m",
            "error": "\033[91m[x]\033[0m",
        }
        print(f"{icons.get(level, '[?]')} {message}")

    def log_verbose(self, message):
        """Print verbose log message."""
        if self.verbose:
            print(f"    {message}")

    def _out(self, name: str) -> Path:
        path = self.config.out_dir / name
        self.written_files.append(path)
        return path

    # -------------------------------------------------------------------------
    # Shared loading
    # -------------------------------------------------------------------------

    def load_graph(self) -> Graph:
        if self.config.graph_file is not None:
            g = read_edge_list(self.config.graph_file)
            self.log_verbose(f"Loaded {self.config.graph_file} (N={g.n_vertices})")
        else:
            spec = parse_graph_spec(self.config.graph_spec, self.config.seed)
            self._check_size(spec.n, self.config.graph_spec)
            g = generate_graph(spec)
            self.log_verbose(f"Generated {g.name} (N={g.n_vertices})")
        self._check_size(g.n_vertices, g.name)
        return g

    def _check_size(self, n: int, name: str):
        if n > self.config.max_vertices:
            raise InfeasibleSpec(
                f"Graph {name} has {n} vertices, above --max-vertices {self.config.max_vertices}"
            )

    def load_spectrum(self, g: Graph) -> Spectrum:
        if self.cache is None:
            return spectrum_from_graph(g, self.config.variant)
        return self.cache.get_or_compute(g, self.config.variant)

    def load_signal(self, g: Graph) -> np.ndarray:
        return read_signal_csv(self.args.signal, g.n_vertices)

    # -------------------------------------------------------------------------
    # Commands
    # -------------------------------------------------------------------------

    def gen_graph(self) -> int:
        args = self.args
        spec = GraphSpec.create(args.type, args.n, center_degree=args.center_degree,
                                degree=args.degree, sigma1=args.sigma1, sigma2=args.sigma2,
                                seed=self.config.seed)
        g = generate_graph(spec)
        write_edge_list(g, self._out("graph.csv"))
        if write_coordinates(g, self.config.out_dir / "coords.csv") is not None:
            self.written_files.append(self.config.out_dir / "coords.csv")
        self.log(f"{g.name}: {g.n_vertices} vertices, {len(g.edges())} edges", "success")
        return EXIT_OK

    def spectrum(self) -> int:
        g = self.load_graph()
        s = self.load_spectrum(g)
        self._out("spectrum.csv").write_text(eigenvalue_table(s))
        if self.args.dump_eigenvectors:
            self._out("eigenvectors.bin").write_bytes(eigenvector_bytes(s))
        self.log(f"lambda_max = {s.lambda_max:.6g}, mu = {coherence(s).mu:.6g}", "success")
        return EXIT_OK

    def spectrogram(self) -> int:
        g = self.load_graph()
        s = self.load_spectrum(g)
        f = self.load_signal(g)
        window = window_from_args(self.args)

        c = transform(s, window, f, workers=self.config.workers, graph_ref=g.content_hash())
        power = spectrogram(c)
        bounds = frame_bounds(s, window)
        for fmt in ("csv", "pgm"):
            get_formatter(fmt).write(self._out(f"spectrogram.{fmt}"), power)
        get_formatter("json").write(self._out("spectrogram.json"), {
            "n": s.n,
            "variant": s.variant.value,
            "window": window.to_dict(),
            "window_hash": c.window_ref,
            "graph_hash": c.graph_ref,
            "window_norm": float(np.linalg.norm(window_hat(s, window))),
            "A": bounds.A,
            "B": bounds.B,
            "mu": coherence(s).mu,
        })
        self.log(f"Spectrogram {s.n} x {s.n} written to {self.config.out_dir}", "success")
        return EXIT_OK

    def frame_report(self) -> int:
        args = self.args
        sources = [(text, None) for text in (args.graph_specs or [])]
        sources += [(str(path), Path(path)) for path in (args.graph_files or [])]
        if not sources:
            raise InfeasibleSpec("frame-report needs at least one graph")

        rows = []
        for name, path in sources:
            if path is None:
                spec = parse_graph_spec(name, self.config.seed)
                self._check_size(spec.n, name)
                g = generate_graph(spec)
            else:
                g = read_edge_list(path)
                self._check_size(g.n_vertices, name)
            s = self.load_spectrum(g)
            mu = coherence(s).mu
            for tau in args.taus:
                b = frame_bounds(s, Kernel.heat(tau, normalized=not args.raw_window))
                rows.append([name, mu, float(tau), b.lower_theory, b.A, b.B, b.upper_theory])
                self.log_verbose(f"{name} tau={tau}: A={b.A:.4g} B={b.B:.4g}")

        CSVTableFormatter(["graph", "mu", "tau", "lower_theory", "A", "B", "upper_theory"]).write(
            self._out("frame_report.csv"), rows)
        self.log(f"{len(rows)} frame-bound rows written", "success")
        return EXIT_OK

    def reconstruct(self) -> int:
        g = self.load_graph()
        s = self.load_spectrum(g)
        f = self.load_signal(g)
        window = window_from_args(self.args)

        c = transform(s, window, f, workers=self.config.workers)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            result = reconstruct(s, window, c)
        for w in caught:
            self.log(str(w.message), "warning")

        CSVTableFormatter(["vertex", "value"]).write(self._out("reconstruction.csv"),
                                                     signal_rows(result))
        self.log(f"max |f - f_rec| = {float(np.max(np.abs(result - f))):.3e}", "success")
        return EXIT_OK

    def cluster(self) -> int:
        args = self.args
        g = self.load_graph()
        s = self.load_spectrum(g)
        if args.signal is None:
            assignment = spectral_cluster(s, args.k, self.config.seed, args.restarts)
        else:
            assignment = signal_adapted_cluster(s, self.load_signal(g), window_from_args(args),
                                                args.alpha, args.k, self.config.seed,
                                                args.restarts, self.config.workers)
        rows = [[vertex, int(label)] for vertex, label in enumerate(assignment.labels, start=1)]
        CSVTableFormatter(["vertex", "label"]).write(self._out("labels.csv"), rows)
        print(f"inertia={assignment.inertia!r}")
        self.log_verbose(f"cluster sizes: {assignment.sizes().tolist()}")
        return EXIT_OK

    def check_bounds(self) -> int:
        args = self.args
        g = self.load_graph()
        s = self.load_spectrum(g)
        dm = geodesic_distances(g)
        vertices = range(s.n) if args.vertex is None else [args.vertex - 1]

        rows = []
        if args.kind == "poly":
            coeffs = [float(a) for a in args.coeffs.split(",")] if args.coeffs else [1.0] * (args.degree + 1)
            kernel = Kernel.polynomial(coeffs)
            for i in vertices:
                r, ok = self._checked(poly_localization_check, g, s, kernel, i, dm)
                rows.append([f"poly_localization[{r.vertex + 1}]", r.outside_max,
                             POLY_OUTSIDE_TOL * r.overall_max, ok, False])
        elif args.kind == "decay":
            kernel = Kernel.heat(args.tau)
            targets = range(s.n) if args.target is None else [args.target - 1]
            for i in vertices:
                for n in targets:
                    if n == i:
                        continue
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", RuntimeWarning)
                        r, ok = self._checked(smooth_decay_bound, s, kernel, i, n, dm)
                    rows.append([f"smooth_decay[{i + 1},{n + 1}]", r.lhs, r.rhs, ok, r.vacuous])
        elif args.kind == "norm":
            kernel = window_from_args(args)
            check = (translation_norm_bounds_normalized if s.is_normalized
                     else translation_norm_bounds)
            for i in vertices:
                r, ok = self._checked(check, s, kernel, i)
                rows.append([f"translation_norm_lower[{i + 1}]", r.lower, r.value, ok, False])
                rows.append([f"translation_norm_upper[{i + 1}]", r.value, r.upper, ok, False])
        elif args.kind == "spread":
            translate_any = translate_normalized if s.is_normalized else translate
            for i in vertices:
                try:
                    tau = tau_for_spread(g, s, args.epsilon, i, dm)
                    spread, ok = graph_spread(dm, translate_any(s, Kernel.heat(tau), i), i).spread_sq, True
                except BoundViolation as e:
                    self.log(str(e), "warning")
                    spread, ok = e.report.spread_sq, False
                rows.append([f"heat_spread[{i + 1}]", spread, args.epsilon, ok, False])
        else:
            kernel = window_from_args(args)
            check = (modulation_concentration_normalized if s.is_normalized
                     else modulation_concentration)
            frequencies = range(s.n) if args.freq is None else [args.freq]
            for k in frequencies:
                # vacuous: the hypothesis fails, so the bound claims nothing
                r, ok = self._checked(check, s, kernel, k, args.gamma)
                off = np.delete(r.ratios, r.frequency)
                rows.append([f"modulation_concentration[{k}]", float(off.min(initial=np.inf)),
                             r.gamma, ok, not r.condition_met])

        CSVTableFormatter(BOUNDS_HEADER).write(self._out("bounds.csv"), rows)
        failed = sum(1 for row in rows if not row[3])
        vacuous = sum(1 for row in rows if row[4])
        if failed:
            self.log(f"{failed} of {len(rows)} bounds violated", "error")
            return EXIT_NUMERICAL
        self.log(f"{len(rows)} bounds satisfied ({vacuous} vacuous)", "success")
        return EXIT_OK

    def _checked(self, check, *check_args):
        """Run a bound check; returns (report, satisfied)."""
        try:
            return check(*check_args), True
        except BoundViolation as e:
            if e.report is None:
                raise
            self.log(str(e), "warning")
            return e.report, False

    # -------------------------------------------------------------------------

    def run(self) -> int:
        commands = {
            "gen-graph": self.gen_graph,
            "spectrum": self.spectrum,
            "spectrogram": self.spectrogram,
            "frame-report": self.frame_report,
            "reconstruct": self.reconstruct,
            "cluster": self.cluster,
            "check-bounds": self.check_bounds,
        }
        self.config.out_dir.mkdir(parents=True, exist_ok=True)
        try:
            code = commands[self.config.command]()
        except VertexFrequencyError as e:
            self.log(f"{type(e).__name__}: {e}", "error")
            return e.exit_code
        except (OSError, ValueError) as e:
            self.log(f"Could not read input: {e}", "error")
            return EXIT_DATA
        for path in self.written_files:
            self.log_verbose(f"wrote {path}")
        return code


# =============================================================================
# Argument parsing
# =============================================================================

def _add_window_flags(parser: argparse.ArgumentParser, tau: float):
    parser.add_argument("--window", choices=["heat", "polynomial"], default="heat",
                        help="Window kernel form (default: heat)")
    parser.add_argument("--tau", type=float, default=tau,
                        help=f"Heat kernel parameter (default: {tau})")
    parser.add_argument("--coeffs", help="Comma-separated polynomial coefficients a_0,a_1,...")
    parser.add_argument("--normalize", action="store_true",
                        help="Scale the window to unit l2 norm")
    parser.add_argument("--kernel-json", help="Kernel spec as JSON {form, params, normalized}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    common.add_argument("--out-dir", default=".", help="Directory for result files")
    common.add_argument("--verbose", "-v", action="store_true", help="Show detailed output")

    graph_source = argparse.ArgumentParser(add_help=False)
    source = graph_source.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph-file", type=Path, help="Edge-list CSV (i,j,weight; 1-based)")
    source.add_argument("--graph-spec", help="Generator spec, e.g. path:500 or comet:500:200")
    graph_source.add_argument("--variant", choices=[v.value for v in Variant],
                              default=Variant.COMBINATORIAL.value, help="Laplacian variant")
    graph_source.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES,
                              help=f"Refuse larger graphs (default: {DEFAULT_MAX_VERTICES})")
    graph_source.add_argument("--workers", type=int, default=1,
                              help="Threads for the windowed transform (default: 1)")
    graph_source.add_argument("--cache-dir", type=Path,
                              help="Spectrum cache directory (default: $VF_CACHE_DIR)")
    graph_source.add_argument("--no-cache", action="store_true", help="Skip the spectrum cache")

    parser = argparse.ArgumentParser(prog="vfa.py", description="Vertex-frequency analysis on graphs")
    parser.add_argument("--version", "-V", action="store_true", help="Show version information")
    parser.add_argument("--list-commands", action="store_true", help="List available commands")
    sub = parser.add_subparsers(dest="command")
    descriptions = get_commands()

    gen = sub.add_parser("gen-graph", parents=[common], help=descriptions["gen-graph"])
    gen.add_argument("--type", required=True, choices=[k.value for k in GraphKind])
    gen.add_argument("--n", type=int, required=True, help="Number of vertices")
    gen.add_argument("--center-degree", type=int, help="Comet center degree")
    gen.add_argument("--degree", type=int, help="Random regular degree")
    gen.add_argument("--sigma1", type=float, help="Gaussian kernel width")
    gen.add_argument("--sigma2", type=float, help="Distance threshold")

    spec = sub.add_parser("spectrum", parents=[common, graph_source], help=descriptions["spectrum"])
    spec.add_argument("--dump-eigenvectors", action="store_true",
                      help="Also write eigenvectors.bin (little-endian float64, row-major)")

    sg = sub.add_parser("spectrogram", parents=[common, graph_source],
                        help=descriptions["spectrogram"])
    sg.add_argument("--signal", type=Path, required=True, help="Signal CSV (vertex,value)")
    _add_window_flags(sg, tau=5.0)

    fr = sub.add_parser("frame-report", parents=[common], help=descriptions["frame-report"])
    fr.add_argument("--graph-specs", nargs="*", default=[], help="Generator specs")
    fr.add_argument("--graph-files", nargs="*", default=[], type=Path, help="Edge-list CSVs")
    fr.add_argument("--taus", nargs="+", type=float, default=[0.5, 5.0, 50.0],
                    help="Heat parameters (default: 0.5 5 50)")
    fr.add_argument("--raw-window", action="store_true", help="Do not normalize the windows")
    fr.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    fr.add_argument("--cache-dir", type=Path)
    fr.add_argument("--no-cache", action="store_true")

    rc = sub.add_parser("reconstruct", parents=[common, graph_source],
                        help=descriptions["reconstruct"])
    rc.add_argument("--signal", type=Path, required=True, help="Signal CSV (vertex,value)")
    _add_window_flags(rc, tau=5.0)

    cl = sub.add_parser("cluster", parents=[common, graph_source], help=descriptions["cluster"])
    cl.add_argument("--signal", type=Path, help="Signal CSV; spectral clustering when omitted")
    cl.add_argument("--k", type=int, required=True, help="Number of clusters")
    cl.add_argument("--alpha", type=float, default=0.75, help="Feature saturation (default: 0.75)")
    cl.add_argument("--restarts", type=int, default=100, help="k-means restarts (default: 100)")
    _add_window_flags(cl, tau=0.3)

    cb = sub.add_parser("check-bounds", parents=[common, graph_source],
                        help=descriptions["check-bounds"])
    cb.add_argument("--kind", choices=BOUND_KINDS, required=True)
    cb.add_argument("--vertex", type=int, help="1-based vertex (default: all)")
    cb.add_argument("--target", type=int, help="1-based target vertex for decay (default: all)")
    cb.add_argument("--degree", type=int, default=2, help="Polynomial degree (default: 2)")
    cb.add_argument("--epsilon", type=float, default=1.0, help="Spread target (default: 1.0)")
    cb.add_argument("--gamma", type=float, help="Concentration factor (default: maximal)")
    cb.add_argument("--freq", type=int, help="0-based frequency index (default: all)")
    _add_window_flags(cb, tau=5.0)

    return parser


def _input_paths(args: argparse.Namespace) -> List[Path]:
    paths = [getattr(args, "graph_file", None), getattr(args, "signal", None)]
    paths += list(getattr(args, "graph_files", None) or [])
    return [Path(p) for p in paths if p is not None]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()

    duplicates = find_duplicate_flags(argv)
    if duplicates:
        parser.print_usage(sys.stderr)
        print(f"vfa.py: error: flag given more than once: {', '.join(duplicates)}", file=sys.stderr)
        return EXIT_USAGE

    args = parser.parse_args(argv)

    for path in _input_paths(args):
        if not path.exists():
            parser.error(f"file not found: {path}")

    if args.version:
        print(get_full_version_string())
        return EXIT_OK

    if args.list_commands:
        print(f"\n{get_full_version_string()}")
        commands = get_commands()
        print(f"\nCommands ({len(commands)}):")
        for name, description in commands.items():
            print(f"  {name:<14} {description}")
        return EXIT_OK

    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    config = RunConfig.from_args(args)
    if config.verbose:
        logging.basicConfig(level=logging.WARNING, format="    %(name)s: %(message)s")
        logging.getLogger("src").setLevel(logging.DEBUG)

    runner = Runner(config, args)
    runner.log_verbose(f"vfa {__version__}: {config.command}")
    return runner.run()


if __name__ == "__main__":
    sys.exit(main())
