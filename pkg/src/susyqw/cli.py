"""Command-line front end: evolve, bands, winding, midgap, scan, tomo.

All commands are deterministic given their configuration (including the
noise seed): identical invocations produce byte-identical output.  Data go
to ``--out`` (or stdout); the trailing summary block uses ``# key = value``
lines.  Exit codes: 0 success, 2 configuration error, 3 numerical failure.

Angle units: coin angles are radians, waveplate angles degrees; both accept
an explicit ``rad``/``deg`` suffix in config files (e.g. ``"137deg"``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .bloch import band_condition_value, band_structure, winding_numbers
from .errors import ConfigError, SusyqwError
from .midgap import (anomaly_expectation, find_midgap, full_spectrum,
                     ring_with_interfaces, site_polarization)
from .optics import (jitter_intensities, long_time_extrapolation, measure_bases,
                     prepare_input, pure_state_fidelity, qwp_scan, tomography)
from .walk import (Frame, Lattice, Topology, evolve, make_coin_profile,
                   segment_for, to_frame)

_SCHEMAS = {
    "evolve": {"phi1", "phi2", "kind", "steps", "input_site", "plates", "size",
               "frame", "out"},
    "bands": {"phi1", "phi2", "resolution", "out"},
    "winding": {"phi1", "phi2", "resolution", "out"},
    "midgap": {"n", "phi1", "phi2", "tol", "out"},
    "scan": {"phi1", "phi2", "steps", "probe_site", "angles", "cell", "out"},
    "tomo": {"phi1", "phi2", "steps", "site", "plates", "noise", "seed",
             "frame", "out"},
}

_FRAME_CHOICES = {"lab": (Frame.LAB,), "primed": (Frame.PRIMED,),
                  "both": (Frame.LAB, Frame.PRIMED)}


def _frames(value) -> tuple[Frame, ...]:
    try:
        return _FRAME_CHOICES[str(value)]
    except KeyError:
        raise ConfigError(f"frame must be lab, primed or both, got {value!r}") from None


def _parse_angle(value, default_unit: str) -> float:
    """Angle in its native unit; strings may carry a rad/deg suffix."""
    if isinstance(value, (int, float)):
        out = float(value)
    else:
        text = str(value).strip().lower()
        unit = default_unit
        for suffix in ("rad", "deg"):
            if text.endswith(suffix):
                unit = suffix
                text = text[: -len(suffix)]
                break
        try:
            out = float(text)
        except ValueError:
            raise ConfigError(f"cannot parse angle {value!r}") from None
        if unit != default_unit:
            out = np.rad2deg(out) if default_unit == "deg" else np.deg2rad(out)
    if not np.isfinite(out):
        raise ConfigError(f"angle must be finite, got {value!r}")
    return out


def _parse_plates(raw) -> list[tuple[str, float]]:
    plates = []
    for item in raw:
        if isinstance(item, str):
            kind, _, angle = item.partition(":")
            if not angle:
                raise ConfigError(f"plate spec {item!r} needs kind:angle")
        else:
            kind, angle = item
        kind = str(kind).lower()
        if kind not in ("qwp", "hwp"):
            raise ConfigError(f"unknown plate kind {kind!r}")
        plates.append((kind, _parse_angle(angle, "deg")))
    return plates


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(p) for p in spec.split(":"))
    except ValueError:
        raise ConfigError(f"angle grid {spec!r} must be start:stop:step (degrees)") from None
    if step <= 0 or stop <= start:
        raise ConfigError(f"empty angle grid {spec!r}")
    return np.arange(start, stop, step)


def _load_config(command: str, path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - _SCHEMAS[command]
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    return cfg


def _setting(args, cfg, key, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _require_int(value, key: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _require_steps(value) -> int:
    steps = _require_int(value, "steps")
    if steps < 0:
        raise ConfigError("step count must be >= 0")
    return steps


class _Output:
    """Collects CSV rows and summary lines; writes a file or stdout."""

    def __init__(self, out_path: str | None):
        self.out_path = out_path
        self.buffer = io.StringIO()
        self.summary: list[str] = []

    def writer(self):
        return csv.writer(self.buffer, lineterminator="\n")

    def write_text(self, text: str):
        self.buffer.write(text)

    def note(self, key: str, value):
        if isinstance(value, float):
            value = repr(value)
        self.summary.append(f"# {key} = {value}")

    def finish(self):
        body = self.buffer.getvalue()
        tail = "".join(line + "\n" for line in self.summary)
        if self.out_path:
            with open(self.out_path, "w", encoding="utf-8") as fh:
                fh.write(body)
                fh.write(tail)
            sys.stdout.write(tail)
        else:
            sys.stdout.write(body)
            sys.stdout.write(tail)


def _coin_profile_for(kind: str, phi1: float, phi2: float, lattice: Lattice):
    if kind == "uniform":
        return make_coin_profile("uniform", lattice, phi=phi1)
    if kind in ("bulk", "interface"):
        return make_coin_profile(kind, lattice, phi1=phi1, phi2=phi2)
    raise ConfigError(f"unknown configuration kind {kind!r}")


def _fmt(x) -> str:
    return repr(float(x))


def cmd_evolve(args) -> int:
    cfg = _load_config("evolve", args.config)
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.29), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.17), "rad")
    kind = _setting(args, cfg, "kind", "interface")
    steps = _require_steps(_setting(args, cfg, "steps", 13))
    x0 = _require_int(_setting(args, cfg, "input_site", 1), "input_site")
    plates = _parse_plates(_setting(args, cfg, "plates", []) or [])
    size = _setting(args, cfg, "size", "auto")
    if size == "auto":
        lattice = segment_for(x0, steps)
    else:
        size = _require_int(size, "size")
        lattice = Lattice(size, Topology.SEGMENT, origin=x0 - size // 2)
    frames = _frames(_setting(args, cfg, "frame", "both"))
    profile = _coin_profile_for(kind, phi1, phi2, lattice)
    state = prepare_input(x0, plates, lattice)
    trajectory = evolve(state, profile, steps, record=True)

    out = _Output(_setting(args, cfg, "out"))
    w = out.writer()
    header = ["step", "x"]
    for frame in frames:
        header += [f"p_{frame.value}_h", f"p_{frame.value}_v"]
    w.writerow(header)
    coords = lattice.coords()
    for st in trajectory:
        tables = [to_frame(st, profile, f).probabilities() for f in frames]
        for i, x in enumerate(coords):
            row = [st.t, x]
            for table in tables:
                row += [_fmt(table[i, 0]), _fmt(table[i, 1])]
            w.writerow(row)
    final = trajectory[-1]
    probs = final.probabilities().sum(axis=1)
    out.note("kind", kind)
    out.note("steps", steps)
    out.note("final_norm", float(final.norm()))
    out.note("heaviest_site", int(coords[int(np.argmax(probs))]))
    out.note("heaviest_probability", float(probs.max()))
    out.finish()
    return 0


def cmd_bands(args) -> int:
    cfg = _load_config("bands", args.config)
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.0), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.2), "rad")
    resolution = _require_int(_setting(args, cfg, "resolution", 512), "resolution")
    bands = band_structure(phi1, phi2, resolution=resolution)

    out = _Output(_setting(args, cfg, "out"))
    w = out.writer()
    w.writerow(["k", "eps1", "eps2", "eps3", "eps4", "re_lambda_sq", "residual"])
    for i, k in enumerate(bands.k_grid):
        lam2 = bands.eigenvalues[i] ** 2
        target = band_condition_value(k, phi1, phi2)
        resid = float(np.abs(lam2.real - target).max())
        row = [_fmt(k)] + [_fmt(e) for e in bands.quasienergies[i]]
        row += [_fmt(float(lam2.real.mean())), _fmt(resid)]
        w.writerow(row)
    out.note("phi1", phi1)
    out.note("phi2", phi2)
    out.note("resolution", resolution)
    out.note("gap_at_real", bands.gap_at_real())
    out.note("gap_at_imag", bands.gap_at_imag())
    out.finish()
    return 0


def cmd_winding(args) -> int:
    cfg = _load_config("winding", args.config)
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.29), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.17), "rad")
    resolution = _require_int(_setting(args, cfg, "resolution", 1024), "resolution")
    fwd = winding_numbers(phi1, phi2, resolution)
    rev = winding_numbers(phi2, phi1, resolution)

    out = _Output(_setting(args, cfg, "out"))
    for tag, rep in (("forward", fwd), ("swapped", rev)):
        out.write_text(f"[{tag}] phi1={_fmt(rep.phi1)} phi2={_fmt(rep.phi2)} "
                       f"resolution={rep.resolution}\n")
        out.write_text(f"[{tag}] gap_at_real={_fmt(rep.gap_at_real)} "
                       f"gap_at_imag={_fmt(rep.gap_at_imag)}\n")
        for b, (wv, res) in enumerate(zip(rep.windings, rep.residuals)):
            out.write_text(f"[{tag}] band{b} w_alpha={wv[0]} w_beta={wv[1]} "
                           f"w_gamma={wv[2]} residual={_fmt(res)}\n")
    for b, (wf, wr) in enumerate(zip(fwd.windings, rev.windings)):
        diff = tuple(a - c for a, c in zip(wf, wr))
        out.write_text(f"[difference] band{b} dw_alpha={diff[0]} dw_beta={diff[1]} "
                       f"dw_gamma={diff[2]}\n")
    out.note("any_band_differs", any(wf != wr for wf, wr in zip(fwd.windings, rev.windings)))
    out.finish()
    return 0


def cmd_midgap(args) -> int:
    cfg = _load_config("midgap", args.config)
    n = _require_int(_setting(args, cfg, "n", 40), "n")
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.29), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.17), "rad")
    tol = _setting(args, cfg, "tol")
    profile = ring_with_interfaces(n, phi1, phi2)
    spectrum = full_spectrum(profile)
    states = find_midgap(spectrum, None if tol is None else float(tol))

    out = _Output(_setting(args, cfg, "out"))
    w = out.writer()
    w.writerow(["state", "x", "prob", "s1", "s2", "s3"])
    for j, st in enumerate(states):
        probs = (np.abs(st.amplitudes) ** 2).sum(axis=1)
        for x in range(n):
            if probs[x] > 1e-10:
                s1, s2, s3 = site_polarization(st, profile, x)
                w.writerow([j, x, _fmt(probs[x]), _fmt(s1), _fmt(s2), _fmt(s3)])
    out.note("n", n)
    out.note("midgap_count", len(states))
    for j, st in enumerate(states):
        lam = st.eigenvalue
        anom = anomaly_expectation(st, profile)
        out.note(f"state{j}",
                 f"lambda=({_fmt(lam.real)},{_fmt(lam.imag)}) center={st.center} "
                 f"anomaly={_fmt(anom)} decay_length={_fmt(st.decay_length)} "
                 f"fit_r2={_fmt(st.fit_r2)}")
    out.finish()
    return 0


def cmd_scan(args) -> int:
    cfg = _load_config("scan", args.config)
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.29), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.17), "rad")
    steps = _require_steps(_setting(args, cfg, "steps", 13))
    probe = _require_int(_setting(args, cfg, "probe_site", 0), "probe_site")
    grid = _parse_grid(str(_setting(args, cfg, "angles", "0:180:1")))
    cell = bool(_setting(args, cfg, "cell", False))
    lattice = segment_for(1, steps)
    curves = {}
    for kind in ("interface", "bulk"):
        profile = make_coin_profile(kind, lattice, phi1=phi1, phi2=phi2)
        if cell:
            curves[kind] = long_time_extrapolation(profile, steps, probe, grid)
        else:
            curves[kind] = qwp_scan(profile, steps, probe, grid)

    out = _Output(_setting(args, cfg, "out"))
    w = out.writer()
    w.writerow(["angle_deg", "interface", "bulk"])
    for i, th in enumerate(grid):
        w.writerow([_fmt(th), _fmt(curves["interface"].intensities[i]),
                    _fmt(curves["bulk"].intensities[i])])
    out.note("steps", steps)
    out.note("probe_site", probe)
    out.note("cell_probe", cell)
    for kind in ("interface", "bulk"):
        vals = curves[kind].intensities
        out.note(f"{kind}_max", float(vals.max()))
        out.note(f"{kind}_min", float(vals.min()))
        out.note(f"{kind}_range", float(vals.max() - vals.min()))
    out.finish()
    return 0


def cmd_tomo(args) -> int:
    cfg = _load_config("tomo", args.config)
    phi1 = _parse_angle(_setting(args, cfg, "phi1", 1.29), "rad")
    phi2 = _parse_angle(_setting(args, cfg, "phi2", 0.17), "rad")
    steps = _require_steps(_setting(args, cfg, "steps", 17))
    site = _require_int(_setting(args, cfg, "site", 0), "site")
    plates = _parse_plates(_setting(args, cfg, "plates", []) or [])
    noise = float(_setting(args, cfg, "noise", 0.0))
    seed = _setting(args, cfg, "seed")
    frames = _frames(_setting(args, cfg, "frame", "both"))
    lattice = segment_for(1, steps)
    profile = make_coin_profile("interface", lattice, phi1=phi1, phi2=phi2)
    state = prepare_input(1, plates, lattice)
    final = evolve(state, profile, steps)

    out = _Output(_setting(args, cfg, "out"))
    rng = np.random.default_rng(0 if seed is None else int(seed))
    for frame in frames:
        intens = measure_bases(final, site, frame, profile)
        if noise > 0:
            intens = jitter_intensities(intens, noise, rng)
        rho = tomography(intens)
        ref = to_frame(final, profile, frame)
        spinor = ref.amplitudes[lattice.index(site)]
        fid = pure_state_fidelity(rho, spinor)
        amp_h, amp_v, phase = rho.decomposition()
        tag = frame.value
        for (r, c), val in np.ndenumerate(rho.matrix):
            out.write_text(f"rho_{tag}_{r}{c} = {_fmt(val.real)} {_fmt(val.imag)}\n")
        out.note(f"{tag}_amp_h", amp_h)
        out.note(f"{tag}_amp_v", amp_v)
        out.note(f"{tag}_phase_over_pi", phase / np.pi)
        out.note(f"{tag}_fidelity", fid)
        out.note(f"{tag}_clipped", rho.clipped)
    out.note("site", site)
    out.note("steps", steps)
    out.note("site_probability", float(final.site_probability(site)))
    out.finish()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susyqw",
        description="single-step quantum walk: dynamics, bands, winding, "
                    "midgap states and polarization tomography")
    parser.add_argument("--version", action="version", version=f"susyqw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--phi1", help="first coin angle (radians; rad/deg suffix allowed)")
        p.add_argument("--phi2", help="second coin angle (radians)")

    p = sub.add_parser("evolve", help="record a walk trajectory")
    common(p)
    p.add_argument("--kind", choices=["bulk", "interface", "uniform"])
    p.add_argument("--steps", type=int)
    p.add_argument("--input-site", dest="input_site", type=int)
    p.add_argument("--plate", dest="plates", action="append",
                   help="input waveplate kind:angle, repeatable (e.g. qwp:137deg)")
    p.add_argument("--frame", choices=["lab", "primed", "both"],
                   help="probability basis to emit (default both)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("bands", help="band structure over the Brillouin zone")
    common(p)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("winding", help="torus-angle winding numbers, both angle orders")
    common(p)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_winding)

    p = sub.add_parser("midgap", help="interface-ring midgap states and anomaly")
    common(p)
    p.add_argument("--n", type=int, help="ring size (even, >= 12)")
    p.add_argument("--tol", type=float, help="midgap detection tolerance")
    p.set_defaults(func=cmd_midgap)

    p = sub.add_parser("scan", help="trapped intensity vs input QWP angle")
    common(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--probe-site", dest="probe_site", type=int)
    p.add_argument("--angles", help="grid start:stop:step in degrees")
    p.add_argument("--cell", action="store_const", const=True,
                   help="sum the probe bond pair (for long runs)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("tomo", help="site polarization tomography")
    common(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--site", type=int)
    p.add_argument("--plate", dest="plates", action="append")
    p.add_argument("--frame", choices=["lab", "primed", "both"],
                   help="reconstruction basis (default both)")
    p.add_argument("--noise", type=float, help="relative intensity jitter")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_tomo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"susyqw: configuration error: {exc}", file=sys.stderr)
        return 2
    except (SusyqwError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"susyqw: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
