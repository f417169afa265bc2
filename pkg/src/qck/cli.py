"""Command line driver: ``qck <stage> --config <file>``.

Every stage writes ``<output>/<stage>.json`` and prints one JSON record per
line on stdout; human-readable progress goes to stderr.  Exit codes: 0 done
and every candidate resolved, 1 usage or missing input, 2 undecided
candidates remain (or a partial run), 3 precision failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .padic import NotRationalError, PadicNumber, PrecisionError, deserialize, serialize

log = logging.getLogger("qck")

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED, EXIT_PRECISION = 0, 1, 2, 3
STAGES = ("validate", "cohomology", "nsclass", "coleman", "graph-heights", "pairing", "qc-run", "sieve", "report")


class StageError(Exception):
    """A stage cannot run; the message says what to do instead."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class CurveSpec:
    f: list[Fraction]
    label: str = ""
    p: int | None = None
    precision: int | None = None
    divisors: dict[str, tuple[list[Fraction], list[Fraction]]] = field(default_factory=dict)
    known_points: list[tuple[Fraction, Fraction]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    def integral_f(self) -> list[int]:
        if any(c.denominator != 1 for c in self.f):
            raise StageError("curve coefficients must be integers")
        return [int(c) for c in self.f]


def _frac(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(str(x))


def load_curve(path: str | Path) -> CurveSpec:
    raw = tomllib.loads(Path(path).read_text())
    if "f" not in raw:
        raise StageError(f"{path}: missing field f")
    divs = {}
    for k, d in enumerate(raw.get("divisor", [])):
        divs[d.get("name", f"D{k}")] = ([_frac(c) for c in d["a"]], [_frac(c) for c in d.get("b", [])])
    pts = [(_frac(x), _frac(y)) for x, y in raw.get("known_points", [])]
    return CurveSpec(
        [_frac(c) for c in raw["f"]], str(raw.get("label", "")), raw.get("p"), raw.get("precision"), divs, pts
    )


@dataclass
class PipelineConfig:
    curve: Path
    p: int
    N: int
    output: Path
    basis: Path | None = None
    sign: str = "plus"
    graphs: dict[int, Path] = field(default_factory=dict)
    expansions: Path | None = None
    pairing: str | None = None  # path or "solve"
    pairing_data: Path | None = None
    upsilon: Path | None = None
    generator_logs: Path | None = None
    sieve: list[Path] = field(default_factory=list)
    cache_dir: Path | None = None
    cache_size: int = 1 << 30
    pinned: list[str] = field(default_factory=list)
    jobs: int = 1

    def digest(self) -> str:
        body = json.dumps({k: str(v) for k, v in sorted(vars(self).items()) if k not in ("jobs",)}, sort_keys=True)
        return hashlib.sha256(body.encode()).hexdigest()[:16]

    @property
    def cache(self) -> Path:
        env = os.environ.get("QCK_CACHE_DIR")
        if env:
            return Path(env)
        return self.cache_dir if self.cache_dir is not None else self.output / "cache"


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    path = Path(path)
    raw = tomllib.loads(path.read_text())
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    base = path.parent

    def rel(x):
        return None if x is None else (base / x if not Path(x).is_absolute() else Path(x))

    curve = rel(raw.get("curve"))
    if curve is None:
        raise StageError("config: missing field curve")
    spec = load_curve(curve)
    p = raw.get("p", spec.p)
    N = raw.get("N", spec.precision)
    if p is None or N is None:
        raise StageError("config: prime p and precision N must be given (config or curve file)")
    if spec.p is not None and spec.p != p:
        raise StageError(f"prime mismatch: config p = {p}, curve file p = {spec.p}")
    cfg = PipelineConfig(
        curve=curve,
        p=int(p),
        N=int(N),
        output=rel(raw.get("output", "qck-out")),
        basis=rel(raw.get("basis")),
        sign=raw.get("sign", "plus"),
        graphs={int(k): rel(v) for k, v in raw.get("graphs", {}).items()},
        expansions=rel(raw.get("expansions")),
        pairing=raw.get("pairing") if raw.get("pairing") in (None, "solve") else str(rel(raw["pairing"])),
        pairing_data=rel(raw.get("pairing_data")),
        upsilon=rel(raw.get("upsilon")),
        generator_logs=rel(raw.get("generator_logs")),
        sieve=[rel(s) for s in raw.get("sieve", [])],
        cache_dir=rel(raw.get("cache_dir")),
        cache_size=int(raw.get("cache_size", 1 << 30)),
        pinned=list(raw.get("pinned", [])),
        jobs=int(raw.get("jobs", 1)),
    )
    for name in ("curve", "basis", "pairing_data", "upsilon", "generator_logs"):
        x = getattr(cfg, name)
        if x is not None and not Path(x).exists():
            raise StageError(f"config: {name} file {x} does not exist")
    for x in list(cfg.graphs.values()) + cfg.sieve:
        if not x.exists():
            raise StageError(f"config: file {x} does not exist")
    return cfg


# ---------------------------------------------------------------------------
# content-addressed cache


def _digest(payload) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class Cache:
    """JSON objects stored as {"sha256": ..., "payload": ...} under their key."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.objects = self.root / "objects"
        self.runs = self.root / "runs"

    def key(self, *parts) -> str:
        return hashlib.sha256(json.dumps(parts, sort_keys=True, default=str).encode()).hexdigest()[:32]

    def path(self, key: str) -> Path:
        return self.objects / f"{key}.json"

    def get(self, key: str):
        path = self.path(key)
        if not path.exists():
            return None
        try:
            raw = json.loads(path.read_text())
            if _digest(raw["payload"]) != raw["sha256"]:
                raise ValueError("checksum mismatch")
        except (ValueError, KeyError):
            log.warning("cache entry %s is corrupted; recomputing", key)
            path.unlink()
            return None
        return raw["payload"]

    def put(self, key: str, payload) -> None:
        self.objects.mkdir(parents=True, exist_ok=True)
        tmp = self.path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps({"sha256": _digest(payload), "payload": payload}, sort_keys=True))
        os.replace(tmp, self.path(key))

    def record_run(self, run_id: str, keys: list[str]) -> None:
        self.runs.mkdir(parents=True, exist_ok=True)
        path = self.runs / f"{run_id}.json"
        old = json.loads(path.read_text()) if path.exists() else []
        path.write_text(json.dumps(sorted(set(old) | set(keys))))


def cache_gc(cfg: PipelineConfig) -> dict:
    """Drop corrupted entries, then the oldest unpinned ones until under size."""
    cache = Cache(cfg.cache)
    report = {"kept": [], "evicted": [], "corrupted": []}
    if not cache.objects.exists():
        return report
    pinned = set()
    for run in cfg.pinned:
        path = cache.runs / f"{run}.json"
        if path.exists():
            pinned.update(json.loads(path.read_text()))
    entries = []
    for path in sorted(cache.objects.glob("*.json")):
        key = path.stem
        try:
            raw = json.loads(path.read_text())
            ok = _digest(raw["payload"]) == raw["sha256"]
        except (ValueError, KeyError):
            ok = False
        if not ok:
            log.warning("evicting corrupted cache entry %s", key)
            path.unlink()
            report["corrupted"].append(key)
            report["evicted"].append(key)
            continue
        st = path.stat()
        entries.append((st.st_mtime, key, st.st_size, path))
    total = sum(e[2] for e in entries)
    for mtime, key, size, path in sorted(entries):
        if total > cfg.cache_size and key not in pinned:
            path.unlink()
            total -= size
            report["evicted"].append(key)
        else:
            report["kept"].append(key)
    return report


# ---------------------------------------------------------------------------
# shared helpers


class Emitter:
    def __init__(self, stage: str, out: Path, stream=None):
        self.stage = stage
        self.records: list[dict] = []
        self.out = out
        self.stream = stream or sys.stdout

    def __call__(self, **record):
        record = {"stage": self.stage, **record}
        self.records.append(record)
        print(json.dumps(record, sort_keys=True), file=self.stream)

    def write(self, artifact: dict) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / f"{self.stage}.json"
        path.write_text(json.dumps(artifact, sort_keys=True, indent=1) + "\n")
        with open(self.out / f"{self.stage}.jsonl", "w") as fh:
            for r in self.records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
        return path


def _require(cfg: PipelineConfig, stage: str) -> dict:
    path = cfg.output / f"{stage}.json"
    if not path.exists():
        raise StageError(f"missing prerequisite: run `qck {stage}` first")
    return json.loads(path.read_text())


def _odd_model_data(cfg: PipelineConfig, spec: CurveSpec):
    """(Q, model) with Q the monic quintic over Z/p^W; model None for odd inputs."""
    from .hyperelliptic import odd_model_padic, validate_curve

    f = spec.integral_f()
    W = cfg.N + 20
    if spec.degree % 2 == 0:
        om = odd_model_padic(f, cfg.p, W)
        return [c % cfg.p**W for c in om.g], om, W
    validate_curve(spec.f, cfg.p)
    return f, None, W


def _frobenius(cfg: PipelineConfig, Q):
    from .cohomology import frobenius_matrix

    objects = Cache(cfg.cache).objects
    return frobenius_matrix(Q, cfg.p, cfg.N, cache_dir=objects)


def _basis_forms(cfg: PipelineConfig, g: int):
    from .cohomology import default_basis

    if cfg.basis is None:
        return default_basis(g)
    raw = tomllib.loads(cfg.basis.read_text())
    return [[_frac(c) for c in row] for row in raw["forms"]]


def _parse_point(text: str) -> tuple[Fraction, Fraction]:
    parts = text.replace("(", "").replace(")", "").split(",")
    if len(parts) != 2:
        raise StageError(f"cannot parse point {text!r}; expected x,y")
    return Fraction(parts[0].strip()), Fraction(parts[1].strip())


def _padic_point(cfg: PipelineConfig, spec: CurveSpec, pt):
    from .coleman import lift_point

    x, y = pt
    if (y * y - sum(c * x**k for k, c in enumerate(spec.f))) != 0:
        raise StageError(f"({x}, {y}) is not on the curve")
    Q, om, W = _odd_model_data(cfg, spec)
    p = cfg.p
    if om is None:
        return lift_point(Q, x, p, cfg.N + 8, PadicNumber.from_rational(y, p, 1).residue(1))
    mod = p**W
    xi = PadicNumber.from_rational(x, p, W).residue(W)
    yi = PadicNumber.from_rational(y, p, W).residue(W)
    u, w = om.map_point(xi, yi)
    prec = W - 4
    return PadicNumber.from_int(u, p, prec), PadicNumber.from_int(w % mod, p, prec)


# ---------------------------------------------------------------------------
# stages


def stage_validate(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .hyperelliptic import CurveError, EvenDegreeModelError, validate_curve

    spec = load_curve(cfg.curve)
    try:
        validate_curve(spec.f, cfg.p)
        emit(status="ok", label=spec.label, genus=(spec.degree - 1) // 2, model="odd")
        emit.write({"label": spec.label, "model": "odd", "p": cfg.p})
        return EXIT_OK
    except EvenDegreeModelError as exc:
        from . import polys as P

        f = spec.integral_f()
        roots = [r for r in range(cfg.p) if P.peval(P.pmod(f, cfg.p), r, cfg.p) == 0]
        if not roots:
            emit(status="error", message=f"{exc}; f has no root mod {cfg.p}, choose another prime")
            return EXIT_USAGE
        emit(status="convert", message=str(exc), weierstrass_residues=roots,
             instruction=f"use the odd model obtained by sending the root = {roots[0]} mod {cfg.p} to infinity")
        emit.write({"label": spec.label, "model": "even", "p": cfg.p, "odd_model_root_residue": roots[0]})
        return EXIT_OK
    except (CurveError, ValueError) as exc:
        emit(status="error", message=str(exc))
        return EXIT_USAGE


def stage_cohomology(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .cohomology import reverse_charpoly, zeta_congruence
    from .hyperelliptic import l_polynomial
    from .padic_matrix import serialize_matrix

    _require(cfg, "validate")
    spec = load_curve(cfg.curve)
    Q, om, W = _odd_model_data(cfg, spec)
    fd = _frobenius(cfg, Q)
    lpoly = l_polynomial(spec.integral_f() if om is not None else Q, cfg.p)
    ok = zeta_congruence(fd.matrix, lpoly, cfg.N - 2)
    emit(p=cfg.p, N=cfg.N, zeta_check=ok, lpoly=lpoly, charpoly=[serialize(c) for c in reverse_charpoly(fd.matrix)])
    emit.write({"p": cfg.p, "N": cfg.N, "frobenius": serialize_matrix(fd.matrix), "lpoly": lpoly, "zeta_check": ok,
                "model": [int(c) for c in Q]})
    if not ok:
        raise PrecisionError("Frobenius charpoly disagrees with the point counts; raise N")
    return EXIT_OK


def stage_nsclass(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .cohomology import (
        change_basis,
        cup_product_matrix,
        hecke_from_frobenius,
        ns_class,
        rational_matrix,
        sextic_forms_in_odd_basis,
    )
    from .padic_matrix import PadicMatrix

    _require(cfg, "cohomology")
    spec = load_curve(cfg.curve)
    Q, om, W = _odd_model_data(cfg, spec)
    fd = _frobenius(cfg, Q)
    g = (spec.degree - 1) // 2
    forms = _basis_forms(cfg, g)
    C = cup_product_matrix(spec.f, forms)
    if om is not None:
        T = PadicMatrix.from_residues(sextic_forms_in_odd_basis(forms, om, cfg.p, W), cfg.p, W)
        F = change_basis(fd.matrix, T)
    elif cfg.basis is not None:
        T = PadicMatrix.from_rationals([[c * 2 for c in row] + [0] * (2 * g - len(row)) for row in forms], cfg.p, W)
        F = change_basis(fd.matrix, T)
    else:
        F = fd.matrix
    A = hecke_from_frobenius(F)
    Z = ns_class(A, C, sign=args.sign or cfg.sign)
    fmt = lambda M: [[str(x) for x in row] for row in M]
    emit(hecke=fmt(rational_matrix(A, 10**4)), cup=fmt(C), Z=fmt(Z))
    emit.write({"A": fmt(rational_matrix(A, 10**4)), "C": fmt(C), "Z": fmt(Z)})
    return EXIT_OK


def stage_coleman(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .coleman import basis_integrals

    if not args.from_ or not args.to:
        raise StageError("coleman needs --from and --to")
    spec = load_curve(cfg.curve)
    Q, om, W = _odd_model_data(cfg, spec)
    fd = _frobenius(cfg, Q)
    P0 = _padic_point(cfg, spec, _parse_point(args.from_))
    P1 = _padic_point(cfg, spec, _parse_point(args.to))
    vals = basis_integrals(P0, P1, fd)
    emit(start=args.from_, end=args.to, integrals=[serialize(v) for v in vals])
    emit.write({"start": args.from_, "end": args.to, "integrals": [serialize(v) for v in vals]})
    return EXIT_OK


def stage_graph_heights(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .graphheights import heights_from_file, parse_graph_file, upsilon_sums

    graphs = dict(cfg.graphs)
    if args.graph:
        if args.ell is None:
            raise StageError("--graph needs --ell")
        graphs = {args.ell: Path(args.graph)}
    tables = []
    for ell, path in sorted(graphs.items()):
        gf = parse_graph_file(Path(path).read_text())
        t = heights_from_file(gf, ell, cfg.p, cfg.N)
        tables.append(t)
        emit(ell=ell, values={k: serialize(v) for k, v in sorted(t.values.items())},
             potentials={k: str(v) for k, v in sorted(t.potentials.items())})
    ups = upsilon_sums(tables) or [PadicNumber.zero(cfg.p, cfg.N)]
    emit(upsilon=[serialize(u) for u in ups])
    emit.write({"upsilon": [serialize(u) for u in ups]})
    return EXIT_OK


def _load_pairing_rows(path: Path):
    from .qc import CalibrationDatum, HeightDatum

    raw = json.loads(Path(path).read_text())
    rows = raw["rows"]
    vec = lambda xs: tuple(deserialize(x) for x in xs)
    if any("m" in r for r in rows):
        return "calibrate", [CalibrationDatum(tuple(Fraction(m) for m in r["m"]), deserialize(r["hp"]),
                                              vec(r["logD"]), vec(r["logE"])) for r in rows]
    return "solve", [HeightDatum(vec(r["logD"]), vec(r["logE"]), deserialize(r["hp"]),
                                 deserialize(r["away"]) if r.get("away") else None) for r in rows]


def _solve_pairing(cfg: PipelineConfig):
    from .qc import calibrate_away_constants, solve_height_pairing

    if cfg.pairing_data is None:
        raise StageError("pairing needs pairing_data in the config")
    mode, rows = _load_pairing_rows(cfg.pairing_data)
    if mode == "calibrate":
        cal = calibrate_away_constants(rows)
        return cal.pairing, cal.constants
    return solve_height_pairing(rows), ()


def stage_pairing(cfg: PipelineConfig, args, emit: Emitter) -> int:
    pairing, consts = _solve_pairing(cfg)
    emit(alpha=pairing.to_json()["alpha"], constants=[serialize(c) for c in consts],
         residuals=[serialize(r) for r in pairing.residuals])
    emit.write({"pairing": pairing.to_json(), "constants": [serialize(c) for c in consts]})
    return EXIT_OK


def stage_qc_run(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .qc import HeightPairing, UpsilonSet, assemble_rho, attach_cosets, load_expansions, roots_of_rho

    exp_dir = Path(args.expansions) if args.expansions else cfg.expansions
    if exp_dir is None or not exp_dir.exists() or (exp_dir.is_dir() and not any(exp_dir.glob("*.json"))):
        emit(status="partial", message="no expansion files; quadratic Chabauty functions unavailable")
        emit.write({"status": "partial", "roots": []})
        return EXIT_UNDECIDED
    expansions = load_expansions(exp_dir)
    if expansions.p != cfg.p:
        raise StageError(f"expansions are for p = {expansions.p}, config has p = {cfg.p}")
    source = args.pairing or cfg.pairing or "solve"
    if source == "solve":
        pairing, _ = _solve_pairing(cfg)
    elif Path(source).exists():
        raw = json.loads(Path(source).read_text())
        pairing = HeightPairing.from_json(raw.get("pairing", raw))
    else:
        raise StageError(f"pairing file {source} not found; run `qck pairing` first")
    ups_path = Path(args.upsilon) if args.upsilon else cfg.upsilon
    if ups_path is None and (cfg.output / "graph-heights.json").exists():
        ups_path = cfg.output / "graph-heights.json"
    if ups_path is None:
        ups = UpsilonSet.trivial(cfg.p, expansions.N)
    else:
        raw = json.loads(ups_path.read_text())
        ups = UpsilonSet(tuple(deserialize(u) for u in (raw["upsilon"] if isinstance(raw, dict) else raw)))
    rhos = assemble_rho(pairing, expansions, ups)
    reports = roots_of_rho(rhos, expansions)
    if cfg.generator_logs is not None:
        gl = json.loads(cfg.generator_logs.read_text())
        reports = attach_cosets(reports, expansions, [[deserialize(x) for x in row] for row in gl])
    for r in reports:
        emit(**r.to_json())
    simple = sum(1 for r in reports if r.multiplicity == 1)
    matched = sum(1 for r in reports if r.matched)
    emit(summary=True, roots=len(reports), simple=simple, matched=matched, unmatched=len(reports) - matched)
    emit.write({"status": "complete", "roots": [r.to_json() for r in reports], "p": cfg.p, "N": expansions.N})
    return EXIT_OK


def _sieve_instance_file(path: Path, cfg: PipelineConfig):
    """Build a SieveInstance (and optional disk constraint) from an instance file."""
    return sieve_instance(tomllib.loads(Path(path).read_text()), Path(path).parent, cfg)


def sieve_instance(raw: dict, base: Path, cfg: PipelineConfig):
    """SieveInstance and optional disk constraint from parsed instance data.

    Relative curve paths are resolved against ``base``.
    """
    from .mwsieve import (
        DiskConstraint,
        PrimeData,
        SieveInstance,
        all_tuples,
        disk_constraint_from_reduction,
        local_curve,
        prime_data,
    )

    M = int(raw["M"])
    curve_path = base / raw["curve"] if "curve" in raw else cfg.curve
    spec = load_curve(curve_path)
    f = spec.integral_f()
    names = raw.get("generators", list(spec.divisors))
    base = raw.get("base")
    index = int(raw.get("generator_index", 1))
    r = len(names)

    def local(v):
        C = local_curve(f, v)
        gens = [C.mumford(*spec.divisors[n]) for n in names]
        b = None if base is None else C.point(*base)
        return C, gens, b

    primes = []
    for v in raw.get("primes", []):
        C, gens, b = local(int(v))
        primes.append(prime_data(C, M, gens, b, seed=int(v), multiplier=index))
    for pd in raw.get("prime", []):
        primes.append(PrimeData(int(pd["v"]), int(pd["order"]), tuple(pd["moduli"]),
                                tuple(tuple(x) for x in pd["generator_images"]),
                                frozenset(tuple(x) for x in pd["image"])))
    targets = raw.get("targets", "all")
    if targets == "all":
        # a disk constraint supplies its own candidates
        targets = [] if "disk" in raw else all_tuples(M, r)
    else:
        targets = [tuple(t) for t in targets]
    known = [tuple(t) for t in raw.get("known", [])]
    inst = SieveInstance(r, M, primes, targets, known)
    constraint = None
    if "disk" in raw:
        d = raw["disk"]
        if "classes" in d:
            constraint = DiskConstraint(int(d["modulus"]), tuple(tuple(c) for c in d["classes"]))
        else:
            C, gens, b = local(int(d["p"]))
            pt = C.point(*d["point"])
            if index != 1:
                raise StageError("disk constraints from reduction need generators of the full group")
            constraint = disk_constraint_from_reduction(C, M, gens, b, pt)
    return inst, constraint


def stage_sieve(cfg: PipelineConfig, args, emit: Emitter) -> int:
    from .mwsieve import sieve_cosets, sieve_disk

    paths = [Path(args.instance)] if args.instance else cfg.sieve
    if not paths:
        raise StageError("no sieve instance given (config `sieve` or --instance)")
    results = []
    undecided = False
    for path in paths:
        inst, constraint = _sieve_instance_file(path, cfg)
        if constraint is not None:
            verdict = sieve_disk(inst, constraint)
            status, survivors = verdict.status, verdict.survivors
        else:
            survivors = tuple(sieve_cosets(inst))
            status = "EMPTY" if not survivors else "UNDECIDED"
        lost = [k for k in inst.known if tuple(x % inst.M for x in k) not in set(survivors)]
        if lost and constraint is None and set(map(tuple, inst.targets)) >= set(inst.known):
            raise StageError(f"{path}: known rational points eliminated: {lost}; group data inconsistent")
        undecided |= status != "EMPTY"
        rec = {"instance": str(path.name), "M": inst.M, "status": status, "survivors": [list(s) for s in survivors[:50]],
               "survivor_count": len(survivors), "kind": "disk" if constraint is not None else "cosets"}
        emit(**rec)
        results.append({**rec, "survivors": [list(s) for s in survivors]})
    emit.write({"results": results})
    return EXIT_UNDECIDED if undecided else EXIT_OK


def stage_report(cfg: PipelineConfig, args, emit: Emitter) -> int:
    rows = []
    partial = False
    qc_path = cfg.output / "qc-run.json"
    roots = json.loads(qc_path.read_text()) if qc_path.exists() else {"status": "partial", "roots": []}
    if roots.get("status") != "complete":
        partial = True
    sieve_path = cfg.output / "sieve.json"
    sieve = json.loads(sieve_path.read_text())["results"] if sieve_path.exists() else []
    coset_sieves = [s for s in sieve if s["kind"] == "cosets"]
    p = roots.get("p", cfg.p)
    for r in roots.get("roots", []):
        status = "UNDECIDED"
        if r["matched"]:
            status = "RATIONAL-MATCHED"
        elif r["coset"] is not None:
            for s in coset_sieves:
                M = s["M"]
                if p ** r["coset_prec"] % M == 0 and [c % M for c in r["coset"]] not in s["survivors"]:
                    status = "ELIMINATED"
                    break
        rows.append({"kind": "root", "disk": r["disk"], "t0": r["t0"], "multiplicity": r["multiplicity"],
                     "upsilon_index": r["upsilon_index"], "status": status})
    for s in sieve:
        if s["kind"] == "disk":
            rows.append({"kind": "disk", "instance": s["instance"],
                         "status": "ELIMINATED" if s["status"] == "EMPTY" else "UNDECIDED"})
    for row in rows:
        emit(**row)
    counts = {k: sum(1 for r in rows if r["status"] == k) for k in ("RATIONAL-MATCHED", "ELIMINATED", "UNDECIDED")}
    emit(summary=True, partial=partial, **counts)
    emit.write({"rows": rows, "counts": counts, "partial": partial})
    return EXIT_UNDECIDED if partial or counts["UNDECIDED"] else EXIT_OK


HANDLERS = {
    "validate": stage_validate,
    "cohomology": stage_cohomology,
    "nsclass": stage_nsclass,
    "coleman": stage_coleman,
    "graph-heights": stage_graph_heights,
    "pairing": stage_pairing,
    "qc-run": stage_qc_run,
    "sieve": stage_sieve,
    "report": stage_report,
}


def run_stage(stage: str, cfg: PipelineConfig, args=None, stream=None) -> int:
    if stage not in HANDLERS:
        raise StageError(f"unknown stage {stage}")
    args = args or build_parser().parse_args([stage, "--config", "-"])
    emit = Emitter(stage, cfg.output, stream)
    code = HANDLERS[stage](cfg, args, emit)
    path = cfg.output / f"{stage}.json"
    if path.exists():
        cache = Cache(cfg.cache)
        key = cache.key(stage, cfg.digest())
        cache.put(key, json.loads(path.read_text()))
        cache.record_run(cfg.digest(), [key])
    return code


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qck", description="quadratic Chabauty pipeline for hyperelliptic curves")
    ap.add_argument("stage", choices=STAGES + ("cache-gc",))
    ap.add_argument("--config", required=True, help="pipeline config (TOML)")
    ap.add_argument("-p", type=int, dest="p")
    ap.add_argument("-N", type=int, dest="N")
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--sign", choices=("plus", "minus"))
    ap.add_argument("--from", dest="from_")
    ap.add_argument("--to")
    ap.add_argument("--graph")
    ap.add_argument("--ell", type=int)
    ap.add_argument("--expansions")
    ap.add_argument("--pairing")
    ap.add_argument("--upsilon")
    ap.add_argument("--instance")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, {"p": args.p, "N": args.N, "jobs": args.jobs})
        if args.stage == "cache-gc":
            rep = cache_gc(cfg)
            print(json.dumps({"stage": "cache-gc", **rep}, sort_keys=True))
            return EXIT_OK
        return run_stage(args.stage, cfg, args)
    except (PrecisionError, NotRationalError) as exc:
        print(json.dumps({"stage": args.stage, "status": "precision", "message": str(exc)}), file=sys.stdout)
        log.error("precision failure: %s", exc)
        return EXIT_PRECISION
    except (StageError, FileNotFoundError) as exc:
        print(json.dumps({"stage": args.stage, "status": "error", "message": str(exc)}), file=sys.stdout)
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
