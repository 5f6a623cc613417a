"""Command-line interface, the JSON theory-file schema, and report
emission for the orbit and sector pipelines.

Exit codes: 0 success, 1 property failure, 2 invalid theory, 3 resource
bound exceeded, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import (
    ClosureExceeded,
    GptError,
    InvalidTheoryError,
    UsageError,
)
from .exact_linalg import Matrix, Polytope, Vector
from .gpt_core import (
    DEFAULT_MAX_GROUP_SIZE,
    CompositionRule,
    GptSystem,
    validate_theory,
)
from .idempotent_engine import (
    compare_decompositions,
    parts_as_measurement,
    refine_parts,
    split,
    symmetrisation_idempotent,
    unsymmetrised_decomposition,
)
from .quantum_backend import (
    DEFAULT_TOLERANCE,
    QuantumComposite,
    classify_symmetric_pure,
    random_symmetric_density,
    sector_projectors,
    swap_unitary,
    symmetric_basis,
    antisymmetric_basis,
)
from .symmetry_orbits import particle_type_report, symmetric_extremal_states
from .theory_catalog import TheorySpec, load_builtin

SCHEMA_REPORT = "gptp-report/1"
SCHEMA_THEORY = "1"


# ---------------------------------------------------------------------------
# rational serialization
# ---------------------------------------------------------------------------


def frac_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def str_to_frac(s: str) -> Fraction:
    return Fraction(s)


def vector_to_json(v: Vector) -> list[str]:
    return [frac_to_str(x) for x in v]


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return [[frac_to_str(x) for x in row] for row in m.to_rows()]


# ---------------------------------------------------------------------------
# theory file schema (TheoryFileV1)
# ---------------------------------------------------------------------------


def export_theory(spec: TheorySpec, parties: int = 2) -> dict:
    """Serialize a polytopal theory to the interchange schema."""
    if spec.backend != "polytopal":
        raise UsageError("only polytopal theories can be exported")
    comp = spec.composite(parties)
    doc = {
        "schema_version": SCHEMA_THEORY,
        "name": spec.name,
        "dim": spec.system.dim,
        "vertices": [vector_to_json(v) for v in spec.system.vertices.vertices],
        "unit_effect": vector_to_json(spec.system.unit_effect),
        "composition": {"rule": comp.rule.tag},
        "composite_generators": [matrix_to_json(g)
                                 for g in comp.group.generators],
        "parties": parties,
    }
    if comp.rule.tag == "explicit":
        doc["composition"]["explicit_vertices"] = [
            vector_to_json(v) for v in comp.rule.explicit_vertices]
    return doc


def load_theory_file(path: str) -> TheorySpec:
    """Parse a TheoryFileV1 document into a theory spec.

    The composite is validated in full (extremality included) when built.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read theory file: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"theory file is not valid JSON: {e}") from e
    return parse_theory_document(doc, source=path)


def parse_theory_document(doc: dict, source: str = "<memory>") -> TheorySpec:
    try:
        if doc["schema_version"] != SCHEMA_THEORY:
            raise UsageError(
                f"unsupported schema_version {doc['schema_version']!r}")
        name = str(doc["name"])
        dim = int(doc["dim"])
        vertices = tuple(tuple(str_to_frac(x) for x in v)
                         for v in doc["vertices"])
        unit = tuple(str_to_frac(x) for x in doc["unit_effect"])
        comp = doc["composition"]
        explicit = None
        if comp["rule"] == "explicit":
            explicit = tuple(tuple(str_to_frac(x) for x in v)
                             for v in comp["explicit_vertices"])
        rule = CompositionRule(tag=comp["rule"], explicit_vertices=explicit)
        gens = tuple(Matrix.from_rows(g) for g in doc["composite_generators"])
        parties = int(doc["parties"])
    except UsageError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise UsageError(f"malformed theory file {source}: {e}") from e
    try:
        system = GptSystem(name=name, dim=dim,
                           vertices=Polytope(dim, vertices), unit_effect=unit)
    except ValueError as e:
        raise InvalidTheoryError(str(e)) from e
    return TheorySpec(
        name=name, backend="polytopal", system=system,
        provenance_notes=f"loaded from {source}",
        params={"kind": "file", "rule": rule, "generators": gens,
                "parties": parties})


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _theory_meta(spec: TheorySpec, parties: int) -> dict:
    return {
        "name": spec.name,
        "backend": spec.backend,
        "local_dim": spec.system.dim if spec.system else spec.params.get("d"),
        "parties": parties,
    }


def orbits_report(spec: TheorySpec, option: str, seed: int,
                  tolerance: float, max_group_size: int) -> dict:
    if spec.backend == "quantum":
        return _orbits_report_quantum(spec, option, seed, tolerance)
    comp = spec.composite(2)
    report = particle_type_report(comp, option, theory_name=spec.name,
                                  max_group_size=max_group_size)
    counts = {opt: len(symmetric_extremal_states(comp, opt).states)
              for opt in ("I", "II")}
    base = [{"index": i, "size": orb.size,
             "representative": vector_to_json(orb.representative)}
            for i, orb in enumerate(report.full_orbits.orbits)]
    symmetric = [{"index": i, "size": orb.size,
                  "representative": vector_to_json(orb.representative),
                  "base_orbit": report.f_map[i],
                  "hull_generator_count": len(report.hull_generators[i])}
                 for i, orb in enumerate(report.symmetric_orbits.orbits)]
    return {
        "schema": SCHEMA_REPORT,
        "tool_version": __version__,
        "command": "orbits",
        "theory": _theory_meta(spec, 2),
        "option": option,
        "seed": seed,
        "tolerance": None,
        "max_group_size": max_group_size,
        "orbit_analysis": "exact",
        "symmetric_state_counts": counts,
        "base_orbits": base,
        "symmetric_orbits": symmetric,
        "f_map": {str(i): b for i, b in report.f_map.items()},
        "particle_types": {
            "total": report.n_types,
            "per_base_orbit": {str(k): v
                               for k, v in report.types_per_base_orbit.items()},
            "unbased": report.unbased_types,
        },
    }


def _orbits_report_quantum(spec: TheorySpec, option: str, seed: int,
                           tolerance: float) -> dict:
    qc = QuantumComposite(d=spec.params["d"], n=spec.params["parties"],
                          tolerance=tolerance)
    projs = sector_projectors(qc.d, qc.n)
    sectors = [s for s in projs.isotypic if s.rank > 0]
    symmetric = [{"index": i,
                  "sector": str(s.label),
                  "label": ("symmetric_sector" if s.label == (qc.n,)
                            else "antisymmetric_sector"
                            if s.label == tuple([1] * qc.n)
                            else f"mixed_sector{s.label}"),
                  "hilbert_dim": s.rank,
                  "base_orbit": 0}
                 for i, s in enumerate(sectors)]
    return {
        "schema": SCHEMA_REPORT,
        "tool_version": __version__,
        "command": "orbits",
        "theory": _theory_meta(spec, qc.n),
        "option": option,
        "seed": seed,
        "tolerance": tolerance,
        "max_group_size": None,
        "orbit_analysis": "structural",
        "symmetric_state_counts": {
            "note": "extremal-symmetric and symmetric-extremal states "
                    "coincide; each exchange sector is one continuous orbit"},
        "base_orbits": [{"index": 0, "transitive": True,
                         "note": "unitary conjugation acts transitively "
                                 "on pure states"}],
        "symmetric_orbits": symmetric,
        "f_map": {str(i): 0 for i in range(len(sectors))},
        "particle_types": {
            "total": len(sectors),
            "per_base_orbit": {"0": list(range(len(sectors)))},
            "unbased": [],
        },
    }


def split_report(spec: TheorySpec, parties: int, seed: int,
                 tolerance: float) -> dict:
    if spec.backend == "quantum":
        qc = QuantumComposite(d=spec.params["d"], n=parties,
                              tolerance=tolerance)
        E = symmetrisation_idempotent(qc)
        before = unsymmetrised_decomposition(qc)
    else:
        comp = spec.composite(parties)
        E = symmetrisation_idempotent(comp)
        before = unsymmetrised_decomposition(comp)
    dec = refine_parts(E, seed=seed)
    s = split(E)
    measurement = parts_as_measurement(dec, seed=seed)
    comparison = compare_decompositions(before, dec)

    if dec.backend == "rational":
        residuals = {
            "idempotence": 0.0,
            "kappa_iota_vs_sym": 0.0,
            "iota_kappa_vs_identity": 0.0,
            "orthogonality": 0.0,
            "completeness": 0.0,
        }
        assert (s.kappa @ s.iota) == E.matrix
        assert (s.iota @ s.kappa) == Matrix.identity(s.sector_dim)
    else:
        M = np.asarray(E.matrix)
        K, I = np.asarray(s.kappa), np.asarray(s.iota)
        orth = 0.0
        for i, p in enumerate(dec.parts):
            for j, q in enumerate(dec.parts):
                prod = np.asarray(p.matrix) @ np.asarray(q.matrix)
                target = np.asarray(p.matrix) if i == j else 0
                orth = max(orth, float(np.linalg.norm(prod - target)))
        total = sum(np.asarray(p.matrix) for p in dec.parts)
        residuals = {
            "idempotence": float(np.linalg.norm(M @ M - M)),
            "kappa_iota_vs_sym": float(np.linalg.norm(K @ I - M)),
            "iota_kappa_vs_identity": float(
                np.linalg.norm(I @ K - np.eye(s.sector_dim))),
            "orthogonality": orth,
            "completeness": float(np.linalg.norm(total - M)),
        }
    return {
        "schema": SCHEMA_REPORT,
        "tool_version": __version__,
        "command": "split",
        "theory": _theory_meta(spec, parties),
        "parties": parties,
        "seed": seed,
        "tolerance": tolerance if dec.backend == "quantum" else None,
        "sectors": {
            "rank_sym": s.sector_dim,
            "count": len(dec.parts),
            "sector_dims": list(dec.sector_dims),
            "operator_ranks": list(dec.operator_ranks),
            "residuals": residuals,
            "certificate": {k: bool(v) if v is not None else None
                            for k, v in dec.refinement_certificate.items()},
        },
        "measurement": {
            "sum_is_sym": measurement.sum_is_sym,
            "image_preserved": measurement.image_preserved,
            "parts_preserve_normalization":
                measurement.parts_preserve_normalization,
            "part_trace_ranges": [[lo, hi]
                                  for lo, hi in measurement.part_trace_ranges],
        },
        "comparison": {
            "experimental": comparison.experimental,
            "before_sectors": comparison.before_count,
            "after_sectors": comparison.after_count,
            "statuses": [{"after_index": st.after_index, "status": st.status,
                          "from_before": st.from_before}
                         for st in comparison.statuses],
            "summary": comparison.summary,
        },
    }


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_markdown(report: dict) -> str:
    lines = [f"# {report['command']} report: {report['theory']['name']}", ""]
    meta = report["theory"]
    lines.append(f"- backend: {meta['backend']}, parties: {meta['parties']}, "
                 f"tool {report['tool_version']}")
    lines.append(f"- seed: {report['seed']}, tolerance: {report['tolerance']}")
    lines.append("")
    if report["command"] == "orbits":
        lines.append(f"- option: {report['option']}")
        counts = report["symmetric_state_counts"]
        lines.append(f"- symmetric state counts: {counts}")
        lines.append("")
        lines.append("## Base orbits")
        for orb in report["base_orbits"]:
            size = orb.get("size", "continuum")
            lines.append(f"- orbit {orb['index']}: size {size}")
        lines.append("")
        lines.append("## Symmetric orbits (particle types)")
        for orb in report["symmetric_orbits"]:
            extra = (f"size {orb['size']}" if "size" in orb
                     else f"hilbert dim {orb['hilbert_dim']}")
            lines.append(f"- type {orb['index']}: {extra}, "
                         f"base orbit {orb['base_orbit']}")
        types = report["particle_types"]
        lines.append("")
        lines.append(f"**Particle types: {types['total']}** "
                     f"(unbased: {types['unbased']})")
    else:
        sec = report["sectors"]
        lines.append(f"- rank(Sym) = {sec['rank_sym']}")
        lines.append(f"- sectors: {sec['count']}, dims {sec['sector_dims']}, "
                     f"operator ranks {sec['operator_ranks']}")
        lines.append(f"- residuals: {sec['residuals']}")
        comp = report["comparison"]
        lines.append("")
        lines.append(f"## Comparison with the unsymmetrised composite "
                     f"(experimental)")
        lines.append(f"- before: {comp['before_sectors']} sectors, after: "
                     f"{comp['after_sectors']}; {comp['summary']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def verify_lemma1(seed: int, trials: int, out) -> bool:
    rng = np.random.default_rng(seed)
    P = swap_unitary(2)
    S = (np.eye(4) + P) / 2
    A = (np.eye(4) - P) / 2
    recon_pass = 0
    for _ in range(trials):
        rho = random_symmetric_density(2, rng)
        rebuilt = S @ rho @ S + A @ rho @ A
        if np.linalg.norm(rho - rebuilt) < 1e-10:
            recon_pass += 1
    print(f"lemma1.reconstruction: {recon_pass}/{trials} pass", file=out)

    rank1_trials = max(1, trials // 2)
    rank1_pass = 0
    Vs, Va = symmetric_basis(2), antisymmetric_basis(2)
    for t in range(rank1_trials):
        basis, sign = (Vs, 1) if t % 2 == 0 else (Va, -1)
        coeffs = rng.standard_normal(basis.shape[1]) \
            + 1j * rng.standard_normal(basis.shape[1])
        psi = basis @ coeffs
        psi /= np.linalg.norm(psi)
        ok = np.linalg.norm(P @ psi - sign * psi) < 1e-10
        expect = "symmetric_sector" if sign == 1 else "antisymmetric_sector"
        ok = ok and classify_symmetric_pure(psi, d=2).label == expect
        rank1_pass += bool(ok)
    print(f"lemma1.rank_one_swap_eigenstates: {rank1_pass}/{rank1_trials} pass",
          file=out)
    return recon_pass == trials and rank1_pass == rank1_trials


def verify_biproduct(seed: int, out) -> bool:
    from .idempotent_engine import biproduct_maps

    ok = True
    cases = [("classical-2", symmetrisation_idempotent(
        load_builtin("classical", d=2).composite(2))),
        ("qubit-2", symmetrisation_idempotent(QuantumComposite(2, 2))),
        ("qubit-3", symmetrisation_idempotent(QuantumComposite(2, 3)))]
    for name, E in cases:
        dec = refine_parts(E, seed=seed)
        maps = biproduct_maps(dec)
        r = maps.sym_splitting.sector_dim
        checks = passed = 0
        if dec.backend == "rational":
            total = Matrix.zeros(r, r)
            for i, (inc_i, p_i) in enumerate(zip(maps.inclusions,
                                                 maps.projections)):
                total = total + inc_i @ p_i
                for j, inc_j in enumerate(maps.inclusions):
                    checks += 1
                    prod = p_i @ inc_j
                    want_ok = (prod == Matrix.identity(
                        dec.splittings[i].sector_dim)) if i == j \
                        else prod.is_zero()
                    passed += bool(want_ok)
            checks += 1
            passed += bool(total == Matrix.identity(r))
        else:
            total = np.zeros((r, r), dtype=complex)
            for i, (inc_i, p_i) in enumerate(zip(maps.inclusions,
                                                 maps.projections)):
                total = total + inc_i @ p_i
                for j, inc_j in enumerate(maps.inclusions):
                    checks += 1
                    prod = p_i @ inc_j
                    target = np.eye(dec.splittings[i].sector_dim) \
                        if i == j else 0
                    passed += bool(np.linalg.norm(prod - target) < 1e-10)
            checks += 1
            passed += bool(np.linalg.norm(total - np.eye(r)) < 1e-10)
        print(f"biproduct.{name}: {passed}/{checks} pass", file=out)
        ok = ok and passed == checks
    return ok


def verify_catalog(out) -> bool:
    ok = True
    for name, kwargs in [("classical", {"d": 2}), ("classical", {"d": 3}),
                         ("boxworld", {}), ("spekkens", {})]:
        spec = load_builtin(name, **kwargs)
        report = validate_theory(spec.composite(2))
        label = spec.name
        print(f"catalog.{label}: "
              f"{'ok' if report.ok else report.violations}", file=out)
        ok = ok and report.ok
    return ok


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gptp", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, with_option=False, with_parties=False):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--builtin", choices=("classical", "boxworld",
                                               "spekkens", "qubit"))
        src.add_argument("--theory", metavar="FILE")
        p.add_argument("--d", type=int, default=None,
                       help="local dimension (classical only)")
        if with_parties:
            p.add_argument("--parties", type=int, default=2)
        if with_option:
            p.add_argument("--option", choices=("I", "II"), default="II")
        p.add_argument("--format", choices=("json", "md"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
        p.add_argument("--max-group-size", type=int, default=None)

    orbits = sub.add_parser("orbits", help="particle types from orbit analysis")
    common(orbits, with_option=True, with_parties=True)

    split_p = sub.add_parser("split", help="sector decomposition of the "
                                           "symmetrisation idempotent")
    common(split_p, with_parties=True)

    verify = sub.add_parser("verify", help="run a property suite")
    verify.add_argument("suite", choices=("lemma1", "biproduct", "catalog"))
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--trials", type=int, default=500)

    export = sub.add_parser("export", help="emit a theory file")
    export.add_argument("--builtin", required=True,
                        choices=("classical", "boxworld", "spekkens"))
    export.add_argument("--d", type=int, default=None)
    export.add_argument("--parties", type=int, default=2)
    return parser


def _load_spec(args) -> TheorySpec:
    if getattr(args, "builtin", None):
        kwargs = {}
        if args.d is not None:
            kwargs["d"] = args.d
        if getattr(args, "parties", None) is not None and args.builtin == "qubit":
            kwargs["parties"] = args.parties
        return load_builtin(args.builtin, **kwargs)
    spec = load_theory_file(args.theory)
    report = validate_theory(spec.composite(spec.params["parties"]))
    if not report.ok:
        raise InvalidTheoryError("; ".join(report.violations))
    return spec


def _max_group_size(args) -> int:
    if getattr(args, "max_group_size", None):
        return args.max_group_size
    env = os.environ.get("GPTP_MAX_GROUP_SIZE")
    if env:
        try:
            return int(env)
        except ValueError as e:
            raise UsageError(f"bad GPTP_MAX_GROUP_SIZE: {env!r}") from e
    return DEFAULT_MAX_GROUP_SIZE


def main(argv=None) -> int:
    out = sys.stdout
    try:
        args = _build_parser().parse_args(argv)
        if args.cmd == "orbits":
            spec = _load_spec(args)
            report = orbits_report(spec, args.option, args.seed,
                                   args.tolerance, _max_group_size(args))
            out.write(render_json(report) if args.format == "json"
                      else render_markdown(report))
            return 0
        if args.cmd == "split":
            spec = _load_spec(args)
            report = split_report(spec, args.parties, args.seed,
                                  args.tolerance)
            out.write(render_json(report) if args.format == "json"
                      else render_markdown(report))
            return 0
        if args.cmd == "verify":
            if args.suite == "lemma1":
                ok = verify_lemma1(args.seed, args.trials, out)
            elif args.suite == "biproduct":
                ok = verify_biproduct(args.seed, out)
            else:
                ok = verify_catalog(out)
            print(f"RESULT: {'PASS' if ok else 'FAIL'}", file=out)
            return 0 if ok else 1
        if args.cmd == "export":
            kwargs = {}
            if args.d is not None:
                kwargs["d"] = args.d
            spec = load_builtin(args.builtin, **kwargs)
            out.write(render_json(export_theory(spec, parties=args.parties)))
            return 0
        raise UsageError(f"unknown command {args.cmd!r}")
    except ClosureExceeded as e:
        _emit_error(e)
        return 3
    except InvalidTheoryError as e:
        _emit_error(e)
        return 2
    except UsageError as e:
        _emit_error(e)
        return 4
    except GptError as e:
        _emit_error(e)
        return 1


def _emit_error(e: Exception) -> None:
    doc = {"error": type(e).__name__, "message": str(e)}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
