"""Command-line front end.

Exit codes: 0 ok/pass, 1 usage error, 2 invalid model, 3 verdict fail.
All machine-readable output goes to stdout as JSON; diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import automata, conformance, models, runner, testgen
from .errors import IoconfError, ModelError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_FAIL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_model(path: str, normalize: bool = False) -> models.Iolts:
    return models.model_from_json(Path(path).read_text(), normalize=normalize)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _language_arg(value: str, spec: models.Iolts) -> automata.Fsa:
    """Regex over the spec alphabet, or @file for a serialized automaton.
    An empty value denotes the empty language."""
    if not value:
        return automata.empty_language(spec.alphabet.labels)
    if value.startswith("@"):
        return automata.fsa_from_json(Path(value[1:]).read_text())
    return automata.parse_regex(value, spec.alphabet.labels)


def _verdict_payload(v: conformance.Verdict) -> dict:
    return {
        "outcome": v.outcome,
        "witness": list(v.witness) if v.witness is not None else None,
        "clause": v.clause,
    }


def cmd_validate(args) -> int:
    try:
        model = _load_model(args.model, normalize=args.normalize)
    except ModelError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        _emit({"valid": False, "error": str(exc)})
        return EXIT_INVALID
    payload = {"valid": True, "states": len(model.states),
               "transitions": len(model.transitions)}
    if args.normalize:
        payload["model"] = models.model_to_dict(model)
        if args.out:
            Path(args.out).write_text(models.model_to_json(model))
    _emit(payload)
    return EXIT_OK


def cmd_conf(args) -> int:
    spec = _load_model(args.spec)
    impl = _load_model(args.impl)
    d = _language_arg(args.D, spec)
    f = _language_arg(args.F, spec)
    verdict = conformance.check_conf(spec, impl, d, f)
    _emit(_verdict_payload(verdict))
    return EXIT_OK if verdict.conforms else EXIT_FAIL


def cmd_ioco(args) -> int:
    spec = _load_model(args.spec)
    impl = _load_model(args.impl)
    verdict = conformance.check_ioco(spec, impl)
    _emit(_verdict_payload(verdict))
    return EXIT_OK if verdict.conforms else EXIT_FAIL


def cmd_gen(args) -> int:
    spec = _load_model(args.spec)
    out = Path(args.out)
    if args.kind == "singletp":
        tp = testgen.complete_test_purpose(spec)
        out.mkdir(parents=True, exist_ok=True)
        (out / "tp00000.json").write_text(models.model_to_json(tp.model))
        _emit({"kind": "singletp", "purposes": 1, "out": str(out)})
        return EXIT_OK
    transforms = None
    if args.transforms and args.transforms != "none":
        transforms = ("all" if args.transforms == "all"
                      else tuple(args.transforms.split(",")))
    if args.kind == "faultmodel":
        fm = testgen.gen_fault_model(spec, args.m, transforms=transforms,
                                     max_purposes=args.max_purposes)
        testgen.save_fault_model(fm, out)
        count = len(fm.purposes)
        capped = fm.provenance.capped
    else:
        ss = testgen.gen_scheme_suite(spec, args.m,
                                      max_schemes=args.max_purposes)
        testgen.save_fault_model(ss, out)
        count = len(ss.schemes)
        capped = ss.provenance.capped
    _emit({"kind": args.kind, "purposes": count, "capped": capped,
           "out": str(out)})
    return EXIT_OK


def cmd_run(args) -> int:
    impl = _load_model(args.impl)
    fm = testgen.load_fault_model(args.faultmodel)
    report = runner.run_fault_model(impl, fm, jobs=args.jobs)
    print(report.to_json(), end="")
    return EXIT_OK if report.aggregate == "pass" else EXIT_FAIL


def cmd_lowerbound(args) -> int:
    record = runner.count_lower_bound(args.m)
    _emit({"F_m": record.f_m, "bound": record.bound, "m": record.m})
    return EXIT_OK


def cmd_defeat(args) -> int:
    fm = testgen.load_fault_model(args.faultmodel)
    impl = runner.defeat_acyclic_fault_model(fm)
    print(models.model_to_json(impl), end="")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = _load_model(args.model)
    report = models.classify(model)
    _emit({
        "deterministic": report.deterministic,
        "input_enabled": report.input_enabled,
        "input_complete": report.input_complete,
        "output_complete": report.output_complete,
        "output_deterministic": report.output_deterministic,
        "single_input": report.single_input,
        "has_sink": report.has_sink,
        "initially_connected": report.initially_connected,
        "progressive": report.progressive,
        "input_state_minimal": report.input_state_minimal,
        "input_states": report.input_state_count,
    })
    return EXIT_OK


def cmd_delta(args) -> int:
    model = _load_model(args.model)
    extended = models.delta_extend(model)
    text = models.model_to_json(extended)
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_otr(args) -> int:
    model = _load_model(args.model)
    fsa = automata.lts_to_fsa(model)
    if args.dot:
        print(automata.fsa_to_dot(fsa), end="")
    else:
        print(automata.fsa_to_json(fsa), end="")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ioconf")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("conf", help="language-pair conformance check")
    p.add_argument("spec")
    p.add_argument("impl")
    p.add_argument("--D", default="", help="regex or @fsa.json")
    p.add_argument("--F", default="", help="regex or @fsa.json")
    p.set_defaults(func=cmd_conf)

    p = sub.add_parser("ioco", help="input/output conformance check")
    p.add_argument("spec")
    p.add_argument("impl")
    p.set_defaults(func=cmd_ioco)

    p = sub.add_parser("gen", help="generate testers")
    p.add_argument("spec")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--kind", choices=("faultmodel", "schemes", "singletp"),
                   default="faultmodel")
    p.add_argument("--transforms", default="none",
                   help="none, all, or comma list of "
                        "input_enabled,output_deterministic")
    p.add_argument("--out", required=True)
    p.add_argument("--max-purposes", type=int, default=None,
                   dest="max_purposes")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run a fault model against a model")
    p.add_argument("impl")
    p.add_argument("faultmodel")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("lowerbound", help="block-word counting record")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("defeat", help="implementation defeating an acyclic "
                                      "fault model for the canonical spec")
    p.add_argument("faultmodel")
    p.set_defaults(func=cmd_defeat)

    p = sub.add_parser("classify", help="structural class report")
    p.add_argument("model")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("delta", help="quiescence extension")
    p.add_argument("model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("otr", help="observable-trace automaton")
    p.add_argument("model")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_otr)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IoconfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
