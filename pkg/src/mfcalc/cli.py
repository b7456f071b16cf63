"""Command line front end and certificate I/O.

Every subcommand emits a JSON document describing what was computed,
with full matrices embedded so nothing external is needed to re-check
it, and the verify subcommand re-runs every verifiable assertion of
such a document from scratch.  Output is canonical (sorted keys, no
whitespace), so identical inputs produce byte-identical certificates.

Exit codes: 0 when the command succeeded and all claims verified, 1 on
usage errors, 2 when a verification or construction check failed, 3
when the result is inconclusive (an incomplete reduction, or a Tor
certificate whose obstruction vanishes).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .catalog import catalog_get, catalog_list, omega_k_label, parse_label
from .classify import (
    CM,
    CMO,
    ClassifyError,
    SubcategoryDescriptor,
    decompose,
    label_sort_key,
    punctured_free,
    thick_classify,
)
from .fields import QQ, gf
from .homalg import TruncationContext
from .knorrer import sharp_object, unsharp
from .levels import (
    LevelError,
    level_witness,
    orlov_spectrum,
    relative_dimension,
    tor_nonmembership,
)
from .mfcore import (
    MatrixFactorization,
    MfMorphism,
    cone,
    mat_eq,
    mat_parse,
    mf_reduce,
    scalar_morphism,
    trivial_mf,
)
from .polyring import A_INFINITY, D_INFINITY, RingDescriptor, poly_from_string
from .triangles import (
    SCHREYER_FAMILIES,
    TriangleError,
    VerifiedTriangle,
    cone_check,
    extension_verify,
    ladder_compose,
    schreyer_triangle,
    telescope,
)

SCHEMA = "mfcalc-cert/1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

_RING_NAMES = {"Ainf": A_INFINITY, "Dinf": D_INFINITY}


class UsageError(ValueError):
    """Bad input from the command line (not a failed verification)."""


@dataclass
class CliConfig:
    """Validated global options shared by all subcommands."""

    ring: RingDescriptor
    ctx: TruncationContext
    max_index: int
    out: str
    as_json: bool
    seed: int

    def __post_init__(self):
        if self.ctx is not None:
            if not (self.ctx.order >= self.ctx.degree_bound >= 1):
                raise UsageError(
                    "truncation order must be >= degree bound >= 1")
        if self.max_index < 1:
            raise UsageError("max index must be positive")


def _parse_field(spec: str):
    if spec == "q":
        return QQ
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:])
        except ValueError:
            raise UsageError("field spec %r: prime expected after fp:" % spec)
        try:
            return gf(p)
        except ValueError as exc:
            raise UsageError(str(exc))
    raise UsageError("field spec %r: expected q or fp:<odd prime>" % spec)


def config_from_args(args) -> CliConfig:
    ring = RingDescriptor(_RING_NAMES[args.ring], args.dim,
                          _parse_field(args.field))
    if args.trunc is None and args.deg is None:
        ctx = None
    else:
        order = args.trunc if args.trunc is not None else 32
        bound = args.deg if args.deg is not None else min(16, order)
        ctx = TruncationContext(order, bound)
    return CliConfig(ring, ctx, args.max_index, args.out, args.json,
                     args.seed)


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

def _parse_label_arg(text: str) -> Label:
    try:
        return parse_label(text)
    except ValueError as exc:
        raise UsageError("label %r: %s" % (text, exc))


def parse_object(spec: str, ring: RingDescriptor) -> MatrixFactorization:
    """An object expression: +-separated labels, each optionally shifted.

    Terms are catalog labels ("I(3)", "N(2,-)"), "free" for the
    contractible pair, or @FILE to embed a factorization from a JSON
    file; a [1] suffix shifts the term.
    """
    total = None
    for pos, raw in enumerate(spec.split("+")):
        term = raw.strip()
        shifts = 0
        while term.endswith("[1]"):
            term = term[: -3].strip()
            shifts += 1
        if not term:
            raise UsageError("object %r: empty term at position %d"
                             % (spec, pos + 1))
        if term.startswith("@"):
            try:
                with open(term[1:]) as fh:
                    mf = MatrixFactorization.from_json(json.load(fh))
            except (OSError, KeyError, ValueError) as exc:
                raise UsageError("object file %r: %s" % (term[1:], exc))
        elif term == "free":
            mf = trivial_mf(ring)
        else:
            try:
                mf = catalog_get(ring, _parse_label_arg(term))
            except ValueError as exc:
                raise UsageError("term %r (position %d): %s"
                                 % (term, pos + 1, exc))
        for _ in range(shifts):
            mf = mf.shift()
        if total is not None and mf.ring != total.ring:
            raise UsageError("object %r: terms live over different rings"
                             % spec)
        total = mf if total is None else total.direct_sum(mf)
    if total is None:
        raise UsageError("empty object expression")
    return total


def parse_descriptor(text: str, ring_type: str) -> SubcategoryDescriptor:
    """A subcategory: inline JSON, @FILE, a named class, or a label list.

    Label lists are closed under shift automatically; JSON input is
    taken verbatim and must already be shift-closed.
    """
    try:
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return SubcategoryDescriptor.from_json(json.load(fh))
        if text.lstrip().startswith("{"):
            return SubcategoryDescriptor.from_json(json.loads(text))
        if text in ("CM", "CMo", "ZERO"):
            return SubcategoryDescriptor("named", ring_type, name=text)
        labels = set()
        for part in text.split(","):
            lab = _parse_label_arg(part.strip())
            labels.add(lab)
            labels.add(lab.shift())
        ordered = tuple(sorted(labels, key=label_sort_key))
        return SubcategoryDescriptor("finite-list", ring_type, labels=ordered)
    except UsageError:
        raise
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError("subcategory %r: %s" % (text, exc))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def emit(config: CliConfig, data: dict, summary: str):
    data.setdefault("schema", SCHEMA)
    text = canonical_json(data)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text + "\n")
    if config.as_json:
        print(text)
    else:
        print(summary)
        if config.out:
            print("certificate written to %s" % config.out)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, data, summary)
# ---------------------------------------------------------------------------

def cmd_catalog_list(args, config):
    labels = catalog_list(config.ring, config.max_index)
    data = {
        "kind": "catalog-list",
        "ring": config.ring.to_json(),
        "max_index": config.max_index,
        "labels": [str(lab) for lab in labels],
    }
    summary = "%d catalog objects over %s (indices up to %d):\n%s" % (
        len(labels), config.ring.type, config.max_index,
        " ".join(str(lab) for lab in labels))
    return EXIT_OK, data, summary


def cmd_catalog_get(args, config):
    label = _parse_label_arg(args.label)
    try:
        mf = catalog_get(config.ring, label)
    except ValueError as exc:
        raise UsageError(str(exc))
    data = {
        "kind": "catalog-object",
        "ring": config.ring.to_json(),
        "label": str(label),
        "object": mf.to_json(),
    }
    return EXIT_OK, data, "%s: size %d factorization of %s, verified" % (
        label, mf.size, config.ring.type)


def cmd_mf_verify(args, config):
    mf = parse_object(args.object, config.ring)
    ok = mf.verify()
    data = {
        "kind": "mf-verify",
        "object": mf.to_json(),
        "input": args.object,
        "verified": ok,
    }
    word = "verifies" if ok else "FAILS to verify"
    return (EXIT_OK if ok else EXIT_FAIL), data, "%s %s (size %d)" % (
        args.object, word, mf.size)


def cmd_mf_reduce(args, config):
    mf = parse_object(args.object, config.ring)
    reduced, complete = mf_reduce(mf)
    data = {
        "kind": "mf-reduce",
        "input_spec": args.object,
        "input": mf.to_json(),
        "reduced": reduced.to_json(),
        "complete": complete,
    }
    code = EXIT_OK if complete else EXIT_INCONCLUSIVE
    note = "complete" if complete else "incomplete (unit entries may remain)"
    return code, data, "reduced size %d -> %d, %s" % (
        mf.size, reduced.size, note)


def cmd_mf_cone(args, config):
    mf = parse_object(args.object, config.ring)
    try:
        poly = poly_from_string(args.scalar, mf.ring)
    except ValueError as exc:
        raise UsageError("scalar %r: %s" % (args.scalar, exc))
    phi = scalar_morphism(mf, poly)
    mapping_cone, _, _ = cone(phi)
    reduced, complete = mf_reduce(mapping_cone)
    data = {
        "kind": "mf-cone",
        "object": mf.to_json(),
        "input_spec": args.object,
        "scalar": args.scalar,
        "cone": mapping_cone.to_json(),
        "reduced": reduced.to_json(),
        "complete": complete,
    }
    if mf.ring.dim == 1 and complete:
        try:
            parts = decompose(reduced, config.max_index, config.ctx)
            data["decomposition"] = [str(lab) for lab in parts]
        except ClassifyError as exc:
            data["decomposition_note"] = str(exc)
    code = EXIT_OK if complete else EXIT_INCONCLUSIVE
    summary = "cone of %s * id on %s: size %d, reduced to %d" % (
        args.scalar, args.object, mapping_cone.size, reduced.size)
    if "decomposition" in data:
        summary += " = " + " + ".join(data["decomposition"] or ["0"])
    return code, data, summary


def _triangle_data(triangle: VerifiedTriangle, construction: dict) -> dict:
    return {
        "kind": "triangle",
        "construction": construction,
        "triangle": triangle.to_json(),
    }


def _triangle_summary(triangle: VerifiedTriangle) -> str:
    if triangle.labels:
        shape = "%s -> %s -> %s" % (
            triangle.labels[0], " (+) ".join(triangle.labels[1]),
            triangle.labels[2])
    else:
        shape = "sizes %d -> %d -> %d" % (
            triangle.x.size, triangle.y.size, triangle.z.size)
    return "verified triangle %s [%s, T=%d, window=%d]" % (
        shape, triangle.method, triangle.truncation, triangle.window)


def cmd_triangle_schreyer(args, config):
    if args.family not in SCHREYER_FAMILIES:
        raise UsageError("family must be one of %s"
                         % ", ".join(SCHREYER_FAMILIES))
    triangle = schreyer_triangle(config.ring, args.family, args.index,
                                 args.sign, config.ctx)
    construction = {"method": "schreyer", "family": args.family,
                    "ring": config.ring.to_json()}
    if args.index is not None:
        construction["index"] = args.index
    construction["sign"] = args.sign
    return EXIT_OK, _triangle_data(triangle, construction), \
        _triangle_summary(triangle)


def cmd_triangle_telescope(args, config):
    triangle = telescope(config.ring, args.family, args.index, args.sign,
                         config.ctx)
    construction = {"method": "telescope", "family": args.family,
                    "index": args.index, "sign": args.sign,
                    "ring": config.ring.to_json()}
    return EXIT_OK, _triangle_data(triangle, construction), \
        _triangle_summary(triangle)


def cmd_triangle_ladder(args, config):
    first = _load_triangle_file(args.first)
    second = _load_triangle_file(args.second)
    # a triangle stays exact when its first map is negated, so a sign
    # mismatch in the shared component is repaired by that replacement
    flipped = VerifiedTriangle(
        second.x, second.y, second.z, second.u.neg(), second.v,
        second.method, second.truncation, second.window,
        second.mid_blocks, second.labels)
    try:
        triangle = ladder_compose(first, second, args.slot, config.ctx,
                                  n_slot=args.n_slot)
        sign_flip = False
    except TriangleError as first_error:
        try:
            triangle = ladder_compose(first, flipped, args.slot, config.ctx,
                                      n_slot=args.n_slot)
            sign_flip = True
        except TriangleError:
            raise first_error
    construction = {"method": "ladder", "first": args.first,
                    "second": args.second, "slot": args.slot,
                    "sign_flip": sign_flip}
    if args.n_slot is not None:
        construction["n_slot"] = args.n_slot
    return EXIT_OK, _triangle_data(triangle, construction), \
        _triangle_summary(triangle)


def _load_triangle_file(path: str) -> VerifiedTriangle:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError("triangle file %r: %s" % (path, exc))
    tdata = data.get("triangle", data)
    try:
        x, y, z, u, v = _rebuild_triangle_maps(tdata)
    except (KeyError, ValueError) as exc:
        raise UsageError("triangle file %r: %s" % (path, exc))
    labels = None
    if "labels" in tdata:
        labels = (tdata["labels"]["x"], tuple(tdata["labels"]["y"]),
                  tdata["labels"]["z"])
    blocks = _blocks_from_sizes(y, tdata.get("mid_sizes", [y.size]))
    return VerifiedTriangle(x, y, z, u, v, tdata.get("method", "extension"),
                            tdata["truncation"], tdata["window"],
                            tuple(blocks), labels)


def _blocks_from_sizes(y: MatrixFactorization, sizes):
    if sum(sizes) != y.size:
        raise ValueError("middle block sizes do not add up")
    blocks = []
    offset = 0
    for size in sizes:
        a = tuple(row[offset:offset + size]
                  for row in y.a[offset:offset + size])
        b = tuple(row[offset:offset + size]
                  for row in y.b[offset:offset + size])
        blocks.append(MatrixFactorization(y.ring, a, b, check=False))
        offset += size
    return blocks


def cmd_level(args, config):
    mf = parse_object(args.object, config.ring)
    cert = level_witness(mf, config.ctx, config.max_index)
    data = cert.to_json()
    summary = "level %d for %s over %s" % (
        cert.level, args.object, mf.ring.type)
    if cert.level == 0:
        summary += ": %s is a summand" % cert.curve_target
    else:
        summary += "; witness " + _triangle_summary(cert.witness)
    return EXIT_OK, data, summary


def cmd_tor_cert(args, config):
    if config.ring.type != A_INFINITY or config.ring.dim != 1:
        raise UsageError("tor-cert runs over the A-type curve (use --ring "
                         "Ainf without --dim)")
    cert = tor_nonmembership(args.a, args.b, config.ctx, config.ring)
    data = cert.to_json()
    code = EXIT_OK if cert.verdict == "not-in-level-1" else EXIT_INCONCLUSIVE
    summary = "%s (a=%d, b=%d); Tor_1 total dimension %s" % (
        cert.verdict, args.a, args.b, cert.tor_total)
    return code, data, summary


def cmd_thickness(args, config):
    objects = [parse_object(spec, config.ring) for spec in args.generators]
    verdict = thick_classify(objects, config.ctx, config.max_index)
    decompositions = []
    free_flags = []
    for mf in objects:
        parts = decompose(mf, config.max_index, config.ctx)
        decompositions.append([str(lab) for lab in parts])
        free_flags.append(punctured_free(mf))
    data = {
        "kind": "thickness",
        "ring": config.ring.to_json(),
        "generator_specs": list(args.generators),
        "generators": [mf.to_json() for mf in objects],
        "max_index": config.max_index,
        "class": verdict,
        "decompositions": decompositions,
        "punctured_free": free_flags,
    }
    return EXIT_OK, data, "thick closure of [%s] is %s" % (
        ", ".join(args.generators), verdict)


def cmd_reldim(args, config):
    descriptor = parse_descriptor(args.subcategory,
                                  config.ring.type)
    cert = relative_dimension(args.t, descriptor, config.ctx,
                              args.witness_bound)
    data = cert.to_json()
    summary = "dimension of %s relative to %s: %s (%s; %d witnesses)" % (
        args.t, args.subcategory, cert.value, cert.branch,
        len(cert.witnesses))
    return EXIT_OK, data, summary


def cmd_ospec(args, config):
    cert = orlov_spectrum(args.t, config.ring, config.ctx)
    data = cert.to_json()
    shown = "{%s}" % ", ".join(str(v) for v in cert.spectrum) \
        if cert.spectrum else "empty"
    summary = "generation-time spectrum of %s over %s (dim %d): %s" % (
        args.t, config.ring.type, config.ring.dim, shown)
    if cert.example:
        summary += "; generator %s" % cert.example["generator"]
    return EXIT_OK, data, summary


def cmd_sharp(args, config):
    mf = parse_object(args.object, config.ring)
    lifted = sharp_object(mf)
    if not lifted.verify():
        raise TriangleError("sharp transport produced an invalid pair")
    data = {
        "kind": "sharp",
        "input_spec": args.object,
        "input": mf.to_json(),
        "output": lifted.to_json(),
    }
    return EXIT_OK, data, "sharp: size %d over dim %d -> size %d over dim %d" % (
        mf.size, mf.ring.dim, lifted.size, lifted.ring.dim)


def cmd_unsharp(args, config):
    mf = parse_object(args.object, config.ring)
    if mf.ring.dim < 2:
        raise UsageError("unsharp needs an object over dimension >= 2 "
                         "(set --dim)")
    dropped = unsharp(mf)
    data = {
        "kind": "unsharp",
        "input_spec": args.object,
        "input": mf.to_json(),
        "output": dropped.to_json(),
    }
    return EXIT_OK, data, "unsharp: size %d over dim %d -> dim %d" % (
        mf.size, mf.ring.dim, dropped.ring.dim)


# ---------------------------------------------------------------------------
# certificate verification
# ---------------------------------------------------------------------------

def _rebuild_triangle_maps(tdata):
    """x, y, z, u, v from a serialized triangle; constructors re-verify."""
    x = MatrixFactorization.from_json(tdata["x"])
    y = MatrixFactorization.from_json(tdata["y"])
    z = MatrixFactorization.from_json(tdata["z"])
    ring = x.ring
    u = MfMorphism(x, y, mat_parse(tdata["u"]["alpha"], ring),
                   mat_parse(tdata["u"]["beta"], ring))
    v = MfMorphism(y, z, mat_parse(tdata["v"]["alpha"], ring),
                   mat_parse(tdata["v"]["beta"], ring))
    return x, y, z, u, v


def _check(checks, name, ok, note=""):
    checks.append({"name": name, "ok": bool(ok), "note": str(note)})
    return bool(ok)


def _recheck_triangle(tdata, checks, tag):
    """Re-verify a serialized triangle from its own matrices."""
    try:
        x, y, z, u, v = _rebuild_triangle_maps(tdata)
    except (KeyError, ValueError) as exc:
        _check(checks, "%s: objects and maps rebuild" % tag, False, exc)
        return None
    _check(checks, "%s: objects and maps rebuild" % tag, True,
           "sizes %d -> %d -> %d" % (x.size, y.size, z.size))
    order = tdata["truncation"]
    ctx = TruncationContext(order, min(16, order))
    verifier = extension_verify if tdata.get("method") == "extension" \
        else cone_check
    try:
        redone = verifier(u, v, ctx)
    except TriangleError as exc:
        _check(checks, "%s: %s re-verified" % (tag, tdata.get("method")),
               False, exc)
        return None
    _check(checks, "%s: %s re-verified" % (tag, tdata.get("method")), True,
           "window %d" % redone.window)
    sizes = tdata.get("mid_sizes")
    if sizes is not None:
        _check(checks, "%s: middle block sizes add up" % tag,
               sum(sizes) == y.size)
    return x, y, z, u, v


def _catalog_label_matches(ring, label_text, mf, checks, tag):
    """Matrix-exact comparison of an object against its catalog label."""
    if label_text == "free" or ring.dim != 1:
        return
    try:
        expected = catalog_get(ring, parse_label(label_text))
    except ValueError as exc:
        _check(checks, "%s resolves in the catalog" % tag, False, exc)
        return
    _check(checks, "%s equals catalog %s entrywise" % (tag, label_text),
           mat_eq(expected.a, mf.a) and mat_eq(expected.b, mf.b))


def _slice_mf(y, sizes, slot):
    offset = sum(sizes[:slot])
    size = sizes[slot]
    a = tuple(row[offset:offset + size] for row in y.a[offset:offset + size])
    b = tuple(row[offset:offset + size] for row in y.b[offset:offset + size])
    return MatrixFactorization(y.ring, a, b, check=False)


def _verify_level(data, checks):
    subject = MatrixFactorization.from_json(data["subject"])
    _check(checks, "subject is a factorization", True,
           "size %d, dim %d" % (subject.size, subject.ring.dim))
    work = subject
    for _ in range(data["transport"]):
        work = unsharp(work)
    if data["transport"]:
        stored = MatrixFactorization.from_json(data["curve_subject"])
        _check(checks, "transport chain reproduces the curve subject",
               work == stored)
    _check(checks, "computation happens on the curve", work.ring.dim == 1)
    ring = work.ring
    ctx = TruncationContext.from_json(data["context"])
    summands = decompose(work, data["max_index"], ctx)
    _check(checks, "summand multiset matches",
           sorted(str(lab) for lab in summands) == sorted(data["summands"]),
           " ".join(data["summands"]))
    target = parse_label(data["curve_target"])
    _check(checks, "curve target is the syzygy label",
           target == omega_k_label(ring.type))
    _check(checks, "stated target matches the subject dimension",
           parse_label(data["target"])
           == omega_k_label(ring.type, subject.ring.dim - 1))
    if data["level"] == 0:
        _check(checks, "level 0: syzygy label among the summands",
               target in summands)
        return
    _check(checks, "level 1: syzygy label not a literal summand",
           target not in summands)
    wit = data["witness"]
    rebuilt = _recheck_triangle(wit, checks, "witness")
    if rebuilt is None:
        return
    _x, y, _z, _u, _v = rebuilt
    anchor = parse_label(data["witness_anchor"])
    _check(checks, "anchor is one of the summands", anchor in summands)
    slot = data["witness_slot"]
    labels = wit["labels"]
    _check(checks, "witness middle slot carries the syzygy label",
           labels["y"][slot] == str(target))
    middle = _slice_mf(y, wit["mid_sizes"], slot)
    expected = catalog_get(ring, target)
    _check(checks, "witness middle slot equals the syzygy pair entrywise",
           mat_eq(middle.a, expected.a) and mat_eq(middle.b, expected.b))
    for pos, (end_label, steps) in zip(("x", "z"), data["end_shifts"]):
        lab = anchor
        for _ in range(steps):
            lab = lab.shift()
        _check(checks, "end %s is the anchor shifted %d time(s)"
               % (pos, steps), str(lab) == end_label
               and labels[pos] == end_label)
        end_mf = MatrixFactorization.from_json(wit[pos])
        _catalog_label_matches(ring, end_label, end_mf, checks,
                               "witness end %s" % pos)


def _strip_schema(data):
    return {k: v for k, v in data.items() if k != "schema"}


def _verify_by_recompute(data, checks, recompute, tag):
    """Byte-compare the certificate against a fresh recomputation."""
    try:
        fresh = recompute()
    except (ClassifyError, LevelError, TriangleError, ValueError) as exc:
        _check(checks, "%s recomputes" % tag, False, exc)
        return None
    stored = canonical_json(_strip_schema(data))
    redone = canonical_json(_strip_schema(fresh))
    if not _check(checks, "%s matches the recomputation byte for byte" % tag,
                  stored == redone, ""):
        for key in sorted(set(_strip_schema(data)) | set(_strip_schema(fresh))):
            left = canonical_json(data.get(key))
            right = canonical_json(fresh.get(key))
            if left != right:
                _check(checks, "%s field %r agrees" % (tag, key), False,
                       "certificate %s, recomputed %s"
                       % (left[:120], right[:120]))
    return fresh


def _verify_tor(data, checks):
    ring = RingDescriptor.from_json(data["ring"])
    ctx = TruncationContext.from_json(data["context"])
    _verify_by_recompute(
        data, checks,
        lambda: tor_nonmembership(data["a"], data["b"], ctx, ring).to_json(),
        "tor obstruction")
    _check(checks, "verdict matches the exponent rule",
           (data["verdict"] == "not-in-level-1")
           == (data["a"] > 2 * data["b"]))


def _verify_reldim(data, checks):
    descriptor = SubcategoryDescriptor.from_json(data["X"])
    ctx = TruncationContext.from_json(data["context"])
    _verify_by_recompute(
        data, checks,
        lambda: relative_dimension(data["T"], descriptor, ctx,
                                   data["max_witness_index"]).to_json(),
        "decision table")
    for w in data["witnesses"]:
        tag = "witness for %s" % w["missing"]
        rebuilt = _recheck_triangle(w["triangle"], checks, tag)
        if rebuilt is None:
            continue
        labels = w["triangle"].get("labels")
        if labels:
            _check(checks, "%s: missing label in the middle" % tag,
                   w["missing"] in labels["y"])
            member = parse_label(w["member"])
            ends_ok = all(
                parse_label(end) in (member, member.shift())
                or descriptor.contains_label(parse_label(end))
                for end in (labels["x"], labels["z"]))
            _check(checks, "%s: ends stay inside X" % tag, ends_ok)


def _verify_ospec(data, checks):
    ring = RingDescriptor.from_json(data["ring"])
    ctx = None
    if data.get("example"):
        ctx = TruncationContext.from_json(
            data["example"]["dimension"]["context"])
    _verify_by_recompute(
        data, checks,
        lambda: orlov_spectrum(data["T"], ring, ctx).to_json(),
        "spectrum")
    if data.get("example"):
        _verify_reldim(data["example"]["dimension"], checks)


def _verify_triangle_cert(data, checks):
    tdata = data["triangle"]
    rebuilt = _recheck_triangle(tdata, checks, "triangle")
    if rebuilt is None or "labels" not in tdata:
        return
    x, y, z, _u, _v = rebuilt
    ring = x.ring
    labels = tdata["labels"]
    _catalog_label_matches(ring, labels["x"], x, checks, "end x")
    _catalog_label_matches(ring, labels["z"], z, checks, "end z")
    sizes = tdata.get("mid_sizes")
    if sizes and len(sizes) == len(labels["y"]):
        for slot, text in enumerate(labels["y"]):
            if text == "free":
                continue
            _catalog_label_matches(ring, text, _slice_mf(y, sizes, slot),
                                   checks, "middle slot %d" % slot)


def _verify_mf_payload(data, checks, key, name):
    try:
        mf = MatrixFactorization.from_json(data[key])
    except (KeyError, IndexError, ValueError) as exc:
        _check(checks, "%s is a factorization" % name, False, exc)
        return None
    _check(checks, "%s is a factorization" % name, True, "size %d" % mf.size)
    return mf


def _verify_catalog_object(data, checks):
    ring = RingDescriptor.from_json(data["ring"])
    mf = _verify_mf_payload(data, checks, "object", "object")
    if mf is not None:
        expected = catalog_get(ring, parse_label(data["label"]))
        _check(checks, "object equals its catalog entry", expected == mf)


def _verify_catalog_list(data, checks):
    ring = RingDescriptor.from_json(data["ring"])
    expected = [str(lab) for lab in catalog_list(ring, data["max_index"])]
    _check(checks, "label list matches the catalog",
           expected == data["labels"])


def _verify_mf_verify(data, checks):
    mf = _verify_mf_payload(data, checks, "object", "object")
    if mf is not None:
        _check(checks, "stored verdict agrees",
               data["verified"] == mf.verify())


def _verify_mf_reduce(data, checks):
    mf = _verify_mf_payload(data, checks, "input", "input")
    if mf is None:
        return
    reduced, complete = mf_reduce(mf)
    _check(checks, "reduction reproduces the stored pair",
           reduced == MatrixFactorization.from_json(data["reduced"])
           and complete == data["complete"])


def _verify_mf_cone(data, checks):
    mf = _verify_mf_payload(data, checks, "object", "object")
    if mf is None:
        return
    poly = poly_from_string(data["scalar"], mf.ring)
    mapping_cone, _, _ = cone(scalar_morphism(mf, poly))
    _check(checks, "cone matrices reproduce",
           mapping_cone == MatrixFactorization.from_json(data["cone"]))
    reduced, complete = mf_reduce(mapping_cone)
    _check(checks, "reduction reproduces",
           reduced == MatrixFactorization.from_json(data["reduced"])
           and complete == data["complete"])
    if "decomposition" in data:
        parts = decompose(reduced)
        _check(checks, "decomposition reproduces",
               [str(lab) for lab in parts] == data["decomposition"])


def _verify_thickness(data, checks):
    objects = []
    for i in range(len(data["generators"])):
        mf = _verify_mf_payload(data["generators"], checks, i,
                                "generator %d" % i)
        if mf is None:
            return
        objects.append(mf)
    verdict = thick_classify(objects, max_index=data["max_index"])
    _check(checks, "classification reproduces", verdict == data["class"],
           verdict)
    for i, mf in enumerate(objects):
        parts = [str(lab) for lab in decompose(mf, data["max_index"])]
        _check(checks, "decomposition of generator %d reproduces" % i,
               parts == data["decompositions"][i])
        _check(checks, "punctured freeness of generator %d reproduces" % i,
               punctured_free(mf) == data["punctured_free"][i])


def _verify_sharp(data, checks):
    mf = _verify_mf_payload(data, checks, "input", "input")
    out = _verify_mf_payload(data, checks, "output", "output")
    if mf is None or out is None:
        return
    _check(checks, "doubling reproduces", sharp_object(mf) == out)


def _verify_unsharp(data, checks):
    mf = _verify_mf_payload(data, checks, "input", "input")
    out = _verify_mf_payload(data, checks, "output", "output")
    if mf is None or out is None:
        return
    _check(checks, "variable drop reproduces", unsharp(mf) == out)


_VERIFIERS = {
    "level": _verify_level,
    "tor-obstruction": _verify_tor,
    "relative-dimension": _verify_reldim,
    "orlov-spectrum": _verify_ospec,
    "triangle": _verify_triangle_cert,
    "catalog-object": _verify_catalog_object,
    "catalog-list": _verify_catalog_list,
    "mf-verify": _verify_mf_verify,
    "mf-reduce": _verify_mf_reduce,
    "mf-cone": _verify_mf_cone,
    "thickness": _verify_thickness,
    "sharp": _verify_sharp,
    "unsharp": _verify_unsharp,
}


def verify_certificate(data) -> list:
    """Re-check a certificate document; returns the list of check dicts.

    Cited-theorem tags are reported but, by design, not recomputed
    beyond the decision-table branch.
    """
    checks = []
    if not isinstance(data, dict):
        _check(checks, "certificate is a JSON object", False)
        return checks
    if "schema" in data and data["schema"] != SCHEMA:
        _check(checks, "schema is %s" % SCHEMA, False, data["schema"])
        return checks
    kind = data.get("kind")
    verifier = _VERIFIERS.get(kind)
    if verifier is None:
        _check(checks, "certificate kind is known", False, kind)
        return checks
    for tag in data.get("tags", []):
        _check(checks, "carries tag %r (listed, not recomputed)" % tag, True)
    try:
        verifier(data, checks)
    except (KeyError, TypeError) as exc:
        _check(checks, "certificate has the %s shape" % kind, False,
               repr(exc))
    except (ClassifyError, LevelError, TriangleError, ValueError) as exc:
        _check(checks, "recheck completes", False, exc)
    return checks


def cmd_verify(args, config):
    try:
        if args.certificate == "-":
            data = json.load(sys.stdin)
        else:
            with open(args.certificate) as fh:
                data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError("certificate %r: %s" % (args.certificate, exc))
    checks = verify_certificate(data)
    passed = all(c["ok"] for c in checks)
    report = {
        "kind": "verify-report",
        "certificate_kind": data.get("kind") if isinstance(data, dict)
        else None,
        "checks": checks,
        "passed": passed,
    }
    lines = []
    for c in checks:
        mark = "ok  " if c["ok"] else "FAIL"
        note = " (%s)" % c["note"] if c["note"] else ""
        lines.append("%s %s%s" % (mark, c["name"], note))
    lines.append("PASS" if passed else "FAIL")
    return (EXIT_OK if passed else EXIT_FAIL), report, "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", choices=sorted(_RING_NAMES), default="Ainf",
                        help="curve type: Ainf for x^2, Dinf for x^2*y")
    common.add_argument("--dim", type=int, default=1,
                        help="ambient dimension (squares added beyond the curve)")
    common.add_argument("--field", default="q",
                        help="coefficient field: q (rationals) or fp:<odd prime>")
    common.add_argument("--trunc", type=int, default=None,
                        help="truncation order for module computations")
    common.add_argument("--deg", type=int, default=None,
                        help="degree bound for homotopy searches")
    common.add_argument("--max-index", type=int, default=10,
                        help="catalog index bound for decompositions")
    common.add_argument("--out", default=None,
                        help="write the certificate JSON to this file")
    common.add_argument("--json", action="store_true",
                        help="print canonical JSON instead of a summary")
    common.add_argument("--seed", type=int, default=0,
                        help="seed recorded for randomized suites")
    return common


def build_parser() -> _Parser:
    parser = _Parser(prog="mfcalc", description=__doc__)
    common = _common_options()
    sub = parser.add_subparsers(dest="command", metavar="command",
                                parser_class=_Parser)
    sub.required = True

    catalog = sub.add_parser("catalog",
                             help="list or fetch catalog objects")
    catsub = catalog.add_subparsers(dest="action", metavar="action",
                                    parser_class=_Parser)
    catsub.required = True
    p = catsub.add_parser("list", parents=[common])
    p.set_defaults(handler=cmd_catalog_list)
    p = catsub.add_parser("get", parents=[common])
    p.add_argument("label")
    p.set_defaults(handler=cmd_catalog_get)

    mf = sub.add_parser("mf",
                        help="verify, reduce or cone factorizations")
    mfsub = mf.add_subparsers(dest="action", metavar="action",
                              parser_class=_Parser)
    mfsub.required = True
    p = mfsub.add_parser("verify", parents=[common])
    p.add_argument("object")
    p.set_defaults(handler=cmd_mf_verify)
    p = mfsub.add_parser("reduce", parents=[common])
    p.add_argument("object")
    p.set_defaults(handler=cmd_mf_reduce)
    p = mfsub.add_parser("cone", parents=[common])
    p.add_argument("object")
    p.add_argument("--scalar", default="1",
                   help="cone of this scalar times the identity")
    p.set_defaults(handler=cmd_mf_cone)

    triangle = sub.add_parser("triangle",
                              help="build verified triangles")
    trisub = triangle.add_subparsers(dest="action", metavar="action",
                                     parser_class=_Parser)
    trisub.required = True
    p = trisub.add_parser("schreyer", parents=[common])
    p.add_argument("family", choices=SCHREYER_FAMILIES)
    p.add_argument("index", type=int, nargs="?", default=None)
    p.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    p.set_defaults(handler=cmd_triangle_schreyer)
    p = trisub.add_parser("telescope", parents=[common])
    p.add_argument("family", choices=("I", "M", "N"))
    p.add_argument("index", type=int)
    p.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    p.set_defaults(handler=cmd_triangle_telescope)
    p = trisub.add_parser("ladder", parents=[common])
    p.add_argument("first", help="certificate file of the upper triangle")
    p.add_argument("second", help="certificate file of the lower triangle")
    p.add_argument("--slot", type=int, required=True,
                   help="middle slot of the shared map in the first triangle")
    p.add_argument("--n-slot", type=int, default=None,
                   help="slot of the shared map in the second middle")
    p.set_defaults(handler=cmd_triangle_ladder)

    p = sub.add_parser("level", parents=[common],
                       help="level certificate for the syzygy of k")
    p.add_argument("object")
    p.set_defaults(handler=cmd_level)

    p = sub.add_parser("tor-cert", parents=[common],
                       help="Tor obstruction for the ideal pair (x,y^a), (x,y^b)")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.set_defaults(handler=cmd_tor_cert)

    p = sub.add_parser("thickness", parents=[common],
                       help="classify the thick closure of generators")
    p.add_argument("generators", nargs="*")
    p.set_defaults(handler=cmd_thickness)

    p = sub.add_parser("reldim", parents=[common],
                       help="decision-table dimension of T relative to X")
    p.add_argument("t", choices=(CM, CMO), metavar="T")
    p.add_argument("subcategory",
                   help="label list, named class, inline JSON or @file")
    p.add_argument("--witness-bound", type=int, default=8,
                   help="emit bridging witnesses for missing indices up to this")
    p.set_defaults(handler=cmd_reldim)

    p = sub.add_parser("ospec", parents=[common],
                       help="spectrum of finite generation times")
    p.add_argument("t", choices=(CM, CMO), metavar="T")
    p.set_defaults(handler=cmd_ospec)

    p = sub.add_parser("sharp", parents=[common],
                       help="add a square to the equation (doubling)")
    p.add_argument("object")
    p.set_defaults(handler=cmd_sharp)

    p = sub.add_parser("unsharp", parents=[common],
                       help="set the last variable to zero")
    p.add_argument("object")
    p.set_defaults(handler=cmd_unsharp)

    p = sub.add_parser("verify", parents=[common],
                       help="re-check a certificate file from scratch")
    p.add_argument("certificate", help="path to a certificate JSON, - for stdin")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        code, data, summary = args.handler(args, config)
    except UsageError as exc:
        print("mfcalc: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (ClassifyError, LevelError, TriangleError) as exc:
        print("mfcalc: verification failure: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print("mfcalc: verification failure: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    emit(config, data, summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
