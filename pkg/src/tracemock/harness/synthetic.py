"""Synthetic directory-protocol trace generation.

A fictional JSON-ish directory service with five operation types (search,
add, delete, update, lookup).  The generator is fully seeded and returns
the operation label of every transaction out-of-band so cluster purity and
response validity can be checked against ground truth.

The confusion profile additionally plants, for a fraction of search
transactions, a delete "decoy" with an adjacent id and the same surname --
a recorded request of a different operation with near-identical payload,
the exact situation that trips nearest-raw-request matching.
"""

import random
from dataclasses import dataclass

from ..trace import Transaction, TransactionLibrary

_SURNAMES = (
    "Abbott", "Baker", "Carmody", "Dubois", "Eriksen", "Fontaine", "Garcia",
    "Hopper", "Ibanez", "Jamison", "Keller", "Lindqvist", "Moreau", "Novak",
    "Okafor", "Petrov", "Quigley", "Rossi", "Sandoval", "Takeda", "Ulrich",
    "Vance", "Whitaker", "Xenakis", "Yamada", "Zielinski", "Du", "Han",
    "Grundy", "Versteeg", "Schneider", "Hine",
)
_GIVEN = ("Ana", "Boris", "Cam", "Dina", "Eli", "Farid", "Gina", "Hugo",
          "Ines", "Jun", "Kira", "Liam", "Miao", "Nadia", "Omar", "Priya",
          "Quinn", "Rosa", "Steve", "Tara")


@dataclass(frozen=True)
class OperationTemplate:
    """One operation type: request/response shapes plus payload field sources.

    Request field sources are sampler kinds (``surname``, ``given``,
    ``digits``).  Response field sources additionally allow ``=key`` (echo
    the request field ``key``) and ``!text`` (the literal ``text``), so each
    operation can have its own response structure.
    """

    name: str
    code: str                # op value in requests
    response_code: str       # op value in responses
    request_fields: tuple[tuple[str, str], ...]
    response_fields: tuple[tuple[str, str], ...]
    weight: float = 1.0


@dataclass(frozen=True)
class SyntheticProtocolSpec:
    operations: tuple[OperationTemplate, ...]
    surname_suffix: tuple[int, int] = (0, 0)   # random lowercase padding range
    note_length: tuple[int, int] = (0, 0)      # extra request field when > 0
    decoy_source: str | None = None            # operation that spawns decoys
    decoy_target: str | None = None            # operation type of the decoy
    decoy_rate: float = 0.0

    def __post_init__(self):
        names = [op.name for op in self.operations]
        if len(set(names)) != len(names):
            raise ValueError("operation names must be distinct")

    def operation(self, name: str) -> OperationTemplate:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)


def _standard_operations() -> tuple[OperationTemplate, ...]:
    return (
        OperationTemplate("search", "S", "SearchRsp",
                          request_fields=(("sn", "surname"),),
                          response_fields=(("result", "!Ok"), ("gn", "given"),
                                           ("sn", "=sn"), ("mobile", "digits"))),
        OperationTemplate("add", "A", "AddRsp",
                          request_fields=(("sn", "surname"), ("mobile", "digits")),
                          response_fields=(("result", "!Ok"),)),
        OperationTemplate("delete", "D", "DeleteRsp",
                          request_fields=(("sn", "surname"),),
                          response_fields=(("removed", "=sn"), ("status", "!Gone"))),
        OperationTemplate("update", "U", "UpdateRsp",
                          request_fields=(("sn", "surname"), ("mobile", "digits")),
                          response_fields=(("result", "!Ok"), ("sn", "=sn"))),
        OperationTemplate("lookup", "L", "LookupRsp",
                          request_fields=(("mobile", "digits"),),
                          response_fields=(("entry", "surname"),
                                           ("mobile", "=mobile"))),
    )


def default_protocol_spec() -> SyntheticProtocolSpec:
    """Five-operation directory protocol with compact payloads."""
    return SyntheticProtocolSpec(_standard_operations())


def long_payload_protocol_spec() -> SyntheticProtocolSpec:
    """Same protocol with padded surnames and an extra note field.

    Longer requests make per-message alignment cost dominate fixed
    overheads, which is what the efficiency comparison is about.
    """
    return SyntheticProtocolSpec(_standard_operations(),
                                 surname_suffix=(10, 18),
                                 note_length=(16, 32))


def confusion_protocol_spec(decoy_rate: float = 0.6) -> SyntheticProtocolSpec:
    """Standard protocol plus cross-operation look-alike decoys."""
    return SyntheticProtocolSpec(_standard_operations(),
                                 decoy_source="search",
                                 decoy_target="delete",
                                 decoy_rate=decoy_rate)


class _FieldSampler:
    def __init__(self, rng: random.Random, spec: SyntheticProtocolSpec):
        self.rng = rng
        self.spec = spec

    def value(self, kind: str) -> str:
        if kind == "surname":
            name = self.rng.choice(_SURNAMES)
            lo, hi = self.spec.surname_suffix
            if hi > 0:
                pad = "".join(self.rng.choice("abcdefghijklmnopqrstuvwxyz")
                              for _ in range(self.rng.randint(lo, hi)))
                name += pad
            return name
        if kind == "given":
            return self.rng.choice(_GIVEN)
        if kind == "digits":
            return str(self.rng.randrange(10 ** 6, 10 ** 7))
        raise ValueError(f"unknown field kind {kind!r}")


def _render_request(op: OperationTemplate, message_id: int,
                    fields: dict[str, str], note: str | None) -> bytes:
    parts = [f"{{id:{message_id},op:{op.code}"]
    for key, _ in op.request_fields:
        parts.append(f",{key}:{fields[key]}")
    if note:
        parts.append(f",note:{note}")
    parts.append("}")
    return "".join(parts).encode("ascii")


def _render_response(op: OperationTemplate, message_id: int,
                     fields: dict[str, str], sampler: "_FieldSampler") -> bytes:
    parts = [f"{{id:{message_id},op:{op.response_code}"]
    for key, source in op.response_fields:
        if source.startswith("!"):
            value = source[1:]
        elif source.startswith("="):
            value = fields[source[1:]]
        else:
            value = sampler.value(source)
        parts.append(f",{key}:{value}")
    parts.append("}")
    return "".join(parts).encode("ascii")


def synthetic_library(spec: SyntheticProtocolSpec, n: int, seed: int
                      ) -> tuple[TransactionLibrary, tuple[str, ...]]:
    """Generate n transactions; returns (library, operation label per row)."""
    if n < 1:
        raise ValueError("need at least one transaction")
    rng = random.Random(seed)
    sampler = _FieldSampler(rng, spec)
    weights = [op.weight for op in spec.operations]
    used_ids: set[int] = set()
    transactions: list[Transaction] = []
    labels: list[str] = []

    def fresh_id(adjacent_to: int | None = None) -> int:
        if adjacent_to is not None:
            candidate = adjacent_to + 1
            if candidate not in used_ids:
                used_ids.add(candidate)
                return candidate
        while True:
            candidate = rng.randrange(10, 50_000) * 2  # even; +1 stays free
            if candidate not in used_ids:
                used_ids.add(candidate)
                return candidate

    def emit(op: OperationTemplate, message_id: int,
             shared: dict[str, str] | None = None):
        fields: dict[str, str] = dict(shared or {})
        for key, kind in op.request_fields:
            fields.setdefault(key, sampler.value(kind))
        lo, hi = spec.note_length
        note = None
        if hi > 0:
            note = "".join(rng.choice("abcdefghijklmnopqrstuvwxyz0123456789")
                           for _ in range(rng.randint(lo, hi)))
        request = _render_request(op, message_id, fields, note)
        response = _render_response(op, message_id, fields, sampler)
        transactions.append(Transaction(message_id, request, response))
        labels.append(op.name)

    while len(transactions) < n:
        op = rng.choices(spec.operations, weights=weights, k=1)[0]
        message_id = fresh_id()
        emit(op, message_id)
        if (op.name == spec.decoy_source and len(transactions) < n
                and rng.random() < spec.decoy_rate):
            decoy_op = spec.operation(spec.decoy_target)
            shared = {"sn": _extract_field(transactions[-1].request, "sn")}
            emit(decoy_op, fresh_id(adjacent_to=message_id), shared)
    return TransactionLibrary(tuple(transactions)), tuple(labels)


def _extract_field(request: bytes, key: str) -> str:
    body = request.decode("ascii")[1:-1]
    for part in body.split(","):
        k, _, v = part.partition(":")
        if k == key:
            return v
    raise KeyError(key)


# The running example from the directory-service interaction table, pinned
# byte-for-byte (indices 1..3106).
PAPER_EXAMPLE_ROWS: tuple[tuple[int, bytes, bytes], ...] = (
    (1, b"{id:1,op:S,sn:Du}",
     b"{id:1,op:SearchRsp,result:Ok,gn:Miao,sn:Du,mobile:5362634}"),
    (13, b"{id:13,op:S,sn:Versteeg}",
     b"{id:13,op:SearchRsp,result:Ok,gn:Steve,sn:Versteeg,mobile:9374723}"),
    (24, b"{id:24,op:A,sn:Schneider,mobile:123456}",
     b"{id:24,op:AddRsp,result:Ok}"),
    (275, b"{id:275,op:S,sn:Han}",
     b"{id:275,op:SearchRsp,result:Ok,gn:Jun,sn:Han,mobile:33333333}"),
    (490, b"{id:490,op:S,sn:Grundy}",
     b"{id:490,op:SearchRsp,result:Ok,gn:John,sn:Grundy,mobile:44444444}"),
    (2273, b"{id:2273,op:S,sn:Schneider}",
     b"{id:2273,op:SearchRsp,result:Ok,sn:Schneider,mobile:123456}"),
    (2487, b"{id:2487,op:A,sn:Will}",
     b"{id:2487,op:AddRsp,result:Ok}"),
    (3106, b"{id:3106,op:A,sn:Hine,gn:Cam,Postcode:33589}",
     b"{id:3106,op:AddRsp,result:Ok}"),
)

PAPER_SEARCH_INDICES = frozenset({1, 13, 275, 490, 2273})
PAPER_ADD_INDICES = frozenset({24, 2487, 3106})


def paper_example_library() -> TransactionLibrary:
    """The eight-transaction worked example, exactly as printed."""
    return TransactionLibrary(tuple(Transaction(i, req, rsp)
                                    for i, req, rsp in PAPER_EXAMPLE_ROWS))
