"""Response validity classification for the directory protocol.

A response is valid when it parses as a single brace-delimited,
comma-separated key:value message and its ``op`` field equals the expected
response's.  Payload fields may differ.  Validators are pluggable; only
the directory decoder ships.
"""

from dataclasses import dataclass

VALID = "valid"
INVALID = "invalid"
REASON_NONE = "none"
REASON_PARSE = "parse-failure"
REASON_WRONG_OP = "wrong-operation"


@dataclass(frozen=True)
class ValidationOutcome:
    verdict: str
    reason: str

    @property
    def is_valid(self) -> bool:
        return self.verdict == VALID


def parse_directory_message(data: bytes) -> dict[str, str] | None:
    """Decode ``{k:v,k:v,...}``; None when the bytes do not conform."""
    try:
        text = data.decode("ascii")
    except (UnicodeDecodeError, AttributeError):
        return None
    if len(text) < 2 or text[0] != "{" or text[-1] != "}":
        return None
    body = text[1:-1]
    if "{" in body or "}" in body:
        return None
    out: dict[str, str] = {}
    for part in body.split(","):
        key, sep, value = part.partition(":")
        if not sep or not key:
            return None
        out.setdefault(key, value)
    return out


def directory_validator(expected: bytes, emulated: bytes) -> ValidationOutcome:
    """Classify an emulated response against the recorded expected one."""
    parsed = parse_directory_message(emulated)
    if parsed is None or "op" not in parsed:
        return ValidationOutcome(INVALID, REASON_PARSE)
    expected_fields = parse_directory_message(expected)
    expected_op = expected_fields.get("op") if expected_fields else None
    if parsed["op"] != expected_op:
        return ValidationOutcome(INVALID, REASON_WRONG_OP)
    return ValidationOutcome(VALID, REASON_NONE)
