"""JSON schemas for everything the command line prints with ``--format json``."""

COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "object", "required": ["re", "im"], "properties": {"re": {"type": "number"}, "im": {"type": "number"}}},
    ]
}

MULTIPOLY = {
    "type": "object",
    "required": ["nvars", "terms"],
    "properties": {
        "nvars": {"type": "integer", "minimum": 0},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp", "re", "im"],
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
            },
        },
    },
}

VERDICT = {
    "type": "object",
    "required": ["verdict"],
    "properties": {
        "verdict": {"enum": ["unstable", "probably_stable", "stable_by_certificate"]},
        "witness": {"type": ["array", "null"], "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
        "value": {"type": ["array", "null"]},
        "reason": {"type": "string"},
        "trials": {"type": "integer"},
        "seed": {"type": "integer"},
        "min_margin": {"type": ["number", "null"]},
        "kind": {"type": "string"},
    },
}

CHECK = {
    "type": "object",
    "required": ["command", "poly", "class", "verdict"],
    "properties": {
        "command": {"const": "check"},
        "poly": MULTIPOLY,
        "class": {"enum": ["stable", "upper", "ppos", "real"]},
        "verdict": VERDICT,
    },
}

RELATION = {
    "type": "object",
    "required": ["holds", "witness", "method", "detail"],
    "properties": {
        "holds": {"enum": ["yes", "no", "probably"]},
        "method": {"enum": ["ratio_map", "join", "root_interlacing", "direct"]},
        "detail": {"type": "string"},
    },
}

INTERLACE = {
    "type": "object",
    "required": ["command", "relation", "f", "g", "result"],
    "properties": {
        "command": {"const": "interlace"},
        "relation": {"enum": ["H", "U", "P", "Hsim", "Psim"]},
        "f": MULTIPOLY,
        "g": MULTIPOLY,
        "result": RELATION,
    },
}

POLY_RESULT = {
    "type": "object",
    "required": ["command", "poly", "text"],
    "properties": {
        "command": {"enum": ["construct", "hadamard", "bezout"]},
        "poly": MULTIPOLY,
        "text": {"type": "string"},
        "kind": {"type": "string"},
    },
}

SUITE_REPORT = {
    "type": "object",
    "required": ["suite", "trials", "passes", "refutations", "skips", "seed"],
    "properties": {
        "suite": {"type": "string"},
        "trials": {"type": "integer", "minimum": 0},
        "passes": {"type": "integer", "minimum": 0},
        "skips": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "ms": {"type": "number"},
        "probe": {"type": "boolean"},
        "records": {"type": "array"},
        "refutations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["trial", "input", "witness", "reason"],
                "properties": {
                    "trial": {"type": "integer"},
                    "input": {"oneOf": [MULTIPOLY, {"type": "null"}]},
                    "reason": {"type": "string"},
                },
            },
        },
    },
}

VERIFY = {
    "type": "object",
    "required": ["command", "seed", "ok", "reports"],
    "properties": {
        "command": {"enum": ["verify", "probe"]},
        "seed": {"type": "integer"},
        "ok": {"type": "boolean"},
        "reports": {"type": "array", "items": SUITE_REPORT},
    },
}

ERROR = {
    "type": "object",
    "required": ["error", "message"],
    "properties": {"error": {"enum": ["usage", "numerical", "corpus"]}, "message": {"type": "string"}},
}

BY_COMMAND = {
    "check": CHECK,
    "interlace": INTERLACE,
    "construct": POLY_RESULT,
    "hadamard": POLY_RESULT,
    "bezout": POLY_RESULT,
    "verify": VERIFY,
    "probe": VERIFY,
}
