"""Independent reference for the hashed bag-of-words embedder.

Tokens: maximal runs of ASCII alphanumerics or non-ASCII bytes, ASCII-lowercased.
Each token: h = FNV-1a-64(utf8); bucket = h % d; sign = +1 if (h >> 32) even else -1.
The vector is the signed bucket sum, L2-normalized.
"""
import math
import re
import sys

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def tokens(text: str):
    raw = text.encode("utf-8")
    return [t.lower() for t in re.findall(rb"[A-Za-z0-9\x80-\xff]+", raw)]


def embed(text: str, d: int):
    v = [0.0] * d
    for tok in tokens(text):
        h = fnv1a64(tok)
        v[h % d] += 1.0 if ((h >> 32) % 2 == 0) else -1.0
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def cosine(a, b):
    return sum(x * y for x, y in zip(a, b))


if __name__ == "__main__":
    d = 8
    a, b = embed("alpha beta", d), embed("alpha gamma", d)
    for tok in (b"alpha", b"beta", b"gamma"):
        h = fnv1a64(tok)
        print(tok.decode(), hex(h), "bucket", h % d, "sign", 1 if (h >> 32) % 2 == 0 else -1)
    print("alpha beta  ", a)
    print("alpha gamma ", b)
    print("cosine %.17g" % cosine(a, b))
    d = 384
    print("cosine d=384 'interest rates rose' vs 'interest rates fell': %.17g"
          % cosine(embed("interest rates rose", d), embed("interest rates fell", d)))
