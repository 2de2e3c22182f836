"""Independent recomputation of the golden hash fixtures with hashlib and sympy.

Usage: hash_oracle.py path/to/hash_golden.json
Exits non-zero on the first mismatch.
"""
import hashlib
import json
import sys

from sympy import isprime


def lp(b: bytes) -> bytes:
    return len(b).to_bytes(4, "big") + b


def int_bytes(v: int) -> bytes:
    return v.to_bytes((v.bit_length() + 7) // 8, "big") if v else b""


def elem(v: int) -> bytes:
    return lp(int_bytes(v))


def expand(seed: bytes, n: int) -> bytes:
    out = b""
    c = 0
    while len(out) < n:
        out += hashlib.sha256(seed + c.to_bytes(4, "big")).digest()
        c += 1
    return out[:n]


def h(x: str) -> int:
    return int(x, 16)


def gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def h_prime(x, y, mu, bits=128):
    seed = hashlib.sha256(lp(b"Hprime") + elem(x) + elem(y) + lp(mu)).digest()
    nb = (bits + 7) // 8
    c = int.from_bytes(expand(seed, nb), "big") >> (nb * 8 - bits)
    c |= (1 << (bits - 1)) | 1
    while not isprime(c):
        c += 2
    assert c.bit_length() == bits
    return c


def h_random(x, half, y, u, mu, lam=256):
    seed = hashlib.sha256(lp(b"Hrandom") + elem(x) + half.to_bytes(8, "big") + elem(y) + elem(u) + lp(mu)).digest()
    return int.from_bytes(expand(seed, lam // 8), "big") + 1


def hash_to_group(tag: bytes, data: bytes, n: int) -> int:
    nb = (n.bit_length() + 7) // 8 + 16
    for c in range(128):
        seed = lp(tag) + lp(data) + elem(n) + c.to_bytes(4, "big")
        v = int.from_bytes(expand(seed, nb), "big") % n
        if v != 0 and gcd(v, n) == 1:
            return v
    raise RuntimeError("exhausted")


def main(path):
    g = json.load(open(path))
    checks = 0
    for e in g["h_prime"]:
        assert h_prime(h(e["x"]), h(e["y"]), bytes.fromhex(e["mu"])) == h(e["prime"]), e
        checks += 1
    for e in g["h_random"]:
        r = h_random(h(e["x"]), e["half_T"], h(e["y"]), h(e["u"]), bytes.fromhex(e["mu"]))
        assert r == h(e["r"]), e
        checks += 1
    for e in g["h_rand_to_input"]:
        assert hash_to_group(b"HrandToinput", bytes.fromhex(e["R_prev"]), h(e["N"])) == h(e["x"]), e
        checks += 1
    for e in g["h_input_to_rand"]:
        d = hashlib.sha256(lp(b"HinputTorand") + elem(h(e["y"]))).hexdigest()
        assert d == e["R"], e
        checks += 1
    for e in g["h_commit"]:
        d = hashlib.sha256(lp(b"Hcommit") + lp(bytes.fromhex(e["nonce"])) + elem(h(e["x_r"]))).digest()
        assert d.hex() == e["digest"], e
        assert hash_to_group(b"HcommitToGroup", d, h(e["N"])) == h(e["x_ri"]), e
        checks += 1
    print(f"hash oracle: {checks} fixtures match")


if __name__ == "__main__":
    main(sys.argv[1])
