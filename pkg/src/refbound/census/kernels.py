"""Hot loops of the census: squarefree sieving and the binary cubic form scan.

All functions are plain Python over ints and numpy arrays, compiled by
:func:`refbound._accel.jit` when numba is enabled.  Integer ranges stay well
inside int64 for discriminant limits up to ~1e10.
"""

from __future__ import annotations

import math

import numpy as np

from .._accel import jit

# primes below this are found by trial division; larger square divisors come
# from a precomputed sorted table
SMALL_PRIME_LIMIT = 128
# maximality at primes below this is tested on every projective point
BRUTE_POINT_LIMIT = 50


# squarefree sieve


@jit
def squarefree_block(lo, hi, primes):
    """Boolean mask over [lo, hi): True where the integer is squarefree."""
    n = hi - lo
    mask = np.ones(n, dtype=np.bool_)
    for i in range(primes.shape[0]):
        p = primes[i]
        p2 = p * p
        if p2 >= hi:
            break
        start = ((lo + p2 - 1) // p2) * p2 - lo
        mask[start::p2] = False
    if lo == 0 and n > 0:
        mask[0] = False
    return mask


@jit
def count_fundamental(lo, hi, primes, block):
    """Number of fundamental discriminants d with lo <= d <= hi (lo >= 2)."""
    total = 0
    # d = 1 mod 4, squarefree
    start = lo
    while start <= hi:
        stop = min(hi + 1, start + block)
        mask = squarefree_block(start, stop, primes)
        first = start + ((1 - start) % 4)
        for d in range(first, stop, 4):
            if d > 1 and mask[d - start]:
                total += 1
        start = stop
    # d = 4k with k = 2, 3 mod 4 squarefree
    k_lo = (lo + 3) // 4
    k_hi = hi // 4
    start = k_lo
    while start <= k_hi:
        stop = min(k_hi + 1, start + block)
        mask = squarefree_block(start, stop, primes)
        for k in range(start, stop):
            r = k % 4
            if (r == 2 or r == 3) and mask[k - start]:
                total += 1
        start = stop
    return total


@jit
def list_fundamental(lo, hi, primes):
    mask_odd = squarefree_block(lo, hi + 1, primes)
    k_lo = (lo + 3) // 4
    k_hi = hi // 4
    mask_k = squarefree_block(k_lo, k_hi + 1, primes)
    out = np.empty(hi - lo + 1, dtype=np.int64)
    n = 0
    for d in range(lo, hi + 1):
        if d % 4 == 1:
            if d > 1 and mask_odd[d - lo]:
                out[n] = d
                n += 1
        elif d % 4 == 0:
            k = d // 4
            r = k % 4
            if (r == 2 or r == 3) and mask_k[k - k_lo]:
                out[n] = d
                n += 1
    return out[:n]


@jit
def pack_squarefree(limit, primes, block):
    """Little-endian bitmap over [0, limit]: bit n set iff n is squarefree."""
    nbytes = limit // 8 + 1
    bits = np.zeros(nbytes, dtype=np.uint8)
    start = 0
    while start <= limit:
        stop = min(limit + 1, start + block)
        mask = squarefree_block(start, stop, primes)
        for i in range(stop - start):
            if mask[i]:
                n = start + i
                bits[n >> 3] |= np.uint8(1 << (n & 7))
        start = stop
    return bits


# binary cubic forms


@jit
def form_disc(a, b, c, d):
    return 18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d


@jit
def transform(a, b, c, d, al, be, ga, de):
    """Coefficients of F(al x + be y, ga x + de y)."""
    a2 = a * al**3 + b * al * al * ga + c * al * ga * ga + d * ga**3
    d2 = a * be**3 + b * be * be * de + c * be * de * de + d * de**3
    b2 = (3 * a * al * al * be + b * (al * al * de + 2 * al * be * ga)
          + c * (2 * al * ga * de + be * ga * ga) + 3 * d * ga * ga * de)
    c2 = (3 * a * al * be * be + b * (2 * al * be * de + be * be * ga)
          + c * (al * de * de + 2 * be * ga * de) + 3 * d * ga * de * de)
    return a2, b2, c2, d2


def small_gammas():
    """GL2(Z) matrices with entries in {-1, 0, 1}, as rows (al, be, ga, de)."""
    out = []
    for al in (-1, 0, 1):
        for be in (-1, 0, 1):
            for ga in (-1, 0, 1):
                for de in (-1, 0, 1):
                    if abs(al * de - be * ga) == 1:
                        out.append((al, be, ga, de))
    return np.array(out, dtype=np.int64)


@jit
def in_domain(a, b, c, d):
    p = b * b - 3 * a * c
    q = b * c - 9 * a * d
    r = c * c - 3 * b * d
    return a > 0 and 0 <= q and q <= p and p <= r


@jit
def is_canonical(a, b, c, d, gammas):
    """True unless a smaller in-domain form is GL2(Z)-equivalent via a small matrix."""
    for i in range(gammas.shape[0]):
        a2, b2, c2, d2 = transform(a, b, c, d, gammas[i, 0], gammas[i, 1], gammas[i, 2], gammas[i, 3])
        if a2 < 0:
            a2, b2, c2, d2 = -a2, -b2, -c2, -d2
        if not in_domain(a2, b2, c2, d2):
            continue
        if a2 < a or (a2 == a and (b2 < b or (b2 == b and (c2 < c or (c2 == c and d2 < d))))):
            return False
    return True


@jit
def is_irreducible(a, b, c, d, p_hess, u_cov):
    """No rational root, for a form with three real roots.

    With s = a t the roots satisfy s^3 + b s^2 + ac s + a^2 d = 0, which has an
    integer root iff the form has a rational one.  Its roots are
    s = -b/3 + (2 sqrt(P)/3) cos(phi/3 - 2 pi k/3) with cos(phi) = -U / (2 P^1.5).
    """
    e1 = a * c
    e0 = a * a * d
    rp = math.sqrt(p_hess)
    arg = -u_cov / (2.0 * p_hess * rp)
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    phi = math.acos(arg)
    for k in range(3):
        s = -b / 3.0 + (2.0 * rp / 3.0) * math.cos((phi - 2.0 * math.pi * k) / 3.0)
        r = int(round(s))
        for t in range(r - 1, r + 2):
            if ((t + b) * t + e1) * t + e0 == 0:
                return False
    return True


@jit
def _singular_point(a, b, c, d, p, x, y):
    """F(x,y) = 0 mod p^2 and both partials vanish mod p."""
    p2 = p * p
    am = a % p2
    bm = b % p2
    cm = c % p2
    dm = d % p2
    x2 = x % p2
    y2 = y % p2
    fx = (((3 * am * x2) % p) * x2 + ((2 * bm * x2) % p) * y2 + cm * ((y2 * y2) % p)) % p
    if fx != 0:
        return False
    fy = (bm * ((x2 * x2) % p) + ((2 * cm * x2) % p) * y2 + ((3 * dm * y2) % p) * y2) % p
    if fy != 0:
        return False
    # Horner in the homogeneous form, reduced mod p^2 at every step
    v = am
    v = (v * x2 + bm * y2) % p2
    v = (v * x2 + ((cm * y2) % p2) * y2) % p2
    v = (v * x2 + ((((dm * y2) % p2) * y2) % p2) * y2) % p2
    return v == 0


@jit
def maximal_at(a, b, c, d, p):
    """Davenport-Heilbronn local condition at p.

    F fails iff F = 0 mod p, or some projective point has F = 0 mod p^2 with
    both partial derivatives = 0 mod p.
    """
    if a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        return False
    if p < BRUTE_POINT_LIMIT:
        if _singular_point(a, b, c, d, p, 1, 0):
            return False
        for t in range(p):
            if _singular_point(a, b, c, d, p, t, 1):
                return False
        return True
    return maximal_at_hessian(a, b, c, d, p)


@jit
def _inverse(x, p):
    return pow_mod(x % p, p - 2, p)


@jit
def pow_mod(base, e, m):
    out = 1
    base %= m
    while e > 0:
        if e & 1:
            out = (out * base) % m
        base = (base * base) % m
        e >>= 1
    return out


@jit
def maximal_at_hessian(a, b, c, d, p):
    """Same test for p > 3, checking only the repeated root located by the Hessian.

    Mod p the form has a multiple root; the Hessian is a multiple of the square
    of that linear factor, or vanishes when the root is triple.
    """
    hp = (b * b - 3 * a * c) % p
    hq = (b * c - 9 * a * d) % p
    hr = (c * c - 3 * b * d) % p
    if hp != 0:
        t = (-hq * _inverse(2 * hp, p)) % p
        return not _singular_point(a, b, c, d, p, t, 1)
    if hr != 0:
        return not _singular_point(a, b, c, d, p, 1, 0)
    if a % p != 0:
        t = (-b * _inverse(3 * a, p)) % p
        return not _singular_point(a, b, c, d, p, t, 1)
    return not _singular_point(a, b, c, d, p, 1, 0)


@jit
def is_maximal(a, b, c, d, disc, sqf_bits, small_primes, sq_n, sq_p):
    if (sqf_bits[disc >> 3] >> (disc & 7)) & 1:
        return True
    for i in range(small_primes.shape[0]):
        p = small_primes[i]
        if disc % (p * p) == 0:
            if not maximal_at(a, b, c, d, p):
                return False
    j = np.searchsorted(sq_n, disc)
    while j < sq_n.shape[0] and sq_n[j] == disc:
        if not maximal_at(a, b, c, d, sq_p[j]):
            return False
        j += 1
    return True


@jit
def _isqrt(n):
    if n <= 0:
        return 0
    r = int(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@jit
def _ceil_div(x, y):
    return -((-x) // y)


@jit
def leading_max(limit):
    """Largest a with 729 a^4 <= 16 limit (from 27 a^2 / 4 <= P <= sqrt(D))."""
    a = int((16.0 * limit / 729.0) ** 0.25) + 2
    while a > 0 and 729 * a**4 > 16 * limit:
        a -= 1
    return a


@jit
def b_bound(a, limit):
    """|b| <= 3a/2 + sqrt(P) with P <= sqrt(limit)."""
    p_max = _isqrt(limit)
    return (3 * a + _isqrt(4 * p_max)) // 2


@jit
def scan_forms(a, b_lo, b_hi, limit, sqf_bits, small_primes, sq_n, sq_p, gammas, out, emit):
    """Count reduced irreducible maximal forms with this a and b in [b_lo, b_hi].

    Reduced means a > 0 and the Hessian P x^2 + Q xy + R y^2 satisfies
    0 <= Q <= P <= R, with ties broken by :func:`is_canonical`.  When emit is
    set, rows (disc, a, b, c, d) are written to out while capacity lasts.
    Returns (count, rows needed).
    """
    count = 0
    written = 0
    cap = out.shape[0]
    p_max = _isqrt(limit)
    p_floor = _ceil_div(27 * a * a, 4)
    for b in range(b_lo, b_hi + 1):
        lo_p = p_floor
        excess = 2 * abs(b) - 3 * a
        if excess > 0:
            lo_p = max(lo_p, _ceil_div(excess * excess, 4))
        lo_p = max(lo_p, 1)
        if lo_p > p_max:
            continue
        c_lo = _ceil_div(b * b - p_max, 3 * a)
        c_hi = (b * b - lo_p) // (3 * a)
        for c in range(c_lo, c_hi + 1):
            p_h = b * b - 3 * a * c
            # 0 <= Q = bc - 9ad <= P
            d_lo = _ceil_div(b * c - p_h, 9 * a)
            d_hi = (b * c) // (9 * a)
            # R = c^2 - 3bd >= P
            if b > 0:
                d_hi = min(d_hi, (c * c - p_h) // (3 * b))
            elif b < 0:
                d_lo = max(d_lo, _ceil_div(c * c - p_h, 3 * b))
            elif c * c < p_h:
                continue
            if d_lo > d_hi:
                continue
            # disc(d) = -27a^2 d^2 + (18abc - 4b^3) d + (b^2c^2 - 4ac^3) must lie in (0, limit]
            qa = -27.0 * a * a
            qb = 18.0 * a * b * c - 4.0 * b**3
            qc = float(b * b * c * c - 4 * a * c**3)
            disc_pos = qb * qb - 4.0 * qa * qc
            if disc_pos <= 0:
                continue
            sq = math.sqrt(disc_pos)
            r1 = (-qb + sq) / (2.0 * qa)
            r2 = (-qb - sq) / (2.0 * qa)
            pos_lo = max(d_lo, int(math.floor(min(r1, r2))) - 1)
            pos_hi = min(d_hi, int(math.ceil(max(r1, r2))) + 1)
            if pos_lo > pos_hi:
                continue
            # values above the limit form a middle sub-interval; skip it
            disc_lim = qb * qb - 4.0 * qa * (qc - limit)
            skip_lo = pos_hi + 1
            skip_hi = pos_hi
            if disc_lim > 0:
                sl = math.sqrt(disc_lim)
                s1 = (-qb + sl) / (2.0 * qa)
                s2 = (-qb - sl) / (2.0 * qa)
                skip_lo = int(math.ceil(min(s1, s2))) + 1
                skip_hi = int(math.floor(max(s1, s2))) - 1
            d = pos_lo
            while d <= pos_hi:
                if d == skip_lo and skip_lo <= skip_hi:
                    d = skip_hi + 1
                    continue
                disc = form_disc(a, b, c, d)
                if disc <= 0 or disc > limit:
                    d += 1
                    continue
                q_h = b * c - 9 * a * d
                r_h = c * c - 3 * b * d
                if q_h == 0 or q_h == p_h or p_h == r_h:
                    if not is_canonical(a, b, c, d, gammas):
                        d += 1
                        continue
                u_cov = 2 * b**3 - 9 * a * b * c + 27 * a * a * d
                if not is_irreducible(a, b, c, d, float(p_h), float(u_cov)):
                    d += 1
                    continue
                if not is_maximal(a, b, c, d, disc, sqf_bits, small_primes, sq_n, sq_p):
                    d += 1
                    continue
                count += 1
                if emit:
                    if written < cap:
                        out[written, 0] = disc
                        out[written, 1] = a
                        out[written, 2] = b
                        out[written, 3] = c
                        out[written, 4] = d
                    written += 1
                d += 1
    return count, written
