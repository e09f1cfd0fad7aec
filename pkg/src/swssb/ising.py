"""Statistical mechanics backend for link-dephased product states.

A decohered state on a periodic d-dimensional lattice unravels into
error chains over links; the probability of a phase-flip syndrome v is
a partition-function-like sum over chains with boundary v. This module
evaluates those sums three ways (brute enumeration, spin sums over a
high-temperature loop representation, and for d = 2 a disordered-bond
dual model summed over flux sectors), plus the quenched and annealed
correlators built from them.

Chains and syndromes are plain ints used as bitmasks over links and
sites respectively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import mean_and_stderr, sample_rng

MAX_ENUM_LINKS = 24


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic hypercubic lattice, d in {1, 2}.

    Sites are indexed row-major; links are ordered site-major with the
    +x link first, then (for d = 2) the +y link. Site (r, c) has index
    r * length + c, +x increments c, +y increments r.
    """

    d: int
    length: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if self.length < 2:
            raise ValueError("need at least two sites per direction")

    @property
    def n_sites(self) -> int:
        return self.length ** self.d

    @property
    def n_links(self) -> int:
        return self.d * self.n_sites

    def site(self, r: int, c: int = 0) -> int:
        if self.d == 1:
            return r % self.length
        return (r % self.length) * self.length + (c % self.length)

    def links(self) -> list[tuple[int, int]]:
        """Endpoint pairs in canonical link order."""
        ln = self.length
        out = []
        if self.d == 1:
            for s in range(ln):
                out.append((s, (s + 1) % ln))
            return out
        for r in range(ln):
            for c in range(ln):
                s = r * ln + c
                out.append((s, r * ln + (c + 1) % ln))      # +x
                out.append((s, ((r + 1) % ln) * ln + c))    # +y
        return out

    def link_index(self, site: int, direction: int) -> int:
        return site * self.d + direction

    def link_masks(self) -> np.ndarray:
        """Per-link XOR mask over site bits, canonical order."""
        return np.array([(1 << i) | (1 << j) for i, j in self.links()], dtype=np.int64)


def boundary(lat: LatticeSpec, chain: int) -> int:
    """Mod-2 endpoint set of a chain of links."""
    v = 0
    for k, (i, j) in enumerate(lat.links()):
        if (chain >> k) & 1:
            v ^= (1 << i) | (1 << j)
    return v


def chain_weight(lat: LatticeSpec, p: float, chain: int) -> float:
    w = int(chain).bit_count()
    return (1.0 - p) ** (lat.n_links - w) * p ** w


def syndrome_table(lat: LatticeSpec, p: float) -> np.ndarray:
    """P_v for every syndrome bitmask v, by summing all 2^links chains."""
    m = lat.n_links
    if m > MAX_ENUM_LINKS:
        raise ValueError(f"{m} links exceeds the enumeration cap of {MAX_ENUM_LINKS}")
    masks = lat.link_masks()
    table = np.zeros(1 << lat.n_sites)
    chunk = 1 << 20
    for start in range(0, 1 << m, chunk):
        idx = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        synd = np.zeros_like(idx)
        for k in range(m):
            synd ^= ((idx >> k) & 1) * masks[k]
        w = np.bitwise_count(idx)
        probs = (1.0 - p) ** float(m) * (p / (1.0 - p)) ** w if p < 1.0 else (
            np.where(w == m, 1.0, 0.0)
        )
        if p == 0.0:
            probs = np.where(w == 0, 1.0, 0.0)
        np.add.at(table, synd, probs)
    return table


def p_v_enumerate(lat: LatticeSpec, p: float, v: int) -> float:
    """Total probability of syndrome v by brute-force chain enumeration."""
    return float(syndrome_table(lat, p)[v])


def representative_chain(lat: LatticeSpec, v: int) -> int:
    """Some chain with boundary v: pair sites lexicographically and
    connect each pair by a column-then-row staircase of links."""
    sites = [s for s in range(lat.n_sites) if (v >> s) & 1]
    if len(sites) % 2:
        raise ValueError("syndromes on a torus have even weight")
    chain = 0
    ln = lat.length
    for a, b in zip(sites[::2], sites[1::2]):
        if lat.d == 1:
            for s in range(a, b):
                chain ^= 1 << lat.link_index(s, 0)
            continue
        ra, ca = divmod(a, ln)
        rb, cb = divmod(b, ln)
        c = ca
        while c != cb:  # walk +x along row ra
            chain ^= 1 << lat.link_index(ra * ln + c, 0)
            c = (c + 1) % ln
        r = ra
        while r != rb:  # then +y along column cb
            chain ^= 1 << lat.link_index(r * ln + cb, 1)
            r = (r + 1) % ln
    return chain


def _bond_weights(lat: LatticeSpec, p: float, chain: int) -> np.ndarray:
    """t per link: p/(1-p) off the chain, (1-p)/p on it."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} outside [0, 1]")
    t = np.empty(lat.n_links)
    base = p / (1.0 - p) if p < 1.0 else np.inf
    flipped = (1.0 - p) / p if p > 0.0 else np.inf
    for k in range(lat.n_links):
        t[k] = flipped if (chain >> k) & 1 else base
    return t


def _ring_spin_sum_log(t: np.ndarray) -> float:
    """log of sum_sigma prod_j (1 + t_j s_j s_{j+1}) on a ring.

    Expanding the product, only the all-empty and all-bonds loop terms
    survive the spin sum: 2^N (1 + prod t).
    """
    n = len(t)
    with np.errstate(divide="ignore"):
        logprod = float(np.sum(np.log(t))) if np.all(t > 0) else -np.inf
    return n * np.log(2.0) + np.logaddexp(0.0, logprod)


def _ring_corr(t: np.ndarray, x: int, y: int) -> float:
    """Two-point function on a ring with per-bond weights t."""
    n = len(t)
    x, y = sorted((x % n, y % n))
    if x == y:
        return 1.0
    with np.errstate(divide="ignore"):
        logt = np.log(np.maximum(t, 0.0))
    arc = float(np.sum(logt[x:y]))
    rest = float(np.sum(logt[:x]) + np.sum(logt[y:]))
    num = np.logaddexp(arc, rest)
    den = np.logaddexp(0.0, arc + rest)
    return float(np.exp(num - den))


def _column_transfer(lat: LatticeSpec, t: np.ndarray, insert: dict[int, int] | None = None):
    """Column-to-column transfer factors for d = 2 spin sums.

    Returns (mantissa of the trace, log scale). insert maps site -> odd
    count of sigma insertions at that site.
    """
    ln = lat.length
    dim = 1 << ln
    states = np.arange(dim)
    spins = 1.0 - 2.0 * ((states[:, None] >> np.arange(ln)) & 1)  # [state, row]
    insert = insert or {}
    prod = np.eye(dim)
    log_scale = 0.0
    for c in range(ln):
        # intra-column (+y) bonds of column c
        w = np.ones(dim)
        for r in range(ln):
            tv = t[lat.link_index(r * ln + c, 1)]
            w *= 1.0 + tv * spins[:, r] * spins[:, (r + 1) % ln]
        for r in range(ln):
            if insert.get(r * ln + c, 0) % 2:
                w = w * spins[:, r]
        # inter-column (+x) bonds from column c to c+1
        m = np.ones((dim, dim))
        for r in range(ln):
            tv = t[lat.link_index(r * ln + c, 0)]
            m *= 1.0 + tv * np.outer(spins[:, r], spins[:, r])
        step = (w[:, None] * m)
        prod = prod @ step
        scale = np.max(np.abs(prod))
        if scale == 0.0:
            return 0.0, log_scale
        prod /= scale
        log_scale += np.log(scale)
    return float(np.trace(prod)), log_scale


def _spin_sum_log(lat: LatticeSpec, t: np.ndarray) -> float:
    """log sum_sigma prod_links (1 + t sigma sigma)."""
    if lat.d == 1:
        return _ring_spin_sum_log(t)
    mant, log_scale = _column_transfer(lat, t)
    if mant <= 0.0:
        raise ValueError("non-positive spin sum; weights too singular")
    return float(np.log(mant) + log_scale)


def p_v_loop_rep(lat: LatticeSpec, p: float, rep_chain: int) -> float:
    """Syndrome probability from the loop (high-temperature) spin sum.

    The value depends on the representative chain only through its
    boundary; any chain with the right endpoints gives the same result.
    """
    if not 0.0 < p < 1.0:
        if p == 0.0:
            return 1.0 if rep_chain == 0 else 0.0
        raise ValueError("loop representation needs p in (0, 1)")
    t = _bond_weights(lat, p, rep_chain)
    w = int(rep_chain).bit_count()
    log_pref = (
        lat.n_links * np.log(1.0 - p)
        - lat.n_sites * np.log(2.0)
        + w * np.log(p / (1.0 - p))
    )
    return float(np.exp(log_pref + _spin_sum_log(lat, t)))


def corr_ratio(lat: LatticeSpec, p: float, chain: int, x: int, y: int) -> float:
    """Disorder-sample two-point function <sigma_x sigma_y> for one chain.

    Equals the ratio of syndrome probabilities with and without an
    extra flip pair at x and y. d = 1 uses the ring closed form, d = 2
    an exact column transfer-matrix sum (negative local factors are
    fine for exact summation).
    """
    if x == y:
        return 1.0
    t = _bond_weights(lat, p, chain)
    if lat.d == 1:
        return _ring_corr(t, x, y)
    num_m, num_s = _column_transfer(lat, t, insert={x: 1, y: 1})
    den_m, den_s = _column_transfer(lat, t)
    if den_m == 0.0:
        raise ValueError("degenerate disorder sample: zero partition sum")
    return float((num_m / den_m) * np.exp(num_s - den_s))


def r1_quenched(
    lat: LatticeSpec,
    p: float,
    x: int,
    y: int,
    mode: str = "exact",
    samples: int | None = None,
    seed: int | None = None,
) -> tuple[float, float | None]:
    """Quenched square-root-correlator average sum_l p_l sqrt(<s_x s_y>_l).

    exact mode sums over all syndromes (needs few enough links);
    monte_carlo mode samples chains link-by-link, with one counter-based
    stream per sample so the estimate is reproducible and order-free.
    Returns (value, stderr); stderr is None in exact mode.
    """
    pair = (1 << x) | (1 << y)
    if x == y:
        return 1.0, None if mode == "exact" else 0.0
    if mode == "exact":
        table = syndrome_table(lat, p)
        vals = np.sqrt(table * table[np.arange(len(table)) ^ pair])
        return float(np.sum(vals)), None
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if samples is None or seed is None:
        raise ValueError("monte_carlo mode needs samples and seed")
    draws = []
    for k in range(samples):
        rng = sample_rng(seed, k)
        bits = rng.random(lat.n_links) < p
        chain = 0
        for idx in np.nonzero(bits)[0]:
            chain |= 1 << int(idx)
        corr = corr_ratio(lat, p, chain, x, y)
        draws.append(float(np.sqrt(max(corr, 0.0))))
    return mean_and_stderr(draws)


def r1_closed_form_1d(p: float, r: int) -> float:
    """Large-separation closed form (2 sqrt(p(1-p)))^r for the chain."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} outside [0, 1]")
    return float((2.0 * np.sqrt(p * (1.0 - p))) ** r)


def dephasing_beta(p: float) -> float:
    """Inverse temperature of the annealed mapping, tanh(beta/2) = p/(1-p)."""
    u = p / (1.0 - p)
    if u >= 1.0:
        return np.inf
    return float(2.0 * np.arctanh(u))


def r2_annealed(lat: LatticeSpec, p: float, x: int, y: int) -> float:
    """Annealed (second-moment) correlator: clean Ising two-point
    function at the mapped inverse temperature."""
    if x == y:
        return 1.0
    if not 0.0 <= p <= 0.5:
        raise ValueError("annealed mapping needs p in [0, 1/2]")
    if p == 0.5:
        return 1.0
    beta = dephasing_beta(p)
    tb = float(np.tanh(beta))
    if lat.d == 1:
        n = lat.n_sites
        r = abs(x - y)
        return float((tb ** r + tb ** (n - r)) / (1.0 + tb ** n))
    t = np.full(lat.n_links, tb)
    num_m, num_s = _column_transfer(lat, t, insert={x: 1, y: 1})
    den_m, den_s = _column_transfer(lat, t)
    return float((num_m / den_m) * np.exp(num_s - den_s))


# ---------------------------------------------------------------------------
# d = 2 dual representation: disordered couplings summed over flux sectors

def _crossed_link(lat: LatticeSpec, dual_site: int, direction: int) -> int:
    """Direct-lattice link crossed by a dual link (dual_site, direction)."""
    ln = lat.length
    r, c = divmod(dual_site, ln)
    if direction == 0:  # dual +x crosses the +y link one column over
        return lat.link_index(r * ln + (c + 1) % ln, 1)
    return lat.link_index(((r + 1) % ln) * ln + c, 0)  # dual +y


def _winding_loops(lat: LatticeSpec) -> tuple[int, int]:
    ln = lat.length
    gx = 0
    for c in range(ln):
        gx |= 1 << lat.link_index(0 * ln + c, 0)
    gy = 0
    for r in range(ln):
        gy |= 1 << lat.link_index(r * ln + 0, 1)
    return gx, gy


def rbim_eta(lat: LatticeSpec, chain: int) -> np.ndarray:
    """Dual-link sign pattern: -1 wherever the chain crosses."""
    if lat.d != 2:
        raise ValueError("dual representation is two-dimensional only")
    eta = np.ones(2 * lat.n_sites)
    for a in range(lat.n_sites):
        for direction in (0, 1):
            if (chain >> _crossed_link(lat, a, direction)) & 1:
                eta[2 * a + direction] = -1.0
    return eta


def _rbim_partition(lat: LatticeSpec, coupling: float, eta: np.ndarray) -> float:
    ln = lat.length
    n = lat.n_sites
    configs = np.arange(1 << n)
    spins = 1.0 - 2.0 * ((configs[:, None] >> np.arange(n)) & 1)  # [cfg, dual site]
    energy = np.zeros(1 << n)
    for a in range(n):
        r, c = divmod(a, ln)
        bx = r * ln + (c + 1) % ln
        by = ((r + 1) % ln) * ln + c
        energy += eta[2 * a] * spins[:, a] * spins[:, bx]
        energy += eta[2 * a + 1] * spins[:, a] * spins[:, by]
    return float(np.sum(np.exp(coupling * energy)))


def p_v_rbim_2d(
    lat: LatticeSpec, p: float, rep_chain: int, gauge: np.ndarray | None = None
) -> float:
    """Syndrome probability from the dual disordered-bond model.

    Sums dual Ising partition functions over the four winding (flux)
    sectors; the coupling obeys exp(-2J) = p/(1-p). An optional gauge
    array of +-1 per dual site rewrites the disorder without changing
    the value (change of variables in the spin sum).
    """
    if lat.d != 2:
        raise ValueError("dual representation is two-dimensional only")
    if not 0.0 < p < 0.5:
        raise ValueError("dual mapping needs p in (0, 1/2)")
    if lat.n_sites > 20:
        raise ValueError("dual spin count capped at 20")
    coupling = 0.5 * np.log((1.0 - p) / p)
    gx, gy = _winding_loops(lat)
    total = 0.0
    for extra in (0, gx, gy, gx ^ gy):
        eta = rbim_eta(lat, rep_chain ^ extra)
        if gauge is not None:
            tau = np.asarray(gauge, dtype=float)
            ln = lat.length
            for a in range(lat.n_sites):
                r, c = divmod(a, ln)
                eta[2 * a] *= tau[a] * tau[r * ln + (c + 1) % ln]
                eta[2 * a + 1] *= tau[a] * tau[((r + 1) % ln) * ln + c]
        total += _rbim_partition(lat, coupling, eta)
    n = lat.n_sites
    return float(0.5 * (p * (1.0 - p)) ** n * total)
