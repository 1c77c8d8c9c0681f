"""Shared fixtures-as-functions for the test modules."""
import itertools
import random

from autfield.groups import (
    all_homomorphisms,
    build_delta,
    direct_product,
    fiber_product,
    find_lift,
    is_isomorphic,
    kernel_of_first_projection,
    standard_group,
)

SMALL_GROUPS = ["C1", "C2", "C3", "C4", "V4", "C5", "C6", "S3", "D4", "C8", "A4", "S4"]

# non-normal fields of degree <= 8 for the normalizer model
NON_NORMAL = [
    "X^3 - 2",
    "X^3 + X + 1",
    "X^3 - X + 1",
    "X^4 - 2",
    "X^4 - 3",
    "X^4 + 2",
    "X^4 - 2*X^2 - 1",
    "X^6 - 2",
    "X^4 - X - 1",
    "X^5 - 2",
]


def group(name):
    if name == "C2xC2xC2":
        return direct_product(standard_group("V4"), standard_group("C2"), name)
    return standard_group(name)


def random_fiber_instances(count=50, seed=20261015):
    """Deterministic (alpha: G ->> A, rho: B -> A) instances with |G|, |B| <= 24."""
    rng = random.Random(seed)
    names = SMALL_GROUPS + ["C2xC2xC2"]
    epi_cache, hom_cache = {}, {}
    out = []
    while len(out) < count:
        g, a, b = (rng.choice(names) for _ in range(3))
        G, A, B = group(g), group(a), group(b)
        if A.order > G.order or G.order % A.order:
            continue
        if (g, a) not in epi_cache:
            epi_cache[(g, a)] = [h for h in all_homomorphisms(G, A) if h.is_surjective()]
        epis = epi_cache[(g, a)]
        if not epis:
            continue
        if (b, a) not in hom_cache:
            hom_cache[(b, a)] = all_homomorphisms(B, A)
        rhos = hom_cache[(b, a)]
        out.append((f"{g}->{a}<-{b}", rng.choice(epis), rng.choice(rhos)))
    return out


def brute_force_homs(S, T):
    out = []
    for images in itertools.product(range(T.order), repeat=S.order):
        if all(images[S.mul(a, b)] == T.mul(images[a], images[b]) for a in range(S.order) for b in range(S.order)):
            out.append(images)
    return out


def check_fiber_instance(alpha, rho):
    G, A, B = alpha.source, alpha.target, rho.source
    fp = fiber_product(alpha, rho)
    pairs = {(g, b) for g in range(G.order) for b in range(B.order) if alpha(g) == rho(b)}
    assert set(fp.pairs) == pairs
    # |G'| = |G||B|/|A| when rho is onto
    if rho.is_surjective():
        assert fp.group.order * A.order == G.order * B.order
    # alpha' (second projection) is onto since alpha is
    assert fp.second.is_surjective()
    # ker(first projection) = {(1, b) : rho(b) = 1}, isomorphic to ker(rho)
    ker = kernel_of_first_projection(fp)
    assert {fp.pairs[i] for i in ker.sorted()} == {(0, b) for b in range(B.order) if rho(b) == 0}
    ker_group, _ = ker.as_group()
    ker_rho, _ = rho.kernel().as_group()
    assert is_isomorphic(ker_group, ker_rho) is not None
    # a gamma' with alpha o gamma' = rho gives delta with alpha' o delta = id
    gamma = find_lift(rho, alpha)
    brute = [h for h in brute_force_homs(B, G) if all(alpha(h[b]) == rho(b) for b in range(B.order))] if G.order ** B.order <= 10 ** 5 else None
    if brute is not None:
        assert (gamma is None) == (not brute)
    if gamma is not None:
        delta = build_delta(gamma, fp)
        assert all(fp.second(delta(b)) == b for b in range(B.order))
