"""Rooted combinatorial maps as rotation systems, exhaustive generation and
the predicates that turn series coefficients into checkable map counts.

A map is a pair of permutations on darts 0..2E-1: ``alpha`` (fixed-point-free
involution pairing the two darts of each edge) and ``sigma`` (counterclockwise
rotation around each vertex).  Faces are the orbits of phi = sigma o alpha;
the outer face is the phi-orbit of the root dart, which places the outer face
on the left of the walk r, phi(r), ...  Genus 0 is enforced through Euler's
relation.

Generation follows the root-edge decomposition: a rooted map with at least
one edge arises exactly once either by joining two rooted maps with a new
isthmus root edge, or by inserting a new root edge across the outer face of a
smaller map.  No isomorphism rejection is needed; every rooted planar map
with up to the requested number of edges is produced exactly once.
"""

from __future__ import annotations

import json
import math
from collections import deque
from fractions import Fraction

from .tables import binomial

INFINITE_GIRTH = math.inf


class MapError(Exception):
    pass


class CombMap:
    """Immutable rooted combinatorial map."""

    __slots__ = ("alpha", "sigma", "root")

    def __init__(self, alpha, sigma, root, check=False):
        self.alpha = tuple(alpha)
        self.sigma = tuple(sigma)
        self.root = root
        if check:
            self.validate()

    # -- basic structure ---------------------------------------------------

    @property
    def n_darts(self):
        return len(self.alpha)

    @property
    def n_edges(self):
        return len(self.alpha) // 2

    def phi(self, d):
        return self.sigma[self.alpha[d]]

    def vertex_labels(self):
        """dart -> vertex id, by sigma orbits (BFS order of discovery)."""
        lab = [-1] * self.n_darts
        nxt = 0
        for d in range(self.n_darts):
            if lab[d] >= 0:
                continue
            e = d
            while lab[e] < 0:
                lab[e] = nxt
                e = self.sigma[e]
            nxt += 1
        return lab, nxt

    def faces(self):
        """List of faces as dart tuples (phi orbits); outer face first."""
        seen = [False] * self.n_darts
        out = []
        order = [self.root] + list(range(self.n_darts)) if self.n_darts else []
        for start in order:
            if seen[start]:
                continue
            orbit = []
            d = start
            while not seen[d]:
                seen[d] = True
                orbit.append(d)
                d = self.phi(d)
            out.append(tuple(orbit))
        return out

    def n_faces(self):
        return len(self.faces()) if self.n_darts else 1

    def n_vertices(self):
        if not self.n_darts:
            return 1
        return self.vertex_labels()[1]

    def validate(self):
        """Fixed-point-free involution, transitivity, genus 0."""
        n = self.n_darts
        if n % 2:
            raise MapError("odd number of darts")
        if n == 0:
            if self.root is not None:
                raise MapError("vertex map has no root dart")
            return self
        if sorted(self.sigma) != list(range(n)):
            raise MapError("sigma is not a permutation")
        for d in range(n):
            if self.alpha[d] == d or self.alpha[self.alpha[d]] != d:
                raise MapError("alpha is not a fixed-point-free involution")
        if not 0 <= self.root < n:
            raise MapError("root out of range")
        # transitivity on darts under <sigma, alpha>
        seen = {0}
        stack = [0]
        while stack:
            d = stack.pop()
            for e in (self.sigma[d], self.alpha[d]):
                if e not in seen:
                    seen.add(e)
                    stack.append(e)
        if len(seen) != n:
            raise MapError("map is not connected")
        if self.n_vertices() - self.n_edges + self.n_faces() != 2:
            raise MapError("map is not planar (genus > 0)")
        return self

    # -- canonical form -----------------------------------------------------

    def canonical(self):
        """Breadth-first relabeling from the root dart; equality becomes
        literal comparison of the dart arrays."""
        n = self.n_darts
        if n == 0:
            return self
        new = [-1] * n
        new[self.root] = 0
        order = [self.root]
        head = 0
        while head < len(order):
            d = order[head]
            head += 1
            for e in (self.alpha[d], self.sigma[d]):
                if new[e] < 0:
                    new[e] = len(order)
                    order.append(e)
        alpha = [0] * n
        sigma = [0] * n
        for d in range(n):
            alpha[new[d]] = new[self.alpha[d]]
            sigma[new[d]] = new[self.sigma[d]]
        return CombMap(alpha, sigma, 0)

    def __eq__(self, other):
        if not isinstance(other, CombMap):
            return NotImplemented
        return (self.alpha == other.alpha and self.sigma == other.sigma
                and self.root == other.root)

    def __hash__(self):
        return hash((self.alpha, self.sigma, self.root))

    def __repr__(self):
        return "CombMap(E=%d, root=%r)" % (self.n_edges, self.root)

    # -- walks ----------------------------------------------------------------

    def outer_contour(self):
        """Darts of the outer face, starting at the root dart."""
        if self.n_darts == 0:
            return ()
        out = [self.root]
        d = self.phi(self.root)
        while d != self.root:
            out.append(d)
            d = self.phi(d)
        return tuple(out)

    def outer_degree(self):
        return len(self.outer_contour())

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self):
        return {"E": self.n_edges,
                "alpha": [a + 1 for a in self.alpha],
                "sigma": [s + 1 for s in self.sigma],
                "root": (self.root + 1) if self.n_darts else 0}

    @staticmethod
    def from_json_dict(d):
        alpha = [a - 1 for a in d["alpha"]]
        sigma = [s - 1 for s in d["sigma"]]
        root = d["root"] - 1 if d["alpha"] else None
        return CombMap(alpha, sigma, root, check=True)

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def loads(s):
        return CombMap.from_json_dict(json.loads(s))


VERTEX_MAP = CombMap((), (), None)


def polygon(d):
    """The d-gon map: one inner face of degree d, rooted on the outer side."""
    if d < 1:
        raise MapError("need d >= 1")
    alpha = [0] * (2 * d)
    sigma = [0] * (2 * d)
    # darts 2i (at vertex i, toward i+1) and 2i+1 (at vertex i+1, toward i)
    for i in range(d):
        alpha[2 * i] = 2 * i + 1
        alpha[2 * i + 1] = 2 * i
        sigma[2 * i] = 2 * ((i - 1) % d) + 1
        sigma[2 * ((i - 1) % d) + 1] = 2 * i
    return CombMap(alpha, sigma, 0, check=True)


# -- generation ------------------------------------------------------------------


def _join(m1, m2):
    """New isthmus root edge from the root corner of m1 to that of m2."""
    n1, n2 = m1.n_darts, m2.n_darts
    a, b = n1 + n2, n1 + n2 + 1
    alpha = list(m1.alpha) + [x + n1 for x in m2.alpha] + [b, a]
    sigma = list(m1.sigma) + [x + n1 for x in m2.sigma] + [0, 0]
    if n1:
        c0 = m1.root
        contour = m1.outer_contour()
        x = m1.alpha[contour[-1]]
        sigma[x] = a
        sigma[a] = c0
    else:
        sigma[a] = a
    if n2:
        d0 = m2.root + n1
        contour = m2.outer_contour()
        y = m2.alpha[contour[-1]] + n1
        sigma[y] = b
        sigma[b] = d0
    else:
        sigma[b] = b
    return CombMap(alpha, sigma, a)


def _insert(m, i, contour=None):
    """New non-isthmus root edge swallowing i outer-boundary edges.

    The new inner face (left of the reversed root) has degree i + 1; the new
    outer degree is outer_degree(m) - i + 1.
    """
    n = m.n_darts
    a, b = n, n + 1
    alpha = list(m.alpha) + [b, a]
    sigma = list(m.sigma) + [0, 0]
    if n == 0:
        if i != 0:
            raise MapError("vertex map only supports i = 0")
        sigma[a] = b
        sigma[b] = a
        return CombMap(alpha, sigma, a)
    if contour is None:
        contour = m.outer_contour()
    q = len(contour)
    if not 0 <= i <= q:
        raise MapError("swallow count out of range")
    c0 = contour[0]
    x = m.alpha[contour[-1]]
    if i == 0:
        sigma[x] = a
        sigma[a] = b
        sigma[b] = c0
    elif i == q:
        sigma[x] = b
        sigma[b] = a
        sigma[a] = c0
    else:
        ci = contour[i]
        y = m.alpha[contour[i - 1]]
        sigma[x] = a
        sigma[a] = c0
        sigma[y] = b
        sigma[b] = ci
    return CombMap(alpha, sigma, a)


def classical_rooted_count(e):
    """Number of rooted planar maps with e edges."""
    v = Fraction(2 * 3 ** e * binomial(2 * e, e), (e + 1) * (e + 2))
    assert v.denominator == 1
    return int(v)


class GenRecord:
    """A generated map together with its exact girth (carried incrementally)."""

    __slots__ = ("map", "girth")

    def __init__(self, m, girth):
        self.map = m
        self.girth = girth


def generate_records(max_edges, min_girth=None, max_face_degree=None,
                     hard_cap=8):
    """All rooted planar maps with up to ``max_edges`` edges, exactly once,
    as GenRecords with exact girths.

    ``min_girth`` and ``max_face_degree`` prune hereditarily during
    generation (girth never increases and inner faces persist).
    """
    if max_edges < 0:
        raise MapError("negative edge bound")
    if max_edges > hard_cap:
        raise MapError("generation capped at %d edges" % hard_cap)
    levels = [[GenRecord(VERTEX_MAP, INFINITE_GIRTH)]]
    for e in range(1, max_edges + 1):
        level = []
        # isthmus root edge: ordered pairs summing to e - 1
        for e1 in range(0, e):
            for r1 in levels[e1]:
                for r2 in levels[e - 1 - e1]:
                    g = min(r1.girth, r2.girth)
                    if min_girth is not None and g < min_girth:
                        continue
                    level.append(GenRecord(_join(r1.map, r2.map), g))
        # non-isthmus root edge across the outer face
        for rec in levels[e - 1]:
            m = rec.map
            if m.n_darts == 0:
                g = 1  # the loop
                if (min_girth is None or g >= min_girth) and \
                        (max_face_degree is None or 1 <= max_face_degree):
                    level.append(GenRecord(_insert(m, 0), g))
                continue
            contour = m.outer_contour()
            vlab, _ = m.vertex_labels()
            adj = _adjacency(m, vlab)
            a_vertex = vlab[m.root]
            dist = _dist_from(a_vertex, adj)
            q = len(contour)
            for i in range(0, q + 1):
                if max_face_degree is not None and i + 1 > max_face_degree:
                    continue
                if i == 0 or i == q:
                    new_cycle = 1
                else:
                    b_vertex = vlab[contour[i]]
                    new_cycle = 1 + dist[b_vertex]
                g = min(rec.girth, new_cycle)
                if min_girth is not None and g < min_girth:
                    continue
                level.append(GenRecord(_insert(m, i, contour), g))
        levels.append(level)
    for level in levels:
        for rec in level:
            yield rec


def enumerate_maps(max_edges, outer_degree=None, min_girth=None,
                   max_face_degree=None):
    """Stream of rooted planar maps with up to ``max_edges`` edges."""
    for rec in generate_records(max_edges, min_girth, max_face_degree):
        if outer_degree is not None and rec.map.outer_degree() != outer_degree:
            continue
        yield rec.map


def _adjacency(m, vlab):
    adj = [[] for _ in range(max(vlab) + 1)] if m.n_darts else [[]]
    for d in range(m.n_darts):
        adj[vlab[d]].append(vlab[m.alpha[d]])
    return adj


def _dist_from(v0, adj):
    dist = {v0: 0}
    dq = deque([v0])
    while dq:
        v = dq.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                dq.append(w)
    return dist


# -- statistics ---------------------------------------------------------------------


class MapStats:
    __slots__ = ("outer_degree", "inner_degrees", "girth")

    def __init__(self, outer_degree, inner_degrees, girth):
        self.outer_degree = outer_degree
        self.inner_degrees = inner_degrees
        self.girth = girth

    def __repr__(self):
        return "MapStats(outer=%d, inner=%r, girth=%r)" % (
            self.outer_degree, self.inner_degrees, self.girth)


def map_stats(m):
    """Outer degree, inner face degree multiset, girth."""
    faces = m.faces()
    outer = len(faces[0]) if faces else 0
    inner = tuple(sorted(len(f) for f in faces[1:]))
    return MapStats(outer, inner, girth(m))


def girth(m):
    """Shortest cycle length; infinite for trees (and the vertex map)."""
    if m.n_darts == 0:
        return INFINITE_GIRTH
    vlab, nv = m.vertex_labels()
    if m.n_edges == nv - 1:
        return INFINITE_GIRTH
    best = INFINITE_GIRTH
    edges = [(d, m.alpha[d]) for d in range(m.n_darts) if d < m.alpha[d]]
    # adjacency by darts so parallel edges stay distinguishable
    incident = [[] for _ in range(nv)]
    for d in range(m.n_darts):
        incident[vlab[d]].append(d)
    for d, ad in edges:
        u, v = vlab[d], vlab[ad]
        if u == v:
            return 1  # a loop cannot be beaten
        # BFS from u to v in the map minus this edge
        dist = {u: 0}
        dq = deque([u])
        found = None
        while dq and found is None:
            w = dq.popleft()
            if dist[w] + 1 >= best:
                continue
            for dd in incident[w]:
                if dd == d or dd == ad:
                    continue
                t = vlab[m.alpha[dd]]
                if t not in dist:
                    dist[t] = dist[w] + 1
                    if t == v:
                        found = dist[t]
                        break
                    dq.append(t)
        if found is not None:
            best = min(best, found + 1)
    return best


def simple_cycles(m, max_len=None):
    """Edge sets of all simple cycles (length bounded by ``max_len``)."""
    vlab, nv = m.vertex_labels()
    if max_len is None:
        max_len = nv
    incident = [[] for _ in range(nv)]
    for d in range(m.n_darts):
        incident[vlab[d]].append(d)
    cycles = set()

    def edge_id(d):
        return min(d, m.alpha[d])

    def dfs(start, v, used_vertices, edge_path):
        if len(edge_path) > max_len:
            return
        for d in incident[v]:
            w = vlab[m.alpha[d]]
            eid = edge_id(d)
            if eid in edge_path:
                continue
            if w == start:
                cycles.add(frozenset(edge_path + [eid]))
                continue
            if w in used_vertices or w < start:
                continue
            if len(edge_path) + 1 >= max_len:
                continue
            used_vertices.add(w)
            dfs(start, w, used_vertices, edge_path + [eid])
            used_vertices.discard(w)

    for s in range(nv):
        dfs(s, s, {s}, [])
    return {c for c in cycles}


def face_edge_sets(m):
    """For each face, the set of edge ids on its boundary plus its degree."""
    out = []
    for f in m.faces():
        eids = frozenset(min(d, m.alpha[d]) for d in f)
        out.append((len(f), eids))
    return out


def is_d_irreducible(m, d, weak=False):
    """Girth at least d, and every length-d cycle bounds a d-valent inner
    face (with ``weak``, the outer face also qualifies when its degree is d).
    """
    if d <= 0:
        return True
    g = girth(m)
    if g < d:
        return False
    if g > d:
        return True
    faces = face_edge_sets(m)
    allowed = {eids for k, (deg, eids) in enumerate(faces)
               if deg == d and len(eids) == d and (k > 0 or weak)}
    for cyc in simple_cycles(m, d):
        if len(cyc) == d and cyc not in allowed:
            return False
    return True


def is_weakly_d_irreducible(m, d):
    return is_d_irreducible(m, d, weak=True)


# -- slices ---------------------------------------------------------------------


class SlicePackage:
    """A map with a marked apex and a declared slice type p/p+k+1."""

    __slots__ = ("map", "apex", "k", "p")

    def __init__(self, m, apex, k, p):
        self.map = m
        self.apex = apex    # vertex id under map.vertex_labels()
        self.k = k
        self.p = p

    def __repr__(self):
        return "SlicePackage(E=%d, apex=%d, type %d/%d)" % (
            self.map.n_edges, self.apex, self.p, self.p + self.k + 1)

    def to_json_dict(self):
        return {"map": self.map.to_json_dict(), "apex": self.apex + 1,
                "k": self.k, "p": self.p}

    @staticmethod
    def from_json_dict(d):
        return SlicePackage(CombMap.from_json_dict(d["map"]),
                            d["apex"] - 1, d["k"], d["p"])


def _geodesic_counts(adj_darts, vlab, alpha, apex, skip_edge=None):
    """BFS distances from the apex plus the number of geodesics per vertex."""
    dist = {apex: 0}
    ways = {apex: 1}
    order = [apex]
    dq = deque([apex])
    while dq:
        v = dq.popleft()
        for d in adj_darts[v]:
            if skip_edge is not None and min(d, alpha[d]) == skip_edge:
                continue
            w = vlab[alpha[d]]
            if w not in dist:
                dist[w] = dist[v] + 1
                ways[w] = 0
                order.append(w)
                dq.append(w)
    for v in order[1:]:
        total = 0
        for d in adj_darts[v]:
            if skip_edge is not None and min(d, alpha[d]) == skip_edge:
                continue
            w = vlab[alpha[d]]
            if w in dist and dist[w] == dist[v] - 1:
                total += ways[w]
        ways[v] = total
    return dist, ways


def certify_slice(pkg):
    """Check the slice conditions by explicit geodesic counting.

    Right boundary: unique shortest path from the root-edge endpoint to the
    apex.  Left boundary: shortest among root-edge-avoiding paths.  The apex
    is the only shared boundary vertex and the slice carries an inner face.
    The single-edge map with the apex at the root endpoint is the unit slice
    of type 0/1.
    """
    m, apex, k, p = pkg.map, pkg.apex, pkg.k, pkg.p
    if m.n_darts == 0:
        return False
    vlab, nv = m.vertex_labels()
    if not 0 <= apex < nv:
        return False
    contour = m.outer_contour()
    n = len(contour)
    verts = [vlab[contour[0]]] + [vlab[m.alpha[d]] for d in contour]
    # unit slice: the single-edge map, apex at the root endpoint
    if m.n_edges == 1 and m.n_faces() == 1:
        return apex == verts[1] and (k, p) == (0, 0)
    if n != 2 * p + k + 2:
        return False
    t = p + 1
    if verts[t] != apex:
        return False
    adj = [[] for _ in range(nv)]
    for d in range(m.n_darts):
        adj[vlab[d]].append(d)
    dist, ways = _geodesic_counts(adj, vlab, m.alpha, apex)
    # right boundary: v_1 .. v_t, length p, the unique geodesic
    for j in range(1, t + 1):
        if dist.get(verts[j]) != t - j:
            return False
    if ways.get(verts[1]) != 1:
        return False
    # left boundary: v_n .. v_t, length p+k+1, geodesic avoiding the root edge
    root_eid = min(m.root, m.alpha[m.root])
    left_edges = [min(contour[j], m.alpha[contour[j]]) for j in range(t, n)]
    if root_eid in left_edges:
        return False
    dist2, _ = _geodesic_counts(adj, vlab, m.alpha, apex, skip_edge=root_eid)
    for j in range(t, n + 1):
        if dist2.get(verts[j]) != j - t:
            return False
    # apex is the only common boundary vertex
    right_set = {verts[j] for j in range(1, t + 1)}
    left_set = {verts[j] for j in range(t, n + 1)}
    if right_set & left_set != {apex}:
        return False
    # at least one inner face
    if m.n_faces() < 2:
        return False
    return True


def slice_packages(m, d=None):
    """All certified slice packages carried by one rooted map.

    Scans the outer contour for apex positions; for pure d-angular studies an
    optional d restricts to maps whose inner faces are all d-valent.
    """
    out = []
    if m.n_darts == 0:
        return out
    if d is not None:
        st = map_stats(m)
        if any(deg != d for deg in st.inner_degrees):
            return out
    vlab, _ = m.vertex_labels()
    contour = m.outer_contour()
    n = len(contour)
    verts = [vlab[contour[0]]] + [vlab[m.alpha[dd]] for dd in contour]
    for t in range(1, n):
        p = t - 1
        k = n - 2 * p - 2
        if k < -1:
            continue
        pkg = SlicePackage(m, verts[t], k, p)
        if certify_slice(pkg):
            out.append(pkg)
    return out


# -- annular classification --------------------------------------------------------


def _face_components(m, banned_edges):
    """Face -> component id when crossing only edges not in banned_edges."""
    faces = m.faces()
    face_of = {}
    for idx, f in enumerate(faces):
        for d in f:
            face_of[d] = idx
    comp = [-1] * len(faces)
    cur = 0
    for start in range(len(faces)):
        if comp[start] >= 0:
            continue
        comp[start] = cur
        stack = [start]
        while stack:
            f = stack.pop()
            for d in faces[f]:
                eid = min(d, m.alpha[d])
                if eid in banned_edges:
                    continue
                g = face_of[m.alpha[d]]
                if comp[g] < 0:
                    comp[g] = cur
                    stack.append(g)
        cur += 1
    return comp


class AnnularClassification:
    __slots__ = ("separating_girth", "non_separating_girth",
                 "irreducible", "quasi_irreducible")

    def __init__(self, sep, nonsep, irr, quasi):
        self.separating_girth = sep
        self.non_separating_girth = nonsep
        self.irreducible = irr
        self.quasi_irreducible = quasi

    def __repr__(self):
        return ("AnnularClassification(sep=%r, nonsep=%r, irr=%r, quasi=%r)"
                % (self.separating_girth, self.non_separating_girth,
                   self.irreducible, self.quasi_irreducible))


def classify_annular(m, central_face, d, dprime):
    """Separating/non-separating girths and the two irreducibility predicates
    for a map with a marked inner face.

    A cycle separates when the outer face and the central face fall on
    opposite sides (dual reachability with the cycle's edges removed).
    """
    faces = m.faces()
    if not 1 <= central_face < len(faces):
        raise MapError("central face must be an inner face index")
    central_edges = frozenset(min(dd, m.alpha[dd]) for dd in faces[central_face])
    inner_d_faces = {frozenset(min(dd, m.alpha[dd]) for dd in f)
                     for i, f in enumerate(faces)
                     if i != 0 and i != central_face and len(f) == d}
    sep_girth = INFINITE_GIRTH
    nonsep_girth = INFINITE_GIRTH
    quasi = True
    irr = True
    for cyc in simple_cycles(m):
        comp = _face_components(m, cyc)
        separating = comp[0] != comp[central_face]
        length = len(cyc)
        if separating:
            sep_girth = min(sep_girth, length)
            if length < dprime:
                quasi = irr = False
            elif length == dprime and cyc != central_edges:
                irr = False
        else:
            nonsep_girth = min(nonsep_girth, length)
            if length < d:
                quasi = irr = False
            elif length == d and cyc not in inner_d_faces:
                quasi = irr = False
    if not (len(faces[central_face]) == dprime
            and central_edges in {frozenset(c) for c in simple_cycles(m, dprime)}
            and len(central_edges) == dprime):
        irr = False
    return AnnularClassification(sep_girth, nonsep_girth, irr, quasi)
