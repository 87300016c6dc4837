"""Arrow-decorated plane trees and their bijection with d-angular slices.

A k-tree (for a d-angular family) is a planted plane tree whose edges carry
arrow decorations: the edge above a subtree carries m arrows on the parent
side, inner vertices have total out-degree d+1, the planted root vertex has
out-degree k, and leaf edges carry d-2 arrows on their inner side.  The
closure algorithm walks the contour, assigns heights (each edge side steps
the height down by one except leaving a leaf, which jumps it up by d-1),
appends a chain realizing the left boundary, and reconnects every leaf to the
first later corner at the same height.  The inverse opening peels a slice
into subslices along leftmost geodesics.

Orientation conventions (child order along the contour, arc landing order
inside a corner) are fixed once here and validated by the roundtrip and
census identities in the test suite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .maps import (CombMap, SlicePackage, MapError, certify_slice,
                   is_d_irreducible, map_stats)


class TreeError(Exception):
    pass


class OrientedTree:
    """A k-tree node: ``children`` is None for the single-leaf-edge tree."""

    __slots__ = ("k", "children")

    def __init__(self, k, children=None):
        self.k = k
        self.children = tuple(children) if children is not None else None

    def is_leaf(self):
        return self.children is None

    def __eq__(self, other):
        if not isinstance(other, OrientedTree):
            return NotImplemented
        return self.k == other.k and self.children == other.children

    def __hash__(self):
        return hash((self.k, self.children))

    def __repr__(self):
        if self.is_leaf():
            return "Leaf(%d)" % self.k
        return "Tree(%d, %r)" % (self.k, list(self.children))

    # -- shape statistics ---------------------------------------------------

    def edge_count(self):
        if self.is_leaf():
            return 1
        return 1 + sum(c.edge_count() for c in self.children)

    def leaf_count(self):
        if self.is_leaf():
            return 1
        return sum(c.leaf_count() for c in self.children)

    def validate(self, d):
        if self.is_leaf():
            if self.k != d - 2:
                raise TreeError("leaf edge must carry d-2 arrows")
            return self
        if not 1 <= self.k <= d - 2:
            raise TreeError("root out-degree out of range")
        if sum(c.k for c in self.children) != self.k + 2:
            raise TreeError("child out-degrees must sum to k+2")
        for c in self.children:
            c.validate(d)
        return self

    # -- serialization ------------------------------------------------------

    def to_json_dict(self):
        if self.is_leaf():
            return {"type": "leaf"}
        return {"type": "inner", "m": self.k,
                "children": [c.to_json_dict() for c in self.children]}

    @staticmethod
    def from_json_dict(data, d):
        if data["type"] == "leaf":
            return OrientedTree(d - 2)
        kids = [OrientedTree.from_json_dict(c, d) for c in data["children"]]
        return OrientedTree(data["m"], kids)


def enumerate_trees(d, k, max_edges):
    """All k-trees of the d-angular family with at most max_edges edges."""
    if d < 3:
        raise TreeError("need d >= 3")
    if not 1 <= k <= d - 2:
        raise TreeError("k out of range")
    cache = {}
    for e in range(1, max_edges + 1):
        for t in _trees_exact(d, k, e, cache):
            yield t


def _trees_exact(d, k, e, cache):
    key = (k, e)
    if key in cache:
        return cache[key]
    out = []
    if e >= 1:
        if k == d - 2 and e == 1:
            out.append(OrientedTree(d - 2))
        if e >= 2:
            for seq in _child_seqs(d, k + 2, e - 1, cache):
                out.append(OrientedTree(k, seq))
    cache[key] = tuple(out)
    return cache[key]


def _child_seqs(d, ksum, esum, cache):
    """Sequences of subtrees with out-degrees summing to ksum and edges to esum."""
    if ksum == 0:
        if esum == 0:
            yield ()
        return
    if ksum < 0 or esum <= 0:
        return
    for m in range(1, min(d - 2, ksum) + 1):
        # remaining out-degree needs at least ceil(rest / (d-2)) more edges
        rest = ksum - m
        min_rest_edges = -(-rest // (d - 2)) if rest else 0
        for e1 in range(1, esum - min_rest_edges + 1):
            for head in _trees_exact(d, m, e1, cache):
                for tail in _child_seqs(d, ksum - m, esum - e1, cache):
                    yield (head,) + tail


# -- contour heights and depth ----------------------------------------------------


def contour_heights(tree, d):
    """Corner heights of the counterclockwise contour walk (tree part only).

    Returns (heights, final) where heights lists the corner heights after
    each of the 2 * edges crossings and final is the closing height (always
    the root out-degree).
    """
    heights = []

    def walk(t, h):
        if t.is_leaf():
            heights.append(h - 1)
            heights.append(h + d - 2)
            return h + d - 2
        hh = h - 1
        heights.append(hh)
        for c in t.children:
            hh = walk(c, hh)
        heights.append(hh - 1)
        return hh - 1

    final = walk(tree, 0)
    if final != tree.k:
        raise TreeError("contour closes at %d, expected %d" % (final, tree.k))
    return heights, final


def tree_depth(tree, d):
    """Depth p: the contour minimum is -p-1 (always attained at a leaf)."""
    heights, _ = contour_heights(tree, d)
    return -min(heights) - 1


def depth_census(d, k, max_edges):
    """{(leaves, depth): count} over all k-trees with at most max_edges edges."""
    out = {}
    for t in enumerate_trees(d, k, max_edges):
        key = (t.leaf_count(), tree_depth(t, d))
        out[key] = out.get(key, 0) + 1
    return out


def bipartite_convert(tree, d):
    """Halve the arrow decorations of an even-k tree of an even family.

    The converted tree belongs to the (b+1)-out-degree family with b = d/2;
    the conversion is bijective and preserves the plane shape.
    """
    if d % 2:
        raise TreeError("bipartite conversion needs even d")
    if tree.k % 2:
        raise TreeError("odd out-degree trees of even families are infinite")
    if tree.is_leaf():
        return OrientedTree(d // 2 - 1)
    kids = [bipartite_convert(c, d) for c in tree.children]
    return OrientedTree(tree.k // 2, kids)


# -- closure: tree -> slice ---------------------------------------------------------


def closure(tree, d):
    """Build the slice of a k-tree on an explicit rotation system.

    The tree is drawn with children in list order along the contour, the
    left-boundary chain is appended at the root corner, and each leaf is
    reconnected to its height successor.  Returns a SlicePackage of type
    p/p+k+1 with p read off the contour minimum.
    """
    tree.validate(d)
    k = tree.k
    heights, _ = contour_heights(tree, d)
    p = -min(heights) - 1
    chain_len = k + p + 1

    # explicit construction: darts numbered as created
    alpha = []
    vertex_of = []
    rot = {}

    def new_vertex():
        rot[len(rot)] = []
        return len(rot) - 1

    def new_edge(u, v):
        a = len(alpha)
        alpha.extend([a + 1, a])
        vertex_of.extend([u, v])
        return a, a + 1

    leaf_dart = {}

    def build(t, parent_vertex):
        """Attach t below parent_vertex; returns nothing (rotations updated)."""
        child_vertex = new_vertex()
        down, up = new_edge(parent_vertex, child_vertex)
        rot[parent_vertex].append(down)
        rot[child_vertex].append(up)
        if t.is_leaf():
            leaf_dart[child_vertex] = up
            return
        for c in t.children:
            build(c, child_vertex)

    root_vertex = new_vertex()
    build(tree, root_vertex)
    # left-boundary chain hangs at the root corner, after the tree edge
    chain = [root_vertex]
    for _ in range(chain_len):
        w = new_vertex()
        down, up = new_edge(chain[-1], w)
        rot[chain[-1]].append(down)
        rot[w].append(up)
        chain.append(w)
    apex_vertex = chain[-1]
    apex_dart = rot[apex_vertex][0]

    # contour walk of the extended tree, before any reconnection
    def sigma_next(dart):
        lst = rot[vertex_of[dart]]
        return lst[(lst.index(dart) + 1) % len(lst)]

    root_dart = 0  # first created dart: root vertex toward the tree
    corners = []
    h = 0
    dart = root_dart
    for _ in range(2 * tree.edge_count() + chain_len):
        a = alpha[dart]
        v = vertex_of[a]
        if vertex_of[dart] in leaf_dart and dart == leaf_dart[vertex_of[dart]]:
            h += d - 1   # leaving a leaf
        else:
            h -= 1
        corners.append((v, a, h))
        dart = sigma_next(a)

    # stack closure: connect pending leaves to equal-height corners
    stack = []
    merged = {}
    for (v, a, h) in corners:
        cursor = a
        while stack and stack[-1][1] == h:
            lv, _ = stack.pop()
            block = rot[lv]
            own = leaf_dart[lv]
            i = block.index(own)
            block = block[i:] + block[:i]
            tgt = rot[v]
            at = tgt.index(cursor) + 1
            tgt[at:at] = block
            for dd in block:
                vertex_of[dd] = v
            del rot[lv]
            merged[lv] = v
            cursor = block[-1]
        if v in leaf_dart and v in rot:
            stack.append((v, h))
    if stack:
        raise TreeError("unconnected leaves after closure; convention bug")

    sigma = [0] * len(alpha)
    for v, lst in rot.items():
        for i, dd in enumerate(lst):
            sigma[dd] = lst[(i + 1) % len(lst)]
    m = CombMap(alpha, sigma, root_dart)
    vlab, _ = m.vertex_labels()
    return SlicePackage(m, vlab[apex_dart], k, p)


# -- opening: slice -> tree -----------------------------------------------------------


def open_slice(pkg, d):
    """Tree of a certified pure d-angular k-slice (inverse of the closure)."""
    m = pkg.map
    if not certify_slice(pkg):
        raise TreeError("input is not a certified slice")
    if not is_d_irreducible(m, d):
        raise TreeError("input slice is not irreducible for this family")
    st = map_stats(m)
    if any(deg != d for deg in st.inner_degrees):
        raise TreeError("opening is defined for pure d-angular slices")
    if len(st.inner_degrees) == 1 and pkg.k == d - 2:
        return OrientedTree(d - 2)
    if pkg.p < 1:
        raise TreeError("only the bottom slice can have a trivial right boundary")
    pieces = _iterated_pieces(pkg)
    total = sum(pc.k for pc in pieces)
    if total != pkg.k + 2:
        raise TreeError("piece out-degrees sum to %d, expected %d"
                        % (total, pkg.k + 2))
    return OrientedTree(pkg.k, [open_slice(pc, d) for pc in pieces])


def _boundary_data(pkg):
    m = pkg.map
    vlab, nv = m.vertex_labels()
    contour = m.outer_contour()
    verts = [vlab[contour[0]]] + [vlab[m.alpha[dd]] for dd in contour]
    t = pkg.p + 1
    return vlab, contour, verts, t


def _iterated_pieces(pkg):
    """Peel a k-slice into its sequence of subslices."""
    pieces = []
    cur = pkg
    while True:
        m = cur.map
        vlab, contour, verts, t = _boundary_data(cur)
        apex = cur.apex
        root_eid = min(m.root, m.alpha[m.root])
        first_right = contour[1]
        forbidden = min(first_right, m.alpha[first_right])
        right_verts = verts[1:t + 1]
        path = _leftmost_geodesic(m, vlab, verts[1], apex, forbidden)
        if min(path[0], m.alpha[path[0]]) == root_eid:
            pieces.append(SlicePackage(CombMap(m.alpha, m.sigma, first_right),
                                       apex, cur.k + 2, cur.p - 1))
            return pieces
        piece, rest = _split_slice(cur, path, right_verts)
        pieces.append(piece)
        cur = rest


def _leftmost_geodesic(m, vlab, src, dst, forbidden_eid):
    """Leftmost shortest path from src to dst avoiding one edge.

    Among the darts continuing a shortest path, the first one reached by
    rotating backwards (inverse rotation) from the reversed arrival dart is
    chosen; the first step scans from the forbidden edge's dart.  With the
    outer face on the left of the root dart, this backwards scan is what
    realizes "leftmost"; the convention is pinned down by the roundtrip and
    census identities in the tests.
    """
    nv = max(vlab) + 1
    adj = [[] for _ in range(nv)]
    for dd in range(m.n_darts):
        adj[vlab[dd]].append(dd)
    dist = {dst: 0}
    dq = deque([dst])
    while dq:
        v = dq.popleft()
        for dd in adj[v]:
            if min(dd, m.alpha[dd]) == forbidden_eid:
                continue
            w = vlab[m.alpha[dd]]
            if w not in dist:
                dist[w] = dist[v] + 1
                dq.append(w)
    if src not in dist:
        raise TreeError("no path avoiding the forbidden edge")
    inv = [0] * m.n_darts
    for i, s in enumerate(m.sigma):
        inv[s] = i
    ref = None
    for dd in adj[src]:
        if min(dd, m.alpha[dd]) == forbidden_eid:
            ref = dd
            break
    if ref is None:
        raise TreeError("forbidden edge not at the source vertex")
    path = []
    v = src
    while v != dst:
        choice = None
        dd = inv[ref]
        while True:
            w = vlab[m.alpha[dd]]
            if min(dd, m.alpha[dd]) != forbidden_eid and \
                    dist.get(w) == dist[v] - 1:
                choice = dd
                break
            if dd == ref:
                break
            dd = inv[dd]
        if choice is None:
            raise TreeError("geodesic step failed; convention bug")
        path.append(choice)
        v = vlab[m.alpha[choice]]
        ref = m.alpha[choice]
    return path


def _split_slice(cur, path, right_verts):
    """Cut along the marked path.

    The path sticks to whichever boundary it hits first.  Hitting the right
    boundary at Q: the piece (root BC, apex Q) sits between the right
    boundary and the path, and the remainder keeps the apex with the full
    path as its new right boundary.  Hitting the left boundary at a point at
    distance r from the apex: the piece absorbs the right boundary and the
    left-boundary tail (apex unchanged), while the remainder's apex moves to
    the hit point.
    """
    m = cur.map
    vlab, contour, verts, t = _boundary_data(cur)
    n = len(contour)
    rv_pos = {v: i for i, v in enumerate(right_verts)}  # w_0 = B .. w_p = apex
    lv_pos = {}
    for r in range(0, n - t + 1):
        lv_pos.setdefault(verts[t + r], r)               # l_0 = apex .. l_.. = A
    p_cur = cur.p
    mval = len(path) - p_cur
    if not 1 <= mval <= cur.k + 1:
        raise TreeError("marked path length out of range")
    hit = None
    for idx, dd in enumerate(path):
        w = vlab[m.alpha[dd]]
        if w == right_verts[0]:
            continue
        if w in rv_pos:
            hit = ("right", idx, rv_pos[w])
            break
        if w in lv_pos:
            hit = ("left", idx, lv_pos[w])
            break
    if hit is None:
        raise TreeError("marked path never rejoins the boundary")
    side, idx, pos = hit
    proper = path[:idx + 1]
    faces = m.faces()
    face_of = {}
    for fi, f in enumerate(faces):
        for dd in f:
            face_of[dd] = fi
    boundary = {min(dd, m.alpha[dd]) for dd in proper}
    if side == "right":
        s = pos
        for j, dd in enumerate(path[idx + 1:]):
            if vlab[m.alpha[dd]] != right_verts[s + j + 1]:
                raise TreeError("marked path does not stick to the boundary")
        w_edges = {min(contour[j], m.alpha[contour[j]]) for j in range(1, s + 1)}
        boundary |= w_edges
        inside = _flood(m, faces, face_of, face_of[m.alpha[contour[1]]], boundary)
        piece = _submap(m, faces, face_of, inside, root_dart=contour[1],
                        apex_dart=m.alpha[contour[s]], k=mval, p=s - 1)
        outside = set(range(len(faces))) - inside
        rest = _submap(m, faces, face_of, outside, root_dart=m.root,
                       apex_dart=contour[t], k=cur.k - mval, p=p_cur + mval,
                       exclude=w_edges)
        return piece, rest
    # left-boundary hit at distance r from the apex
    r = pos
    if len(proper) != p_cur + mval - r:
        raise TreeError("left hit inconsistent with the path length")
    for j, dd in enumerate(path[idx + 1:]):
        if vlab[m.alpha[dd]] != verts[t + r - 1 - j]:
            raise TreeError("marked path does not stick to the boundary")
    w_edges = {min(contour[j], m.alpha[contour[j]]) for j in range(1, t)}
    tail_edges = {min(contour[t + j], m.alpha[contour[t + j]]) for j in range(0, r)}
    boundary |= w_edges | tail_edges
    inside = _flood(m, faces, face_of, face_of[m.alpha[contour[1]]], boundary)
    piece = _submap(m, faces, face_of, inside, root_dart=contour[1],
                    apex_dart=m.alpha[contour[t - 1]], k=mval, p=p_cur - 1)
    outside = set(range(len(faces))) - inside
    rest = _submap(m, faces, face_of, outside, root_dart=m.root,
                   apex_dart=m.alpha[proper[-1]], k=cur.k - mval,
                   p=p_cur + mval - r, exclude=w_edges | tail_edges)
    return piece, rest


def _flood(m, faces, face_of, seed, boundary_eids):
    inside = {seed}
    stack = [seed]
    while stack:
        f = stack.pop()
        for dd in faces[f]:
            if min(dd, m.alpha[dd]) in boundary_eids:
                continue
            g = face_of[m.alpha[dd]]
            if g not in inside:
                inside.add(g)
                stack.append(g)
    return inside


def _submap(m, faces, face_of, region, root_dart, apex_dart, k, p,
            exclude=()):
    """The map formed by the faces of one region; boundary edges are kept,
    per-vertex rotations become the region-restricted subsequences."""
    keep = set()
    for fi in region:
        for dd in faces[fi]:
            if min(dd, m.alpha[dd]) in exclude:
                continue
            keep.add(dd)
            keep.add(m.alpha[dd])
    index = {dd: i for i, dd in enumerate(sorted(keep))}
    alpha = [0] * len(keep)
    for dd in keep:
        alpha[index[dd]] = index[m.alpha[dd]]
    sigma = [0] * len(keep)
    vlab, nv = m.vertex_labels()
    by_vertex = {}
    for dd in range(m.n_darts):
        by_vertex.setdefault(vlab[dd], []).append(dd)
    for v, darts in by_vertex.items():
        cyc = _sigma_cycle(m, darts[0])
        kept = [dd for dd in cyc if dd in keep]
        for i, dd in enumerate(kept):
            sigma[index[dd]] = index[kept[(i + 1) % len(kept)]]
    sub = CombMap(alpha, sigma, index[root_dart])
    svlab, _ = sub.vertex_labels()
    return SlicePackage(sub, svlab[index[apex_dart]], k, p)


def _sigma_cycle(m, start):
    out = [start]
    dd = m.sigma[start]
    while dd != start:
        out.append(dd)
        dd = m.sigma[dd]
    return out
