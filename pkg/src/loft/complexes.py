"""One-vertex triangulations in dimensions 2 and 3.

Gluing data is validated eagerly: edge pairing counts, single vertex,
Euler characteristic, orientability, and in dimension 3 the fixed-point
free gluing involution, edge-orientation coherence, and the link sphere.
Derived structure (H1 presentation, Tietze rewriting of edges into a core
generator set, boundary words) is computed once and kept immutable."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    EdgeReversed,
    EulerMismatch,
    GluingNotInvolutive,
    LinkNotSphere,
    NotClosed,
    NotOneVertex,
    NotOrientable,
    OrderError,
    ParseError,
    ValidationError,
)
from .homology import H1Presentation
from .words import GeneratorSet, Word, abelianize, magnus_degree2


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


class _SignedUnionFind:
    """Union-find tracking a sign relative to the class representative."""

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.sign = {x: 1 for x in items}

    def find(self, x):
        path = []
        root = x
        while self.parent[root] != root:
            path.append(root)
            root = self.parent[root]
        # recompute each path node's sign relative to the root, compressing
        total = 1
        for node in reversed(path):
            total *= self.sign[node]
            self.parent[node] = root
            self.sign[node] = total
        return root, (1 if x == root else self.sign[x])

    def union(self, a, b, rel_sign):
        """Declare sign(a) = rel_sign * sign(b)."""
        ra, sa = self.find(a)
        rb, sb = self.find(b)
        if ra == rb:
            if sa != rel_sign * sb:
                raise EdgeReversed("edge class identified with itself reversed")
            return
        # sign(ra) relative to rb: sa' with sign(a) = sa*sign(ra)
        self.parent[ra] = rb
        self.sign[ra] = sa * rel_sign * sb  # solves sa*X = rel_sign*sb

    def classes_with_signs(self):
        out = {}
        for x in self.parent:
            r, s = self.find(x)
            out.setdefault(r, []).append((x, s))
        return out


def tietze_rewrite(relations, n_edges, core_indices):
    """Express non-core edges as words over the core generators by greedy
    elimination through the given relation words.

    relations: list of Words over edge generators (products equal to 1).
    Returns (rewrite, leftovers): rewrite maps every edge index to a Word
    over core indices (core edges map to single letters); leftovers are
    the unused relations rewritten into core words."""
    core_pos = {e: k for k, e in enumerate(core_indices)}
    known: dict[int, Word] = {e: Word(((core_pos[e], 1),)) for e in core_indices}
    unused = list(range(len(relations)))
    progress = True
    while progress and unused:
        progress = False
        for ridx in list(unused):
            rel = relations[ridx]
            unknown_positions = [
                p for p, (g, _s) in enumerate(rel.letters) if g not in known
            ]
            if not unknown_positions:
                continue
            if len(unknown_positions) > 1:
                continue
            p = unknown_positions[0]
            g, s = rel.letters[p]
            if sum(1 for gg, _ in rel.letters if gg == g) != 1:
                continue
            # rel = prefix * g^s * suffix = 1  =>  g^s = prefix^-1 * suffix^-1
            prefix = rel.letters[:p]
            suffix = rel.letters[p + 1 :]
            rhs = Word(prefix).inverse() * Word(suffix).inverse()
            solved = _substitute(rhs, known)
            known[g] = solved if s == 1 else solved.inverse()
            unused.remove(ridx)
            progress = True
    missing = [e for e in range(n_edges) if e not in known]
    if missing:
        raise OrderError(
            f"cannot express edges {missing} in the chosen generators; "
            "rewriting got stuck"
        )
    leftovers = [_substitute(relations[r], known) for r in unused]
    return known, leftovers


def _substitute(w: Word, table: dict[int, Word]) -> Word:
    out = Word()
    for g, s in w.letters:
        piece = table[g]
        out = out * (piece if s == 1 else piece.inverse())
    return out


class Triangulation2:
    """One-vertex triangulated closed surface from side gluing data.

    triangles[t] is a triple of (edge index, sign): the boundary word of
    the triangle read along its (counterclockwise) boundary."""

    def __init__(self, edge_names, triangles, h1_basis_edges=None,
                 generator_edges=None, fan_layout=None, name=None):
        self.name = name
        self.dimension = 2
        self.gens = GeneratorSet(list(edge_names))
        self.n_edges = self.gens.rank
        tris = []
        for t in triangles:
            if len(t) != 3:
                raise ParseError("each triangle needs exactly three sides")
            sides = []
            for e, s in t:
                idx = e if isinstance(e, int) else self.gens.index(e)
                if s not in (1, -1):
                    raise ParseError("side sign must be +1/-1")
                sides.append((idx, s))
            tris.append(tuple(sides))
        self.triangles = tuple(tris)
        self.n_triangles = len(self.triangles)
        self._validate_edge_slots()
        self._validate_vertex()
        self._orient()
        self.euler = 1 - self.n_edges + self.n_triangles
        if self.euler % 2 != 0 or self.euler > 2:
            raise EulerMismatch(f"chi = {self.euler} is not a closed orientable surface")
        self.genus = (2 - self.euler) // 2
        relation_rows = [abelianize(self.boundary_word(t), self.n_edges)
                         for t in range(self.n_triangles)]
        basis = None
        if h1_basis_edges is not None:
            basis = [self.gens.index(n) for n in h1_basis_edges]
        self.h1 = H1Presentation(relation_rows, self.n_edges, basis_edges=basis)
        if self.h1.torsion:
            raise ValidationError(f"unexpected torsion in H1: {self.h1.torsion}")
        self.generator_edges = None
        self.rewrite = None
        self.relator = None
        self.relator_pairs = None
        if generator_edges is not None:
            self.generator_edges = [self.gens.index(n) for n in generator_edges]
            rels = [self.boundary_word(t) for t in range(self.n_triangles)]
            self.rewrite, leftovers = tietze_rewrite(
                rels, self.n_edges, self.generator_edges
            )
            core_rank = len(self.generator_edges)
            nontrivial = [w for w in leftovers if not w.is_identity()]
            if len(nontrivial) != 1:
                raise ValidationError(
                    f"expected one leftover surface relator, got {len(nontrivial)}"
                )
            self.relator = nontrivial[0]
            if any(abelianize(self.relator, core_rank)):
                raise ValidationError("surface relator does not abelianize to zero")
            d2 = magnus_degree2(self.relator, core_rank)
            self.relator_pairs = d2.pairs
        self.fan_layout = fan_layout

    # -- validation ------------------------------------------------------

    def _validate_edge_slots(self):
        slots: dict[int, list] = {e: [] for e in range(self.n_edges)}
        for t, sides in enumerate(self.triangles):
            for k, (e, s) in enumerate(sides):
                slots[e].append((t, k, s))
        for e, occ in slots.items():
            if len(occ) != 2:
                raise NotClosed(
                    f"edge {self.gens.names[e]!r} appears in {len(occ)} side slots, need 2"
                )
        self.edge_slots = slots

    def _side_endpoints(self, side):
        """Edge-end labels (edge, 0|1) of a side's tail and head."""
        e, s = side
        return ((e, 0), (e, 1)) if s == 1 else ((e, 1), (e, 0))

    def _validate_vertex(self):
        ends = [(e, i) for e in range(self.n_edges) for i in (0, 1)]
        uf = _UnionFind(ends)
        for sides in self.triangles:
            for k in range(3):
                _, head_prev = self._side_endpoints(sides[k - 1])
                tail_k, _ = self._side_endpoints(sides[k])
                uf.union(head_prev, tail_k)
        self.n_vertices = len(uf.classes())
        if self.n_vertices != 1:
            raise NotOneVertex(f"gluing produces {self.n_vertices} vertices, need 1")

    def _orient(self):
        eps = [0] * self.n_triangles
        eps[0] = 1
        queue = [0]
        adj: dict[int, list] = {t: [] for t in range(self.n_triangles)}
        for e, occ in self.edge_slots.items():
            (t1, _k1, s1), (t2, _k2, s2) = occ
            adj[t1].append((t2, s1 * s2))
            adj[t2].append((t1, s1 * s2))
        while queue:
            t = queue.pop()
            for t2, ss in adj[t]:
                want = -ss * eps[t]
                if eps[t2] == 0:
                    eps[t2] = want
                    queue.append(t2)
                elif eps[t2] != want:
                    raise NotOrientable("side signs admit no coherent orientation")
        if any(e == 0 for e in eps):
            raise NotClosed("triangulation is not connected")
        self.orientation = tuple(eps)

    # -- queries -----------------------------------------------------------

    def boundary_word(self, t) -> Word:
        return Word(self.triangles[t])

    def edge_word(self, e) -> Word:
        idx = e if isinstance(e, int) else self.gens.index(e)
        if not 0 <= idx < self.n_edges:
            raise ParseError(f"unknown edge id {e!r}")
        return Word(((idx, 1),))

    def edge_relation(self, e) -> Word:
        """The edge expressed in the core generators (requires rewriting)."""
        if self.rewrite is None:
            raise OrderError("complex has no generator_edges rewriting")
        idx = e if isinstance(e, int) else self.gens.index(e)
        return self.rewrite[idx]

    def edge_h1_class(self, e):
        idx = e if isinstance(e, int) else self.gens.index(e)
        vec = [0] * self.n_edges
        vec[idx] = 1
        return self.h1.project(vec)

    def rewrite_profiles(self):
        """Magnus profiles of each edge over the core generators, for
        surface-order oracles."""
        from .words import magnus_profile

        if self.rewrite is None:
            raise OrderError("complex has no generator_edges rewriting")
        rank = len(self.generator_edges)
        return [magnus_profile(self.rewrite[e], rank) for e in range(self.n_edges)]

    def other_slot(self, t, k):
        """The side slot glued to (t, k)."""
        e, _ = self.triangles[t][k]
        occ = [(tt, kk) for tt, kk, _s in self.edge_slots[e]]
        for tt, kk in occ:
            if (tt, kk) != (t, k):
                return tt, kk
        return t, k  # edge glued to itself across two slots of one triangle

    def validation_report(self) -> dict:
        return {
            "dimension": 2,
            "name": self.name,
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "faces": self.n_triangles,
            "euler_characteristic": self.euler,
            "genus": self.genus,
            "orientable": True,
            "h1_betti": self.h1.betti,
            "h1_torsion": list(self.h1.torsion),
        }


# --------------------------------------------------------------------- 3D


def _perm_parity(seq) -> int:
    seq = list(seq)
    parity = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                parity = -parity
    return parity


@dataclass(frozen=True)
class Direction:
    """Orientation choice per edge class, relative to reference
    orientations."""

    orientation: tuple

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.orientation):
            raise ParseError("direction entries must be +1/-1")

    def __len__(self):
        return len(self.orientation)


class Triangulation3:
    """One-vertex triangulated closed orientable 3-manifold.

    gluings[t][f] = (t2, perm) glues face f of tet t (the face opposite
    local vertex f) to face perm[f] of tet t2; perm is the vertex
    bijection as a 4-tuple."""

    def __init__(self, n_tets, gluings, edge_labels=None, h1_basis_edges=None, name=None):
        self.name = name
        self.dimension = 3
        self.n_tets = int(n_tets)
        if self.n_tets < 1:
            raise ParseError("need at least one tetrahedron")
        glu = []
        for t in range(self.n_tets):
            row = []
            for f in range(4):
                t2, perm = gluings[t][f]
                perm = tuple(int(x) for x in perm)
                if sorted(perm) != [0, 1, 2, 3]:
                    raise ParseError(f"gluing permutation {perm} is not a bijection")
                row.append((int(t2), perm))
            glu.append(tuple(row))
        self.gluings = tuple(glu)
        self._validate_involution()
        self._build_edge_classes()
        self._build_vertex_classes()
        self._orient()
        self._build_faces()
        self.euler = 1 - self.n_edges + self.n_faces - self.n_tets
        if self.euler != 0:
            raise EulerMismatch(f"chi = {self.euler}, closed 3-manifolds need 0")
        self._name_edges(edge_labels)
        self.gens = GeneratorSet(self.edge_names)
        relation_rows = [
            abelianize(w, self.n_edges) for w in self.face_relations()
        ]
        basis = None
        if h1_basis_edges is not None:
            basis = [self.edge_index(n) for n in h1_basis_edges]
        self.h1 = H1Presentation(relation_rows, self.n_edges, basis_edges=basis)
        self.link = build_link_sphere(self)

    # -- validation -------------------------------------------------------

    def _validate_involution(self):
        for t in range(self.n_tets):
            for f in range(4):
                t2, perm = self.gluings[t][f]
                if not 0 <= t2 < self.n_tets:
                    raise ParseError(f"gluing target {t2} out of range")
                f2 = perm[f]
                if (t2, f2) == (t, f):
                    raise GluingNotInvolutive(f"face ({t},{f}) glued to itself")
                t3, perm2 = self.gluings[t2][f2]
                inv = [0] * 4
                for i, p in enumerate(perm):
                    inv[p] = i
                if t3 != t or tuple(inv) != perm2:
                    raise GluingNotInvolutive(
                        f"gluing of ({t},{f}) is not matched by ({t2},{f2})"
                    )

    def _build_edge_classes(self):
        slots = [(t, i, j) for t in range(self.n_tets) for i in range(4) for j in range(i + 1, 4)]
        uf = _SignedUnionFind(slots)
        for t in range(self.n_tets):
            for f in range(4):
                t2, perm = self.gluings[t][f]
                for i in range(4):
                    for j in range(i + 1, 4):
                        if i == f or j == f:
                            continue
                        a, b = perm[i], perm[j]
                        rel = 1
                        if a > b:
                            a, b = b, a
                            rel = -1
                        uf.union((t, i, j), (t2, a, b), rel)
        classes = uf.classes_with_signs()
        # classes ordered by their minimal slot; signs re-anchored there
        ordered = sorted(classes.values(), key=lambda members: min(x for x, _ in members))
        self.edge_class_of: dict[tuple, tuple] = {}
        self.edge_reps = []
        for cls_idx, members in enumerate(ordered):
            anchor, anchor_sign = min(members)
            self.edge_reps.append(anchor)
            for slot, s in members:
                self.edge_class_of[slot] = (cls_idx, s * anchor_sign)
        self.n_edges = len(self.edge_reps)

    def _build_vertex_classes(self):
        uf = _UnionFind([(t, v) for t in range(self.n_tets) for v in range(4)])
        for t in range(self.n_tets):
            for f in range(4):
                t2, perm = self.gluings[t][f]
                for v in range(4):
                    if v != f:
                        uf.union((t, v), (t2, perm[v]))
        self.n_vertices = len(uf.classes())
        if self.n_vertices != 1:
            raise NotOneVertex(f"gluing produces {self.n_vertices} vertices, need 1")

    def _orient(self):
        eps = [0] * self.n_tets
        eps[0] = 1
        queue = [0]
        while queue:
            t = queue.pop()
            for f in range(4):
                t2, perm = self.gluings[t][f]
                f2 = perm[f]
                face = [v for v in range(4) if v != f]
                image = [perm[v] for v in face]
                sigma = _perm_parity(image)
                want = -((-1) ** f) * sigma * ((-1) ** f2) * eps[t]
                if eps[t2] == 0:
                    eps[t2] = want
                    queue.append(t2)
                elif eps[t2] != want:
                    raise NotOrientable("gluings admit no coherent orientation")
        if any(e == 0 for e in eps):
            raise NotClosed("triangulation is not connected")
        self.orientation = tuple(eps)

    def _build_faces(self):
        uf = _UnionFind([(t, f) for t in range(self.n_tets) for f in range(4)])
        for t in range(self.n_tets):
            for f in range(4):
                t2, perm = self.gluings[t][f]
                uf.union((t, f), (t2, perm[f]))
        self.face_classes = sorted(min(c) for c in uf.classes())
        self.n_faces = len(self.face_classes)
        if self.n_faces * 2 != self.n_tets * 4:
            raise NotClosed("faces are not glued in pairs")

    def _name_edges(self, edge_labels):
        names = [f"e{k}" for k in range(self.n_edges)]
        if edge_labels:
            for label, t, i, j in edge_labels:
                slot = (int(t), int(i), int(j))
                if slot not in self.edge_class_of:
                    raise ParseError(f"edge label anchor {slot} is not an edge slot")
                cls, _ = self.edge_class_of[slot]
                names[cls] = label
        if len(set(names)) != len(names):
            raise ParseError("edge labels are not distinct")
        self.edge_names = names

    # -- queries ------------------------------------------------------------

    def edge_index(self, name) -> int:
        if isinstance(name, int):
            return name
        try:
            return self.edge_names.index(name)
        except ValueError:
            raise ParseError(f"unknown edge id {name!r}") from None

    def edge_word(self, e) -> Word:
        return Word(((self.edge_index(e), 1),))

    def directed_edge_class(self, t, u, v):
        """(class index, sign) of the directed tet edge u -> v."""
        i, j = (u, v) if u < v else (v, u)
        cls, s = self.edge_class_of[(t, i, j)]
        return (cls, s) if u < v else (cls, -s)

    def face_relations(self):
        """One boundary word per face class, over the edge generators."""
        words = []
        for (t, f) in self.face_classes:
            vs = [v for v in range(4) if v != f]
            cycle = [(vs[0], vs[1]), (vs[1], vs[2]), (vs[2], vs[0])]
            letters = []
            for u, v in cycle:
                cls, s = self.directed_edge_class(t, u, v)
                letters.append((cls, s))
            words.append(Word(letters))
        return words

    def edge_h1_class(self, e):
        idx = self.edge_index(e)
        vec = [0] * self.n_edges
        vec[idx] = 1
        return self.h1.project(vec)

    def validation_report(self) -> dict:
        return {
            "dimension": 3,
            "name": self.name,
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "faces": self.n_faces,
            "tetrahedra": self.n_tets,
            "euler_characteristic": self.euler,
            "orientable": True,
            "edge_names": list(self.edge_names),
            "h1_betti": self.h1.betti,
            "h1_torsion": list(self.h1.torsion),
            "link_sphere": {
                "triangles": len(self.link.triangles),
                "edges": len(self.link.edges),
                "vertices": len(self.link.vertices),
                "euler_characteristic": self.link.euler,
            },
        }


class LinkSphere:
    """The boundary of a small ball around the vertex: one triangle per
    tetrahedron corner, one edge per glued face corner, one vertex per
    edge-class end."""

    def __init__(self, triangles, edges, vertices):
        self.triangles = triangles  # list of (tet, corner)
        self.edges = edges  # list of LinkEdge
        self.vertices = vertices  # sorted list of (edge class, end)
        self.euler = len(vertices) - len(edges) + len(triangles)


@dataclass(frozen=True)
class LinkEdge:
    tri1: tuple  # (tet, corner)
    tri2: tuple
    germs: tuple  # two (edge class, end) labels
    face: tuple  # representative (tet, face)
    corner: int  # corner in the representative tet


def _corner_germ(t3: Triangulation3, t, v, w):
    """Link vertex label of the germ at corner v along tet edge {v, w}."""
    cls, s = t3.directed_edge_class(t, v, w)
    # v is the source of v->w; the germ sits at the class tail if the
    # directed edge agrees with the reference orientation.
    return (cls, 0 if s == 1 else 1)


def build_link_sphere(t3: Triangulation3) -> LinkSphere:
    triangles = [(t, v) for t in range(t3.n_tets) for v in range(4)]
    edges = []
    seen_faces = set()
    for t in range(t3.n_tets):
        for f in range(4):
            if (t, f) in seen_faces:
                continue
            t2, perm = t3.gluings[t][f]
            f2 = perm[f]
            seen_faces.add((t, f))
            seen_faces.add((t2, f2))
            for v in range(4):
                if v == f:
                    continue
                others = [w for w in range(4) if w not in (v, f)]
                germs = tuple(sorted(_corner_germ(t3, t, v, w) for w in others))
                v2 = perm[v]
                others2 = [w for w in range(4) if w not in (v2, f2)]
                germs2 = tuple(sorted(_corner_germ(t3, t2, v2, w) for w in others2))
                if germs != germs2:
                    raise LinkNotSphere(
                        f"germ mismatch across face ({t},{f})~({t2},{f2}) at corner {v}"
                    )
                edges.append(
                    LinkEdge(
                        tri1=(t, v), tri2=(t2, v2), germs=germs, face=(t, f), corner=v
                    )
                )
    vertices = sorted({g for e in edges for g in e.germs})
    link = LinkSphere(triangles, edges, vertices)
    if len(link.triangles) != 4 * t3.n_tets:
        raise LinkNotSphere("link triangle count is not 4n")
    if len(link.edges) != 6 * t3.n_tets:
        raise LinkNotSphere("link edge count is not 6n")
    if len(link.vertices) != 2 * t3.n_edges:
        raise LinkNotSphere("link vertex count is not two per edge class")
    if link.euler != 2:
        raise LinkNotSphere(f"link Euler characteristic {link.euler} != 2")
    uf = _UnionFind(triangles)
    for e in link.edges:
        uf.union(e.tri1, e.tri2)
    if len(uf.classes()) != 1:
        raise LinkNotSphere("link is not connected")
    return link


# ------------------------------------------------------------ essentiality


def check_essential(tri, oracle=None):
    """Per-edge essentiality report.

    ESSENTIAL when the H1 class is nonzero or the oracle distinguishes the
    edge loop from the identity; UNKNOWN otherwise (never claims an edge
    is inessential)."""
    report = {}
    names = tri.gens.names if tri.dimension == 2 else tri.edge_names
    for e, name in enumerate(names):
        if any(tri.edge_h1_class(e)):
            report[name] = "ESSENTIAL"
            continue
        if oracle is not None:
            from .orders import EQUIVALENT

            if oracle.sign(tri.edge_word(e)) is not EQUIVALENT:
                report[name] = "ESSENTIAL"
                continue
        report[name] = "UNKNOWN"
    return report


# ---------------------------------------------------------------- loading


def from_dict(doc: dict):
    if not isinstance(doc, dict) or "dimension" not in doc:
        raise ParseError("complex document needs a 'dimension' field")
    dim = doc["dimension"]
    if dim == 2:
        return Triangulation2(
            edge_names=doc["edge_classes"],
            triangles=doc["triangles"],
            h1_basis_edges=doc.get("h1_basis_edges"),
            generator_edges=doc.get("generator_edges"),
            fan_layout=doc.get("fan_layout"),
            name=doc.get("name"),
        )
    if dim == 3:
        return Triangulation3(
            n_tets=doc["tetrahedra"],
            gluings=doc["gluings"],
            edge_labels=doc.get("edge_labels"),
            h1_basis_edges=doc.get("h1_basis_edges"),
            name=doc.get("name"),
        )
    raise ParseError(f"unsupported dimension {dim!r}")


def load_and_validate(path):
    """Parse a triangulation JSON file and verify all invariants."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from None
    return from_dict(doc)
