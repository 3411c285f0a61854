"""Bundled example complexes, shipped as JSON data files.

* TOR2   -- the unit square torus with one diagonal: two triangles with
            boundary words a b c^-1 and b a c^-1 (so c = ab = ba).
* OCT8   -- genus-2 surface as the regular octagon with side pattern
            a b a^-1 b^-1 c d c^-1 d^-1, fanned from one polygon vertex by
            five diagonals into six triangles.
* T3CUBE -- the 3-torus: unit cube with opposite faces identified, cut
            into six tetrahedra around the main diagonal (one per
            coordinate permutation, vertices along Boolean chains
            0 < e_i < e_i + e_j < (1,1,1)).

The builders below are the source of truth; the checked-in JSON files are
their serialization (a test keeps them in sync)."""

from __future__ import annotations

import itertools
import json
from importlib import resources

from .complexes import from_dict
from .errors import ParseError

BUNDLED_NAMES = ("TOR2", "OCT8", "T3CUBE")


def tor2_dict() -> dict:
    return {
        "name": "TOR2",
        "dimension": 2,
        "edge_classes": ["a", "b", "c"],
        "triangles": [
            [["a", 1], ["b", 1], ["c", -1]],
            [["b", 1], ["a", 1], ["c", -1]],
        ],
        "h1_basis_edges": ["a", "b"],
        "generator_edges": ["a", "b"],
    }


def oct8_dict() -> dict:
    sides = [
        ["a", 1], ["b", 1], ["a", -1], ["b", -1],
        ["c", 1], ["d", 1], ["c", -1], ["d", -1],
    ]
    # Fan triangle j spans polygon vertices (0, j+1, j+2); its sides are
    # the diagonal in, the polygon side, and the diagonal out.
    triangles = [
        [["a", 1], ["b", 1], ["d2", -1]],
        [["d2", 1], ["a", -1], ["d3", -1]],
        [["d3", 1], ["b", -1], ["d4", -1]],
        [["d4", 1], ["c", 1], ["d5", -1]],
        [["d5", 1], ["d", 1], ["d6", -1]],
        [["d6", 1], ["c", -1], ["d", -1]],
    ]
    return {
        "name": "OCT8",
        "dimension": 2,
        "edge_classes": ["a", "b", "c", "d", "d2", "d3", "d4", "d5", "d6"],
        "triangles": triangles,
        "h1_basis_edges": ["a", "b", "c", "d"],
        "generator_edges": ["a", "b", "c", "d"],
        "fan_layout": {"polygon_sides": sides},
    }


def _t3cube_tets():
    """Vertex coordinates of the six chain tetrahedra, in local order."""
    tets = []
    for perm in sorted(itertools.permutations(range(3))):
        v = [(0, 0, 0)]
        acc = [0, 0, 0]
        for axis in perm:
            acc = list(acc)
            acc[axis] = 1
            v.append(tuple(acc))
        tets.append(v)
    return tets


def t3cube_dict() -> dict:
    tets = _t3cube_tets()
    shifts = [
        (dx, dy, dz)
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        for dz in (-1, 0, 1)
    ]
    gluings = [[None] * 4 for _ in tets]
    for t, verts in enumerate(tets):
        for f in range(4):
            face = [verts[v] for v in range(4) if v != f]
            match = None
            for t2, verts2 in enumerate(tets):
                for f2 in range(4):
                    if (t2, f2) == (t, f):
                        continue
                    face2 = [verts2[v] for v in range(4) if v != f2]
                    for d in shifts:
                        shifted = {tuple(c + dd for c, dd in zip(p, d)) for p in face}
                        if shifted == set(face2):
                            perm = [None] * 4
                            perm[f] = f2
                            for v in range(4):
                                if v == f:
                                    continue
                                target = tuple(c + dd for c, dd in zip(verts[v], d))
                                perm[v] = verts2.index(target)
                            match = (t2, perm)
                            break
                    if match:
                        break
                if match:
                    break
            assert match is not None, "face left unmatched in cube subdivision"
            gluings[t][f] = [match[0], list(match[1])]

    def slot_of(p, q):
        """(tet, i, j) containing the edge from coordinate p to q."""
        for t, verts in enumerate(tets):
            if p in verts and q in verts:
                i, j = verts.index(p), verts.index(q)
                return [t, min(i, j), max(i, j)]
        raise AssertionError("edge not found")

    labels = [
        ["x", *slot_of((0, 0, 0), (1, 0, 0))],
        ["y", *slot_of((0, 0, 0), (0, 1, 0))],
        ["z", *slot_of((0, 0, 0), (0, 0, 1))],
        ["xy", *slot_of((0, 0, 0), (1, 1, 0))],
        ["xz", *slot_of((0, 0, 0), (1, 0, 1))],
        ["yz", *slot_of((0, 0, 0), (0, 1, 1))],
        ["xyz", *slot_of((0, 0, 0), (1, 1, 1))],
    ]
    return {
        "name": "T3CUBE",
        "dimension": 3,
        "tetrahedra": len(tets),
        "gluings": gluings,
        "edge_labels": labels,
        "h1_basis_edges": ["x", "y", "z"],
    }


_BUILDERS = {"TOR2": tor2_dict, "OCT8": oct8_dict, "T3CUBE": t3cube_dict}


def bundled_dict(name: str) -> dict:
    try:
        return _BUILDERS[name.upper()]()
    except KeyError:
        raise ParseError(f"no bundled complex named {name!r}") from None


def bundled_complex(name: str):
    return from_dict(bundled_dict(name))


def resolve_complex(path_or_name: str):
    """A bundled name (TOR2/OCT8/T3CUBE) or a JSON file path."""
    if path_or_name.upper() in _BUILDERS:
        return bundled_complex(path_or_name)
    from .complexes import load_and_validate

    return load_and_validate(path_or_name)


def write_data_files(directory) -> list:
    """Serialize the bundled complexes into JSON files."""
    import os

    written = []
    for name, builder in _BUILDERS.items():
        path = os.path.join(directory, f"{name.lower()}.json")
        with open(path, "w") as fh:
            json.dump(builder(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def bundled_file_dict(name: str) -> dict:
    """The shipped JSON document (tests check it matches the builder)."""
    ref = resources.files("loft.data").joinpath(f"{name.lower()}.json")
    return json.loads(ref.read_text())
