"""Mesh and report file formats."""
import csv
import io

from .errors import ValidationError
from .forest import CoarseMesh
from .meshgen import SimplicialMesh

CSV_COLUMNS = ["level_or_target", "vertices", "edges", "deviation_ratio", "witness_p", "witness_q", "seconds"]


def _num(x):
    return format(float(x), ".17g")


def format_node_ele(mesh):
    """Same layout as the coarse input: "N M", N node lines, M triangle lines."""
    out = [f"{len(mesh.nodes)} {len(mesh.triangles)}"]
    out += [f"{_num(x)} {_num(y)}" for x, y in mesh.nodes]
    out += [f"{i} {j} {k}" for i, j, k in mesh.triangles]
    return "\n".join(out) + "\n"


def write_node_ele(mesh, path):
    with open(path, "w") as fh:
        fh.write(format_node_ele(mesh))


def read_mesh(path):
    coarse = CoarseMesh.read(path)
    n = len(coarse.nodes)
    for t in coarse.triangles:
        if not all(0 <= i < n for i in t):
            raise ValidationError(f"triangle {t} indexes past {n} nodes", code="parse")
    return SimplicialMesh(coarse.nodes, coarse.triangles)


def format_off(mesh):
    out = ["OFF", f"{len(mesh.nodes)} {len(mesh.triangles)} 0"]
    out += [f"{_num(x)} {_num(y)} 0" for x, y in mesh.nodes]
    out += [f"3 {i} {j} {k}" for i, j, k in mesh.triangles]
    return "\n".join(out) + "\n"


def write_off(mesh, path):
    with open(path, "w") as fh:
        fh.write(format_off(mesh))


def format_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
