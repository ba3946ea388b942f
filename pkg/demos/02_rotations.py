"""Pósa rotations and the endpoint closure on a small graph, step by step.

A rotation with chord (x_h, x_i) keeps the anchor x_0 and reverses the part
of the path after x_i, so x_{i+1} becomes the new endpoint.  Collecting
every endpoint reachable this way gives S; T is the set of outside
neighbours of S, and for a path that cannot be extended |T| < 2|S|.
"""
from posa import Graph, check_structure, decompose_structure, endpoint_closure, rotate
from posa.rotation import RotationPath

# the triangular prism: triangles 0-1-2 and 3-4-5 joined by a matching
g = Graph.prism()
p = RotationPath([0, 1, 2, 5, 4, 3], g.n)
print("path     ", p.vertices.tolist())
for w in g.adj[p.end]:
    i = int(p.pos[w])
    if i < p.h - 1:
        q = rotate(p, (p.end, w), g)
        print(f"chord ({p.end},{w}) ->", q.vertices.tolist(), " new end", q.end)

pair = endpoint_closure(g, p, witnesses=True)
print("\nS =", sorted(pair.S), " T =", sorted(pair.T), " rotations:", pair.rotations)
for y, seq in sorted(pair.witnesses.items()):
    print(f"  endpoint {y} reached by rotating at positions {list(seq)}")

st = decompose_structure(g, pair)
rep = check_structure(st, pair, g)
print("\nstructure:", st.as_dict())
print("checks:   ", rep.as_dict())
