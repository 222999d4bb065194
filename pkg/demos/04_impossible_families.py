#!/usr/bin/env python3
"""Two graph families where no estimator can recover the activities.

Family A: disjoint triangles plus a short path, with a constraint graph whose
fourth color attaches only to color 2. Triangle vertices can never carry that
color, so its activity only touches the handful of path vertices: the KL
divergence between two settings stays constant as the family grows, and
bounded KL makes consistent testing (hence estimation) impossible.

Family B: a small clique joined to a large independent set under the
3-coloring model. All big-side vertices share one color, the clique carries
the rest, and for negative activities the KL between two settings converges
to a finite limit while the rainbow fraction of some color collapses to zero.
"""
from hcolor import generate, is_valid, kl_exact, preset, rainbow_check

print("family A: triangles plus a 3-path, special color pinned to the path")
cx = preset("counterexample_h")
for n_tri in (1, 2, 4, 8, 16):
    g = generate("triangles_plus_path", {"N": n_tri, "K": 3})
    res = kl_exact(g, cx, [0.0, 0.0, 0.8], [0.0, 0.0, -0.4], method="component_factorized")
    print(f"  {n_tri:2d} triangles ({g.n:2d} vertices): KL = {res.kl:.12f}")

print()
print("family B: 2-clique joined to N independent vertices, 3-coloring")
col3 = preset("proper_coloring", q=3)
prev = None
for num_big in (10, 20, 40, 60):
    g = generate("clique_bipartite", {"q": 3, "N": num_big})
    res = kl_exact(g, col3, [-1.0, 0.0], [-0.5, 0.0])
    delta = "" if prev is None else f"  (moved by {abs(res.kl - prev):.2e})"
    print(f"  N={num_big:2d}: KL = {res.kl:.10f}{delta}")
    prev = res.kl

    cfg = [1, 2] + [0] * num_big
    assert is_valid(cfg, g, col3)
    rc = rainbow_check(cfg, g, col3)
    fr = ", ".join(f"{x:.3f}" for x in rc.fractions)
    print(f"        allowed-color fractions per color: [{fr}]  <- color 1 collapses")
