"""
Building an overlay and flooding a query
========================================

A ring over the peers guarantees connectivity; random chords bring the
mean degree up to the target. Queries flood outward and die when their
TTL runs out.
"""

import numpy as np

from p2pvirus import build_overlay, flood_reach

topo = build_overlay(200, 6.0, seed=1)
print("edges:", len(topo.edges()), "mean degree:", topo.mean_degree())
print("connected:", topo.is_connected())

# How many peers does a query from peer 0 reach as the TTL grows?
for ttl in range(6):
    reached = flood_reach(topo, 0, ttl)
    print(f"ttl={ttl}: {len(reached)} peers")

# Taking some peers offline cuts the flood short: they neither answer nor relay.
online = np.random.default_rng(0).random(topo.n) < 0.7
online[0] = True
print("with 30% offline, ttl=3:", len(flood_reach(topo, 0, 3, online=online)), "peers")
