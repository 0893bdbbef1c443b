"""Drop a network and look at what the user-centric clusters do.

Every user gets its own serving candidates (the nearest RRHs), so clusters
overlap and there are no cell edges in the usual sense.
"""

import numpy as np

from ucran import SimConfig, build_network, pairwise_distances

config = SimConfig()
instance = build_network(config, seed=0)

print(f"area {config.area_side:.0f} m square, "
      f"{config.num_rrhs} RRHs, {config.num_users} users, "
      f"clusters of {config.cluster_size}")

dist = pairwise_distances(instance.rrh_positions, instance.user_positions)
for k in range(5):
    cluster = instance.clusters[k]
    gains_db = 10 * np.log10(instance.alpha[cluster, k])
    print(f"user {k:2d}: RRHs {cluster.tolist()}, "
          f"distances {np.round(dist[cluster, k], 1).tolist()} m, "
          f"gains {np.round(gains_db, 1).tolist()} dB")

# overlap is the norm, not the exception
member = np.zeros((config.num_rrhs, config.num_users), dtype=bool)
for k in range(config.num_users):
    member[instance.clusters[k], k] = True
load = member.sum(axis=1)
print(f"\nRRH cluster membership: min {load.min()}, max {load.max()}, "
      f"mean {load.mean():.2f}")
print(f"RRHs inside at least one cluster: {(load > 0).sum()} of {config.num_rrhs}")

pairs = sum(
    1
    for a in range(config.num_users)
    for b in range(a + 1, config.num_users)
    if set(instance.clusters[a]) & set(instance.clusters[b])
)
print(f"user pairs with overlapping clusters: {pairs} "
      f"of {config.num_users * (config.num_users - 1) // 2}")
