"""Where does the capacity come from, and what limits it?

Walks the closed-form breakdown across the VoI fraction ``p`` on the desk
scenario (20 km ring, infrastructure every 2 km, 0.01 vehicles/m).
"""

import numpy as np

from vanetcap import NetworkParams, cycle_capacity

params = NetworkParams()
print(f"ring {params.road_length_m / 1e3:g} km, {params.n_cycles} cycles, "
      f"rho = {params.density:g}/m, R_c = {params.sensing_range_m:g} m\n")

print(f"{'p':>7} {'direct':>8} {'fetch':>8} {'V2V':>8} {'cycle':>8} {'of max':>7}  bottleneck")
for p in (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.25, 0.5, 1.0):
    bd = cycle_capacity(params.replace(voi_fraction=p))
    # all rates in Mb/s per cycle
    print(f"{p:7.3f} {bd.v2i_voi_rate / 1e6:8.3f} {bd.helper_fetch_rate / 1e6:8.3f} "
          f"{bd.v2v_effective_rate / 1e6:8.3f} {bd.cycle_capacity / 1e6:8.3f} "
          f"{bd.cycle_capacity / bd.eta_max:7.1%}  {bd.bottleneck.value}")

# Few VoIs: helpers could fetch far more than the VoIs can pull over V2V,
# so V2V delivery is the bottleneck. Past the crossover the infrastructure
# is busy every time anyone is covered and the cycle saturates.
ps = np.linspace(0.01, 0.6, 600)
sat = [cycle_capacity(params.replace(voi_fraction=p)).bottleneck.value != "delivery-limited" for p in ps]
print(f"\nsaturation sets in near p = {ps[sat.index(True)]:.3f}")

# The east/west split follows the densities exactly.
bd = cycle_capacity(params)
print(f"east share {bd.east_share / bd.cycle_capacity:.3f}, west share {bd.west_share / bd.cycle_capacity:.3f}")
