"""Forward gravity modeling on a prism mesh.

Builds the two-dike density model, assembles the sensitivity matrix and
prints the predicted surface anomaly.  Everything is deterministic.
"""

import numpy as np

from gravtv import (Mesh3D, assemble_sensitivity, build_dikes_model,
                    build_survey_grid, predict, prism_gz)

# a single prism first: vertical gravity is linear in density and decays
# with the cube of distance in the far field
cube = (0.0, 100.0, 0.0, 100.0, 50.0, 150.0)
for height in (0.0, 100.0, 500.0, 2000.0):
    gz = prism_gz((50.0, 50.0, -height), cube, density=1.0)
    print(f"100 m cube, station {height:6.0f} m above: gz = {gz:10.6f} mGal")

# the dikes scene: 9000 cells, 900 stations
mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
grid = build_survey_grid(30, 30, 50.0)
S = assemble_sensitivity(mesh, grid)
print(f"\nsensitivity matrix: {S.shape[0]} x {S.shape[1]}, "
      f"{S.values.nbytes / 1e6:.0f} MB")

truth = build_dikes_model(mesh)
d = predict(S, truth)
print(f"dike cells: {np.count_nonzero(truth.values)}")
print(f"anomaly: min {d.min():.3f}, max {d.max():.3f} mGal")

# coarse character map of the anomaly (rows = northing, cols = easting)
field = d.reshape(30, 30)
levels = " .:-=+*#%@"
scale = (field - field.min()) / (field.max() - field.min())
print("\nanomaly map:")
for row in scale[::-2]:
    print("".join(levels[int(v * (len(levels) - 1))] for v in row))
