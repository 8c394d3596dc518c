"""Split the normalized (rho, theta, psi) box of the bundled property into 64 cells.

    python3 demos/01_partition_phi2.py
"""
from importlib import resources

from negsel_verify.geometry import center, step_size
from negsel_verify.harness import PropertySpec

prop = PropertySpec.load(resources.files("negsel_verify").joinpath("data", "phi2_property.json"))
cells = prop.cells()
print(f"{len(cells)} sub-requirements over dims {prop.partition.split_dims}, n={prop.partition.n}")
for i in prop.partition.split_dims:
    print(f"  dim {i}: step {step_size(prop.box.dims[i], prop.partition.n):.7f}")

print("\nfirst eight cells (rho, theta, psi):")
for c in cells[:8]:
    rho, theta, psi = c.bounds()[:3]
    print(f"  {c.id + 1:2d}  [{rho[0]:.4f}, {rho[1]:.4f}]  {theta}  {psi}  center={center(c)[:3].round(4)}")
