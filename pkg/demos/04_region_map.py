"""Draw the labeled cells and one detector set as an SVG region map.

    python3 demos/04_region_map.py region_map.svg
"""
import sys

from negsel_verify.harness import Label, label_cells, render_region_map, validate_detectors
from negsel_verify.harness.synthetic import synthetic_network, synthetic_property
from negsel_verify.nsa import NsaParams, generate_detectors

prop = synthetic_property()
gt = label_cells([synthetic_network()], prop.cells(), prop.condition)
ds = generate_detectors(gt.cells, gt.cells_with(Label.SAFE), NsaParams(r_s=0.05, N=8, seed=1))
print("labels:", gt.summary())
print("detectors:", ds.ids, validate_detectors(ds, gt).to_dict())

svg = render_region_map(gt, ds, dims=(0, 1), title="synthetic threshold, x0 vs x1")
path = sys.argv[1] if len(sys.argv) > 1 else "region_map.svg"
with open(path, "w") as f:
    f.write(svg)
print("wrote", path)
