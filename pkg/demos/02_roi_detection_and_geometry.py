"""ROI sources and the compressed-area rule.

An RU frame cannot re-encode only its current ROI: the reference frame
still shows the object at its old position, so the encoded rectangle
must cover both. This demo runs the built-in difference detector and
shows how the compressed area grows with the reference distance.

Run: python3 demos/02_roi_detection_and_geometry.py
"""

from rclc import (
    DiffDetector,
    align_box,
    compressed_area,
    dump_sidecar,
    load_sidecar,
    resolve_roi,
)
from rclc.detector import Detection, DetectorState
from rclc.synth import generate, preset

seq, truth = generate(preset("moving-box"))

# difference detection against the first frame as background
detector = DiffDetector(threshold=25, min_area=16)
detector.observe_bu(seq.frames[0])
state = DetectorState()
print("frame  detected box        ground truth")
for i in range(1, 6):
    detections = detector.detect(i, seq.frames[i])
    roi = resolve_roi(detections, state, seq.width, seq.height)
    print(f"{i:>5}  {str(roi.as_tuple()):<18} {truth[i].as_tuple()}")

# the union rule: encode both the new ROI and the stale reference ROI
print("\nreference distance vs compressed area (object 16x16, 4 px/frame):")
for distance in range(1, 6):
    area = compressed_area(truth[distance], truth[0])
    expect = (16 + 4 * distance) * 16
    print(f"  distance {distance}: box {area.as_tuple()} area {area.area} "
          f"(closed form {expect})")

# codec-friendly alignment only ever grows the box
box = compressed_area(truth[3], truth[0])
aligned = align_box(box, 16, seq.width, seq.height)
print(f"\nalign to 16-grid: {box.as_tuple()} -> {aligned.as_tuple()}")

# detections travel as sidecar text files
table = {i: [Detection(b, 1.0)] for i, b in enumerate(truth[:3])}
text = dump_sidecar(table)
print("\nsidecar format:")
print(text, end="")
assert load_sidecar(text) == table
