"""Threshold replay of the 5 m straight traverse.

Poses x = i * 0.1 for i = 0..50 (heading 0), alpha_k = 2, alpha_s = 0.2,
beta_s = 0.1. First frame is a keyframe; a keyframe resets the subframe
reference. Prints KF/SF/BF counts and the keyframe positions.
"""
import math

alpha_k, alpha_s, beta_s = 2.0, 0.2, 0.1
last_kf = last_sf = None
counts = {"KF": 0, "SF": 0, "BF": 0}
kf_at = []
for i in range(51):
    x = i * 0.1
    if last_kf is None or math.sqrt((x - last_kf) ** 2) > alpha_k:
        counts["KF"] += 1
        kf_at.append(x)
        last_kf = last_sf = x
    elif math.sqrt((x - last_sf) ** 2) > alpha_s:
        counts["SF"] += 1
        last_sf = x
    else:
        counts["BF"] += 1
print(counts, kf_at)
