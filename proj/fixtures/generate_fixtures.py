#!/usr/bin/env python3
"""Regenerates the text fixtures in this directory (camera-to-world poses)."""
import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def fmt(v):
    r = repr(float(v))
    return "0" if r in ("0.0", "-0.0") else r


def pose_line(view, frame, r, t):
    nums = [r[i][j] for i in range(3) for j in range(3)] + list(t)
    return f"pose {view} {frame} " + " ".join(fmt(x) for x in nums)


def yaw_camera(theta):
    # Camera looks along (cos, sin, 0) in a z-up world; x right, y down.
    zc = (math.cos(theta), math.sin(theta), 0.0)
    xc = (math.sin(theta), -math.cos(theta), 0.0)
    yc = (0.0, 0.0, -1.0)
    return [[xc[i], yc[i], zc[i]] for i in range(3)]


def ry(a):
    c, s = math.cos(a), math.sin(a)
    return [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def rig():
    names = ["CAM_FRONT", "CAM_FRONT_LEFT", "CAM_BACK_LEFT", "CAM_BACK", "CAM_BACK_RIGHT",
             "CAM_FRONT_RIGHT"]
    lines = ["# nuScenes-like six-camera ring, 3 frames of forward ego motion",
             "convention camera_to_world"]
    for n in names:
        lines.append(f"view {n} 1266.4 1266.4 816.3 491.5 1600 900")
    for i, n in enumerate(names):
        left = names[(i + 1) % 6]
        right = names[(i - 1) % 6]
        lines.append(f"neighbors {n} {left} {right}")
    for i, n in enumerate(names):
        theta = math.radians(60.0 * i)
        r = yaw_camera(theta)
        for f in range(3):
            c = (1.5 * math.cos(theta) + 2.0 * f, 0.9 * math.sin(theta), 1.6)
            lines.append(pose_line(n, f, r, c))
    (HERE / "rig_nuscenes_like.poses").write_text("\n".join(lines) + "\n")


def dolly():
    lines = ["# single camera moving forward along its optical axis", "convention camera_to_world",
             "view cam 64 64 32 32 64 64"]
    eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    for f in range(3):
        lines.append(pose_line("cam", f, eye, (0.0, 0.0, 0.5 * f)))
    (HERE / "dolly.poses").write_text("\n".join(lines) + "\n")


def identity():
    lines = ["convention camera_to_world", "view cam 32 32 16 16 32 32",
             pose_line("cam", 0, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], (0, 0, 0))]
    (HERE / "identity.poses").write_text("\n".join(lines) + "\n")


def realestate():
    lines = ["# RealEstate10K-like single-view trajectory: slow pan while moving forward",
             "convention camera_to_world", "view cam 512 512 512 288 1024 576"]
    for f in range(14):
        r = ry(math.radians(1.5 * f))
        lines.append(pose_line("cam", f, r, (0.05 * f, 0.0, 0.2 * f)))
    (HERE / "realestate_like.poses").write_text("\n".join(lines) + "\n")


def traj_frame(k, r, t):
    nums = [r[i][j] for i in range(3) for j in range(3)] + list(t)
    return f"frame {k} " + " ".join(fmt(x) for x in nums)


def eval_fixtures():
    eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    n = 5
    gt = ["convention camera_to_world", "sample dolly"]
    gt += [traj_frame(k, eye, (0.0, 0.0, 0.4 * k)) for k in range(n)]
    (HERE / "eval_gt_single.traj").write_text("\n".join(gt) + "\n")

    rot = ["convention camera_to_world", "sample dolly"]
    rot += [traj_frame(k, eye if k == 0 else ry(math.radians(5.0)), (0.0, 0.0, 0.4 * k))
            for k in range(n)]
    (HERE / "eval_gen_rot5.traj").write_text("\n".join(rot) + "\n")

    gt2 = gt + ["sample pan"]
    gt2 += [traj_frame(k, ry(math.radians(2.0 * k)), (0.1 * k, 0.0, 0.3 * k)) for k in range(n)]
    (HERE / "eval_gt_pair.traj").write_text("\n".join(gt2) + "\n")

    failed = rot + ["sample pan"] + [f"frame {k} missing" for k in range(n)]
    (HERE / "eval_gen_one_failed.traj").write_text("\n".join(failed) + "\n")


def malformed():
    lines = ["convention camera_to_world", "view cam 32 32 16 16 32 32",
             "pose cam 0 1 0 0 0 1 0 0 0 1 0 0",  # one number short
             ]
    (HERE / "malformed.poses").write_text("\n".join(lines) + "\n")


def no_neighbors():
    lines = ["convention camera_to_world",
             "view left 300 300 160 120 320 240",
             "view right 300 300 160 120 320 240",
             "neighbors left - right",
             "neighbors right left -",
             pose_line("left", 0, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], (0, 0, 0)),
             pose_line("right", 0, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], (0.5, 0, 0))]
    (HERE / "stereo_pair.poses").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    rig()
    dolly()
    identity()
    realestate()
    eval_fixtures()
    malformed()
    no_neighbors()
