"""Synthetic monitoring scenarios used by the CLI `generate` command.

``f16like``: a jet flying a 3-D path (east, north, altitude) that must stay
clear of a no-fly box, leave a threat corridor before t=581 and, at t=1349,
be below 1600 ft and climb above 1800 ft within 300 steps. The numbers are
chosen so that the climb margin (a flat 50 ft) binds for small temporal
perturbations and the corridor exit (closing at 1.6 units per step) takes
over around dt = 30.

``robotaxi``: a vehicle passing a crossing pedestrian, both on straight
lines, with a minimum separation of 1 m. The spec is monitored on the
relative position; the raw 4-D agent trace and the Lipschitz constant of
the 4-D formulation are written alongside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .formula import Atom, Always, Interval, Lipschitz
from .signal import Signal, save_csv

F16_HORIZON = 1847
F16_BUFFER = 50

F16_SPEC = """\
# clear the no-fly zone for the whole mission
avoid: G[0,1847] (sd_out(box([1800,2200],[250,600],[0,5000])) > 0)
# leave the threat corridor by t=581 and stay out
&& threat: G[581,1847] (sd_out(box([0,1000],[-200,200],[0,3000])) > 0)
# at t=1349: below 1600 ft, then above 1800 ft within 300 steps,
# never exceeding 2400 ft on the way
&& climb: G{1349} ((1600 - x3 > 0) && ((2400 - x3 > 0) U[0,300] (x3 - 1800 > 0)))
"""

ROBOTAXI_HORIZON = 90
ROBOTAXI_BUFFER = 10
D_MIN = 1.0


@dataclass
class Case:
    signal: Signal
    spec: str
    run: dict
    extra_csv: dict = field(default_factory=dict)
    extra_json: dict = field(default_factory=dict)


def f16like() -> Case:
    t = np.arange(-F16_BUFFER, F16_HORIZON + F16_BUFFER + 1)
    east = 1.6 * t + 168.0                      # crosses x1 = 1000 at t = 520
    north = 30.0 * np.sin(t / 150.0)
    alt = np.where(t < 1420, 1550.0, np.minimum(1550.0 + 3.0 * (t - 1420), 1850.0))
    sig = Signal(np.column_stack([east, north, alt]), t_lo=int(t[0]))
    run = {"t": 0, "dt_max": 50, "norm": "l2", "padding": "strict"}
    return Case(sig, F16_SPEC, run)


def _robotaxi_agents():
    t = np.arange(-ROBOTAXI_BUFFER, ROBOTAXI_HORIZON + ROBOTAXI_BUFFER + 1)
    vehicle = np.column_stack([-20.0 + 0.5 * t, np.zeros_like(t, dtype=float)])
    pedestrian = np.column_stack([np.full(len(t), 12.0), -18.0 + 0.4 * t])
    return t, vehicle, pedestrian


def robotaxi() -> Case:
    t, vehicle, pedestrian = _robotaxi_agents()
    rel = vehicle - pedestrian
    sig = Signal(rel, t_lo=int(t[0]))
    spec = (f"# vehicle minus pedestrian position must stay {D_MIN} m apart\n"
            f"G[0,{ROBOTAXI_HORIZON}] (sd_out(ball([0,0]; {D_MIN})) > 0)\n")
    agents = Signal(np.column_stack([vehicle, pedestrian]), t_lo=int(t[0]))
    config = {"d_min": D_MIN, "lipschitz": math.sqrt(2.0),
              "layout": ["vehicle_x", "vehicle_y", "pedestrian_x", "pedestrian_y"]}
    run = {"t": 0, "dt_max": 10, "norm": "l2", "padding": "strict"}
    return Case(sig, spec, run, {"agents.csv": agents}, {"config.json": config})


def robotaxi_fixed() -> Case:
    t, vehicle, pedestrian = _robotaxi_agents()
    # where the pedestrian stands when the vehicle crosses its lane
    px, py = (round(float(v), 6) for v in
              pedestrian[int(np.argmin(np.abs(vehicle[:, 0] - pedestrian[:, 0])))])
    sig = Signal(vehicle, t_lo=int(t[0]))
    spec = (f"# fixed pedestrian at ({px}, {py}); keep {D_MIN} m away\n"
            f"G[0,{ROBOTAXI_HORIZON}] (sd_out(ball([{px},{py}]; {D_MIN})) > 0)\n")
    run = {"t": 0, "dt_max": 10, "norm": "l2", "padding": "strict"}
    return Case(sig, spec, run)


def pairwise_distance_formula(d_min=D_MIN, horizon=ROBOTAXI_HORIZON):
    """The 4-D two-agent spec as a Lipschitz black box (slope bound sqrt(2))."""
    def h(Z):
        return np.hypot(Z[:, 0] - Z[:, 2], Z[:, 1] - Z[:, 3]) - d_min
    pred = Lipschitz(h, math.sqrt(2.0), (0, 1, 2, 3), "separation")
    return Always(Interval(0, horizon), Atom(pred))


CASES = {"f16like": f16like, "robotaxi": robotaxi, "robotaxi-fixed": robotaxi_fixed}


def write_case(case: Case, out) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(case.signal, out / "signal.csv")
    (out / "spec.stl").write_text(case.spec, encoding="utf-8")
    (out / "run.json").write_text(json.dumps(case.run, indent=2) + "\n", encoding="utf-8")
    for name, sig in case.extra_csv.items():
        save_csv(sig, out / name)
    for name, doc in case.extra_json.items():
        (out / name).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
