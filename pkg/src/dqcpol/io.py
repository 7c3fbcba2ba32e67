"""Text renderers for every output file.

Each function returns the file contents as a string so callers can finish
all computation before touching the filesystem.  Floats are written with 12
significant digits, which makes output byte-stable for identical inputs.
"""

from __future__ import annotations

import io
import json
import os

import numpy as np

from . import __version__
from .polariton import PolaritonSystem, TransitionTable

FLOAT_FMT = "%.12g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _table(header, rows) -> str:
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments="")
    return buf.getvalue()


def grid_csv(sg) -> str:
    """One row per (omega2, omega3) point, omega3 varying fastest."""
    w2, w3 = np.meshgrid(sg.grid.omega2, sg.grid.omega3, indexing="ij")
    S = sg.s_total
    cols = [w2, w3, sg.s_i.real, sg.s_i.imag, sg.s_ii.real, sg.s_ii.imag, S.real, S.imag]
    rows = np.column_stack([c.ravel() for c in cols])
    # avoid "-0" in the output
    rows[rows == 0.0] = 0.0
    return _table(["omega2", "omega3", "re_s_i", "im_s_i", "re_s_ii", "im_s_ii", "re_s", "im_s"], rows)


def peaks_csv(peaks) -> str:
    lines = ["omega3,omega2,height,label,residual"]
    for p in peaks:
        lines.append(",".join([_fmt(p.omega3), _fmt(p.omega2), _fmt(p.height), p.label, _fmt(p.residual)]))
    return "\n".join(lines) + "\n"


def metadata_json(config, sg, value: float) -> str:
    doc = {
        "tool": "dqcpol",
        "version": __version__,
        "config": config.to_dict(execution=False),
        "sweep_value": value,
        "couplings": list(config.couplings_at(value)),
        "t1_fs": sg.t1_fs,
        "grid": sg.grid.to_string(),
        "spec_hash": sg.provenance.get("spec_hash"),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def levels_csv(system: PolaritonSystem) -> str:
    """Eigenstates with energy, linewidth and slot weights (photon, vib1, ...)."""
    m = system.spec.m
    header = ["manifold", "index", "energy", "linewidth", "w_photon"] + [f"w_vib{i + 1}" for i in range(m)]
    lines = [",".join(header)]
    for man in system.manifolds:
        weights = man.slot_weights()
        for k in range(man.dim):
            vals = [man.energies[k], man.linewidths[k], *weights[k]]
            lines.append(",".join([man.label, str(k + 1)] + [_fmt(v) for v in vals]))
    return "\n".join(lines) + "\n"


def transitions_csv(table: TransitionTable) -> str:
    lines = ["kind,upper,lower,omega,gamma,mu"]
    for e in range(table.n_e):
        vals = (table.omega_eg[e], table.gamma_eg[e], table.mu_eg[e])
        lines.append(",".join(["eg", f"e{e + 1}", "g"] + [_fmt(v) for v in vals]))
    for f in range(table.n_f):
        for e in range(table.n_e):
            vals = (table.omega_fe[f, e], table.gamma_fe[f, e], table.mu_fe[f, e])
            lines.append(",".join(["fe", f"f{f + 1}", f"e{e + 1}"] + [_fmt(v) for v in vals]))
    return "\n".join(lines) + "\n"


def branches_csv(sweep) -> str:
    """Branch ids of each eigenstate across a sweep, for following polaritons."""
    lines = ["sweep_value,manifold,index,branch,energy"]
    for value, system, ids in zip(sweep.values, sweep.systems, sweep.tracks):
        for man in system.manifolds:
            for k in range(man.dim):
                lines.append(",".join([
                    _fmt(value), man.label, str(k + 1), str(int(ids[man.label][k]) + 1), _fmt(man.energies[k]),
                ]))
    return "\n".join(lines) + "\n"


def point_tag(value: float) -> str:
    return "gt" + ("%g" % value).replace(".", "p")


def write_files(outdir, files: dict) -> list:
    """Write ``{name: text}`` into ``outdir``; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name in sorted(files):
        path = os.path.join(outdir, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(files[name])
        os.replace(tmp, path)
        paths.append(path)
    return paths

