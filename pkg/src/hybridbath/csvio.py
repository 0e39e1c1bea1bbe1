"""Deterministic CSV serialisation of coefficient reports and trajectories.

Files are UTF-8, comma separated, LF terminated, with one header row.
Numbers use 17 significant digits so that a float64 round-trips exactly.
Complex series are split into ``re_<name>`` and ``im_<name>`` columns;
density-matrix elements are named ``rho<i><j>`` with 1-based indices in
row-major order.
"""

import csv

import numpy as np

CSV_SCHEMA_VERSION = 1


def fmt(x):
    """17-significant-digit text for a real number (``-0`` kept as ``0``)."""
    x = float(x)
    return "0" if x == 0 else f"{x:.17g}"


def write_table(path, header, columns):
    """Write equal-length numeric ``columns`` under ``header``."""
    columns = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([fmt(v) for v in row])


def read_table(path):
    """Return ``(header, data)`` with ``data`` a float array of shape (rows, cols)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV file")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    return header, data.reshape(len(rows) - 1, len(header))


def _complex_columns(names, series):
    header, cols = [], []
    for name, s in zip(names, series):
        s = np.asarray(s, dtype=complex)
        header += [f"re_{name}", f"im_{name}"]
        cols += [s.real, s.imag]
    return header, cols


def element_names(dim):
    return [f"rho{i + 1}{j + 1}" for i in range(dim) for j in range(dim)]


def write_coefficients(path, report):
    header, cols = _complex_columns(report.names, [report[n] for n in report.names])
    write_table(path, ["t"] + header, [report.times] + cols)


def write_trajectory(path, traj):
    d = traj.states.shape[1]
    flat = traj.states.reshape(len(traj.times), d * d)
    header, cols = _complex_columns(element_names(d), flat.T)
    write_table(path, ["t"] + header, [traj.times] + cols)


def read_complex_series(path):
    """``(times, {name: complex series})`` from a file written by this module."""
    header, data = read_table(path)
    if not header or header[0] != "t":
        raise ValueError(f"{path}: first column must be 't'")
    out = {}
    for k in range(1, len(header), 2):
        re, im = header[k], header[k + 1] if k + 1 < len(header) else ""
        if not (re.startswith("re_") and im == "im_" + re[3:]):
            raise ValueError(f"{path}: unexpected columns {re!r}, {im!r}")
        out[re[3:]] = data[:, k] + 1j * data[:, k + 1]
    return data[:, 0], out


def read_trajectory(path):
    """``(times, states)`` with ``states`` of shape (T, d, d)."""
    times, series = read_complex_series(path)
    d = int(round(np.sqrt(len(series))))
    names = element_names(d)
    if d * d != len(series) or list(series) != names:
        raise ValueError(f"{path}: not a trajectory file")
    states = np.stack([series[n] for n in names], axis=1).reshape(len(times), d, d)
    return times, states
