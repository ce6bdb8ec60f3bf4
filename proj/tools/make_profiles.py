#!/usr/bin/env python3
"""Writes the bundled synthetic vacancy-depth profiles into data/profiles."""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "profiles"


def trapezoid(x, y):
    return sum(0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]) for i in range(len(x) - 1))


def write(name, header, depth, shape, vacancies_per_ion, depth_scale=1.0, density_scale=1.0):
    # depth in nm, shape arbitrary; stored values are scaled so the file's own
    # trapezoid integral equals vacancies_per_ion
    x = [round(z / depth_scale, 6) for z in depth]
    y = [s * density_scale for s in shape]
    norm = vacancies_per_ion / trapezoid([v * depth_scale for v in x], [v / density_scale for v in y])
    y = [v * norm for v in y]
    lines = [f"# {h}" for h in header]
    lines.append(f"# vacancies_per_ion: {vacancies_per_ion:.6g}")
    lines += [f"{a:.6f} {b:.10e}" for a, b in zip(x, y)]
    (OUT / name).write_text("\n".join(lines) + "\n")


def c30kev():
    depth = [0.25 * i for i in range(0, 241)]  # 0..60 nm into SiC
    shape = [0.8 * math.exp(-z / 10.0) + 0.2 * math.exp(-z / 12.0) for z in depth]
    header = [
        "Synthetic vacancy profile, 30 keV C+ through ZnO 60 nm / SiO2 60 nm into 4H-SiC.",
        "Depth origin at the SiC surface. Decaying tail beyond the buffer layers.",
        "depth_unit: nm",
        "density_unit: per_nm",
    ]
    # 0.044 ions/nm^2 * pi 10^2 nm^2 * 0.01 * V = 1
    v = 1.0 / (4.4e12 / 1e14 * math.pi * 100.0 * 0.01)
    write("c30kev_zno_sio2_sic.txt", header, depth, shape, round(v, 5))


def c5kev():
    depth = [0.5 * i for i in range(0, 81)]  # 0..40 nm
    xi, omega, alpha = 3.7, 5.0, 2.5
    shape = []
    for z in depth:
        t = (z - xi) / omega
        pdf = math.exp(-0.5 * t * t)
        cdf = 0.5 * (1.0 + math.erf(alpha * t / math.sqrt(2.0)))
        shape.append(pdf * cdf)
    header = [
        "Synthetic vacancy profile, 5 keV C+ directly into 4H-SiC, skew-normal with peak near 6 nm.",
        "Values in angstrom units as written by range codes.",
        "depth_unit: angstrom",
        "density_unit: per_angstrom",
    ]
    # 105 vacancies per 20 nm aperture at 1e11 cm^-2
    v = 105.0 / (1e11 / 1e14 * math.pi * 100.0)
    write("c5kev_sic.txt", header, depth, shape, round(v, 2), depth_scale=0.1, density_scale=0.1)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    c30kev()
    c5kev()
