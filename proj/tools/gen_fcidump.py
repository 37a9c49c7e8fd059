#!/usr/bin/env python3
"""Regenerate the bundled FCIDUMP instances under data/ (requires pyscf)."""
import argparse
import pathlib

import json

from pyscf import fci, gto, scf
from pyscf.tools import fcidump


def chain(n, spacing_bohr):
    return [("H", (0.0, 0.0, i * spacing_bohr)) for i in range(n)]


MOLECULES = {
    "h2_sto3g": dict(atom=[("H", (0, 0, 0)), ("H", (0, 0, 1.4))], basis="sto-3g"),
    "h4_chain_sto3g": dict(atom=chain(4, 1.8), basis="sto-3g"),
    "h6_chain_sto3g": dict(atom=chain(6, 1.8), basis="sto-3g"),
    "lih_sto3g": dict(atom=[("Li", (0, 0, 0)), ("H", (0, 0, 3.015))], basis="sto-3g"),
    "h2o_sto3g": dict(atom=[("O", (0, 0, 0)), ("H", (0, 1.430, 1.107)),
                            ("H", (0, -1.430, 1.107))], basis="sto-3g"),
    "h8_chain_sto3g": dict(atom=chain(8, 1.8), basis="sto-3g"),
}
for n in (10, 20, 30):
    MOLECULES[f"h{n}_chain_sto6g"] = dict(atom=chain(n, 1.4), basis="sto-6g")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("names", nargs="*")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.names or MOLECULES:
        spec = MOLECULES[name]
        mol = gto.M(atom=spec["atom"], basis=spec["basis"], unit="Bohr", verbose=0)
        mf = scf.RHF(mol)
        mf.conv_tol = 1e-12
        mf.kernel()
        fcidump.from_scf(mf, str(out / f"{name}.fcidump"), tol=1e-15)
        print(f"{name}: N={mol.nao} nelec={mol.nelectron} E_hf={mf.e_tot:.10f}")
    write_fci_reference(out)


def write_fci_reference(out):
    """FCI energies (Sz = 0) for the instances small enough for the dense oracle."""
    ref = {}
    for name in ("h2_sto3g", "h4_chain_sto3g", "h6_chain_sto3g", "lih_sto3g"):
        d = fcidump.read(str(out / f"{name}.fcidump"), verbose=False)
        solver = fci.direct_spin1.FCI()
        solver.conv_tol = 1e-14
        e, _ = solver.kernel(d["H1"], d["H2"], d["NORB"], d["NELEC"], ecore=d["ECORE"])
        ref[name] = {"n_orbitals": d["NORB"], "n_electrons": d["NELEC"], "fci_energy": e}
    (out / "fci_reference.json").write_text(json.dumps(ref, indent=2) + "\n")


if __name__ == "__main__":
    main()
