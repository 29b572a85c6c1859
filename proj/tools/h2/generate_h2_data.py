#!/usr/bin/env python3
"""Regenerates the bundled H2 inputs under data/h2.

Outputs:
  hamiltonian.json  27-term qubit Hamiltonian (STO-3G, R = 1.2 Angstrom,
                    Jordan-Wigner, qubit order a0 b0 a1 b1, qubit 0 = MSB)
  ref1.json         ansatz reproducing the MP2-dressed UHF reference
  ref2.json         ansatz reproducing the spin-flipped UHF reference with
                    its orbital rotation absorbed
  angles.json       raw fitted angles with fit residuals

The ansatz layout is three Givens rotations on adjacent pairs (orbital
rotation), then four subroutines of three adjacent Givens rotations followed
by six controlled-RZ gates on every ordered pair (c < t). Angles are fitted
by least squares so the ansatz maps |1100> onto each target state.

Requires numpy, scipy and pyscf. Not part of the build.
"""

import argparse
import itertools
import json
import pathlib

import numpy as np
from scipy.linalg import expm, logm
from scipy.optimize import least_squares, minimize

N = 4
D = 2**N
BOND = 1.2
PAIRS = [(c, t) for c in range(N) for t in range(c + 1, N)]


def kron(ms):
    out = np.eye(1)
    for m in ms:
        out = np.kron(out, m)
    return out


def electronic_structure():
    from pyscf import gto, scf

    mol = gto.M(atom=f"H 0 0 0; H 0 0 {BOND}", basis="sto-3g", verbose=0)
    uhf = scf.UHF(mol)
    # Nudge the guess off the restricted solution to land on the broken-symmetry UHF state.
    dm = uhf.get_init_guess()
    dm[0][0, 0] += 0.3
    dm[1][1, 1] += 0.3
    uhf.kernel(dm0=dm)
    return mol, uhf


def qubit_hamiltonian(mol, uhf):
    ca, cb = uhf.mo_coeff
    hcore = mol.intor("int1e_kin") + mol.intor("int1e_nuc")
    eri = mol.intor("int2e")
    orbs = [ca[:, 0], cb[:, 0], ca[:, 1], cb[:, 1]]
    spin = [0, 1, 0, 1]
    h1 = np.zeros((N, N))
    h2 = np.zeros((N, N, N, N))
    for p, q in itertools.product(range(N), repeat=2):
        if spin[p] == spin[q]:
            h1[p, q] = orbs[p] @ hcore @ orbs[q]
    for p, q, r, s in itertools.product(range(N), repeat=4):
        if spin[p] == spin[q] and spin[r] == spin[s]:
            h2[p, q, r, s] = np.einsum("a,b,c,d,abcd->", orbs[p], orbs[q], orbs[r], orbs[s], eri)
    i2 = np.eye(2)
    z = np.diag([1.0, -1.0])
    lower = np.array([[0, 1], [0, 0]], float)
    a = [kron([z] * p + [lower] + [i2] * (N - p - 1)) for p in range(N)]
    ad = [x.T for x in a]
    h = np.zeros((D, D))
    for p, q in itertools.product(range(N), repeat=2):
        h += h1[p, q] * ad[p] @ a[q]
    for p, q, r, s in itertools.product(range(N), repeat=4):
        h += 0.5 * h2[p, q, r, s] * ad[p] @ ad[r] @ a[s] @ a[q]
    h += mol.energy_nuc() * np.eye(D)
    return h, a, ad


def pauli_terms(h):
    mats = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]], complex),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1.0, -1.0]),
    }
    terms = []
    for w in itertools.product("IXYZ", repeat=N):
        c = np.trace(kron([mats[l] for l in w]) @ h) / D
        if abs(c) > 1e-10:
            terms.append(("".join(w), c))
    return terms


def reference_states(mol, uhf, a, ad):
    ca, cb = uhf.mo_coeff
    ea, eb = uhf.mo_energy
    eri = mol.intor("int2e")
    overlap = mol.intor("int1e_ovlp")

    def doubles(t):
        op = ad[2] @ ad[3] @ a[1] @ a[0]
        return t * (op - op.T)

    def mp2(c_a, c_b, e_a, e_b):
        g = np.einsum("p,q,r,s,pqrs->", c_a[:, 1], c_a[:, 0], c_b[:, 1], c_b[:, 0], eri)
        return g / (e_a[0] + e_b[0] - e_a[1] - e_b[1])

    hf = np.zeros(D)
    hf[int("1100", 2)] = 1
    psi1 = expm(doubles(mp2(ca, cb, ea, eb))) @ hf
    # Second reference: the spin-flipped UHF solution expressed in the first basis.
    ua = ca.T @ overlap @ cb
    ub = cb.T @ overlap @ ca
    ua[:, 1] *= -1
    ub[:, 1] *= -1
    usp = np.zeros((N, N))
    usp[np.ix_([0, 2], [0, 2])] = ua
    usp[np.ix_([1, 3], [1, 3])] = ub
    k = logm(usp).real
    kop = sum(k[p, q] * ad[p] @ a[q] for p in range(N) for q in range(N))
    psi2 = expm(kop) @ expm(doubles(mp2(cb, ca, eb, ea))) @ hf
    return psi1, psi2


def apply2(psi, u, qa, qb):
    t = psi.reshape([2] * N)
    t = np.moveaxis(t, [qa, qb], [0, 1]).reshape(4, -1)
    t = u @ t
    t = np.moveaxis(t.reshape([2, 2] + [2] * (N - 2)), [0, 1], [qa, qb])
    return t.reshape(D)


def givens(th):
    c, s = np.cos(th), np.sin(th)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]], complex)


def crz(th):
    return np.diag([1, 1, np.exp(-0.5j * th), np.exp(0.5j * th)])


def layout(params):
    gates = []
    k = 0
    for q in range(N - 1):
        gates.append(("GIVENS", [q, q + 1], params[k]))
        k += 1
    for _ in range(4):
        for q in range(N - 1):
            gates.append(("GIVENS", [q, q + 1], params[k]))
            k += 1
        for c, t in PAIRS:
            gates.append(("CRZ", [c, t], params[k]))
            k += 1
    return gates


NUM_PARAMS = (N - 1) + 4 * ((N - 1) + len(PAIRS))


def run(params, psi):
    for name, q, th in layout(params):
        psi = apply2(psi, givens(th) if name == "GIVENS" else crz(th), q[0], q[1])
    return psi


def fit_angles(target, seed):
    hf = np.zeros(D, complex)
    hf[int("1100", 2)] = 1
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(40):
        x0 = rng.normal(scale=0.5, size=NUM_PARAMS)
        r = minimize(lambda p: 1 - np.real(np.vdot(target, run(p, hf))), x0, method="BFGS",
                     options={"gtol": 1e-12, "maxiter": 5000})
        if best is None or r.fun < best.fun:
            best = r
        if best.fun < 1e-13:
            break

    def residual(p):
        d = run(p, hf) - target
        return np.concatenate([d.real, d.imag])

    r = least_squares(residual, best.x, xtol=1e-15, ftol=1e-15, gtol=1e-15, method="trf", max_nfev=20000)
    return r.x, float(np.max(np.abs(residual(r.x))))


def circuit_json(params, label):
    return {
        "num_qubits": N,
        "label": label,
        "gates": [{"name": n, "qubits": q, "params": [float(th)]} for n, q, th in layout(params)],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[2] / "data" / "h2"))
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    mol, uhf = electronic_structure()
    h, a, ad = qubit_hamiltonian(mol, uhf)
    terms = pauli_terms(h)
    ham = {
        "num_qubits": N,
        "unit": "Hartree",
        "terms": [{"pauli": w, "re": float(c.real), "im": float(c.imag)} for w, c in terms],
    }
    (out / "hamiltonian.json").write_text(json.dumps(ham, indent=1) + "\n")
    print(f"{len(terms)} terms, min eigenvalue {np.linalg.eigvalsh(h)[0]:.10f}, UHF {uhf.e_tot:.10f}")

    record = {}
    for label, psi in zip(["ref1", "ref2"], reference_states(mol, uhf, a, ad)):
        params, res = fit_angles(psi.astype(complex), args.seed)
        record[label] = {"angles": [float(x) for x in params], "max_residual": res}
        (out / f"{label}.json").write_text(json.dumps(circuit_json(params, label), indent=1) + "\n")
        print(f"{label}: fit residual {res:.2e}")
    (out / "angles.json").write_text(json.dumps(record, indent=1) + "\n")


if __name__ == "__main__":
    main()
