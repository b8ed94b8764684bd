"""Integer genotype: a fixed-shape matrix encoding a function graph.

Addressing: inputs occupy graph addresses 1..iota, functional nodes
iota+1..iota+eta. Output rows are not addressable; each points at one graph
address through its first connection column. Matrix layout per row:
column 0 = function id, columns 1..alpha = connections, the rest = raw u8
parameters. Output rows use only column 1; their other cells are inert.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GenotypeError, LibraryMismatchError

FORMAT_VERSION = 1


@dataclass
class Genotype:
    iota: int
    eta: int
    o: int
    alpha: int
    rho: int
    matrix: np.ndarray

    @property
    def n(self):
        """Columns per row."""
        return 1 + self.alpha + self.rho

    @property
    def m(self):
        """Rows: functional + output."""
        return self.eta + self.o

    def copy(self):
        return Genotype(self.iota, self.eta, self.o, self.alpha, self.rho, self.matrix.copy())

    def output_addresses(self):
        return tuple(int(v) for v in self.matrix[self.eta :, 1])

    def __eq__(self, other):
        return (
            isinstance(other, Genotype)
            and (self.iota, self.eta, self.o, self.alpha, self.rho)
            == (other.iota, other.eta, other.o, other.alpha, other.rho)
            and np.array_equal(self.matrix, other.matrix)
        )


def validate(genotype, library):
    """Check every genotype invariant; raise GenotypeError naming the gene."""
    g = genotype
    if g.iota < 1 or g.eta < 1 or g.o < 1 or g.alpha < 1 or g.rho < 0:
        raise GenotypeError(
            f"bad dimensions iota={g.iota} eta={g.eta} o={g.o} alpha={g.alpha} rho={g.rho}"
        )
    if g.alpha != library.alpha or g.rho != library.rho:
        raise GenotypeError(
            f"genotype alpha/rho ({g.alpha},{g.rho}) do not match library ({library.alpha},{library.rho})"
        )
    mat = g.matrix
    if mat.shape != (g.m, g.n):
        raise GenotypeError(f"matrix shape {mat.shape} != ({g.m}, {g.n})")
    if mat.min() < 0:
        r, c = np.unravel_index(int(np.argmin(mat)), mat.shape)
        raise GenotypeError("negative gene", int(r), int(c))
    phi = library.phi
    for k in range(g.eta):
        fid = int(mat[k, 0])
        if not 1 <= fid <= phi:
            raise GenotypeError(f"function gene {fid} outside [1, {phi}]", k, 0)
        addr = g.iota + k + 1
        for c in range(1, 1 + g.alpha):
            v = int(mat[k, c])
            if not 1 <= v < addr:
                raise GenotypeError(f"connection gene {v} outside [1, {addr})", k, c)
        for c in range(1 + g.alpha, g.n):
            v = int(mat[k, c])
            if v > 255:
                raise GenotypeError(f"parameter gene {v} outside [0, 255]", k, c)
    hi = g.iota + g.eta
    for j in range(g.o):
        v = int(mat[g.eta + j, 1])
        if not 1 <= v <= hi:
            raise GenotypeError(f"output address {v} outside [1, {hi}]", g.eta + j, 1)
    return genotype


def to_json(genotype, library):
    return {
        "version": FORMAT_VERSION,
        "iota": genotype.iota,
        "eta": genotype.eta,
        "o": genotype.o,
        "alpha": genotype.alpha,
        "rho": genotype.rho,
        "matrix": [int(v) for v in genotype.matrix.ravel()],
        "library_id": library.library_id,
        "library_hash": library.content_hash,
    }


def from_json(obj, library):
    if obj.get("library_id") != library.library_id or obj.get("library_hash") != library.content_hash:
        raise LibraryMismatchError(
            f"genotype was built against library {obj.get('library_id')!r} "
            f"hash {obj.get('library_hash')!r}; current library is "
            f"{library.library_id!r} hash {library.content_hash!r}"
        )
    iota, eta, o = int(obj["iota"]), int(obj["eta"]), int(obj["o"])
    alpha, rho = int(obj["alpha"]), int(obj["rho"])
    flat = np.asarray(obj["matrix"], dtype=np.int64)
    if flat.size != (eta + o) * (1 + alpha + rho):
        raise GenotypeError(f"matrix has {flat.size} genes, expected {(eta + o) * (1 + alpha + rho)}")
    g = Genotype(iota, eta, o, alpha, rho, flat.reshape(eta + o, 1 + alpha + rho))
    return validate(g, library)
