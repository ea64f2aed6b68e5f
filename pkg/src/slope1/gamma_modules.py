"""GL2(F_p)-modules of homogeneous polynomials in two variables.

Builds the symmetric powers V_r with the substitution action, the
submodules cut out by theta = X^p*Y - X*Y^p, the span X_r of X^r, the
quotient P = V_r/(X_r + V_r**) with its three-step filtration, and the
anchored identifications of the graded pieces with standard irreducibles
V_a (x) D^b.  Also verifies the finite-dimensional structure lemmas and
the reduction of the non-standard integral lattice.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg


class StructureError(Exception):
    """A structural claim failed (equivariance, splitting, anchor)."""


def primitive_root(p):
    """Smallest primitive root mod p."""
    for g in range(2, p):
        x, order = g, 1
        while x != 1:
            x = x * g % p
            order += 1
        if order == p - 1:
            return g
    raise ValueError("no primitive root; p must be prime")


def gamma_generators(p):
    """Three generators of GL2(F_p): the Weyl element, diag(g,1), and a
    unipotent, as ((a,b),(c,d)) tuples."""
    g = primitive_root(p)
    return [((0, 1), (1, 0)), ((g, 0), (0, 1)), ((1, 1), (0, 1))]


def det2(gamma):
    (a, b), (c, d) = gamma
    return a * d - b * c


def monomial(r, i):
    """X^(r-i) Y^i as a coefficient vector of length r+1."""
    v = np.zeros(r + 1, dtype=np.int64)
    v[i] = 1
    return v


def act(gamma, vec, p):
    """The substitution action: F |-> F(aX+cY, bX+dY) for gamma=(a b; c d).

    Coefficient index i holds the X^(r-i)Y^i coefficient.
    """
    if det2(gamma) % p == 0:
        raise ValueError("gamma must be invertible mod p")
    vec = np.asarray(vec, dtype=np.int64) % p
    r = len(vec) - 1
    (a, b), (c, d) = gamma
    col1 = np.array([a % p, c % p], dtype=np.int64)  # image of X
    col2 = np.array([b % p, d % p], dtype=np.int64)  # image of Y
    if r == 0:
        return vec.copy()
    # Horner in the Y-variable: sum_i v_i (aX+cY)^(r-i) (bX+dY)^i
    out = np.array([vec[r]], dtype=np.int64)
    apow = np.array([1], dtype=np.int64)
    for i in range(r - 1, -1, -1):
        out = np.convolve(out, col2) % p
        apow = np.convolve(apow, col1) % p
        if vec[i]:
            out = (out + vec[i] * apow) % p
    return out


def act_fraction(gamma, vec):
    """Exact-rational version of act, for integral-lattice computations."""
    r = len(vec) - 1
    (a, b), (c, d) = gamma
    if r == 0:
        return list(vec)

    def conv(u, w):
        res = [Fraction(0)] * (len(u) + len(w) - 1)
        for i, ui in enumerate(u):
            if ui:
                for j, wj in enumerate(w):
                    res[i + j] += ui * wj
        return res

    col1 = [Fraction(a), Fraction(c)]
    col2 = [Fraction(b), Fraction(d)]
    out = [Fraction(vec[r])]
    apow = [Fraction(1)]
    for i in range(r - 1, -1, -1):
        out = conv(out, col2)
        apow = conv(apow, col1)
        if vec[i]:
            out = [o + vec[i] * ap for o, ap in zip(out, apow)]
    return out


def theta_mul(vec, p):
    """Multiply a degree-s vector by theta = X^p*Y - X*Y^p (degree s+p+1)."""
    vec = np.asarray(vec, dtype=np.int64) % p
    s = len(vec) - 1
    out = np.zeros(s + p + 2, dtype=np.int64)
    for j in range(s + 1):
        if vec[j]:
            out[j + 1] = (out[j + 1] + vec[j]) % p
            out[j + p] = (out[j + p] - vec[j]) % p
    return out


def theta_basis(r, p, power=1):
    """Rows spanning theta^power * V_(r - power*(p+1)) inside V_r."""
    s = r - power * (p + 1)
    if s < 0:
        return np.zeros((0, r + 1), dtype=np.int64)
    rows = []
    for j in range(s + 1):
        v = monomial(s, j)
        for _ in range(power):
            v = theta_mul(v, p)
        rows.append(v)
    return np.array(rows, dtype=np.int64)


class GammaSpace:
    """A Gamma-stable subspace of V_r, basis kept in rref."""

    def __init__(self, p, r, basis):
        self.p = p
        self.r = r
        self.basis, self.pivots = linalg.rref(
            basis if len(basis) else np.zeros((0, r + 1), dtype=np.int64), p
        )

    @property
    def dim(self):
        return self.basis.shape[0]

    def contains(self, vec):
        return linalg.in_row_space(self.basis, self.pivots, vec, self.p)


def gamma_closure(seeds, p):
    """Smallest Gamma-stable subspace of V_r containing the seed vectors."""
    seeds = [np.asarray(s, dtype=np.int64) % p for s in seeds]
    seeds = [s for s in seeds if s.any()]
    if not seeds:
        raise ValueError("need at least one vector to infer the degree")
    r = len(seeds[0]) - 1
    gens = gamma_generators(p)
    space = GammaSpace(p, r, np.array(seeds))
    frontier = list(seeds)
    while frontier:
        new = []
        for v in frontier:
            for g in gens:
                w = act(g, v, p)
                if not space.contains(w):
                    new.append(w)
        if not new:
            break
        space = GammaSpace(p, r, np.vstack([space.basis] + new))
        frontier = new
    return space


def gamma_closure_zero(p, r):
    """Closure of the zero vector: the zero space (degree given explicitly)."""
    return GammaSpace(p, r, np.zeros((0, r + 1), dtype=np.int64))


# ---------------------------------------------------------------------------
# abstract finite F_p[Gamma]-modules given by generator matrices


class FpModule:
    """An F_p-space with the action of the three Gamma generators.

    Vectors are rows; the action is v |-> v @ mats[i].
    """

    def __init__(self, p, mats):
        self.p = p
        self.mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
        self.n = self.mats[0].shape[0] if self.mats[0].size else 0
        self.g = primitive_root(p)

    @staticmethod
    def standard(p, a, twist=0):
        """The irreducible model V_a (x) D^twist."""
        gens = gamma_generators(p)
        mats = []
        for g in gens:
            rows = [act(g, monomial(a, i), p) for i in range(a + 1)]
            m = np.array(rows, dtype=np.int64)
            m = m * pow(det2(g) % p, twist, p) % p
            mats.append(m)
        return FpModule(p, mats)

    def closure(self, vecs):
        """rref basis of the submodule generated by the given rows."""
        vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64) % self.p)
        basis, pivots = linalg.rref(vecs, self.p)
        frontier = [v for v in vecs if v.any()]
        while frontier:
            new = []
            for v in frontier:
                for m in self.mats:
                    w = v @ m % self.p
                    if not linalg.in_row_space(basis, pivots, w, self.p):
                        new.append(w)
            if not new:
                break
            basis, pivots = linalg.rref(np.vstack([basis] + new), self.p)
            frontier = new
        return basis

    def submodule(self, basis):
        """Induced module on a stable subspace.  Returns (module, basis_rref)."""
        basis, pivots = linalg.rref(basis, self.p)
        mats = []
        for m in self.mats:
            rows = []
            for v in basis:
                w = v @ m % self.p
                c = linalg.coords_in_row_space(basis, pivots, w, self.p)
                if c is None:
                    raise StructureError("subspace is not Gamma-stable")
                rows.append(c)
            mats.append(
                np.array(rows, dtype=np.int64)
                if rows
                else np.zeros((0, 0), dtype=np.int64)
            )
        return FpModule(self.p, mats), basis

    def quotient(self, sub_basis):
        """Quotient by a stable subspace.  Returns (module, projection matrix)
        with projection applied as  v_bar = v @ proj."""
        sub, pivots = linalg.rref(sub_basis, self.p)
        free = [c for c in range(self.n) if c not in pivots]
        # reduction endomorphism: subtract pivot rows, keep free coordinates
        proj = np.zeros((self.n, len(free)), dtype=np.int64)
        for c in range(self.n):
            v = np.zeros(self.n, dtype=np.int64)
            v[c] = 1
            for row, pc in zip(sub, pivots):
                if v[pc]:
                    v = (v - v[pc] * row) % self.p
            proj[c] = v[free]
        mats = []
        for m in self.mats:
            rows = []
            for fc in free:
                w = m[fc] % self.p
                rows.append(w @ proj % self.p)
            mats.append(
                np.array(rows, dtype=np.int64)
                if rows
                else np.zeros((0, 0), dtype=np.int64)
            )
        return FpModule(self.p, mats), proj

    # -- structure probes --------------------------------------------------

    def unipotent_fixed(self):
        """Basis of vectors fixed by the unipotent generator."""
        mu = self.mats[2]
        return linalg.nullspace((mu - np.eye(self.n, dtype=np.int64)).T, self.p)

    def _fixed_eigenvectors(self):
        """Unipotent-fixed eigenvectors of the torus generator, as a list of
        (weight e, eigenspace basis rows) with eigenvalue g^e."""
        fix = self.unipotent_fixed()
        if fix.shape[0] == 0:
            return []
        md = self.mats[1]
        fix_r, fix_p = linalg.rref(fix, self.p)
        small = []
        for v in fix_r:
            c = linalg.coords_in_row_space(
                fix_r, fix_p, v @ md % self.p, self.p
            )
            if c is None:
                raise StructureError("unipotent-fixed space not torus-stable")
            small.append(c)
        small = np.array(small, dtype=np.int64)
        out = []
        for e in range(self.p - 1):
            lam = pow(self.g, e, self.p)
            eig = linalg.nullspace(
                (small - lam * np.eye(len(fix_r), dtype=np.int64)).T, self.p
            )
            if eig.shape[0]:
                out.append((e, eig @ fix_r % self.p))
        return out

    def _eig_candidates(self):
        """Concrete highest-weight candidate vectors (projectively enumerated
        for small eigenspaces)."""
        cands = []
        for e, basis in self._fixed_eigenvectors():
            k = basis.shape[0]
            if k == 1:
                cands.append((e, basis[0]))
            elif k <= 3:
                for coeffs in _projective_points(self.p, k):
                    v = np.zeros(self.n, dtype=np.int64)
                    for c, row in zip(coeffs, basis):
                        v = (v + c * row) % self.p
                    cands.append((e, v))
            else:
                for row in basis:
                    cands.append((e, row))
        return cands

    def find_simple_submodule(self):
        """Basis of one simple submodule."""
        if self.n == 0:
            raise StructureError("zero module has no simple submodule")
        cands = self._eig_candidates()
        if not cands:
            raise StructureError("no unipotent-fixed eigenvector found")
        cur = self.closure(cands[0][1])
        improved = True
        while improved:
            improved = False
            sub, basis = self.submodule(cur)
            for _, v in sub._eig_candidates():
                vec = v @ basis % self.p
                cl = self.closure(vec)
                if 0 < cl.shape[0] < cur.shape[0]:
                    cur = cl
                    improved = True
                    break
        return cur

    def label_if_simple(self):
        """(a, twist) when the module is irreducible, else None."""
        if self.n == 0 or self.n > self.p:
            return None
        eigs = self._fixed_eigenvectors()
        if len(eigs) != 1 or eigs[0][1].shape[0] != 1:
            return None
        e, basis = eigs[0]
        if self.closure(basis[0]).shape[0] != self.n:
            return None
        a = self.n - 1
        return (a, (e - a) % (self.p - 1))

    def jh_factors(self):
        """Multiset (sorted list) of Jordan-Hoelder labels (a, twist)."""
        cur = self
        out = []
        while cur.n > 0:
            sub_basis = cur.find_simple_submodule()
            piece, _ = cur.submodule(sub_basis)
            label = piece.label_if_simple()
            if label is None:
                raise StructureError("peeled submodule is not simple")
            out.append(label)
            cur, _ = cur.quotient(sub_basis)
        return sorted(out)

    def character_line(self, twist):
        """Basis of the subspace on which Gamma acts through det^twist."""
        gens = gamma_generators(self.p)
        basis = np.eye(self.n, dtype=np.int64)
        for g, m in zip(gens, self.mats):
            lam = pow(det2(g) % self.p, twist, self.p)
            ker = linalg.nullspace(
                (m - lam * np.eye(self.n, dtype=np.int64)).T, self.p
            )
            basis = linalg.intersect_row_spaces(basis, ker, self.p)
            if basis.shape[0] == 0:
                break
        return basis


def _projective_points(p, k):
    """Representatives of P^(k-1)(F_p): first nonzero coordinate = 1."""
    if k == 1:
        return [(1,)]
    pts = []
    for lead in range(k):
        tails = [[]]
        for _ in range(k - lead - 1):
            tails = [t + [c] for t in tails for c in range(p)]
        for t in tails:
            pts.append(tuple([0] * lead + [1] + t))
    return pts


def equivariant_iso(src, tgt, anchor_src=None, anchor_tgt=None):
    """Gamma-iso matrix Phi (v |-> v @ Phi) between a cyclic simple module
    and a model, normalized so anchor_src @ Phi = anchor_tgt.

    Both modules must be simple with 1-dimensional unipotent-fixed space.
    """
    if src.n != tgt.n:
        raise StructureError("dimension mismatch %d != %d" % (src.n, tgt.n))
    se = src._fixed_eigenvectors()
    te = tgt._fixed_eigenvectors()
    if len(se) != 1 or se[0][1].shape[0] != 1:
        raise StructureError("source highest-weight line not unique")
    if len(te) != 1 or te[0][1].shape[0] != 1:
        raise StructureError("target highest-weight line not unique")
    if se[0][0] != te[0][0]:
        raise StructureError("highest weights differ: modules not isomorphic")
    p = src.p
    pairs_x = [se[0][1][0]]
    pairs_y = [te[0][1][0]]
    frontier = [0]
    while frontier:
        new = []
        for idx in frontier:
            for mg, ng in zip(src.mats, tgt.mats):
                x = pairs_x[idx] @ mg % p
                y = pairs_y[idx] @ ng % p
                bx = np.array(pairs_x, dtype=np.int64)
                c = linalg.solve(bx.T, x, p)
                if c is None:
                    new.append(len(pairs_x))
                    pairs_x.append(x)
                    pairs_y.append(y)
                else:
                    by = np.array(pairs_y, dtype=np.int64)
                    if ((c @ by - y) % p).any():
                        raise StructureError("parallel closure inconsistent")
        frontier = new
    if len(pairs_x) != src.n:
        raise StructureError("source not generated by its highest vector")
    bx = np.array(pairs_x, dtype=np.int64)
    by = np.array(pairs_y, dtype=np.int64)
    bx_inv = _matrix_inverse(bx, p)
    phi = bx_inv @ by % p
    for mg, ng in zip(src.mats, tgt.mats):
        if ((mg @ phi - phi @ ng) % p).any():
            raise StructureError("equivariance check failed")
    if anchor_src is not None:
        z = np.asarray(anchor_src, dtype=np.int64) @ phi % p
        t = np.asarray(anchor_tgt, dtype=np.int64) % p
        nz = np.nonzero(t)[0]
        if nz.size == 0 or z[nz[0]] == 0:
            raise StructureError("anchor image vanishes")
        c = z[nz[0]] * pow(int(t[nz[0]]), -1, p) % p
        if ((z - c * t) % p).any():
            raise StructureError("anchor image not proportional to target")
        phi = phi * pow(int(c), -1, p) % p
    return phi


def _matrix_inverse(m, p):
    n = m.shape[0]
    aug, pivots = linalg.rref(
        np.hstack([m, np.eye(n, dtype=np.int64)]), p
    )
    if pivots[:n] != list(range(n)):
        raise StructureError("matrix not invertible")
    return aug[:, n:]


def solve_hom_space(src, tgt):
    """Basis of Hom_Gamma(src, tgt) as a list of matrices (row action)."""
    p = src.p
    ns, nt = src.n, tgt.n
    blocks = []
    for mg, ng in zip(src.mats, tgt.mats):
        blocks.append(np.kron(mg, np.eye(nt, dtype=np.int64))
                      - np.kron(np.eye(ns, dtype=np.int64), ng.T))
    big = np.vstack(blocks) % p
    # unknown is vec(Phi) with Phi[i,j] at flat position i*nt + j
    ker = linalg.nullspace(big, p)
    return [k.reshape(ns, nt) % p for k in ker]


# ---------------------------------------------------------------------------
# the quotient P = V_r/(X_r + V_r**) and its filtration


def residue_class(r, p):
    """The representative a of r mod (p-1) with 1 <= a <= p-1."""
    return (r - 1) % (p - 1) + 1


def expected_labels(p, r):
    """The case table for the graded pieces (J0, J1, J2) of P."""
    a = residue_class(r, p)
    if a == 1:
        j0 = (p - 2, 1) if r % p == 0 else None
        return (j0, (1, 0), (p - 2, 1))
    if a == 2:
        j1 = None if r == 2 * p else (0, 1)
        return ((p - 1, 1), j1, (p - 3, 2))
    return (
        (a - 2, 1),
        (p - a + 1, (a - 1) % (p - 1)),
        (p - 1 - a, a % (p - 1)),
    )


def anchor_rows(p, r):
    """Anchor pairs (vector in V_r, monomial in the model) per graded piece."""
    a = residue_class(r, p)
    theta_top = theta_mul(monomial(r - p - 1, 0), p)
    anchors = {}
    if a == 1:
        if r % p == 0:
            anchors[0] = (theta_top, monomial(p - 2, 0))
        anchors[1] = (
            theta_mul(monomial(r - p - 1, p - 2), p), monomial(1, 0)
        )
        anchors[2] = (monomial(r, 1), monomial(p - 2, 0))
    elif a == 2:
        anchors[0] = (theta_top, monomial(p - 1, 0))
        if r > 2 * p:
            anchors[1] = (
                theta_mul(monomial(r - p - 1, p - 1), p), monomial(0, 0)
            )
        anchors[2] = (monomial(r, 2), monomial(p - 3, 0))
    else:
        anchors[0] = (theta_top, monomial(a - 2, 0))
        anchors[1] = (
            theta_mul(monomial(r - p - 1, a - 2), p), monomial(p - a + 1, 0)
        )
        anchors[2] = (monomial(r, a), monomial(p - a - 1, 0))
    return anchors


class PStructure:
    """P = V_r/(X_r + V_r**) with filtration W0 c W1 c W2 = P and anchored
    identifications of the graded pieces."""

    def __init__(self, p, r):
        if r < 2 * p:
            raise ValueError("need r >= 2p")
        self.p = p
        self.r = r
        self.a = residue_class(r, p)
        xr = gamma_closure([monomial(r, 0)], p)
        self.xr_dim = xr.dim
        vss = theta_basis(r, p, 2)
        self.K, self.K_pivots = linalg.rref(
            linalg.sum_row_spaces(xr.basis, vss, p), p
        )
        self.free_cols = [
            c for c in range(r + 1) if c not in self.K_pivots
        ]
        # generator action on P coordinates
        gens = gamma_generators(p)
        mats = []
        for g in gens:
            rows = [
                self.project(act(g, monomial(r, c), p))
                for c in self.free_cols
            ]
            mats.append(np.array(rows, dtype=np.int64))
        self.module = FpModule(p, mats)
        # filtration
        theta_top = self.project(theta_mul(monomial(r - p - 1, 0), p))
        if theta_top.any():
            w0 = self.module.closure(theta_top)
        else:
            w0 = np.zeros((0, self.dim), dtype=np.int64)
        w1_rows = np.array(
            [self.project(v) for v in theta_basis(r, p, 1)], dtype=np.int64
        )
        w1 = linalg.sum_row_spaces(w0, w1_rows, p)
        w2 = np.eye(self.dim, dtype=np.int64)
        self.W = [w0, w1, w2]
        self.W_pivots = [linalg.rref(w, p)[1] for w in self.W]
        # graded pieces with anchored model identifications
        anchors = anchor_rows(p, r)
        self.labels = []
        self._pieces = []
        prev = np.zeros((0, self.dim), dtype=np.int64)
        for i in range(3):
            wi = self.W[i]
            if wi.shape[0] == prev.shape[0]:
                self.labels.append(None)
                self._pieces.append(None)
                prev = wi
                continue
            wmod, wbasis = self.module.submodule(wi)
            sub_in_w = np.array(
                [
                    linalg.coords_in_row_space(
                        wbasis, linalg.rref(wbasis, p)[1], row, p
                    )
                    for row in prev
                ],
                dtype=np.int64,
            ) if prev.shape[0] else np.zeros((0, wi.shape[0]), dtype=np.int64)
            jmod, q = wmod.quotient(sub_in_w)
            label = jmod.label_if_simple()
            if label is None:
                raise StructureError(
                    "graded piece %d is not irreducible (p=%d, r=%d)"
                    % (i, p, r)
                )
            src_vec, tgt_vec = anchors[i]
            c = linalg.coords_in_row_space(
                wbasis, linalg.rref(wbasis, p)[1], self.project(src_vec), p
            )
            if c is None:
                raise StructureError("anchor vector not in W_%d" % i)
            anchor_src = c @ q % p
            model = FpModule.standard(p, label[0], label[1])
            phi = equivariant_iso(jmod, model, anchor_src, tgt_vec)
            self.labels.append(label)
            self._pieces.append((wbasis, linalg.rref(wbasis, p)[1], q, phi))
            prev = wi

    @property
    def dim(self):
        return len(self.free_cols)

    def project(self, vec):
        """Coordinates of the image of a V_r vector in P."""
        v = np.asarray(vec, dtype=np.int64) % self.p
        v = v.copy()
        for row, c in zip(self.K, self.K_pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v[self.free_cols]

    def to_J(self, vec, i):
        """Image of a V_r vector in the model of J_i, or None if the image
        in P falls outside W_i."""
        w = self.project(vec)
        basis = self.W[i]
        pivots = self.W_pivots[i]
        c = linalg.coords_in_row_space(basis, pivots, w, self.p)
        if c is None:
            return None
        if self._pieces[i] is None:
            return np.zeros(0, dtype=np.int64)
        wbasis, wpiv, q, phi = self._pieces[i]
        cw = linalg.coords_in_row_space(wbasis, wpiv, w, self.p)
        return cw @ q @ phi % self.p

    def split_projection(self):
        """The equivariant projection W1 -> J0 (weight-class a=2 only, where
        W1 = J0 (+) J1 splits), anchored by theta*X^(r-p-1) -> X^(p-1).

        Returns a function mapping a V_r vector to J0-model coordinates
        (None when the image is outside W1)."""
        if self.a != 2:
            raise ValueError("split projection defined for the a=2 class")
        p, r = self.p, self.r
        wmod, wbasis = self.module.submodule(self.W[1])
        wpiv = linalg.rref(wbasis, p)[1]
        if r == 2 * p:
            line = np.zeros((0, wmod.n), dtype=np.int64)
        else:
            line = wmod.character_line(1)
            if line.shape[0] != 1:
                raise StructureError(
                    "W1 does not split off a determinant line"
                )
        jq, q = wmod.quotient(line)
        model = FpModule.standard(p, p - 1, 1)
        src_vec = theta_mul(monomial(r - p - 1, 0), p)
        c = linalg.coords_in_row_space(
            wbasis, wpiv, self.project(src_vec), p
        )
        phi = equivariant_iso(jq, model, c @ q % p, monomial(p - 1, 0))

        def project(vec):
            w = self.project(vec)
            cw = linalg.coords_in_row_space(wbasis, wpiv, w, self.p)
            if cw is None:
                return None
            return cw @ q @ phi % self.p

        return project


def build_P(p, r):
    """Construct the quotient P with filtration and labels."""
    return PStructure(p, r)


def project_to_J(vec, i, pstruct):
    """Image of a V_r vector in the model of graded piece i (None if the
    vector's image is not in W_i)."""
    return pstruct.to_J(vec, i)


# ---------------------------------------------------------------------------
# structural lemma verification


def _vr_mod_vrstar(p, r):
    """The quotient module V_r/V_r* (dimension p+1) with its projection."""
    kbasis, kpiv = linalg.rref(theta_basis(r, p, 1), p)
    free = [c for c in range(r + 1) if c not in kpiv]

    def project(vec):
        v = np.asarray(vec, dtype=np.int64) % p
        v = v.copy()
        for row, c in zip(kbasis, kpiv):
            if v[c]:
                v = (v - v[c] * row) % p
        return v[free]

    mats = []
    for g in gamma_generators(p):
        rows = [project(act(g, monomial(r, c), p)) for c in free]
        mats.append(np.array(rows, dtype=np.int64))
    return FpModule(p, mats), project


def _has_simple_sub_with_label(module, label):
    """Whether the module contains a simple submodule with the given label."""
    for _, v in module._eig_candidates():
        cl = module.closure(v)
        if cl.shape[0] != label[0] + 1:
            continue
        sub, _ = module.submodule(cl)
        if sub.label_if_simple() == label:
            return True
    return False


def verify_structural_lemma(name, p, r):
    """Verify one of the named finite-dimensional structure facts.

    Returns a report dict {lemma, p, r, status, detail...}; raises
    ValueError when (p, r) violates the lemma's hypotheses.
    """
    a = residue_class(r, p)
    report = {"lemma": name, "p": p, "r": r, "a": a}

    if name == "a_mod_p":
        if not (3 <= a <= p - 1 and r >= 2 * p):
            raise ValueError("requires 3 <= a <= p-1 and r >= 2p")
        coeff = (a - r) * pow(a, -1, p) % p
        vec = (monomial(r, 1) - coeff * theta_mul(monomial(r - p - 1, 0), p)) % p
        xr = gamma_closure([monomial(r, 0)], p)
        k = linalg.sum_row_spaces(xr.basis, theta_basis(r, p, 2), p)
        kb, kp = linalg.rref(k, p)
        ok = linalg.in_row_space(kb, kp, vec, p)
        report.update(status="pass" if ok else "fail", coefficient=int(coeff))
        if not ok:
            report["witness"] = vec.tolist()
        return report

    if name == "goodcasenew_i":
        if not (a == 2 and r > 2 * p):
            raise ValueError("requires a = 2 and r > 2p")
        ps = build_P(p, r)
        img = ps.to_J(monomial(r, 1), 1)
        expected = np.array([(-r) * pow(2, -1, p) % p], dtype=np.int64)
        ok = img is not None and (img % p == expected).all()
        report.update(
            status="pass" if ok else "fail",
            image=None if img is None else img.tolist(),
            expected=expected.tolist(),
        )
        return report

    if name == "goodcasenew_ii":
        if not (a == 2 and r % p == 0 and r >= 2 * p):
            raise ValueError("requires a = 2, p | r, r >= 2p")
        vec = (monomial(r, 1) - theta_mul(monomial(r - p - 1, 0), p)) % p
        xr = gamma_closure([monomial(r, 0)], p)
        k = linalg.sum_row_spaces(xr.basis, theta_basis(r, p, 2), p)
        kb, kp = linalg.rref(k, p)
        ok = linalg.in_row_space(kb, kp, vec, p)
        report["status"] = "pass" if ok else "fail"
        if not ok:
            report["witness"] = vec.tolist()
        return report

    if name == "lemmanew":
        if not (a == 2 and r > 2 * p):
            raise ValueError("requires a = 2 and r > 2p")
        half_r = r * pow(2, -1, p) % p
        s = r - p - 1
        vec = (
            monomial(r, 1)
            + half_r * theta_mul(monomial(s, p - 1), p)
            - half_r * theta_mul(monomial(s, s), p)
        ) % p
        ps = build_P(p, r)
        img = ps.to_J(vec, 0)
        expected = (2 - r) * pow(2, -1, p) % p * monomial(p - 1, 0) % p
        ok = img is not None and (img % p == expected % p).all()
        report.update(
            status="pass" if ok else "fail",
            image=None if img is None else img.tolist(),
            expected=(expected % p).tolist(),
        )
        return report

    if name == "projection":
        if not (a == 2 and r > 2 * p):
            raise ValueError("requires a = 2 and r > 2p")
        ps = build_P(p, r)
        pr = ps.split_projection()
        s = r - p - 1
        cases = [
            (theta_mul(monomial(s, 0), p), monomial(p - 1, 0)),
            (theta_mul(monomial(s, s), p), monomial(p - 1, p - 1)),
            (
                theta_mul(monomial(s, p - 1), p),
                (monomial(p - 1, 0) + monomial(p - 1, p - 1)) % p,
            ),
            (monomial(r, 1), (1 - r) * monomial(p - 1, 0) % p),
        ]
        failures = []
        for idx, (vec, expect) in enumerate(cases):
            img = pr(vec)
            if img is None or ((img - expect) % p).any():
                failures.append(
                    {
                        "case": idx,
                        "image": None if img is None else img.tolist(),
                        "expected": (expect % p).tolist(),
                    }
                )
        report["status"] = "pass" if not failures else "fail"
        if failures:
            report["witness"] = failures
        return report

    if name == "es1_split":
        if r < p + 1:
            raise ValueError("requires r >= p+1")
        module, _ = _vr_mod_vrstar(p, r)
        q_label = (p - a - 1, a % (p - 1))
        split = _has_simple_sub_with_label(module, q_label)
        report.update(
            status="pass" if split == (a == p - 1) else "fail",
            split=split,
            expected_split=(a == p - 1),
        )
        return report

    if name == "es1_split_theta":
        if not (2 <= a <= p - 1 and r >= 2 * p + 2):
            raise ValueError("requires 2 <= a <= p-1 and r >= 2p+2")
        # V_r*/V_r** built on V_r* coordinates
        vstar = theta_basis(r, p, 1)
        vb, vpiv = linalg.rref(vstar, p)
        mats = []
        for g in gamma_generators(p):
            rows = []
            for v in vb:
                w = act(g, v, p)
                c = linalg.coords_in_row_space(vb, vpiv, w, p)
                rows.append(c)
            mats.append(np.array(rows, dtype=np.int64))
        star_mod = FpModule(p, mats)
        ss_in_star = np.array(
            [
                linalg.coords_in_row_space(vb, vpiv, row, p)
                for row in theta_basis(r, p, 2)
            ],
            dtype=np.int64,
        )
        e2, _ = star_mod.quotient(ss_in_star)
        q_label = (p - a + 1, (a - 1) % (p - 1))
        split = _has_simple_sub_with_label(e2, q_label)
        report.update(
            status="pass" if split == (a == 2) else "fail",
            split=split,
            expected_split=(a == 2),
        )
        return report

    if name == "xr_star":
        if r < p + 1:
            raise ValueError("requires r >= p+1")
        xr = gamma_closure([monomial(r, 0)], p)
        xr_star = linalg.intersect_row_spaces(
            xr.basis, theta_basis(r, p, 1), p
        )
        xr_ss = linalg.intersect_row_spaces(
            xr.basis, theta_basis(r, p, 2), p
        )
        qdim = xr_star.shape[0] - xr_ss.shape[0]
        expected_nonzero = a == 1 and r % p != 0
        if qdim == 0:
            ok = not expected_nonzero
            label = None
        else:
            # build the subquotient on X_r* coordinates
            sb, spiv = linalg.rref(xr_star, p)
            mats = []
            for g in gamma_generators(p):
                rows = [
                    linalg.coords_in_row_space(sb, spiv, act(g, v, p), p)
                    for v in sb
                ]
                mats.append(np.array(rows, dtype=np.int64))
            smod = FpModule(p, mats)
            ss_in = np.array(
                [
                    linalg.coords_in_row_space(sb, spiv, row, p)
                    for row in xr_ss
                ],
                dtype=np.int64,
            ) if xr_ss.shape[0] else np.zeros((0, sb.shape[0]), dtype=np.int64)
            quot, _ = smod.quotient(ss_in)
            label = quot.label_if_simple()
            ok = expected_nonzero and label == (p - 2, 1)
        report.update(
            status="pass" if ok else "fail",
            quotient_dim=int(qdim),
            label=label,
            expected_nonzero=expected_nonzero,
        )
        return report

    raise ValueError("unknown lemma name: %r" % name)


# ---------------------------------------------------------------------------
# reduction of the integral lattice Sym^r + (theta/p) Sym^(r-p-1)


def _fraction_inverse(rows):
    """Inverse of a square matrix of Fractions given as a list of rows."""
    n = len(rows)
    aug = [
        [Fraction(x) for x in row]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i, row in enumerate(rows)
    ]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise StructureError("lattice basis matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def _frac_residue(x, p):
    num, den = x.numerator, x.denominator
    if den % p == 0:
        raise StructureError("non-integral coordinate in lattice reduction")
    return num * pow(den, -1, p) % p


def nonstandard_lattice_reduction(p, r):
    """Reduce the lattice Sym^r Z_p^2 + (theta/p) Sym^(r-p-1) Z_p^2 mod p and
    verify the graded structure of its standard submodules.

    Requires (p-1) | r and r >= 2p-2.  Returns a report dict.
    """
    if p < 5:
        raise ValueError("requires p >= 5")
    if r % (p - 1) != 0 or r < 2 * p - 2:
        raise ValueError("requires (p-1) | r and r >= 2p-2")
    s = r - p - 1

    def frac_monomial(deg, i):
        v = [Fraction(0)] * (deg + 1)
        v[i] = Fraction(1)
        return v

    def frac_theta(vec):
        out = [Fraction(0)] * (len(vec) + p + 1)
        for j, x in enumerate(vec):
            if x:
                out[j + 1] += x
                out[j + p] -= x
        return out

    basis = [frac_monomial(r, 0)]
    basis += [frac_monomial(r, r - i) for i in range(p)]  # X^i Y^(r-i)
    for j in range(s + 1):
        basis.append([x / p for x in frac_theta(frac_monomial(s, j))])
    inv = _fraction_inverse(basis)

    def coords_mod_p(vec):
        n = len(basis)
        out = np.zeros(n, dtype=np.int64)
        for jcol in range(n):
            acc = Fraction(0)
            for i, x in enumerate(vec):
                if x:
                    acc += x * inv[i][jcol]
            out[jcol] = _frac_residue(acc, p)
        return out

    mats = []
    for g in gamma_generators(p):
        rows = [coords_mod_p(act_fraction(g, b)) for b in basis]
        mats.append(np.array(rows, dtype=np.int64))
    vbar = FpModule(p, mats)

    # image of Sym^r Z_p^2: all monomials
    m1_rows = np.array(
        [coords_mod_p(frac_monomial(r, j)) for j in range(r + 1)],
        dtype=np.int64,
    )
    m1_basis, m1_piv = linalg.rref(m1_rows, p)
    dim_m1 = m1_basis.shape[0]

    # image of the K-span of X^r
    e0 = np.zeros(r + 1, dtype=np.int64)
    e0[0] = 1
    m0_basis = vbar.closure(e0)
    m0_mod, _ = vbar.submodule(m0_basis)
    m0_label = m0_mod.label_if_simple()

    m1_mod, m1_b = vbar.submodule(m1_basis)
    m0_in_m1 = np.array(
        [
            linalg.coords_in_row_space(m1_b, m1_piv, row, p)
            for row in m0_basis
        ],
        dtype=np.int64,
    )
    top, _ = m1_mod.quotient(m0_in_m1)
    m1_mod_m0_trivial = top.n == 1 and all(
        (m == np.eye(1, dtype=np.int64)).all() for m in top.mats
    )

    # M1-bar vs V_r/V_r*
    target, _ = _vr_mod_vrstar(p, r)
    m1_iso = False
    if m1_mod.n == target.n:
        homs = solve_hom_space(m1_mod, target)
        m1_iso = _contains_invertible(homs, p)

    # the extra submodule eta*theta^2*Sym^(r-3(p+1)) and the top quotient
    n_rows = []
    if r >= 3 * (p + 1):
        d = r - 3 * (p + 1)
        for j in range(d + 1):
            w = theta_mul(theta_mul(monomial(d, j), p), p)  # in Sym^s
            row = np.zeros(r + 1, dtype=np.int64)
            row[p + 1:] = w
            n_rows.append(row)
    m2 = linalg.sum_row_spaces(
        m1_basis,
        np.array(n_rows, dtype=np.int64)
        if n_rows
        else np.zeros((0, r + 1), dtype=np.int64),
        p,
    )
    quot, _ = vbar.quotient(m2)
    jh = quot.jh_factors() if quot.n else []

    allowed = {
        (p - 5, 2 % (p - 1)),
        (4, (p - 3) % (p - 1)),
        (p - 3, 1),
        (2, (p - 2) % (p - 1)),
    }
    allowed_ok = set(jh) <= allowed
    special_ok = None
    if r == 2 * p - 2:
        special_ok = jh == [(p - 3, 1)]
    elif r == 3 * p - 3:
        special_ok = sorted(jh) == sorted(
            [(p - 5, 2 % (p - 1)), (p - 3, 1), (2, (p - 2) % (p - 1))]
        )
    elif (p, r) == (5, 16):
        special_ok = sorted(jh) == sorted([(4, 2), (2, 1), (2, 3)])

    ok = (
        dim_m1 == p + 1
        and m0_label == (p - 1, 0)
        and m1_mod_m0_trivial
        and m1_iso
        and allowed_ok
        and special_ok in (None, True)
    )
    return {
        "p": p,
        "r": r,
        "dim_M1": int(dim_m1),
        "M1_expected_dim": p + 1,
        "M0_label": m0_label,
        "M1_mod_M0_trivial": bool(m1_mod_m0_trivial),
        "M1_iso_Vr_mod_Vrstar": bool(m1_iso),
        "jh_top_quotient": [list(x) for x in jh],
        "jh_allowed": bool(allowed_ok),
        "jh_special_case": special_ok,
        "status": "pass" if ok else "fail",
    }


def _contains_invertible(homs, p):
    """Whether a spanned space of square matrices contains an invertible one."""
    if not homs:
        return False
    n = homs[0].shape[0]
    for h in homs:
        if len(linalg.rref(h, p)[1]) == n:
            return True
    if len(homs) >= 2:
        for c in range(1, p):
            h = (homs[0] + c * homs[1]) % p
            if len(linalg.rref(h, p)[1]) == n:
                return True
    rng = np.random.default_rng(0)
    for _ in range(200):
        coeffs = rng.integers(0, p, size=len(homs))
        h = sum(int(c) * m for c, m in zip(coeffs, homs)) % p
        if isinstance(h, np.ndarray) and len(linalg.rref(h, p)[1]) == n:
            return True
    return False
