//! Additive endomorphisms of a finite abelian p-group as graded matrices.
//!
//! Row i is the image of the basis vector x_i, and entry (i, j) lives in
//! p^{max(0, e_j - e_i)}·Z/p^{e_j}. Matrices act on row vectors from the right,
//! so x(MN) = (xM)N.
//!
//! As a group, Hom(A, A) is a direct sum of cyclic groups Z/p^{min(e_i, e_j)} via
//! the digit t_ij with m_ij = p^{max(0, e_j - e_i)}·t_ij. `HomLayout` packs these
//! digits into a mixed-radix code whose most significant digit is entry (0, 0),
//! so numeric order on codes is row-major lexicographic order on entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liering::LieRing;
use crate::residue::{add_mod, inverse_mod, mul_mod, neg_mod, sub_mod, AbelianType, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomLayout {
    p: u64,
    r: usize,
    exps: Vec<u32>,
    col_mod: Vec<u64>,
    /// Per entry: the forced p-power factor and the digit modulus.
    step: Vec<u64>,
    digit_mod: Vec<u64>,
    digit_exps: Vec<u32>,
}

impl HomLayout {
    pub fn new(ty: &AbelianType) -> Self {
        let p = ty.p();
        let exps = ty.exponents().to_vec();
        let r = exps.len();
        let mut step = Vec::with_capacity(r * r);
        let mut digit_mod = Vec::with_capacity(r * r);
        let mut digit_exps = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                step.push(p.pow(exps[j].saturating_sub(exps[i])));
                let d = exps[i].min(exps[j]);
                digit_mod.push(p.pow(d));
                digit_exps.push(d);
            }
        }
        HomLayout { p, r, col_mod: ty.moduli().to_vec(), exps, step, digit_mod, digit_exps }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.r * self.r
    }

    pub fn is_empty(&self) -> bool {
        self.r == 0
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn col_mod(&self, j: usize) -> u64 {
        self.col_mod[j]
    }

    pub fn step(&self, idx: usize) -> u64 {
        self.step[idx]
    }

    /// Exponents of the cyclic factors of Hom(A, A), entry by entry.
    pub fn digit_exps(&self) -> &[u32] {
        &self.digit_exps
    }

    /// log_p |Hom(A, A)|.
    pub fn order_log(&self) -> u32 {
        self.digit_exps.iter().sum()
    }

    /// Whether codes fit in u64.
    pub fn codes_fit(&self) -> bool {
        self.digit_mod.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m)).is_some()
    }

    pub fn identity(&self) -> Vec<u64> {
        let mut m = vec![0; self.len()];
        for i in 0..self.r {
            m[i * self.r + i] = 1 % self.col_mod[i];
        }
        m
    }

    pub fn is_graded(&self, m: &[u64]) -> bool {
        m.len() == self.len()
            && m.iter().enumerate().all(|(idx, &x)| x < self.col_mod[idx % self.r] && x % self.step[idx] == 0)
    }

    pub fn to_digits(&self, m: &[u64]) -> Vec<u64> {
        m.iter().zip(&self.step).map(|(&x, &s)| x / s).collect()
    }

    pub fn from_digits(&self, t: &[u64]) -> Vec<u64> {
        t.iter()
            .zip(&self.step)
            .zip(&self.digit_mod)
            .map(|((&d, &s), &dm)| (d % dm) * s)
            .collect()
    }

    pub fn encode(&self, m: &[u64]) -> u64 {
        m.iter()
            .zip(&self.step)
            .zip(&self.digit_mod)
            .fold(0u64, |acc, ((&x, &s), &dm)| acc * dm + x / s)
    }

    pub fn decode_into(&self, mut code: u64, out: &mut [u64]) {
        for idx in (0..self.len()).rev() {
            let dm = self.digit_mod[idx];
            out[idx] = (code % dm) * self.step[idx];
            code /= dm;
        }
    }

    pub fn decode(&self, code: u64) -> Vec<u64> {
        let mut out = vec![0; self.len()];
        self.decode_into(code, &mut out);
        out
    }

    /// out = a·b.
    pub fn mul_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let r = self.r;
        for i in 0..r {
            for j in 0..r {
                let m = self.col_mod[j];
                let mut acc = 0u64;
                for k in 0..r {
                    let x = a[i * r + k];
                    let y = b[k * r + j];
                    if x != 0 && y != 0 {
                        acc = add_mod(acc, mul_mod(x % m, y, m), m);
                    }
                }
                out[i * r + j] = acc;
            }
        }
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.len()];
        self.mul_into(a, b, &mut out);
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        (0..self.len()).map(|idx| add_mod(a[idx], b[idx], self.col_mod[idx % self.r])).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        (0..self.len()).map(|idx| sub_mod(a[idx], b[idx], self.col_mod[idx % self.r])).collect()
    }

    pub fn scale_in_place(&self, c: u64, a: &mut [u64]) {
        for (idx, x) in a.iter_mut().enumerate() {
            let m = self.col_mod[idx % self.r];
            *x = mul_mod(c % m, *x, m);
        }
    }

    /// x·M for a row vector x.
    pub fn apply(&self, x: &[u64], m: &[u64]) -> Vec<u64> {
        let r = self.r;
        (0..r)
            .map(|j| {
                let q = self.col_mod[j];
                (0..r).fold(0, |acc, i| add_mod(acc, mul_mod(x[i] % q, m[i * r + j], q), q))
            })
            .collect()
    }

    /// Reduction modulo p: the induced map on A/pA.
    pub fn reduce_mod_p(&self, m: &[u64]) -> Vec<u64> {
        m.iter().map(|&x| x % self.p).collect()
    }

    pub fn is_invertible(&self, m: &[u64]) -> bool {
        fp_rank(&self.reduce_mod_p(m), self.r, self.p) == self.r
    }

    pub fn is_nilpotent(&self, m: &[u64]) -> bool {
        fp_is_nilpotent(&self.reduce_mod_p(m), self.r, self.p)
    }

    /// Inverse of an invertible matrix: invert modulo p, lift, then refine by
    /// Y ← Y(I + R) with R = I − MY, which squares the residual each round.
    pub fn inverse(&self, m: &[u64]) -> Option<Vec<u64>> {
        let r = self.r;
        let red = fp_inverse(&self.reduce_mod_p(m), r, self.p)?;
        let mut y: Vec<u64> = (0..self.len()).map(|idx| if self.step[idx] == 1 { red[idx] } else { 0 }).collect();
        let id = self.identity();
        loop {
            let my = self.mul(m, &y);
            if my == id {
                return Some(y);
            }
            let resid = self.sub(&id, &my);
            let corr = self.mul(&y, &resid);
            y = self.add(&y, &corr);
        }
    }
}

fn fp_row_reduce(m: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| m[i * cols + c] != 0) else { continue };
        for k in 0..cols {
            m.swap(rank * cols + k, piv * cols + k);
        }
        let inv = inverse_mod(m[rank * cols + c], p).expect("nonzero mod p");
        for k in 0..cols {
            m[rank * cols + k] = m[rank * cols + k] * inv % p;
        }
        for i in 0..rows {
            if i != rank && m[i * cols + c] != 0 {
                let f = m[i * cols + c];
                for k in 0..cols {
                    let d = f * m[rank * cols + k] % p;
                    m[i * cols + k] = (m[i * cols + k] + p - d) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn fp_rank(m: &[u64], r: usize, p: u64) -> usize {
    let mut w = m.to_vec();
    fp_row_reduce(&mut w, r, r, p)
}

pub fn fp_inverse(m: &[u64], r: usize, p: u64) -> Option<Vec<u64>> {
    let cols = 2 * r;
    let mut w = vec![0u64; r * cols];
    for i in 0..r {
        for j in 0..r {
            w[i * cols + j] = m[i * r + j] % p;
        }
        w[i * cols + r + i] = 1;
    }
    if fp_row_reduce(&mut w, r, cols, p) < r || (0..r).any(|i| w[i * cols + i] != 1) {
        return None;
    }
    Some((0..r * r).map(|idx| w[(idx / r) * cols + r + idx % r]).collect())
}

pub fn fp_is_nilpotent(m: &[u64], r: usize, p: u64) -> bool {
    let mut pow = m.to_vec();
    for _ in 1..r.max(1) {
        let mut next = vec![0u64; r * r];
        for i in 0..r {
            for k in 0..r {
                let x = pow[i * r + k];
                if x == 0 {
                    continue;
                }
                for j in 0..r {
                    next[i * r + j] = (next[i * r + j] + x * m[k * r + j]) % p;
                }
            }
        }
        pow = next;
    }
    pow.iter().all(|&x| x == 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedMatrix {
    ty: AbelianType,
    entries: Vec<u64>,
}

impl GradedMatrix {
    pub fn new(ty: &AbelianType, entries: Vec<u64>) -> Result<Self> {
        let layout = HomLayout::new(ty);
        if !layout.is_graded(&entries) {
            return Err(Error::InvalidElement(format!("entries {entries:?} violate the divisibility pattern")));
        }
        Ok(GradedMatrix { ty: ty.clone(), entries })
    }

    /// Reduces signed rows column-wise, then checks the pattern.
    pub fn from_rows(ty: &AbelianType, rows: &[Vec<i64>]) -> Result<Self> {
        let r = ty.rank();
        if rows.len() != r || rows.iter().any(|row| row.len() != r) {
            return Err(Error::TypeMismatch(format!("expected a {r}x{r} matrix")));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().enumerate().map(|(j, &x)| (x as i128).rem_euclid(ty.modulus(j) as i128) as u64))
            .collect();
        Self::new(ty, entries)
    }

    pub(crate) fn from_raw(ty: &AbelianType, entries: Vec<u64>) -> Self {
        GradedMatrix { ty: ty.clone(), entries }
    }

    pub fn identity(ty: &AbelianType) -> Self {
        GradedMatrix { ty: ty.clone(), entries: HomLayout::new(ty).identity() }
    }

    pub fn zero(ty: &AbelianType) -> Self {
        GradedMatrix { ty: ty.clone(), entries: vec![0; ty.rank() * ty.rank()] }
    }

    pub fn ty(&self) -> &AbelianType {
        &self.ty
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn layout(&self) -> HomLayout {
        HomLayout::new(&self.ty)
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.ty.rank() + j]
    }

    pub fn row(&self, i: usize) -> GroupElement {
        let r = self.ty.rank();
        GroupElement(self.entries[i * r..(i + 1) * r].to_vec())
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        let r = self.ty.rank();
        self.entries.chunks(r.max(1)).map(<[u64]>::to_vec).collect()
    }

    fn same_type(&self, other: &GradedMatrix) -> Result<()> {
        if self.ty != other.ty {
            return Err(Error::TypeMismatch("matrices act on different groups".into()));
        }
        Ok(())
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        self.ty.check(x).map_err(|e| Error::TypeMismatch(e.to_string()))?;
        Ok(GroupElement(self.layout().apply(&x.0, &self.entries)))
    }

    /// self·other: first self, then other.
    pub fn compose(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.same_type(other)?;
        Ok(GradedMatrix { ty: self.ty.clone(), entries: self.layout().mul(&self.entries, &other.entries) })
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.same_type(other)?;
        Ok(GradedMatrix { ty: self.ty.clone(), entries: self.layout().add(&self.entries, &other.entries) })
    }

    pub fn sub(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.same_type(other)?;
        Ok(GradedMatrix { ty: self.ty.clone(), entries: self.layout().sub(&self.entries, &other.entries) })
    }

    pub fn scale(&self, c: u64) -> GradedMatrix {
        let mut entries = self.entries.clone();
        self.layout().scale_in_place(c, &mut entries);
        GradedMatrix { ty: self.ty.clone(), entries }
    }

    pub fn neg(&self) -> GradedMatrix {
        let r = self.ty.rank();
        let entries =
            self.entries.iter().enumerate().map(|(idx, &x)| neg_mod(x, self.ty.modulus(idx % r))).collect();
        GradedMatrix { ty: self.ty.clone(), entries }
    }

    /// Commutator MN − NM.
    pub fn commutator(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_invertible(&self) -> bool {
        self.layout().is_invertible(&self.entries)
    }

    pub fn inverse(&self) -> Option<GradedMatrix> {
        self.layout().inverse(&self.entries).map(|entries| GradedMatrix { ty: self.ty.clone(), entries })
    }

    pub fn code(&self) -> u64 {
        self.layout().encode(&self.entries)
    }
}

pub fn apply_compose(m: &GradedMatrix, n: &GradedMatrix) -> Result<GradedMatrix> {
    m.compose(n)
}

/// M^t = 0 for some t ≤ log_p |A|, tested by repeated exact products.
pub fn is_nilpotent_endo(m: &GradedMatrix) -> bool {
    let layout = m.layout();
    let bound = m.ty().order_log().max(1);
    let mut pow = m.entries().to_vec();
    for _ in 0..bound {
        if pow.iter().all(|&x| x == 0) {
            return true;
        }
        pow = layout.mul(&pow, m.entries());
    }
    pow.iter().all(|&x| x == 0)
}

pub fn is_derivation(l: &LieRing, m: &GradedMatrix) -> bool {
    let layout = m.layout();
    let r = l.rank();
    let rows = m.rows();
    for i in 0..r {
        for j in i + 1..r {
            let c = l.gen_bracket(i, j);
            let lhs = layout.apply(&c.0, m.entries());
            let a = l.bracket(&GroupElement(rows[i].clone()), &l.ty().basis(j));
            let b = l.bracket(&l.ty().basis(i), &GroupElement(rows[j].clone()));
            if lhs != l.ty().add(&a, &b).0 {
                return false;
            }
        }
    }
    true
}

/// Matrix of y ↦ [y, x].
pub fn inner_derivation(l: &LieRing, x: &GroupElement) -> GradedMatrix {
    let entries: Vec<u64> = (0..l.rank()).flat_map(|i| l.bracket(&l.ty().basis(i), x).0).collect();
    GradedMatrix::from_raw(l.ty(), entries)
}

/// The unit α with z·M = α·z, determined modulo the order of z.
pub fn line_scalar(ty: &AbelianType, z: &GroupElement, image: &[u64]) -> Option<u64> {
    let p = ty.p();
    let mu = ty.element_order_log(z);
    if mu == 0 {
        return Some(1);
    }
    let (k, v) = z
        .0
        .iter()
        .zip(ty.exponents())
        .enumerate()
        .map(|(k, (&c, &e))| (k, crate::residue::valuation(c, p, e), e))
        .find(|&(_, v, e)| e - v == mu)
        .map(|(k, v, _)| (k, v))?;
    let q = p.pow(mu);
    let zu = (z.0[k] / p.pow(v)) % q;
    if image[k] % p.pow(v) != 0 {
        return None;
    }
    let iu = (image[k] / p.pow(v)) % q;
    let alpha = mul_mod(iu, inverse_mod(zu, q)?, q);
    (ty.scale(alpha, z).0 == image).then_some(alpha)
}

pub fn is_lie_automorphism(l: &LieRing, m: &GradedMatrix, fix_line: Option<&GroupElement>) -> bool {
    if !m.is_invertible() {
        return false;
    }
    let layout = m.layout();
    let r = l.rank();
    let rows = m.rows();
    for i in 0..r {
        for j in i + 1..r {
            let lhs = layout.apply(&l.gen_bracket(i, j).0, m.entries());
            let rhs = l.bracket(&GroupElement(rows[i].clone()), &GroupElement(rows[j].clone()));
            if lhs != rhs.0 {
                return false;
            }
        }
    }
    match fix_line {
        Some(z) => {
            let img = layout.apply(&z.0, m.entries());
            line_scalar(l.ty(), z, &img).is_some()
        }
        None => true,
    }
}
