//! Subgroups of finite abelian p-groups in canonical (Howell) echelon form.
//!
//! Coordinate c of an ambient group with exponent e_c is embedded into Z/p^top by
//! multiplication with p^{top - e_c}; all row operations then happen in one ring.
//! Rows are echelonized with unit-normalized pivots p^v and annihilator rows
//! p^{top-v}·row are fed back, so every element of the subgroup with leading zeros
//! is spanned by the rows whose pivot lies further right. That makes the form
//! unique, gives the order directly and turns kernels and intersections into
//! echelon computations on stacked layouts.

use crate::residue::{add_mod, inverse_mod, mul_mod, sub_mod, valuation, AbelianType, GroupElement};
use crate::smith::{smith, Smith};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    p: u64,
    exps: Vec<u32>,
    top: u32,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
}

fn embed(x: &[u64], exps: &[u32], p: u64, top: u32) -> Vec<u64> {
    x.iter()
        .zip(exps)
        .map(|(&c, &e)| c % p.pow(e) * p.pow(top - e))
        .collect()
}

fn unembed(y: &[u64], exps: &[u32], p: u64, top: u32) -> Vec<u64> {
    y.iter().zip(exps).map(|(&c, &e)| c / p.pow(top - e)).collect()
}

fn axpy(y: &mut [u64], f: u64, x: &[u64], q: u64) {
    if f == 0 {
        return;
    }
    for (a, &b) in y.iter_mut().zip(x) {
        if b != 0 {
            *a = sub_mod(*a, mul_mod(f, b, q), q);
        }
    }
}

impl Subgroup {
    /// Echelon form of the span of `gens` (plain coordinates) inside the group with
    /// the given exponents. Exponents need not be sorted.
    pub fn closure(p: u64, exps: &[u32], gens: &[Vec<u64>]) -> Self {
        let top = exps.iter().copied().max().unwrap_or(1).max(1);
        let rows: Vec<Vec<u64>> = gens.iter().map(|g| embed(g, exps, p, top)).collect();
        Self::from_embedded(p, exps.to_vec(), top, rows)
    }

    pub fn trivial(p: u64, exps: &[u32]) -> Self {
        Self::closure(p, exps, &[])
    }

    pub fn whole(p: u64, exps: &[u32]) -> Self {
        let gens: Vec<Vec<u64>> = (0..exps.len())
            .map(|i| (0..exps.len()).map(|j| u64::from(i == j)).collect())
            .collect();
        Self::closure(p, exps, &gens)
    }

    pub fn of_type(a: &AbelianType, gens: &[GroupElement]) -> Self {
        let gens: Vec<Vec<u64>> = gens.iter().map(|g| g.0.clone()).collect();
        Self::closure(a.p(), a.exponents(), &gens)
    }

    fn from_embedded(p: u64, exps: Vec<u32>, top: u32, mut work: Vec<Vec<u64>>) -> Self {
        let q = p.pow(top);
        let ncols = exps.len();
        work.retain(|r| r.iter().any(|&x| x != 0));
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..ncols {
            let mut best: Option<(usize, u32)> = None;
            for (i, r) in work.iter().enumerate() {
                if r[c] != 0 {
                    let v = valuation(r[c], p, top);
                    if best.map_or(true, |b| v < b.1) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((bi, v)) = best else { continue };
            let mut piv = work.swap_remove(bi);
            let pv = p.pow(v);
            let uinv = inverse_mod(piv[c] / pv, q).expect("unit part");
            for x in piv.iter_mut() {
                *x = mul_mod(*x, uinv, q);
            }
            for r in work.iter_mut() {
                if r[c] != 0 {
                    let f = r[c] / pv;
                    axpy(r, f, &piv, q);
                }
            }
            let ann = p.pow(top - v);
            let extra: Vec<u64> = piv.iter().map(|&x| mul_mod(x, ann, q)).collect();
            work.retain(|r| r.iter().any(|&x| x != 0));
            if extra.iter().any(|&x| x != 0) {
                work.push(extra);
            }
            rows.push(piv);
            pivots.push((c, v));
        }
        for k in 0..rows.len() {
            let (c, v) = pivots[k];
            let pv = p.pow(v);
            let (head, tail) = rows.split_at_mut(k);
            for r in head.iter_mut() {
                let f = r[c] / pv;
                axpy(r, f, &tail[0], q);
            }
        }
        Subgroup { p, exps, top, rows, pivots }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn order_log(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| self.top - v).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical generators in plain coordinates.
    pub fn generators(&self) -> Vec<Vec<u64>> {
        self.rows.iter().map(|r| unembed(r, &self.exps, self.p, self.top)).collect()
    }

    pub fn generator_elements(&self) -> Vec<GroupElement> {
        self.generators().into_iter().map(GroupElement).collect()
    }

    /// Reduces x by the echelon rows; the result is a canonical coset representative
    /// and is zero exactly when x lies in the subgroup.
    pub fn reduce(&self, x: &[u64]) -> Vec<u64> {
        let q = self.p.pow(self.top);
        let mut y = embed(x, &self.exps, self.p, self.top);
        for (row, &(c, v)) in self.rows.iter().zip(&self.pivots) {
            let f = y[c] / self.p.pow(v);
            axpy(&mut y, f, row, q);
        }
        unembed(&y, &self.exps, self.p, self.top)
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.reduce(x).iter().all(|&c| c == 0)
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        Subgroup::closure(self.p, &self.exps, &gens)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let n = self.exps.len();
        let mut exps = self.exps.clone();
        exps.extend_from_slice(&self.exps);
        let mut gens = Vec::new();
        for h in self.generators() {
            let mut r = h.clone();
            r.extend_from_slice(&h);
            gens.push(r);
        }
        for k in other.generators() {
            let mut r = k.clone();
            r.extend(std::iter::repeat(0).take(n));
            gens.push(r);
        }
        let stacked = Subgroup::closure(self.p, &exps, &gens);
        let parts: Vec<Vec<u64>> = stacked
            .generators()
            .into_iter()
            .zip(&stacked.pivots)
            .filter(|(_, &(c, _))| c >= n)
            .map(|(g, _)| g[n..].to_vec())
            .collect();
        Subgroup::closure(self.p, &self.exps, &parts)
    }

    /// Kernel of the homomorphism sending basis vector i of the source to images[i].
    pub fn kernel(p: u64, src_exps: &[u32], dst_exps: &[u32], images: &[Vec<u64>]) -> Subgroup {
        let nd = dst_exps.len();
        let mut exps = dst_exps.to_vec();
        exps.extend_from_slice(src_exps);
        let gens: Vec<Vec<u64>> = images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let mut r = img.clone();
                r.extend((0..src_exps.len()).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        let stacked = Subgroup::closure(p, &exps, &gens);
        let parts: Vec<Vec<u64>> = stacked
            .generators()
            .into_iter()
            .zip(&stacked.pivots)
            .filter(|(_, &(c, _))| c >= nd)
            .map(|(g, _)| g[nd..].to_vec())
            .collect();
        Subgroup::closure(p, src_exps, &parts)
    }

    /// Coefficient ranges for the unique expansion x = Σ c_k row_k with 0 ≤ c_k < p^{top - v_k}.
    pub fn digit_ranges(&self) -> Vec<u64> {
        self.pivots.iter().map(|&(_, v)| self.p.pow(self.top - v)).collect()
    }

    /// The element Σ c_k row_k.
    pub fn combine(&self, coeffs: &[u64]) -> Vec<u64> {
        let q = self.p.pow(self.top);
        let mut y = vec![0u64; self.exps.len()];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (a, &b) in y.iter_mut().zip(row) {
                *a = add_mod(*a, mul_mod(c, b, q), q);
            }
        }
        unembed(&y, &self.exps, self.p, self.top)
    }

    /// Every element of the subgroup; only for small subgroups.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let ranges = self.digit_ranges();
        let total: u64 = ranges.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut digits = vec![0u64; ranges.len()];
        for _ in 0..total {
            out.push(self.combine(&digits));
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < ranges[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        out
    }

    /// Independent generators: the subgroup is the direct sum of the cyclic groups
    /// they generate. Sorted by order, largest first.
    pub fn independent_basis(&self) -> IndependentBasis {
        let s = smith(&self.rows, self.exps.len(), self.p, self.top);
        let q = self.p.pow(self.top);
        let mut parts: Vec<(usize, u32)> = s
            .vals
            .iter()
            .enumerate()
            .filter(|(k, &v)| v < self.top && *k < self.rows.len())
            .map(|(k, &v)| (k, self.top - v))
            .collect();
        parts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let gens = parts
            .iter()
            .map(|&(k, _)| {
                let d = self.p.pow(s.vals[k]);
                let y: Vec<u64> = s.v_inv[k].iter().map(|&x| mul_mod(x, d, q)).collect();
                unembed(&y, &self.exps, self.p, self.top)
            })
            .collect();
        IndependentBasis {
            exps: self.exps.clone(),
            top: self.top,
            orders: parts.iter().map(|&(_, e)| e).collect(),
            slots: parts.iter().map(|&(k, _)| k).collect(),
            gens,
            smith: s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IndependentBasis {
    exps: Vec<u32>,
    top: u32,
    /// log_p of the order of each generator, non-increasing.
    pub orders: Vec<u32>,
    pub gens: Vec<Vec<u64>>,
    slots: Vec<usize>,
    smith: Smith,
}

impl IndependentBasis {
    /// Coordinates of a subgroup element with respect to `gens`.
    pub fn coords(&self, x: &[u64]) -> Vec<u64> {
        let p = self.smith.p;
        let y = self.smith.transform(&embed(x, &self.exps, p, self.top));
        self.slots
            .iter()
            .zip(&self.orders)
            .map(|(&k, &e)| (y[k] / p.pow(self.smith.vals[k])) % p.pow(e))
            .collect()
    }
}

/// The quotient of an abelian group by a subgroup, as a direct sum of cyclic groups.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    p: u64,
    /// log_p orders of the quotient's cyclic factors, non-increasing.
    pub exps: Vec<u32>,
    /// Lifts of the quotient generators to the ambient group.
    pub lifts: Vec<Vec<u64>>,
    slots: Vec<usize>,
    /// None for the quotient by the trivial subgroup, which keeps the ambient basis.
    smith: Option<Smith>,
}

impl QuotientMap {
    pub fn new(p: u64, ambient: &[u32], sub: &Subgroup) -> Self {
        if sub.is_trivial() {
            let r = ambient.len();
            return QuotientMap {
                p,
                exps: ambient.to_vec(),
                lifts: (0..r).map(|k| (0..r).map(|j| u64::from(j == k)).collect()).collect(),
                slots: (0..r).collect(),
                smith: None,
            };
        }
        let top = ambient.iter().copied().max().unwrap_or(1);
        let q = p.pow(top);
        let r = ambient.len();
        let mut rel: Vec<Vec<u64>> = Vec::new();
        for (i, &e) in ambient.iter().enumerate() {
            if e < top {
                let mut row = vec![0; r];
                row[i] = p.pow(e);
                rel.push(row);
            }
        }
        rel.extend(sub.generators());
        let s = smith(&rel, r, p, top);
        let mut parts: Vec<(usize, u32)> = (0..r).map(|k| (k, s.vals[k].min(top))).filter(|&(_, e)| e > 0).collect();
        parts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let lifts = parts
            .iter()
            .map(|&(k, _)| s.v_inv[k].iter().zip(ambient).map(|(&x, &e)| x % q % p.pow(e)).collect())
            .collect();
        QuotientMap {
            p,
            exps: parts.iter().map(|&(_, e)| e).collect(),
            lifts,
            slots: parts.iter().map(|&(k, _)| k).collect(),
            smith: Some(s),
        }
    }

    pub fn project(&self, x: &[u64]) -> Vec<u64> {
        let y = match &self.smith {
            Some(s) => s.transform(x),
            None => x.to_vec(),
        };
        self.slots.iter().zip(&self.exps).map(|(&k, &e)| y[k] % self.p.pow(e)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ty221() -> Vec<u32> {
        vec![2, 2, 1]
    }

    #[test]
    fn spec_closure_orders() {
        let e = ty221();
        assert_eq!(Subgroup::closure(5, &e, &[vec![0, 5, 0], vec![0, 0, 1]]).order_log(), 2);
        assert_eq!(Subgroup::closure(5, &e, &[vec![1, 0, 0]]).order_log(), 2);
        assert_eq!(Subgroup::closure(5, &e, &[]).order_log(), 0);
        assert_eq!(Subgroup::whole(5, &e).order_log(), 5);
    }

    #[test]
    fn canonical_form_is_generator_independent() {
        let e = ty221();
        let a = Subgroup::closure(5, &e, &[vec![1, 5, 1], vec![0, 5, 0]]);
        let b = Subgroup::closure(5, &e, &[vec![2, 0, 2], vec![0, 10, 0], vec![3, 15, 3]]);
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_of_multiplication_by_p() {
        let e = ty221();
        let images = vec![vec![5, 0, 0], vec![0, 5, 0], vec![0, 0, 0]];
        let k = Subgroup::kernel(5, &e, &e, &images);
        assert_eq!(k.order_log(), 3);
        assert!(k.contains(&[5, 10, 3]));
        assert!(!k.contains(&[1, 0, 0]));
    }

    #[test]
    fn quotient_of_cyclic_by_its_socle() {
        let e = ty221();
        let sub = Subgroup::closure(5, &e, &[vec![0, 5, 0]]);
        let qm = QuotientMap::new(5, &e, &sub);
        assert_eq!(qm.exps, vec![2, 1, 1]);
        assert!(qm.project(&[0, 5, 0]).iter().all(|&c| c == 0));
        assert!(!qm.project(&[0, 1, 0]).iter().all(|&c| c == 0));
    }

    fn brute_span(p: u64, exps: &[u32], gens: &[Vec<u64>]) -> std::collections::BTreeSet<Vec<u64>> {
        let mods: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0; exps.len()]);
        loop {
            let mut added = Vec::new();
            for x in &set {
                for g in gens {
                    let y: Vec<u64> = x.iter().zip(g).zip(&mods).map(|((&a, &b), &m)| (a + b) % m).collect();
                    if !set.contains(&y) {
                        added.push(y);
                    }
                }
            }
            if added.is_empty() {
                return set;
            }
            set.extend(added);
        }
    }

    proptest! {
        #[test]
        fn closure_matches_brute_force(gens in prop::collection::vec((0u64..25, 0u64..5, 0u64..25), 0..4)) {
            // Unsorted layout exercises the embedding.
            let exps = vec![2, 1, 2];
            let gens: Vec<Vec<u64>> = gens.into_iter().map(|(a, b, c)| vec![a, b, c]).collect();
            let s = Subgroup::closure(5, &exps, &gens);
            let brute = brute_span(5, &exps, &gens);
            prop_assert_eq!(5u64.pow(s.order_log()) as usize, brute.len());
            let elems: std::collections::BTreeSet<Vec<u64>> = s.elements().into_iter().collect();
            prop_assert_eq!(&elems, &brute);
            for g in &gens {
                prop_assert!(s.contains(g));
            }
            let again = Subgroup::closure(5, &exps, &s.generators());
            prop_assert_eq!(&again, &s);
            let basis = s.independent_basis();
            prop_assert_eq!(basis.orders.iter().sum::<u32>(), s.order_log());
            for x in brute.iter().take(20) {
                let c = basis.coords(x);
                let mut y = vec![0u64; 3];
                for (g, &ci) in basis.gens.iter().zip(&c) {
                    for j in 0..3 {
                        y[j] = (y[j] + ci * g[j]) % 5u64.pow(exps[j]);
                    }
                }
                prop_assert_eq!(&y, x);
            }
        }

        #[test]
        fn intersection_matches_brute_force(
            g1 in prop::collection::vec((0u64..25, 0u64..25, 0u64..5), 1..3),
            g2 in prop::collection::vec((0u64..25, 0u64..25, 0u64..5), 1..3),
        ) {
            let exps = ty221();
            let g1: Vec<Vec<u64>> = g1.into_iter().map(|(a, b, c)| vec![a, b, c]).collect();
            let g2: Vec<Vec<u64>> = g2.into_iter().map(|(a, b, c)| vec![a, b, c]).collect();
            let h = Subgroup::closure(5, &exps, &g1);
            let k = Subgroup::closure(5, &exps, &g2);
            let i = h.intersect(&k);
            let bh = brute_span(5, &exps, &g1);
            let bk = brute_span(5, &exps, &g2);
            let common = bh.intersection(&bk).count();
            prop_assert_eq!(5usize.pow(i.order_log()), common);
        }

        #[test]
        fn quotient_projection_is_exact(gens in prop::collection::vec((0u64..25, 0u64..25, 0u64..5), 0..3)) {
            let exps = ty221();
            let gens: Vec<Vec<u64>> = gens.into_iter().map(|(a, b, c)| vec![a, b, c]).collect();
            let s = Subgroup::closure(5, &exps, &gens);
            let qm = QuotientMap::new(5, &exps, &s);
            prop_assert_eq!(qm.exps.iter().sum::<u32>() + s.order_log(), 5);
            for x in Subgroup::whole(5, &exps).elements().iter().step_by(37) {
                let zero = qm.project(x).iter().all(|&c| c == 0);
                prop_assert_eq!(zero, s.contains(x));
            }
            for (k, l) in qm.lifts.iter().enumerate() {
                let img = qm.project(l);
                for (j, &c) in img.iter().enumerate() {
                    prop_assert_eq!(c, u64::from(j == k));
                }
            }
        }
    }
}
