//! Lie rings on finite abelian p-groups given by structure constants on a basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{add_mod, mul_mod, sub_mod, type_invariants, AbelianType, GroupElement, TypeInvariants};
use crate::subgroup::{IndependentBasis, QuotientMap, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieRing {
    ty: AbelianType,
    /// Brackets [x_i, x_j] for i < j, row-major over the strict upper triangle.
    table: Vec<GroupElement>,
}

fn pair_slot(i: usize, j: usize, r: usize) -> usize {
    debug_assert!(i < j && j < r);
    i * (2 * r - i - 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingFingerprint {
    pub order_log: u32,
    pub invariants: TypeInvariants,
    pub class: usize,
    pub derived_order_log: u32,
    pub center_order_log: u32,
    /// Largest i with [L,L] contained in p^i A.
    pub derived_mho_depth: u32,
    /// log_p |[L,L] ∩ p·Z(L)|.
    pub derived_meets_center_mho_log: u32,
}

impl LieRing {
    /// Builds a ring from the nonzero generator brackets [x_i, x_j] (i < j) and validates it.
    pub fn new(ty: AbelianType, brackets: &[((usize, usize), GroupElement)]) -> Result<Self> {
        let ring = Self::unchecked(ty, brackets)?;
        ring.validate()?;
        Ok(ring)
    }

    /// Builds a ring without the order and Jacobi checks.
    pub fn unchecked(ty: AbelianType, brackets: &[((usize, usize), GroupElement)]) -> Result<Self> {
        let r = ty.rank();
        let mut table = vec![ty.zero(); r * r.saturating_sub(1) / 2];
        for ((i, j), c) in brackets {
            ty.check(c)?;
            let (i, j, c) = match i.cmp(j) {
                std::cmp::Ordering::Less => (*i, *j, c.clone()),
                std::cmp::Ordering::Greater => (*j, *i, ty.neg(c)),
                std::cmp::Ordering::Equal => {
                    return Err(Error::InvalidElement(format!("bracket of generator {i} with itself")))
                }
            };
            if j >= r {
                return Err(Error::InvalidElement(format!("generator index {j} out of range")));
            }
            table[pair_slot(i, j, r)] = c;
        }
        Ok(LieRing { ty, table })
    }

    pub fn abelian(ty: AbelianType) -> Self {
        Self::unchecked(ty, &[]).expect("empty table")
    }

    pub fn ty(&self) -> &AbelianType {
        &self.ty
    }

    pub fn p(&self) -> u64 {
        self.ty.p()
    }

    pub fn rank(&self) -> usize {
        self.ty.rank()
    }

    pub fn order_log(&self) -> u32 {
        self.ty.order_log()
    }

    /// Nonzero generator brackets with i < j.
    pub fn table(&self) -> Vec<((usize, usize), GroupElement)> {
        let r = self.rank();
        let mut out = Vec::new();
        for i in 0..r {
            for j in i + 1..r {
                let c = &self.table[pair_slot(i, j, r)];
                if !c.is_zero() {
                    out.push(((i, j), c.clone()));
                }
            }
        }
        out
    }

    pub fn gen_bracket(&self, i: usize, j: usize) -> GroupElement {
        let r = self.rank();
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.table[pair_slot(i, j, r)].clone(),
            std::cmp::Ordering::Greater => self.ty.neg(&self.table[pair_slot(j, i, r)]),
            std::cmp::Ordering::Equal => self.ty.zero(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(GroupElement::is_zero)
    }

    /// Bilinear antisymmetric extension of the generator table.
    pub fn bracket(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let mut out = vec![0u64; self.rank()];
        self.bracket_into(&x.0, &y.0, &mut out);
        GroupElement(out)
    }

    pub fn bracket_into(&self, x: &[u64], y: &[u64], out: &mut [u64]) {
        let r = self.rank();
        let moduli = self.ty.moduli();
        out.iter_mut().for_each(|o| *o = 0);
        let mut slot = 0;
        for i in 0..r {
            for j in i + 1..r {
                let c = &self.table[slot].0;
                slot += 1;
                if c.iter().all(|&v| v == 0) {
                    continue;
                }
                let m = moduli[j];
                let t = sub_mod(mul_mod(x[i] % m, y[j] % m, m), mul_mod(x[j] % m, y[i] % m, m), m);
                if t == 0 {
                    continue;
                }
                for ((o, &cv), &mk) in out.iter_mut().zip(c).zip(moduli) {
                    if cv != 0 {
                        *o = add_mod(*o, mul_mod(t % mk, cv, mk), mk);
                    }
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        let p = self.p();
        let e = self.ty.exponents();
        for i in 0..r {
            for j in i + 1..r {
                let c = &self.table[pair_slot(i, j, r)];
                if !self.ty.scale(p.pow(e[i].min(e[j])), c).is_zero() {
                    return Err(Error::OrderIncompat { i, j });
                }
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                for k in j + 1..r {
                    let (xi, xj, xk) = (self.ty.basis(i), self.ty.basis(j), self.ty.basis(k));
                    let a = self.bracket(&self.gen_bracket(i, j), &xk);
                    let b = self.bracket(&self.gen_bracket(j, k), &xi);
                    let c = self.bracket(&self.gen_bracket(k, i), &xj);
                    if !self.ty.add(&self.ty.add(&a, &b), &c).is_zero() {
                        return Err(Error::JacobiFail { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn subgroup(&self, gens: &[Vec<u64>]) -> Subgroup {
        Subgroup::closure(self.p(), self.ty.exponents(), gens)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::whole(self.p(), self.ty.exponents())
    }

    /// p^k A.
    pub fn mho(&self, k: u32) -> Subgroup {
        let q = self.p().pow(k);
        let gens: Vec<Vec<u64>> = (0..self.rank()).map(|i| self.ty.scale(q, &self.ty.basis(i)).0).collect();
        self.subgroup(&gens)
    }

    /// {x : p^k x = 0}.
    pub fn omega(&self, k: u32) -> Subgroup {
        let p = self.p();
        let gens: Vec<Vec<u64>> = (0..self.rank())
            .map(|i| {
                let e = self.ty.exponents()[i];
                self.ty.scale(p.pow(e.saturating_sub(k)), &self.ty.basis(i)).0
            })
            .collect();
        self.subgroup(&gens)
    }

    /// [S, L] for a subgroup S: spanned by brackets of its generators with the basis.
    pub fn bracket_with_ring(&self, s: &Subgroup) -> Subgroup {
        let mut gens = Vec::new();
        for g in s.generators() {
            let g = GroupElement(g);
            for k in 0..self.rank() {
                gens.push(self.bracket(&g, &self.ty.basis(k)).0);
            }
        }
        self.subgroup(&gens)
    }

    pub fn derived(&self) -> Subgroup {
        self.bracket_with_ring(&self.whole())
    }

    /// γ_1 ⊇ γ_2 ⊇ ... ending with the zero subgroup.
    pub fn lower_central_series(&self) -> Result<Vec<Subgroup>> {
        let mut series = vec![self.whole()];
        let bound = self.order_log() as usize + 1;
        loop {
            let last = series.last().expect("nonempty");
            if last.is_trivial() {
                return Ok(series);
            }
            let next = self.bracket_with_ring(last);
            if next == *last || series.len() > bound {
                return Err(Error::NotNilpotent);
            }
            series.push(next);
        }
    }

    pub fn class(&self) -> Result<usize> {
        Ok(self.lower_central_series()?.len() - 1)
    }

    pub fn center(&self) -> Subgroup {
        let r = self.rank();
        let mut dst = Vec::with_capacity(r * r);
        for _ in 0..r {
            dst.extend_from_slice(self.ty.exponents());
        }
        let images: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let xi = self.ty.basis(i);
                (0..r).flat_map(|k| self.bracket(&xi, &self.ty.basis(k)).0).collect()
            })
            .collect();
        Subgroup::kernel(self.p(), self.ty.exponents(), &dst, &images)
    }

    pub fn is_central(&self, x: &GroupElement) -> bool {
        (0..self.rank()).all(|k| self.bracket(x, &self.ty.basis(k)).is_zero())
    }

    pub fn fingerprint(&self) -> Result<RingFingerprint> {
        let series = self.lower_central_series()?;
        let derived = series.get(1).cloned().unwrap_or_else(|| self.whole());
        let center = self.center();
        let depth = (0..=self.ty.exponent_log())
            .rev()
            .find(|&i| self.mho(i).contains_subgroup(&derived))
            .unwrap_or(0);
        let center_mho_gens: Vec<Vec<u64>> = center
            .generators()
            .into_iter()
            .map(|g| self.ty.scale(self.p(), &GroupElement(g)).0)
            .collect();
        let center_mho = self.subgroup(&center_mho_gens);
        Ok(RingFingerprint {
            order_log: self.order_log(),
            invariants: type_invariants(&self.ty),
            class: series.len() - 1,
            derived_order_log: derived.order_log(),
            center_order_log: center.order_log(),
            derived_mho_depth: depth,
            derived_meets_center_mho_log: derived.intersect(&center_mho).order_log(),
        })
    }

    pub fn is_ideal(&self, i: &Subgroup) -> bool {
        self.bracket_with_ring(i).generators().iter().all(|g| i.contains(g))
    }

    /// L / I with the induced bracket, together with the projection.
    pub fn quotient(&self, ideal: &Subgroup) -> Result<(LieRing, QuotientMap)> {
        if !self.is_ideal(ideal) {
            return Err(Error::NotAnIdeal);
        }
        let qm = QuotientMap::new(self.p(), self.ty.exponents(), ideal);
        let ty = AbelianType::new(self.p(), qm.exps.clone())?;
        let mut brackets = Vec::new();
        for a in 0..qm.lifts.len() {
            for b in a + 1..qm.lifts.len() {
                let c = self.bracket(&GroupElement(qm.lifts[a].clone()), &GroupElement(qm.lifts[b].clone()));
                brackets.push(((a, b), GroupElement(qm.project(&c.0))));
            }
        }
        Ok((LieRing::new(ty, &brackets)?, qm))
    }

    /// The subring carried by a bracket-closed subgroup, on an independent basis.
    pub fn subring(&self, s: &Subgroup) -> Result<(LieRing, IndependentBasis)> {
        let basis = s.independent_basis();
        let ty = AbelianType::new(self.p(), basis.orders.clone())?;
        let mut brackets = Vec::new();
        for a in 0..basis.gens.len() {
            for b in a + 1..basis.gens.len() {
                let c = self.bracket(&GroupElement(basis.gens[a].clone()), &GroupElement(basis.gens[b].clone()));
                if !s.contains(&c.0) {
                    return Err(Error::InvalidElement("subgroup is not closed under the bracket".into()));
                }
                brackets.push(((a, b), GroupElement(basis.coords(&c.0))));
            }
        }
        Ok((LieRing::new(ty, &brackets)?, basis))
    }
}
