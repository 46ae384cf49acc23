//! P = A ⋊ ⟨g⟩ with A elementary abelian of rank f+1 and g acting by the unipotent
//! Jordan block x_i ↦ x_i + x_{i+1}, and its quotient by ⟨g^{p^{n−f−1}} x_{f+1}^{−1}⟩,
//! a group of order p^n, coexponent f and class f+1.
//!
//! Elements are (a_1, ..., a_{f+1}, k) standing for a·g^k, with
//! (a, k)(b, l) = (a + b·α^{−k}, k + l), so that g⁻¹ b g = b·α.

use crate::error::{Error, Result};
use crate::group::{closure, lower_central_series, Elem, FiniteGroup, GroupSubset};
use crate::residue::is_prime;

#[derive(Debug, Clone)]
pub struct ExtremalGroup {
    p: u64,
    f: usize,
    n: u32,
    /// Order of g: p^{n−f} in the first stage, p^{n−f−1} in the quotient.
    g_order: u64,
    quotient: bool,
    /// α^{−k} for k = 0..p, as (f+1)×(f+1) matrices acting on rows.
    inverse_powers: Vec<Vec<Vec<u64>>>,
}

fn check_parameters(p: u64, f: usize, n: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 || p < f as u64 + 1 || (n as usize) < f + 2 {
        return Err(Error::ParameterViolation(format!("need f ≥ 1, p ≥ f + 1 and n ≥ f + 2; got p = {p}, f = {f}, n = {n}")));
    }
    Ok(())
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum::<u64>() % p).collect()).collect()
}

impl ExtremalGroup {
    fn build(p: u64, f: usize, n: u32, quotient: bool) -> Result<Self> {
        check_parameters(p, f, n)?;
        let d = f + 1;
        let identity: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
        // α⁻¹ sends x_i to Σ_{j ≥ i} (−1)^{j−i} x_j.
        let alpha_inv: Vec<Vec<u64>> =
            (0..d).map(|i| (0..d).map(|j| if j < i { 0 } else if (j - i) % 2 == 0 { 1 } else { p - 1 }).collect()).collect();
        let mut inverse_powers = vec![identity];
        for k in 1..p as usize {
            let next = mat_mul(&inverse_powers[k - 1], &alpha_inv, p);
            inverse_powers.push(next);
        }
        let g_log = n - f as u32 - u32::from(quotient);
        Ok(ExtremalGroup { p, f, n, g_order: p.pow(g_log), quotient, inverse_powers })
    }

    /// The semidirect product P of order p^{n+1}.
    pub fn stage_one(p: u64, f: usize, n: u32) -> Result<Self> {
        Self::build(p, f, n, false)
    }

    /// P / ⟨g^{p^{n−f−1}} x_{f+1}^{−1}⟩, of order p^n.
    pub fn stage_two(p: u64, f: usize, n: u32) -> Result<Self> {
        Self::build(p, f, n, true)
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_quotient(&self) -> bool {
        self.quotient
    }

    pub fn basis_element(&self, i: usize) -> Elem {
        let mut v = vec![0; self.f + 2];
        v[i] = 1;
        v
    }

    pub fn g(&self) -> Elem {
        self.basis_element(self.f + 1)
    }

    /// b·α^{−k}.
    fn act(&self, b: &[u64], k: u64) -> Vec<u64> {
        let m = &self.inverse_powers[(k % self.p) as usize];
        let d = self.f + 1;
        (0..d).map(|j| (0..d).map(|i| b[i] * m[i][j]).sum::<u64>() % self.p).collect()
    }

    /// Normal form of a·g^k for any k ≥ 0.
    fn reduce(&self, mut a: Vec<u64>, k: u64) -> Elem {
        if self.quotient {
            // g^{p^{n−f−1}} = x_{f+1}, which is central.
            let carry = (k / self.g_order) % self.p;
            a[self.f] = (a[self.f] + carry) % self.p;
        }
        a.push(k % self.g_order);
        a
    }
}

impl FiniteGroup for ExtremalGroup {
    fn p(&self) -> u64 {
        self.p
    }

    fn order_log(&self) -> u32 {
        self.n + u32::from(!self.quotient)
    }

    fn identity(&self) -> Elem {
        vec![0; self.f + 2]
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let d = self.f + 1;
        let (k, l) = (a[d], b[d]);
        let moved = self.act(&b[..d], k);
        let sum: Vec<u64> = a[..d].iter().zip(&moved).map(|(x, y)| (x + y) % self.p).collect();
        self.reduce(sum, k + l)
    }

    fn inv(&self, a: &[u64]) -> Elem {
        // (a, k)⁻¹ = (−a·α^k, −k); α^k = α^{−(p−k)}.
        let d = self.f + 1;
        let k = a[d];
        let neg: Vec<u64> = a[..d].iter().map(|&x| (self.p - x) % self.p).collect();
        let moved = self.act(&neg, (self.p - k % self.p) % self.p);
        let full = if self.quotient { self.g_order * self.p } else { self.g_order };
        self.reduce(moved, (full - k) % full)
    }

    fn index(&self, a: &[u64]) -> u64 {
        let d = self.f + 1;
        a[..d].iter().fold(0, |acc, &c| acc * self.p + c) * self.g_order + a[d]
    }

    fn element(&self, idx: u64) -> Elem {
        let d = self.f + 1;
        let mut v = vec![0; d + 1];
        v[d] = idx % self.g_order;
        let mut rest = idx / self.g_order;
        for i in (0..d).rev() {
            v[i] = rest % self.p;
            rest /= self.p;
        }
        v
    }

    fn generators(&self) -> Vec<Elem> {
        (0..self.f + 2).map(|i| self.basis_element(i)).collect()
    }
}

pub fn extremal_group(p: u64, f: usize, n: u32) -> Result<(ExtremalGroup, ExtremalGroup)> {
    Ok((ExtremalGroup::stage_one(p, f, n)?, ExtremalGroup::stage_two(p, f, n)?))
}

/// Pairs (k, a) with (g^k a)^{p²} ≠ g^{kp²}, over every k below the order of g and a ∈ A.
pub fn power_lemma_failures(group: &ExtremalGroup) -> Vec<(u64, Vec<u64>)> {
    let p = group.p;
    let d = group.f + 1;
    let mut failures = Vec::new();
    let g = group.g();
    for k in 0..group.g_order {
        let gk = group.pow(&g, k);
        let target = group.pow(&gk, p * p);
        for code in 0..p.pow(d as u32) {
            let mut a = group.element(code * group.g_order);
            a[d] = 0;
            if group.pow(&group.mul(&gk, &a), p * p) != target {
                failures.push((k, a[..d].to_vec()));
            }
        }
    }
    failures
}

/// γ_i(P) compared with ⟨x_i, ..., x_{f+1}⟩ for 2 ≤ i ≤ f+2; returns (i, equal).
pub fn lower_central_matches(group: &ExtremalGroup) -> Result<Vec<(usize, bool)>> {
    let series = lower_central_series(group)?;
    let d = group.f + 1;
    let trivial = GroupSubset::trivial(group);
    Ok((2..=d + 1)
        .map(|i| {
            let expected = closure(group, &(i - 1..d).map(|j| group.basis_element(j)).collect::<Vec<_>>());
            let actual = series.get(i - 1).unwrap_or(&trivial);
            (i, actual.same_as(&expected))
        })
        .collect())
}
