//! Finite p-groups given by an explicit multiplication on coordinate vectors, with
//! subgroup closures, series, Ω/℧ invariants and the regularity test.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::residue::{dual_partition, TypeInvariants};

pub type Elem = Vec<u64>;

/// A finite p-group whose elements are numbered 0..p^order_log.
pub trait FiniteGroup {
    fn p(&self) -> u64;
    fn order_log(&self) -> u32;
    fn identity(&self) -> Elem;
    fn mul(&self, a: &[u64], b: &[u64]) -> Elem;
    fn inv(&self, a: &[u64]) -> Elem;
    fn index(&self, a: &[u64]) -> u64;
    fn element(&self, idx: u64) -> Elem;
    fn generators(&self) -> Vec<Elem>;

    fn size(&self) -> u64 {
        self.p().pow(self.order_log())
    }

    fn pow(&self, a: &[u64], mut k: u64) -> Elem {
        let mut base = a.to_vec();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// a⁻¹b⁻¹ab.
    fn comm(&self, a: &[u64], b: &[u64]) -> Elem {
        let l = self.mul(&self.inv(a), &self.inv(b));
        self.mul(&self.mul(&l, a), b)
    }

    /// g⁻¹ag.
    fn conj(&self, a: &[u64], g: &[u64]) -> Elem {
        self.mul(&self.mul(&self.inv(g), a), g)
    }

    fn is_identity(&self, a: &[u64]) -> bool {
        a == self.identity().as_slice()
    }
}

/// A subgroup as an explicit element set with the generators added so far.
#[derive(Debug, Clone)]
pub struct GroupSubset {
    members: HashSet<u64>,
    elems: Vec<Elem>,
    gens: Vec<Elem>,
}

impl GroupSubset {
    pub fn trivial<G: FiniteGroup + ?Sized>(g: &G) -> Self {
        let e = g.identity();
        GroupSubset { members: HashSet::from([g.index(&e)]), elems: vec![e], gens: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }

    pub fn order_log(&self, p: u64) -> u32 {
        let mut n = self.elems.len() as u64;
        let mut k = 0;
        while n > 1 {
            n /= p;
            k += 1;
        }
        k
    }

    pub fn contains_index(&self, idx: u64) -> bool {
        self.members.contains(&idx)
    }

    pub fn contains<G: FiniteGroup + ?Sized>(&self, g: &G, x: &[u64]) -> bool {
        self.members.contains(&g.index(x))
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    pub fn is_subset_of(&self, other: &GroupSubset) -> bool {
        self.members.iter().all(|i| other.members.contains(i))
    }

    pub fn same_as(&self, other: &GroupSubset) -> bool {
        self.members == other.members
    }

    /// Enlarges to ⟨self, x⟩; returns whether anything changed.
    pub fn add<G: FiniteGroup + ?Sized>(&mut self, g: &G, x: &[u64]) -> bool {
        if self.contains(g, x) {
            return false;
        }
        self.gens.push(x.to_vec());
        let mut k = 0;
        while k < self.elems.len() {
            for s in 0..self.gens.len() {
                let y = g.mul(&self.elems[k], &self.gens[s]);
                if self.members.insert(g.index(&y)) {
                    self.elems.push(y);
                }
            }
            k += 1;
        }
        true
    }
}

pub fn closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[Elem]) -> GroupSubset {
    let mut h = GroupSubset::trivial(g);
    for x in gens {
        h.add(g, x);
    }
    h
}

/// Smallest subgroup containing `gens` and closed under conjugation by `by`.
pub fn normal_closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[Elem], by: &[Elem]) -> GroupSubset {
    let mut h = closure(g, gens);
    let mut k = 0;
    while k < h.gens.len() {
        for y in by {
            let c = g.conj(&h.gens[k], y);
            h.add(g, &c);
        }
        k += 1;
    }
    h
}

/// [A, G] for a normal subgroup A.
pub fn commutator_with_group<G: FiniteGroup + ?Sized>(g: &G, a: &GroupSubset) -> GroupSubset {
    let gens = g.generators();
    let comms: Vec<Elem> = a.gens.iter().flat_map(|x| gens.iter().map(|y| g.comm(x, y))).collect();
    normal_closure(g, &comms, &gens)
}

pub fn whole<G: FiniteGroup + ?Sized>(g: &G) -> GroupSubset {
    closure(g, &g.generators())
}

/// γ₁ = G ⊇ γ₂ ⊇ ... ending in the trivial group.
pub fn lower_central_series<G: FiniteGroup + ?Sized>(g: &G) -> Result<Vec<GroupSubset>> {
    let mut series = vec![whole(g)];
    while !series.last().expect("nonempty").is_trivial() {
        if series.len() > g.order_log() as usize + 1 {
            return Err(Error::NotNilpotent);
        }
        let next = commutator_with_group(g, series.last().expect("nonempty"));
        if next.len() == series.last().expect("nonempty").len() {
            return Err(Error::NotNilpotent);
        }
        series.push(next);
    }
    Ok(series)
}

/// Nilpotency class from generators alone: [γ_k, G] is the normal closure of the
/// commutators of generators of γ_k with generators of G.
pub fn class<G: FiniteGroup + ?Sized>(g: &G) -> Result<usize> {
    let gens = g.generators();
    if gens.iter().all(|x| g.is_identity(x)) {
        return Ok(0);
    }
    let mut layer = gens.clone();
    for k in 1..=g.order_log() as usize {
        let comms: Vec<Elem> = layer.iter().flat_map(|x| gens.iter().map(|y| g.comm(x, y))).collect();
        let next = normal_closure(g, &comms, &gens);
        if next.is_trivial() {
            return Ok(k);
        }
        layer = next.gens;
    }
    Err(Error::NotNilpotent)
}

fn require_scannable<G: FiniteGroup + ?Sized>(g: &G) -> Result<()> {
    if g.order_log() > 7 {
        return Err(Error::TooLarge(format!("group of order p^{} exceeds p^7", g.order_log())));
    }
    Ok(())
}

/// Power chains x, x^p, x^{p²}, ... of every element, as indices.
pub struct PowerTable {
    p: u64,
    /// chains[idx][i] = index of x^{p^i}, up to the identity.
    chains: Vec<Vec<u64>>,
    identity: u64,
}

impl PowerTable {
    pub fn new<G: FiniteGroup + ?Sized>(g: &G) -> Result<Self> {
        require_scannable(g)?;
        let identity = g.index(&g.identity());
        let chains = (0..g.size())
            .map(|idx| {
                let mut x = g.element(idx);
                let mut chain = vec![idx];
                while *chain.last().expect("nonempty") != identity {
                    x = g.pow(&x, g.p());
                    chain.push(g.index(&x));
                }
                chain
            })
            .collect();
        Ok(PowerTable { p: g.p(), chains, identity })
    }

    /// log_p of the order of element idx.
    pub fn order_log(&self, idx: u64) -> u32 {
        (self.chains[idx as usize].len() - 1) as u32
    }

    pub fn exponent_log(&self) -> u32 {
        (0..self.chains.len() as u64).map(|i| self.order_log(i)).max().unwrap_or(0)
    }

    pub fn power(&self, idx: u64, i: u32) -> u64 {
        self.chains[idx as usize].get(i as usize).copied().unwrap_or(self.identity)
    }

    /// Ω_i: generated by the elements of order dividing p^i.
    pub fn omega<G: FiniteGroup + ?Sized>(&self, g: &G, i: u32) -> GroupSubset {
        let mut h = GroupSubset::trivial(g);
        for idx in 0..self.chains.len() as u64 {
            if self.order_log(idx) <= i && !h.contains_index(idx) {
                h.add(g, &g.element(idx));
            }
        }
        h
    }

    /// ℧_i: generated by the p^i-th powers.
    pub fn mho<G: FiniteGroup + ?Sized>(&self, g: &G, i: u32) -> GroupSubset {
        let mut h = GroupSubset::trivial(g);
        for idx in 0..self.chains.len() as u64 {
            let q = self.power(idx, i);
            if !h.contains_index(q) {
                h.add(g, &g.element(q));
            }
        }
        h
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupInvariants {
    pub order_log: u32,
    pub exponent_log: u32,
    pub coexponent: u32,
    pub class: usize,
    /// log_p |Ω_i| for i = 0..=exponent.
    pub omega_logs: Vec<u32>,
    /// log_p |℧_i| for i = 0..=exponent.
    pub mho_logs: Vec<u32>,
    /// The type invariants read off the Ω-layers.
    pub invariants: TypeInvariants,
}

impl GroupInvariants {
    /// |Ω_i/Ω_{i−1}| = |℧_{i−1}/℧_i| for every i.
    pub fn duality_holds(&self) -> bool {
        (1..=self.exponent_log as usize)
            .all(|i| self.omega_logs[i] - self.omega_logs[i - 1] == self.mho_logs[i - 1] - self.mho_logs[i])
    }
}

pub fn group_invariants<G: FiniteGroup + ?Sized>(g: &G) -> Result<GroupInvariants> {
    let table = PowerTable::new(g)?;
    invariants_with(g, &table)
}

pub fn invariants_with<G: FiniteGroup + ?Sized>(g: &G, table: &PowerTable) -> Result<GroupInvariants> {
    let e = table.exponent_log();
    let p = g.p();
    let omega_logs: Vec<u32> = (0..=e).map(|i| table.omega(g, i).order_log(p)).collect();
    let mho_logs: Vec<u32> = (0..=e).map(|i| table.mho(g, i).order_log(p)).collect();
    let omega: Vec<u32> = omega_logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sorted = omega.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mu = dual_partition(&sorted);
    Ok(GroupInvariants {
        order_log: g.order_log(),
        exponent_log: e,
        coexponent: g.order_log() - e,
        class: class(g)?,
        omega_logs,
        mho_logs,
        invariants: TypeInvariants { mu, omega, exponent: e, coexponent: g.order_log() - e },
    })
}

/// Exponent and class only; cheaper than the full invariants.
pub fn exponent_log<G: FiniteGroup + ?Sized>(g: &G) -> Result<u32> {
    require_scannable(g)?;
    let p = g.p();
    let mut best = 0;
    for idx in 0..g.size() {
        let mut x = g.element(idx);
        let mut k = 0;
        while !g.is_identity(&x) {
            x = g.pow(&x, p);
            k += 1;
        }
        best = best.max(k);
    }
    Ok(best)
}

/// For 1 ≤ i ≤ μ₁ − 1 with ω_{i+1} ≥ 2: [℧_i, G, ..., G] (ω_{i+1} − 1 factors G) ⊆ ℧_{i+1}.
/// Returns (i, holds) for each admissible i.
pub fn inclusion_claim<G: FiniteGroup + ?Sized>(g: &G, table: &PowerTable) -> Result<Vec<(u32, bool)>> {
    let inv = invariants_with(g, table)?;
    let omega = &inv.invariants.omega;
    let mut out = Vec::new();
    for i in 1..inv.exponent_log {
        let w = omega[i as usize];
        if w < 2 {
            continue;
        }
        let mut a = table.mho(g, i);
        for _ in 0..w - 1 {
            a = commutator_with_group(g, &a);
        }
        out.push((i, a.is_subset_of(&table.mho(g, i + 1))));
    }
    Ok(out)
}

/// Whether x^p y^p = (xy)^p z for some z in ℧₁(γ₂(⟨x, y⟩)).
pub fn regular_pair<G: FiniteGroup + ?Sized>(g: &G, x: &[u64], y: &[u64]) -> bool {
    let p = g.p();
    let xy = g.mul(x, y);
    let z = g.mul(&g.inv(&g.pow(&xy, p)), &g.mul(&g.pow(x, p), &g.pow(y, p)));
    if g.is_identity(&z) {
        return true;
    }
    let derived = normal_closure(g, &[g.comm(x, y)], &[x.to_vec(), y.to_vec()]);
    let powers: Vec<Elem> = derived.elements().iter().map(|c| g.pow(c, p)).collect();
    closure(g, &powers).contains(g, &z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairPolicy {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

impl PairPolicy {
    /// Exhaustive up to order p⁴, otherwise `pairs` pseudo-random pairs.
    pub fn default_for<G: FiniteGroup + ?Sized>(g: &G, pairs: usize, seed: u64) -> Self {
        if g.order_log() <= 4 {
            PairPolicy::Exhaustive
        } else {
            PairPolicy::Sampled { pairs, seed }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegularityReport {
    pub tested: usize,
    pub failures: Vec<(u64, u64)>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn regularity_check<G: FiniteGroup + ?Sized>(g: &G, policy: PairPolicy) -> RegularityReport {
    let mut report = RegularityReport::default();
    let mut test = |a: u64, b: u64| {
        report.tested += 1;
        if !regular_pair(g, &g.element(a), &g.element(b)) {
            report.failures.push((a, b));
        }
    };
    match policy {
        PairPolicy::Exhaustive => {
            for a in 0..g.size() {
                for b in 0..g.size() {
                    test(a, b);
                }
            }
        }
        PairPolicy::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let (a, b) = (rng.gen_range(0..g.size()), rng.gen_range(0..g.size()));
                test(a, b);
            }
        }
    }
    report
}

/// Associativity on every triple, through a full multiplication table.
pub fn associative_exhaustive<G: FiniteGroup + ?Sized>(g: &G) -> bool {
    let n = g.size() as usize;
    let elems: Vec<Elem> = (0..n as u64).map(|i| g.element(i)).collect();
    let table: Vec<u32> = elems.iter().flat_map(|a| elems.iter().map(|b| g.index(&g.mul(a, b)) as u32)).collect();
    for a in 0..n {
        for b in 0..n {
            let ab = table[a * n + b] as usize;
            for c in 0..n {
                if table[ab * n + c] != table[a * n + table[b * n + c] as usize] {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of failing triples among `count` uniform samples.
pub fn associativity_failures<G: FiniteGroup + ?Sized>(g: &G, count: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.size();
    (0..count)
        .filter(|_| {
            let [a, b, c] = [0; 3].map(|_| g.element(rng.gen_range(0..n)));
            g.mul(&g.mul(&a, &b), &c) != g.mul(&a, &g.mul(&b, &c))
        })
        .count()
}

/// Identity and inverse laws on every element.
pub fn identity_and_inverse_hold<G: FiniteGroup + ?Sized>(g: &G) -> bool {
    let e = g.identity();
    (0..g.size()).all(|i| {
        let x = g.element(i);
        g.mul(&x, &e) == x && g.mul(&e, &x) == x && g.is_identity(&g.mul(&x, &g.inv(&x)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z/p^a × Z/p^b written additively.
    struct Abelian2 {
        p: u64,
        a: u32,
        b: u32,
    }

    impl FiniteGroup for Abelian2 {
        fn p(&self) -> u64 {
            self.p
        }
        fn order_log(&self) -> u32 {
            self.a + self.b
        }
        fn identity(&self) -> Elem {
            vec![0, 0]
        }
        fn mul(&self, x: &[u64], y: &[u64]) -> Elem {
            vec![(x[0] + y[0]) % self.p.pow(self.a), (x[1] + y[1]) % self.p.pow(self.b)]
        }
        fn inv(&self, x: &[u64]) -> Elem {
            vec![(self.p.pow(self.a) - x[0]) % self.p.pow(self.a), (self.p.pow(self.b) - x[1]) % self.p.pow(self.b)]
        }
        fn index(&self, x: &[u64]) -> u64 {
            x[0] * self.p.pow(self.b) + x[1]
        }
        fn element(&self, idx: u64) -> Elem {
            vec![idx / self.p.pow(self.b), idx % self.p.pow(self.b)]
        }
        fn generators(&self) -> Vec<Elem> {
            vec![vec![1, 0], vec![0, 1]]
        }
    }

    #[test]
    fn abelian_invariants() {
        let g = Abelian2 { p: 3, a: 3, b: 1 };
        let inv = group_invariants(&g).unwrap();
        assert_eq!(inv.exponent_log, 3);
        assert_eq!(inv.class, 1);
        assert_eq!(inv.omega_logs, vec![0, 2, 3, 4]);
        assert_eq!(inv.invariants.mu, vec![3, 1]);
        assert!(inv.duality_holds());
        assert!(regularity_check(&g, PairPolicy::Exhaustive).passed());
        assert!(associative_exhaustive(&g) && identity_and_inverse_hold(&g));
    }

    #[test]
    fn closure_orders() {
        let g = Abelian2 { p: 5, a: 2, b: 1 };
        assert_eq!(closure(&g, &[vec![5, 0], vec![0, 1]]).len(), 25);
        assert_eq!(closure(&g, &[vec![1, 0]]).len(), 25);
        assert_eq!(closure(&g, &[]).len(), 1);
    }
}
