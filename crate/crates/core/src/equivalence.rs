//! The equivalence σ ~ τ on nilpotent derivations of Der(U)_z: there are a Lie
//! automorphism π with z·π = α·z and an element x with σπ = π(ad_x + ατ).
//!
//! Equivalently τ ≡ α⁻¹π⁻¹σπ modulo inner derivations, so the relation is the orbit
//! relation of the moves σ ↦ α⁻¹π⁻¹σπ (π ranging over Aut(U)_⟨z⟩, with α bound to π)
//! and σ ↦ σ + ad_x. Orbits are computed by union-find over the sorted state codes.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivation::{inner_subgroup, nilpotent_derivation_codes};
use crate::error::{Error, Result};
use crate::graded::{inner_derivation, is_lie_automorphism, line_scalar, GradedMatrix, HomLayout};
use crate::liering::LieRing;
use crate::residue::{inverse_mod, unit_generator, GroupElement};
use crate::search::for_each_lie_aut_fixing_line;
use crate::subgroup::Subgroup;

pub const DEFAULT_SEED: u64 = 0x5eed_c0e7;

/// Seed for all sampling, overridable through COEXLAB_SEED.
pub fn sampling_seed() -> u64 {
    std::env::var("COEXLAB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub pi: GradedMatrix,
    pub alpha: u64,
    pub x: GroupElement,
}

/// A Lie automorphism fixing ⟨z⟩, prepared for the action τ ↦ α⁻¹π⁻¹τπ.
#[derive(Debug, Clone)]
pub struct AutMove {
    pub pi: Vec<u64>,
    pub pi_inv: Vec<u64>,
    pub alpha: u64,
    pub alpha_inv: u64,
}

pub struct Engine {
    ring: LieRing,
    z: GroupElement,
    layout: HomLayout,
    inner: Subgroup,
    mu: u32,
}

impl Engine {
    pub fn new(ring: &LieRing, z: &GroupElement) -> Result<Self> {
        ring.ty().check(z)?;
        if !ring.is_central(z) {
            return Err(Error::InvalidElement("z is not central".into()));
        }
        Ok(Engine {
            ring: ring.clone(),
            z: z.clone(),
            layout: HomLayout::new(ring.ty()),
            inner: inner_subgroup(ring),
            mu: ring.ty().element_order_log(z),
        })
    }

    pub fn ring(&self) -> &LieRing {
        &self.ring
    }

    pub fn layout(&self) -> &HomLayout {
        &self.layout
    }

    pub fn prepare(&self, pi: &[u64]) -> Option<AutMove> {
        let zi = self.layout.apply(&self.z.0, pi);
        let alpha = line_scalar(self.ring.ty(), &self.z, &zi)?;
        let q = self.ring.p().pow(self.mu.max(1));
        Some(AutMove {
            pi: pi.to_vec(),
            pi_inv: self.layout.inverse(pi)?,
            alpha,
            alpha_inv: inverse_mod(alpha, q)?,
        })
    }

    /// α⁻¹π⁻¹τπ.
    pub fn act(&self, mv: &AutMove, tau: &[u64], tmp: &mut [u64], out: &mut [u64]) {
        self.layout.mul_into(&mv.pi_inv, tau, tmp);
        self.layout.mul_into(tmp, &mv.pi, out);
        self.layout.scale_in_place(mv.alpha_inv, out);
    }

    /// Canonical representative of τ + Inn, as a code.
    pub fn canonical_mod_inner(&self, tau: &[u64]) -> u64 {
        let reduced = self.inner.reduce(&self.layout.to_digits(tau));
        self.layout.encode(&self.layout.from_digits(&reduced))
    }

    pub fn inner_generators(&self) -> Vec<Vec<u64>> {
        (0..self.ring.rank())
            .map(|k| inner_derivation(&self.ring, &self.ring.ty().basis(k)).entries().to_vec())
            .collect()
    }

    /// Elementary and diagonal automorphisms fixing ⟨z⟩, plus `extra` random ones.
    pub fn generator_moves(&self, extra: usize, seed: u64) -> Vec<AutMove> {
        let ty = self.ring.ty();
        let r = ty.rank();
        let p = ty.p();
        let mut cands: Vec<Vec<u64>> = Vec::new();
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                let s = self.layout.step(i * r + j);
                for v in [s, s * p] {
                    if v < ty.modulus(j) {
                        let mut m = self.layout.identity();
                        m[i * r + j] = v;
                        cands.push(m);
                    }
                }
            }
        }
        for mask in 1u32..(1 << r) {
            let mut m = self.layout.identity();
            for i in 0..r {
                if mask & (1 << i) != 0 {
                    m[i * r + i] = unit_generator(p, ty.exponents()[i]) % ty.modulus(i);
                }
            }
            cands.push(m);
        }
        let mut moves: Vec<AutMove> = cands
            .into_iter()
            .filter(|m| self.is_aut(m))
            .filter_map(|m| self.prepare(&m))
            .collect();
        moves.extend(self.random_moves(extra, seed));
        moves
    }

    fn is_aut(&self, m: &[u64]) -> bool {
        let gm = GradedMatrix::new(self.ring.ty(), m.to_vec()).expect("graded");
        is_lie_automorphism(&self.ring, &gm, Some(&self.z))
    }

    /// Uniform samples from Aut(U)_⟨z⟩ by rejection: rows are uniform graded rows, except
    /// that a generator row proportional to z is drawn as a uniform unit multiple of z.
    pub fn random_moves(&self, count: usize, seed: u64) -> Vec<AutMove> {
        let ty = self.ring.ty();
        let r = ty.rank();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let support: Vec<usize> = self.z.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, _)| k).collect();
        let pure = (support.len() == 1 && ty.element_order_log(&self.z) == ty.exponents()[support[0]])
            .then(|| support[0]);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut m = vec![0u64; r * r];
            for (idx, x) in m.iter_mut().enumerate() {
                let s = self.layout.step(idx);
                *x = rng.gen_range(0..ty.modulus(idx % r) / s) * s;
            }
            if let Some(k) = pure {
                let q = ty.modulus(k);
                let alpha = loop {
                    let a = rng.gen_range(1..q);
                    if a % ty.p() != 0 {
                        break a;
                    }
                };
                let row = ty.scale(alpha, &self.z);
                m[k * r..(k + 1) * r].copy_from_slice(&row.0);
            }
            if self.is_aut(&m) {
                if let Some(mv) = self.prepare(&m) {
                    out.push(mv);
                }
            }
        }
        out
    }

    /// Union-find orbits of the sorted state codes under the given moves and inner shifts.
    pub fn partition(&self, states: Vec<u64>, moves: &[AutMove]) -> Result<OrbitPartition> {
        let n = states.len();
        let mut uf = UnionFind::new(n);
        let len = self.layout.len();
        let (mut cur, mut tmp, mut out) = (vec![0u64; len], vec![0u64; len], vec![0u64; len]);
        let inner = self.inner_generators();
        let lookup = |code: u64| -> Result<usize> {
            states
                .binary_search(&code)
                .map_err(|_| Error::Mismatch("move left the set of nilpotent centralizing derivations".into()))
        };
        for idx in 0..n {
            self.layout.decode_into(states[idx], &mut cur);
            for mv in moves {
                self.act(mv, &cur, &mut tmp, &mut out);
                uf.union(idx, lookup(self.layout.encode(&out))?);
            }
            for ad in &inner {
                let shifted = self.layout.add(&cur, ad);
                uf.union(idx, lookup(self.layout.encode(&shifted))?);
            }
        }
        Ok(OrbitPartition::from_union_find(states, &mut uf))
    }

    /// The full automorphism group Aut(U)_⟨z⟩, one move at a time.
    pub fn for_each_full_move<F>(&self, mut visit: F) -> Result<()>
    where
        F: FnMut(&AutMove) -> ControlFlow<()>,
    {
        for_each_lie_aut_fixing_line(&self.ring, &self.z, |m, _| {
            let mv = self.prepare(m).expect("automorphisms are invertible");
            visit(&mv)
        })
    }

    /// x with ad_x = d, by search over the ring.
    fn inner_source(&self, d: &[u64]) -> Option<GroupElement> {
        self.ring.ty().elements().find(|x| inner_derivation(&self.ring, x).entries() == d)
    }

    pub fn witness_holds(&self, sigma: &[u64], tau: &[u64], w: &EquivalenceWitness) -> bool {
        let ad = inner_derivation(&self.ring, &w.x);
        let mut at = tau.to_vec();
        self.layout.scale_in_place(w.alpha, &mut at);
        let rhs = self.layout.mul(w.pi.entries(), &self.layout.add(ad.entries(), &at));
        let lhs = self.layout.mul(sigma, w.pi.entries());
        let zi = self.layout.apply(&self.z.0, w.pi.entries());
        lhs == rhs
            && zi == self.ring.ty().scale(w.alpha, &self.z).0
            && is_lie_automorphism(&self.ring, &w.pi, Some(&self.z))
    }

    /// Searches the full automorphism group for a witness of σ ~ τ.
    pub fn equivalent_direct(&self, sigma: &[u64], tau: &[u64]) -> Result<Option<EquivalenceWitness>> {
        let target = self.canonical_mod_inner(tau);
        let len = self.layout.len();
        let (mut tmp, mut out) = (vec![0u64; len], vec![0u64; len]);
        let mut found = None;
        self.for_each_full_move(|mv| {
            self.act(mv, sigma, &mut tmp, &mut out);
            if self.canonical_mod_inner(&out) == target {
                found = Some(mv.clone());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        let Some(mv) = found else { return Ok(None) };
        // π⁻¹σπ = ad_x + ατ.
        let conj = self.layout.mul(&self.layout.mul(&mv.pi_inv, sigma), &mv.pi);
        let mut at = tau.to_vec();
        self.layout.scale_in_place(mv.alpha, &mut at);
        let d = self.layout.sub(&conj, &at);
        let x = self.inner_source(&d).ok_or_else(|| Error::Mismatch("inner part has no source".into()))?;
        let w = EquivalenceWitness { pi: GradedMatrix::new(self.ring.ty(), mv.pi).expect("graded"), alpha: mv.alpha, x };
        debug_assert!(self.witness_holds(sigma, tau, &w));
        Ok(Some(w))
    }

    /// One pass over the full automorphism group: every image of every representative
    /// must stay in its orbit, and no image may fall into another representative's
    /// coset modulo inner derivations.
    pub fn full_group_audit(&self, partition: &OrbitPartition, reps: &[Vec<u64>]) -> Result<AuditReport> {
        let len = self.layout.len();
        let (mut tmp, mut out) = (vec![0u64; len], vec![0u64; len]);
        let rep_classes: Vec<usize> = reps
            .iter()
            .map(|m| partition.class_of_code(self.layout.encode(m)).ok_or_else(|| Error::Mismatch("representative is not a state".into())))
            .collect::<Result<_>>()?;
        let canon: Vec<u64> = reps.iter().map(|m| self.canonical_mod_inner(m)).collect();
        let mut report = AuditReport::default();
        self.for_each_full_move(|mv| {
            report.automorphisms += 1;
            for (i, sigma) in reps.iter().enumerate() {
                self.act(mv, sigma, &mut tmp, &mut out);
                let code = self.layout.encode(&out);
                if partition.class_of_code(code) != Some(rep_classes[i]) {
                    report.orbit_escapes += 1;
                }
                let c = self.canonical_mod_inner(&out);
                if canon.iter().enumerate().any(|(j, &cj)| j != i && cj == c) {
                    report.cross_equivalences += 1;
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(report)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub automorphisms: u64,
    pub orbit_escapes: u64,
    pub cross_equivalences: u64,
}

pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
    }
}

#[derive(Debug, Clone)]
pub struct OrbitPartition {
    /// Sorted state codes.
    pub states: Vec<u64>,
    pub class_of: Vec<u32>,
    pub sizes: Vec<u64>,
    /// Least code in each class; classes are numbered by increasing representative.
    pub representatives: Vec<u64>,
}

impl OrbitPartition {
    fn from_union_find(states: Vec<u64>, uf: &mut UnionFind) -> Self {
        let n = states.len();
        let mut root_class = std::collections::HashMap::new();
        let mut class_of = vec![0u32; n];
        let mut sizes = Vec::new();
        let mut representatives = Vec::new();
        // States are sorted, so the first state seen in a class is its least code.
        for idx in 0..n {
            let root = uf.find(idx);
            let next = root_class.len() as u32;
            let c = *root_class.entry(root).or_insert(next);
            if c as usize == sizes.len() {
                sizes.push(0);
                representatives.push(states[idx]);
            }
            sizes[c as usize] += 1;
            class_of[idx] = c;
        }
        OrbitPartition { states, class_of, sizes, representatives }
    }

    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn class_of_code(&self, code: u64) -> Option<usize> {
        self.states.binary_search(&code).ok().map(|i| self.class_of[i] as usize)
    }
}

/// Orbits of the nilpotent members of Der(U)_z under the ~ moves.
pub fn orbit_partition(u: &LieRing, z: &GroupElement) -> Result<OrbitPartition> {
    orbit_partition_with(u, z, 4, sampling_seed())
}

pub fn orbit_partition_with(u: &LieRing, z: &GroupElement, random: usize, seed: u64) -> Result<OrbitPartition> {
    let engine = Engine::new(u, z)?;
    let states = nilpotent_derivation_codes(u, z)?;
    let moves = engine.generator_moves(random, seed);
    engine.partition(states, &moves)
}

pub fn equivalent_direct(
    u: &LieRing,
    z: &GroupElement,
    sigma: &GradedMatrix,
    tau: &GradedMatrix,
) -> Result<Option<EquivalenceWitness>> {
    Engine::new(u, z)?.equivalent_direct(sigma.entries(), tau.entries())
}

/// Whether the Lie automorphism group acts transitively on central elements of
/// maximal additive order.
pub fn central_transitivity_check(u: &LieRing) -> Result<bool> {
    let ty = u.ty();
    let mu = ty.exponent_log();
    let center = u.center();
    let targets: Vec<GroupElement> = center
        .elements()
        .into_iter()
        .map(GroupElement)
        .filter(|c| ty.element_order_log(c) == mu)
        .collect();
    let Some(first) = targets.first() else { return Ok(true) };
    for t in &targets {
        if crate::search::automorphism_moving(u, first, t)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{ring_v, ring_w, ring_x};

    fn z() -> GroupElement {
        GroupElement(vec![1, 0, 0])
    }

    #[test]
    fn spec_orbit_counts_at_five() {
        assert_eq!(orbit_partition(&ring_v(5), &z()).unwrap().class_count(), 11);
        assert_eq!(orbit_partition(&ring_w(5), &z()).unwrap().class_count(), 26);
        assert_eq!(orbit_partition(&ring_x(5), &z()).unwrap().class_count(), 18);
    }

    #[test]
    fn sizes_sum_to_state_count() {
        let part = orbit_partition(&ring_w(5), &z()).unwrap();
        assert_eq!(part.sizes.iter().sum::<u64>() as usize, part.states.len());
    }

    #[test]
    fn reflexive_witness() {
        let v = ring_v(5);
        let sigma = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![5, 0, 1], vec![0, 0, 0]]).unwrap();
        let w = equivalent_direct(&v, &z(), &sigma, &sigma).unwrap().unwrap();
        assert!(Engine::new(&v, &z()).unwrap().witness_holds(sigma.entries(), sigma.entries(), &w));
    }

    #[test]
    fn spec_direct_examples() {
        let x = ring_x(5);
        let rho1 = GradedMatrix::from_rows(x.ty(), &[vec![0, 0, 0], vec![0, 0, 0], vec![0, 5, 0]]).unwrap();
        let rho2 = GradedMatrix::from_rows(x.ty(), &[vec![0, 0, 0], vec![0, 5, 0], vec![5, 5, 0]]).unwrap();
        assert!(equivalent_direct(&x, &z(), &rho1, &rho2).unwrap().is_none());
        // V case 1: b1 ≡ d1 ≢ 0 with a-entries zero are all equivalent.
        let v = ring_v(5);
        let s = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![0, 0, 0], vec![10, 0, 0]]).unwrap();
        let t = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![5, 0, 0], vec![10, 0, 0]]).unwrap();
        let w = equivalent_direct(&v, &z(), &s, &t).unwrap().expect("equivalent");
        assert!(Engine::new(&v, &z()).unwrap().witness_holds(s.entries(), t.entries(), &w));
    }

    #[test]
    fn spec_transitivity() {
        for ring in [ring_v(5), ring_w(5), ring_x(5)] {
            assert!(central_transitivity_check(&ring).unwrap());
        }
    }

    #[test]
    fn alpha_reduction_is_sound() {
        let v = ring_v(5);
        let engine = Engine::new(&v, &z()).unwrap();
        let states = nilpotent_derivation_codes(&v, &z()).unwrap();
        let moves = engine.random_moves(5, 7);
        let len = engine.layout().len();
        for mv in &moves {
            let mut shifted = mv.clone();
            shifted.alpha_inv = mv.alpha_inv + 25;
            for &code in states.iter().step_by(101) {
                let tau = engine.layout().decode(code);
                let (mut t1, mut o1, mut t2, mut o2) = (vec![0; len], vec![0; len], vec![0; len], vec![0; len]);
                engine.act(mv, &tau, &mut t1, &mut o1);
                engine.act(&shifted, &tau, &mut t2, &mut o2);
                assert_eq!(o1, o2);
            }
        }
    }
}
