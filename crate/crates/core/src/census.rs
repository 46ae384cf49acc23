//! Counting nilpotent Lie rings of coexponent 3 by additive type.
//!
//! Type (2,1): rings U(n−3, w, σ, z) over the three rings V, W, X on
//! Z/p² z ⊕ Z/p² u₁ ⊕ Z/p u₂ with [u₁,u₂] = α₁pz + α₂pu₁, one per ~-class of σ.
//! Type (3): nilpotent brackets [u,v] on Z/p^{n−3} u ⊕ Z/p³ v up to isomorphism.
//! Type (1,1,1): a cited constant.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::construct::{u_construction, UConstructionSpec};
use crate::equivalence::{orbit_partition, OrbitPartition, UnionFind};
use crate::error::{Error, Result};
use crate::graded::{GradedMatrix, HomLayout};
use crate::liering::{LieRing, RingFingerprint};
use crate::residue::{gcd, is_prime, least_non_residue, primitive_root, unit_generator, AbelianType, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseRing {
    V,
    W,
    X,
}

impl BaseRing {
    pub const ALL: [BaseRing; 3] = [BaseRing::V, BaseRing::W, BaseRing::X];

    pub fn name(self) -> &'static str {
        match self {
            BaseRing::V => "V",
            BaseRing::W => "W",
            BaseRing::X => "X",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "V" | "v" => Some(BaseRing::V),
            "W" | "w" => Some(BaseRing::W),
            "X" | "x" => Some(BaseRing::X),
            _ => None,
        }
    }

    /// (α₁, α₂) in [u₁,u₂] = α₁pz + α₂pu₁.
    pub fn alphas(self) -> (u64, u64) {
        match self {
            BaseRing::V => (0, 1),
            BaseRing::W => (1, 0),
            BaseRing::X => (0, 0),
        }
    }

    pub fn ring(self, p: u64) -> LieRing {
        let (a1, a2) = self.alphas();
        ring_221(p, a1, a2)
    }

    /// Number of ~-classes of nilpotent derivations centralizing z.
    pub fn expected_classes(self, p: u64) -> usize {
        match self {
            BaseRing::V => (2 * p + 1) as usize,
            BaseRing::W => (3 * p + 11) as usize,
            BaseRing::X => 18,
        }
    }
}

pub fn type_221(p: u64) -> AbelianType {
    AbelianType::new(p, vec![2, 2, 1]).expect("valid type")
}

/// Ring on Z/p² z ⊕ Z/p² u₁ ⊕ Z/p u₂ with [u₁,u₂] = a₁pz + a₂pu₁ and z central.
pub fn ring_221(p: u64, a1: u64, a2: u64) -> LieRing {
    let ty = type_221(p);
    let c = ty.element(&[(a1 * p) as i64, (a2 * p) as i64, 0]);
    LieRing::new(ty, &[((1, 2), c)]).expect("always a Lie ring")
}

pub fn ring_v(p: u64) -> LieRing {
    BaseRing::V.ring(p)
}

pub fn ring_w(p: u64) -> LieRing {
    BaseRing::W.ring(p)
}

pub fn ring_x(p: u64) -> LieRing {
    BaseRing::X.ring(p)
}

pub fn transversal_221(p: u64) -> Vec<(BaseRing, LieRing)> {
    BaseRing::ALL.iter().map(|&b| (b, b.ring(p))).collect()
}

/// The fixed central element of maximal order.
pub fn base_z(p: u64) -> GroupElement {
    type_221(p).basis(0)
}

#[derive(Debug, Clone)]
pub struct Representative {
    pub base: BaseRing,
    pub ring: LieRing,
    pub sigma: GradedMatrix,
}

/// Rows (u₁-row, u₂-row) of σ; the z-row is zero.
type Rows = ([i64; 3], [i64; 3]);

fn rows_v(p: i64) -> Vec<Rows> {
    let mut out = vec![([p, 0, 0], [0, 0, 0])];
    out.extend((0..p).map(|e| ([0, 0, 0], [p * e, 0, 0])));
    out.extend((0..p).map(|e| ([0, 0, 1], [p * e, 0, 0])));
    out
}

fn rows_w(p: i64, nu: i64, h: i64) -> Vec<Rows> {
    let zero = [0, 0, 0];
    let mut out = vec![
        (zero, zero),
        ([0, p, 0], zero),
        (zero, [0, p, 0]),
        (zero, [0, p * nu, 0]),
        ([0, 0, 1], zero),
        ([0, 0, nu], zero),
    ];
    for a3 in [1, nu] {
        for b in [1, nu] {
            out.push(([0, 0, a3], [0, p * b, 0]));
        }
    }
    out.push(([1, 0, 0], zero));
    out.push(([1, p, 0], zero));
    out.push(([1, 0, 0], [0, p, 0]));
    out.push(([1, 0, 0], [0, p * nu, 0]));
    let mut hr = 1i64;
    for _ in 1..=(p - 1) / 2 {
        hr = hr * h % p;
        for a3 in [1, h] {
            out.push(([hr, 0, a3], zero));
            for b in [1, h] {
                out.push(([hr, 0, a3], [0, p * b, 0]));
            }
        }
    }
    out
}

fn rows_x(p: i64, nu: i64) -> Vec<Rows> {
    let zero = [0, 0, 0];
    vec![
        (zero, zero),
        ([p, 0, 0], zero),
        (zero, [p, 0, 0]),
        ([0, p, 0], zero),
        ([0, p, 0], [p, 0, 0]),
        (zero, [0, p, 0]),
        ([0, p, 0], [p, p, 0]),
        ([0, 0, 1], zero),
        ([0, 0, 1], [p, 0, 0]),
        ([0, 0, 1], [0, p, 0]),
        ([0, 0, 1], [0, p * nu, 0]),
        ([1, 0, 0], zero),
        ([1, p, 0], zero),
        ([1, 0, 0], [0, p, 0]),
        ([1, 0, 1], zero),
        ([1, 0, 1], [p, 0, 0]),
        ([1, 0, 1], [0, p, 0]),
        ([1, 0, 1], [0, p * nu, 0]),
    ]
}

/// One σ per ~-class for each of V, W, X, with ν the least non-residue and h the least
/// primitive root modulo p.
pub fn representatives_221(p: u64) -> Vec<Representative> {
    let (pi, nu, h) = (p as i64, least_non_residue(p) as i64, primitive_root(p) as i64);
    let mut out = Vec::new();
    for base in BaseRing::ALL {
        let ring = base.ring(p);
        let list = match base {
            BaseRing::V => rows_v(pi),
            BaseRing::W => rows_w(pi, nu, h),
            BaseRing::X => rows_x(pi, nu),
        };
        for (r1, r2) in list {
            let sigma = GradedMatrix::from_rows(ring.ty(), &[vec![0, 0, 0], r1.to_vec(), r2.to_vec()])
                .expect("representatives respect the grading");
            out.push(Representative { base, ring: ring.clone(), sigma });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct RingCheck {
    pub base: BaseRing,
    pub expected: usize,
    pub partition: OrbitPartition,
    pub representatives: usize,
    /// Orbit class of each representative, None when σ is not a state.
    pub rep_classes: Vec<Option<usize>>,
}

impl RingCheck {
    pub fn orbits(&self) -> usize {
        self.partition.class_count()
    }

    pub fn sizes_sum_matches(&self) -> bool {
        self.partition.sizes.iter().sum::<u64>() as usize == self.partition.states.len()
    }

    /// Every orbit holds exactly one representative.
    pub fn representatives_exact(&self) -> bool {
        let mut hit = vec![0usize; self.orbits()];
        for c in &self.rep_classes {
            match c {
                Some(c) => hit[*c] += 1,
                None => return false,
            }
        }
        hit.iter().all(|&k| k == 1)
    }

    pub fn ok(&self) -> bool {
        self.orbits() == self.expected && self.sizes_sum_matches() && self.representatives_exact()
    }
}

#[derive(Debug, Clone)]
pub struct Verify221Report {
    pub p: u64,
    pub rings: Vec<RingCheck>,
}

impl Verify221Report {
    pub fn total(&self) -> usize {
        self.rings.iter().map(|r| r.orbits()).sum()
    }

    pub fn ok(&self) -> bool {
        self.rings.iter().all(|r| r.ok()) && self.total() as u64 == 5 * self.p + 30
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rings {
            if r.orbits() != r.expected {
                out.push(format!("{}: expected {} classes, found {}", r.base.name(), r.expected, r.orbits()));
            }
            if !r.sizes_sum_matches() {
                out.push(format!("{}: orbit sizes do not sum to the state count", r.base.name()));
            }
            if !r.representatives_exact() {
                out.push(format!("{}: representatives do not meet each orbit exactly once", r.base.name()));
            }
        }
        if self.total() as u64 != 5 * self.p + 30 {
            out.push(format!("total {} differs from 5p + 30 = {}", self.total(), 5 * self.p + 30));
        }
        out
    }
}

fn require_census_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::ParameterViolation(format!("p = {p} must be at least 5")));
    }
    Ok(())
}

pub fn check_221(p: u64, reps: &[Representative]) -> Result<Verify221Report> {
    require_census_prime(p)?;
    let z = base_z(p);
    let mut rings = Vec::new();
    for (base, ring) in transversal_221(p) {
        let partition = orbit_partition(&ring, &z)?;
        let layout = HomLayout::new(ring.ty());
        let mine: Vec<&Representative> = reps.iter().filter(|r| r.base == base).collect();
        let rep_classes = mine.iter().map(|r| partition.class_of_code(layout.encode(r.sigma.entries()))).collect();
        rings.push(RingCheck { base, expected: base.expected_classes(p), partition, representatives: mine.len(), rep_classes });
    }
    Ok(Verify221Report { p, rings })
}

/// Orbit counts, representative coverage and the 5p + 30 total; Mismatch on failure.
pub fn verify_221(p: u64) -> Result<Verify221Report> {
    verify_221_with(p, &representatives_221(p))
}

pub fn verify_221_with(p: u64, reps: &[Representative]) -> Result<Verify221Report> {
    let report = check_221(p, reps)?;
    if report.ok() {
        Ok(report)
    } else {
        Err(Error::Mismatch(report.failures().join("; ")))
    }
}

/// log_p of the exponent of the large cyclic factor in type (3).
fn type3_type(p: u64, n: u32) -> Result<AbelianType> {
    AbelianType::new(p, vec![n - 3, 3])
}

fn require_n(n: u32) -> Result<()> {
    if n < 7 {
        return Err(Error::ParameterViolation(format!("n = {n} must be at least 7")));
    }
    Ok(())
}

/// The ring on Z/p^{n−3} u ⊕ Z/p³ v with [u,v] = p^{n−6}s·u + t·v.
pub fn type3_ring(p: u64, n: u32, s: u64, t: u64) -> Result<LieRing> {
    require_n(n)?;
    let ty = type3_type(p, n)?;
    let c = GroupElement(vec![p.pow(n - 6) * (s % p.pow(3)), t % p.pow(3)]);
    LieRing::new(ty, &[((0, 1), c)])
}

/// Isomorphism-class representatives (s, t) for [u,v] = p^{n−6}s·u + t·v, grouped by the
/// log_p of the derived order they realize.
pub fn type3_table(p: u64, n: u32) -> Vec<(u32, u64, u64)> {
    // p^k u is s = p^{k−(n−6)}.
    let pu = |k: u32| p.pow(k + 6 - n);
    let mut out = Vec::new();
    match n {
        7 => out.push((3, pu(1), 0)),
        8 => out.extend([(3, pu(2), 0), (3, pu(2), p)]),
        _ => out.extend([(3, 1, p), (3, 1, p * p), (3, 1, 0)]),
    }
    if n == 7 {
        out.extend([(2, pu(2), 0), (2, 0, p)]);
    } else {
        out.extend([(2, pu(n - 5), 0), (2, pu(n - 5), p * p), (2, 0, p)]);
    }
    out.extend([(1, pu(n - 4), 0), (1, 0, p * p), (0, 0, 0)]);
    out
}

#[derive(Debug, Clone)]
pub struct Type3Report {
    pub p: u64,
    pub n: u32,
    pub states: usize,
    pub class_count: usize,
    /// Orbit class of each table row.
    pub table_classes: Vec<usize>,
}

impl Type3Report {
    pub fn table_exact(&self) -> bool {
        let mut seen = vec![false; self.class_count];
        for &c in &self.table_classes {
            if seen[c] {
                return false;
            }
            seen[c] = true;
        }
        seen.iter().all(|&s| s)
    }

    pub fn expected(&self) -> usize {
        match self.n {
            7 => 6,
            8 => 8,
            _ => 9,
        }
    }

    pub fn ok(&self) -> bool {
        self.class_count == self.expected() && self.table_exact()
    }
}

/// Orbits of nilpotent brackets c = (p^{n−6}s, t) (those with p | t) under the basis
/// changes u ↦ u + v, v ↦ v + p^{n−6}u, u ↦ gu, v ↦ gv, where c ↦ det·c·φ⁻¹.
pub fn type3_orbits(p: u64, n: u32) -> Result<Type3Report> {
    require_census_prime(p)?;
    require_n(n)?;
    let ty = type3_type(p, n)?;
    let layout = HomLayout::new(&ty);
    let q = p.pow(3);
    let big = ty.modulus(0);
    let shift = p.pow(n - 6);
    let moves: Vec<Vec<u64>> = vec![
        vec![1, 1, 0, 1],
        vec![1, 0, shift, 1],
        vec![unit_generator(p, n - 3), 0, 0, 1],
        vec![1, 0, 0, unit_generator(p, 3)],
    ];
    let prepared: Vec<(Vec<u64>, u64)> = moves
        .into_iter()
        .map(|m| {
            let det = ((m[0] as i128 * m[3] as i128 - m[1] as i128 * m[2] as i128).rem_euclid(big as i128)) as u64;
            (layout.inverse(&m).expect("basis change"), det)
        })
        .collect();
    let code = |s: u64, t: u64| s * q + t;
    let states: Vec<u64> = (0..q).flat_map(|s| (0..q).step_by(p as usize).map(move |t| code(s, t))).collect();
    let mut uf = UnionFind::new(states.len());
    for (idx, &c) in states.iter().enumerate() {
        let elem = GroupElement(vec![(c / q) * shift, c % q]);
        for (inv, det) in &prepared {
            let scaled = ty.scale(*det, &elem);
            let img = layout.apply(&scaled.0, inv);
            let target = code(img[0] / shift, img[1]);
            let j = states
                .binary_search(&target)
                .map_err(|_| Error::Mismatch("basis change left the nilpotent brackets".into()))?;
            uf.union(idx, j);
        }
    }
    let mut roots: Vec<usize> = (0..states.len()).map(|i| uf.find(i)).collect();
    let root_of = roots.clone();
    roots.sort_unstable();
    roots.dedup();
    let class_of = |i: usize| roots.binary_search(&root_of[i]).expect("root");
    let table_classes = type3_table(p, n)
        .into_iter()
        .map(|(_, s, t)| {
            let i = states.binary_search(&code(s % q, t % q)).map_err(|_| Error::Mismatch("table bracket is not nilpotent".into()))?;
            Ok(class_of(i))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Type3Report { p, n, states: states.len(), class_count: roots.len(), table_classes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// "V", "W", "X" or "type3".
    pub base: String,
    pub sigma: Option<Vec<Vec<u64>>>,
    pub z: Option<Vec<u64>>,
    pub m: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRecord {
    pub p: u64,
    pub n: u32,
    pub partition: Vec<u32>,
    pub ring: LieRing,
    pub fingerprint: RingFingerprint,
    pub provenance: Provenance,
}

impl CensusRecord {
    pub fn check(&self) -> Result<()> {
        self.ring.validate()?;
        let fp = self.ring.fingerprint()?;
        if fp != self.fingerprint {
            return Err(Error::Mismatch("stored fingerprint differs from recomputation".into()));
        }
        if fp.invariants.coexponent != self.partition.iter().sum::<u32>() || fp.order_log != self.n {
            return Err(Error::Mismatch("order or coexponent disagrees with the partition".into()));
        }
        Ok(())
    }

    fn sort_key(&self) -> (Vec<u32>, std::cmp::Reverse<u32>, Vec<u32>, Vec<Vec<u64>>) {
        (
            self.partition.clone(),
            std::cmp::Reverse(self.fingerprint.derived_order_log),
            self.ring.ty().exponents().to_vec(),
            self.ring.table().into_iter().map(|(_, c)| c.0).collect(),
        )
    }
}

/// Partition, then derived order descending, then bracket table.
pub fn canonical_order(records: &mut [CensusRecord]) {
    records.sort_by_cached_key(|r| r.sort_key());
}

pub fn records_221(p: u64, n: u32) -> Result<Vec<CensusRecord>> {
    require_census_prime(p)?;
    require_n(n)?;
    let z = base_z(p);
    let mut out = Vec::new();
    for rep in representatives_221(p) {
        let spec = UConstructionSpec { u: rep.ring.clone(), m: n - 3, sigma: rep.sigma.clone(), z: z.clone() };
        let ring = u_construction(&spec)?;
        out.push(CensusRecord {
            p,
            n,
            partition: vec![2, 1],
            fingerprint: ring.fingerprint()?,
            ring,
            provenance: Provenance {
                base: rep.base.name().into(),
                sigma: Some(rep.sigma.rows()),
                z: Some(z.0.clone()),
                m: Some(n - 3),
            },
        });
    }
    canonical_order(&mut out);
    Ok(out)
}

/// Table representatives for type (3), after the brute-force orbit count agrees.
pub fn census_type3(p: u64, n: u32) -> Result<Vec<CensusRecord>> {
    let report = type3_orbits(p, n)?;
    if !report.ok() {
        return Err(Error::Mismatch(format!(
            "type (3) at p = {p}, n = {n}: {} orbits, expected {}, table exact: {}",
            report.class_count,
            report.expected(),
            report.table_exact()
        )));
    }
    let mut out = Vec::new();
    for (_, s, t) in type3_table(p, n) {
        let ring = type3_ring(p, n, s, t)?;
        out.push(CensusRecord {
            p,
            n,
            partition: vec![3],
            fingerprint: ring.fingerprint()?,
            ring,
            provenance: Provenance { base: "type3".into(), sigma: None, z: None, m: None },
        });
    }
    canonical_order(&mut out);
    Ok(out)
}

pub const CITED_111: &str = "groups of order p^5 with abelian type (2,1,1,1) via the Lazard correspondence";

/// 23 + 2·gcd(p−1, 3) + gcd(p−1, 4), stored rather than computed.
pub fn cited_111(p: u64) -> u64 {
    23 + 2 * gcd(p - 1, 3) + gcd(p - 1, 4)
}

fn psi_221_cache() -> &'static Mutex<HashMap<u64, u64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn psi_part(p: u64, n: u32, partition: &[u32]) -> Result<u64> {
    require_census_prime(p)?;
    require_n(n)?;
    match partition {
        [1, 1, 1] => Ok(cited_111(p)),
        [2, 1] => {
            if let Some(&v) = psi_221_cache().lock().expect("cache").get(&p) {
                return Ok(v);
            }
            let total = verify_221(p)?.total() as u64;
            psi_221_cache().lock().expect("cache").insert(p, total);
            Ok(total)
        }
        [3] => Ok(census_type3(p, n)?.len() as u64),
        other => Err(Error::UnsupportedPartition(other.to_vec())),
    }
}

pub fn psi_formula(p: u64, n: u32) -> Result<u64> {
    require_census_prime(p)?;
    require_n(n)?;
    let tail = match n {
        7 => 59,
        8 => 61,
        _ => 62,
    };
    Ok(5 * p + 2 * gcd(p - 1, 3) + gcd(p - 1, 4) + tail)
}

pub const PARTITIONS_OF_3: [&[u32]; 3] = [&[1, 1, 1], &[2, 1], &[3]];

pub fn psi_assembled(p: u64, n: u32) -> Result<u64> {
    PARTITIONS_OF_3.iter().map(|part| psi_part(p, n, part)).sum()
}

/// Fingerprint data that does not move when the largest cyclic factor grows: the
/// ℧-depth of the derived subring is capped at the second largest exponent, and
/// [L,L] ∩ p·Z(L) is left out since it still grows with the top factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftedFingerprint {
    pub class: usize,
    pub derived_order_log: u32,
    pub center_index_log: u32,
    pub capped_mho_depth: u32,
    pub lower_exponents: Vec<u32>,
}

pub fn shifted(ring: &LieRing) -> Result<ShiftedFingerprint> {
    let fp = ring.fingerprint()?;
    let cap = ring.ty().exponents().get(1).copied().unwrap_or(0);
    Ok(ShiftedFingerprint {
        class: fp.class,
        derived_order_log: fp.derived_order_log,
        center_index_log: fp.order_log - fp.center_order_log,
        capped_mho_depth: fp.derived_mho_depth.min(cap),
        lower_exponents: ring.ty().exponents()[1..].to_vec(),
    })
}

#[derive(Debug, Clone, Default)]
pub struct StabilityReport {
    pub compared: usize,
    pub class_mismatches: Vec<String>,
    pub fingerprint_mismatches: Vec<String>,
}

impl StabilityReport {
    pub fn ok(&self) -> bool {
        self.class_mismatches.is_empty() && self.fingerprint_mismatches.is_empty()
    }
}

/// Every (2,1) representative built at m₁ and at m₂.
pub fn stability_221(p: u64, m1: u32, m2: u32) -> Result<StabilityReport> {
    require_census_prime(p)?;
    if m1.min(m2) < 4 {
        return Err(Error::ParameterViolation(format!("m = {} is below 2·λ₁ = 4", m1.min(m2))));
    }
    let z = base_z(p);
    let mut report = StabilityReport::default();
    for (k, rep) in representatives_221(p).into_iter().enumerate() {
        let build = |m| u_construction(&UConstructionSpec { u: rep.ring.clone(), m, sigma: rep.sigma.clone(), z: z.clone() });
        let (a, b) = (shifted(&build(m1)?)?, shifted(&build(m2)?)?);
        report.compared += 1;
        let label = format!("{} representative {k}", rep.base.name());
        if a.class != b.class {
            report.class_mismatches.push(label.clone());
        }
        if a != b {
            report.fingerprint_mismatches.push(label);
        }
    }
    Ok(report)
}

/// Type-(3) fingerprint multisets at n₁ and n₂.
pub fn stability_type3(p: u64, n1: u32, n2: u32) -> Result<StabilityReport> {
    let multiset = |n| -> Result<Vec<ShiftedFingerprint>> {
        let mut v = census_type3(p, n)?.iter().map(|r| shifted(&r.ring)).collect::<Result<Vec<_>>>()?;
        v.sort();
        Ok(v)
    };
    let (a, b) = (multiset(n1)?, multiset(n2)?);
    let mut report = StabilityReport { compared: a.len().max(b.len()), ..Default::default() };
    let classes = |v: &[ShiftedFingerprint]| {
        let mut c: Vec<usize> = v.iter().map(|f| f.class).collect();
        c.sort_unstable();
        c
    };
    if classes(&a) != classes(&b) {
        report.class_mismatches.push(format!("class multisets differ between n = {n1} and n = {n2}"));
    }
    if a != b {
        report.fingerprint_mismatches.push(format!("fingerprint multisets differ between n = {n1} and n = {n2}"));
    }
    Ok(report)
}

pub fn stability_check(p: u64, partition: &[u32], m1: u32, m2: u32) -> Result<StabilityReport> {
    match partition {
        [2, 1] => stability_221(p, m1, m2),
        [3] => stability_type3(p, m1, m2),
        other => Err(Error::UnsupportedPartition(other.to_vec())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{is_derivation, is_nilpotent_endo};
    use crate::search::isomorphic_small;

    #[test]
    fn spec_transversal() {
        let t = transversal_221(5);
        let u1 = GroupElement(vec![0, 1, 0]);
        let u2 = GroupElement(vec![0, 0, 1]);
        assert_eq!(t[0].1.bracket(&u1, &u2).0, vec![0, 5, 0]);
        assert_eq!(t[1].1.bracket(&u1, &u2).0, vec![5, 0, 0]);
        assert!(t[2].1.is_abelian());
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(isomorphic_small(&t[i].1, &t[j].1).unwrap().is_none());
            }
        }
    }

    #[test]
    fn spec_representative_lists() {
        for p in [5u64, 7, 11] {
            let reps = representatives_221(p);
            for base in BaseRing::ALL {
                assert_eq!(reps.iter().filter(|r| r.base == base).count(), base.expected_classes(p));
            }
            for r in &reps {
                assert!(is_derivation(&r.ring, &r.sigma) && is_nilpotent_endo(&r.sigma));
                assert!(r.sigma.apply(&base_z(p)).unwrap().is_zero());
            }
        }
        let reps = representatives_221(5);
        assert_eq!(reps.len(), 55);
        assert_eq!(reps[0].sigma.rows(), vec![vec![0, 0, 0], vec![5, 0, 0], vec![0, 0, 0]]);
        let w: Vec<_> = reps.iter().filter(|r| r.base == BaseRing::W).collect();
        assert_eq!(w[2].sigma.rows()[2], vec![0, 5, 0]);
        assert_eq!(w[3].sigma.rows()[2], vec![0, 10, 0]);
    }

    #[test]
    fn spec_verify_221_at_five() {
        let report = verify_221(5).unwrap();
        assert_eq!(report.total(), 55);
        let mut reps = representatives_221(5);
        // Two V representatives in the same class.
        reps[2].sigma = reps[3].sigma.clone();
        assert!(matches!(verify_221_with(5, &reps), Err(Error::Mismatch(_))));
    }

    #[test]
    fn spec_type3_counts() {
        for (n, k) in [(7, 6), (8, 8), (9, 9)] {
            let recs = census_type3(5, n).unwrap();
            assert_eq!(recs.len(), k);
            for r in &recs {
                r.check().unwrap();
                assert!(r.fingerprint.class <= 4);
            }
        }
        let top: Vec<Vec<u64>> = census_type3(5, 9)
            .unwrap()
            .into_iter()
            .filter(|r| r.fingerprint.derived_order_log == 3)
            .map(|r| r.ring.gen_bracket(0, 1).0)
            .collect();
        let mut want = vec![vec![125, 5], vec![125, 25], vec![125, 0]];
        want.sort();
        let mut got = top;
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn type3_rows_realize_their_derived_orders() {
        for n in [7, 8, 9, 10] {
            for (d, s, t) in type3_table(5, n) {
                let ring = type3_ring(5, n, s, t).unwrap();
                assert_eq!(ring.fingerprint().unwrap().derived_order_log, d, "n = {n}, ({s}, {t})");
            }
        }
    }

    /// The criterion p | t agrees with the lower central series on every bracket.
    #[test]
    fn type3_nilpotency_criterion() {
        let p = 5u64;
        for s in 0..125 {
            for t in 0..125 {
                let nil = type3_ring(p, 7, s, t).unwrap().class().is_ok();
                assert_eq!(nil, t % p == 0, "s = {s}, t = {t}");
            }
        }
    }

    /// The table rows are pairwise non-isomorphic by (derived order, ℧-depth).
    #[test]
    fn type3_rows_distinguished() {
        for n in [7, 8, 9] {
            let mut keys: Vec<(u32, u32)> = census_type3(5, n)
                .unwrap()
                .iter()
                .map(|r| (r.fingerprint.derived_order_log, r.fingerprint.derived_mho_depth))
                .collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), type3_table(5, n).len());
        }
    }

    #[test]
    fn spec_psi_values() {
        assert_eq!(psi_part(5, 9, &[1, 1, 1]).unwrap(), 29);
        assert_eq!(psi_part(5, 9, &[3]).unwrap(), 9);
        assert_eq!(psi_formula(5, 9).unwrap(), 93);
        assert_eq!(psi_formula(5, 7).unwrap(), 90);
        assert_eq!(psi_formula(7, 8).unwrap(), 104);
        assert!(matches!(psi_part(5, 9, &[2, 2]), Err(Error::UnsupportedPartition(_))));
        assert!(matches!(psi_formula(5, 6), Err(Error::ParameterViolation(_))));
    }

    #[test]
    fn stability_precondition() {
        assert!(matches!(stability_check(5, &[2, 1], 3, 6), Err(Error::ParameterViolation(_))));
    }

    #[test]
    fn type3_stability_from_nine() {
        assert!(stability_type3(5, 9, 10).unwrap().ok());
    }
}
