//! The verification suites run by `coexlab verify`, one per family of claims.

use std::time::Instant;

use crate::bch::{formal_associativity, MAX_DEGREE};
use crate::census::{
    base_z, check_221, census_type3, psi_assembled, psi_formula, records_221, representatives_221, stability_221, BaseRing,
    stability_type3, type3_orbits, CensusRecord, Representative,
};
use crate::construct::{omega_recovers_base, u_construction, UConstructionSpec};
use crate::equivalence::{orbit_partition, orbit_partition_with, sampling_seed, Engine};
use crate::error::Result;
use crate::extremal::{extremal_group, lower_central_matches, power_lemma_failures};
use crate::group::{
    associative_exhaustive, associativity_failures, class, exponent_log, identity_and_inverse_hold, inclusion_claim,
    invariants_with, regularity_check, FiniteGroup, PairPolicy, PowerTable,
};
use crate::lazard::{group_from_liering, roundtrip};
use crate::liering::LieRing;
use crate::residue::{AbelianType, GroupElement};

pub const SUITES: [&str; 9] = ["orbits", "reps", "type3", "formula", "construct", "stability", "lazard", "extremal", "regular"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Replace one representative by a copy of another from the same ring.
    Reps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed(Vec<String>),
    Skipped,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: String,
    pub p: u64,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Failed(_))
    }
}

fn outcome(failures: Vec<String>) -> Status {
    if failures.is_empty() {
        Status::Passed
    } else {
        Status::Failed(failures)
    }
}

fn representatives(p: u64, fault: Option<Fault>) -> Vec<Representative> {
    let mut reps = representatives_221(p);
    if fault == Some(Fault::Reps) {
        let last = reps.len() - 1;
        let twin = reps.iter().position(|r| r.base == reps[last].base).expect("same ring");
        reps[last].sigma = reps[twin].sigma.clone();
    }
    reps
}

fn suite_orbits(p: u64, fault: Option<Fault>) -> Result<(Vec<String>, String)> {
    let report = check_221(p, &representatives(p, fault))?;
    let counts: Vec<String> = report.rings.iter().map(|r| format!("{} {}", r.base.name(), r.orbits())).collect();
    Ok((report.failures(), format!("{}; total {}", counts.join(", "), report.total())))
}

/// Representatives stay in their own orbit and no two are equivalent. At p = 5 this is
/// decided by one pass over the whole automorphism group; above that, the orbit count
/// must survive enlarging the move set by 100 random automorphisms.
fn suite_reps(p: u64, fault: Option<Fault>) -> Result<(Vec<String>, String)> {
    let reps = representatives(p, fault);
    let z = base_z(p);
    let seed = sampling_seed();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for base in BaseRing::ALL {
        let ring = base.ring(p);
        let engine = Engine::new(&ring, &z)?;
        let mine: Vec<Vec<u64>> = reps.iter().filter(|r| r.base == base).map(|r| r.sigma.entries().to_vec()).collect();
        if p == 5 {
            let partition = orbit_partition(&ring, &z)?;
            let audit = engine.full_group_audit(&partition, &mine)?;
            notes.push(format!("{} {} automorphisms", base.name(), audit.automorphisms));
            if audit.orbit_escapes > 0 || audit.cross_equivalences > 0 {
                failures.push(format!(
                    "{}: {} orbit escapes, {} cross-equivalences among representatives",
                    base.name(),
                    audit.orbit_escapes,
                    audit.cross_equivalences
                ));
            }
        } else {
            let partition = orbit_partition_with(&ring, &z, 100, seed)?;
            notes.push(format!("{} {} orbits with 100 extra moves", base.name(), partition.class_count()));
            if partition.class_count() != base.expected_classes(p) {
                failures.push(format!("{}: enlarged move set gives {} orbits", base.name(), partition.class_count()));
            }
            let layout = engine.layout();
            let mut hit: Vec<Option<usize>> = mine.iter().map(|m| partition.class_of_code(layout.encode(m))).collect();
            hit.sort_unstable();
            if hit.iter().any(Option::is_none) || hit.windows(2).any(|w| w[0] == w[1]) {
                failures.push(format!("{}: two representatives share an orbit", base.name()));
            }
        }
    }
    Ok((failures, notes.join(", ")))
}

fn suite_type3(p: u64) -> Result<(Vec<String>, String)> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in [7, 8, 9] {
        let r = type3_orbits(p, n)?;
        counts.push(format!("n={n}: {}", r.class_count));
        if !r.ok() {
            failures.push(format!("n = {n}: {} orbits, expected {}, table meets every orbit once: {}", r.class_count, r.expected(), r.table_exact()));
        }
    }
    Ok((failures, counts.join(", ")))
}

fn suite_formula(p: u64) -> Result<(Vec<String>, String)> {
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for n in [7, 8, 9, 12] {
        let (f, a) = (psi_formula(p, n)?, psi_assembled(p, n)?);
        values.push(format!("n={n}: {a}"));
        if f != a {
            failures.push(format!("n = {n}: closed formula {f}, assembled census {a}"));
        }
    }
    Ok((failures, values.join(", ")))
}

fn suite_construct(p: u64) -> Result<(Vec<String>, String)> {
    let z = base_z(p);
    let mut failures = Vec::new();
    let reps = representatives_221(p);
    for (k, rep) in reps.iter().enumerate() {
        let ring = u_construction(&UConstructionSpec { u: rep.ring.clone(), m: 4, sigma: rep.sigma.clone(), z: z.clone() })?;
        let fp = ring.fingerprint()?;
        if fp.order_log != 7 || fp.invariants.coexponent != 3 {
            failures.push(format!("representative {k}: order p^{}, coexponent {}", fp.order_log, fp.invariants.coexponent));
        }
        if fp.class > 4 {
            failures.push(format!("representative {k}: class {} exceeds coexponent + 1", fp.class));
        }
        if !omega_recovers_base(&ring, &rep.ring)? {
            failures.push(format!("representative {k}: Ω₂ is not isomorphic to the base ring"));
        }
    }
    Ok((failures, format!("{} constructions", reps.len())))
}

fn suite_stability(p: u64) -> Result<(Vec<String>, String)> {
    let a = stability_221(p, 4, 6)?;
    let b = stability_type3(p, 9, 10)?;
    let mut failures: Vec<String> = a.class_mismatches.iter().map(|s| format!("m = 4 vs 6: class differs for {s}")).collect();
    failures.extend(b.class_mismatches.iter().cloned());
    failures.extend(b.fingerprint_mismatches.iter().cloned());
    Ok((failures, format!("{} + {} compared", a.compared, b.compared)))
}

/// Census rings of order p^7: the (2,1) records and the type-(3) records.
pub fn census_rings(p: u64) -> Result<Vec<CensusRecord>> {
    let mut v = records_221(p, 7)?;
    v.extend(census_type3(p, 7)?);
    Ok(v)
}

/// Small rings of order at most p⁴ for exhaustive checks.
pub fn small_rings(p: u64) -> Result<Vec<LieRing>> {
    let e = |v: Vec<u64>| GroupElement(v);
    Ok(vec![
        LieRing::new(AbelianType::new(p, vec![1, 1, 1])?, &[((0, 1), e(vec![0, 0, 1]))])?,
        LieRing::new(AbelianType::new(p, vec![2, 1, 1])?, &[((1, 2), e(vec![p, 0, 0]))])?,
        LieRing::new(AbelianType::new(p, vec![1, 1, 1, 1])?, &[((0, 1), e(vec![0, 0, 1, 0])), ((0, 2), e(vec![0, 0, 0, 1]))])?,
    ])
}

fn suite_lazard(p: u64) -> Result<(Vec<String>, String)> {
    let mut failures = Vec::new();
    for d in 1..=MAX_DEGREE {
        if !formal_associativity(d)? {
            failures.push(format!("BCH table fails formal associativity at degree {d}"));
        }
    }
    let seed = sampling_seed();
    let mut exhaustive = 0;
    for ring in small_rings(p)? {
        let g = group_from_liering(&ring)?;
        if g.size() <= 625 {
            exhaustive += 1;
            if !associative_exhaustive(&g) || !identity_and_inverse_hold(&g) {
                failures.push(format!("group law on a ring of order p^{} fails associativity", ring.order_log()));
            }
        }
    }
    let rings = census_rings(p)?;
    let top = rings.iter().max_by_key(|r| r.fingerprint.class).expect("nonempty census");
    let bad = associativity_failures(&group_from_liering(&top.ring)?, 1_000_000, seed);
    if bad > 0 {
        failures.push(format!("{bad} of 10^6 sampled triples fail associativity"));
    }
    for (k, rec) in rings.iter().enumerate() {
        let g = group_from_liering(&rec.ring)?;
        let e = exponent_log(&g)?;
        if e != rec.ring.ty().exponent_log() || g.order_log() - e != rec.fingerprint.invariants.coexponent {
            failures.push(format!("census ring {k}: group exponent p^{e} differs from the additive exponent"));
        }
        let c = class(&g)?;
        if c != rec.fingerprint.class {
            failures.push(format!("census ring {k}: group class {c}, ring class {}", rec.fingerprint.class));
        }
        if !roundtrip(&rec.ring, seed)? {
            failures.push(format!("census ring {k}: bracket not recovered from the group"));
        }
    }
    Ok((failures, format!("{exhaustive} exhaustive, 10^6 sampled, {} census rings", rings.len())))
}

pub const EXTREMAL_CASES: [(u64, usize, u32); 3] = [(5, 2, 4), (5, 3, 5), (7, 3, 5)];

fn suite_extremal(p: u64) -> Result<(Vec<String>, String)> {
    let mut failures = Vec::new();
    let mut done = Vec::new();
    for &(q, f, n) in EXTREMAL_CASES.iter().filter(|c| c.0 == p) {
        let (one, two) = extremal_group(q, f, n)?;
        let (c, e) = (class(&two)?, exponent_log(&two)?);
        if c != f + 1 || two.order_log() - e != f as u32 {
            failures.push(format!("({q},{f},{n}): class {c}, coexponent {}; expected {} and {f}", two.order_log() - e, f + 1));
        }
        for (i, ok) in lower_central_matches(&one)? {
            if !ok {
                failures.push(format!("({q},{f},{n}): γ_{i} is not ⟨x_{i}, ..., x_{}⟩", f + 1));
            }
        }
        let bad = power_lemma_failures(&one);
        if !bad.is_empty() {
            failures.push(format!("({q},{f},{n}): power lemma fails for {} pairs", bad.len()));
        }
        done.push(format!("({q},{f},{n})"));
    }
    Ok((failures, if done.is_empty() { "no cases at this prime".into() } else { done.join(", ") }))
}

/// Up to `count` census rings with distinct fingerprints, highest class first.
pub fn regular_sample(p: u64, count: usize) -> Result<Vec<CensusRecord>> {
    let mut rings = census_rings(p)?;
    rings.sort_by_key(|r| std::cmp::Reverse(r.fingerprint.class));
    let mut out: Vec<CensusRecord> = Vec::new();
    for r in rings {
        if out.len() < count && out.iter().all(|o| o.fingerprint != r.fingerprint) {
            out.push(r);
        }
    }
    Ok(out)
}

fn suite_regular(p: u64) -> Result<(Vec<String>, String)> {
    let mut failures = Vec::new();
    let sample = regular_sample(p, 5)?;
    let seed = sampling_seed();
    for (k, rec) in sample.iter().enumerate() {
        let g = group_from_liering(&rec.ring)?;
        let table = PowerTable::new(&g)?;
        let inv = invariants_with(&g, &table)?;
        if !inv.duality_holds() {
            failures.push(format!("group {k}: Ω-layers {:?} and ℧-layers {:?} are not dual", inv.omega_logs, inv.mho_logs));
        }
        for (i, ok) in inclusion_claim(&g, &table)? {
            if !ok {
                failures.push(format!("group {k}: inclusion into ℧_{} fails at i = {i}", i + 1));
            }
        }
        let report = regularity_check(&g, PairPolicy::Sampled { pairs: 2000, seed });
        if !report.passed() {
            failures.push(format!("group {k}: {} of {} pairs have no regularity witness", report.failures.len(), report.tested));
        }
    }
    Ok((failures, format!("{} groups", sample.len())))
}

pub fn run_suite(suite: &str, p: u64, fault: Option<Fault>) -> Result<(Vec<String>, String)> {
    match suite {
        "orbits" => suite_orbits(p, fault),
        "reps" => suite_reps(p, fault),
        "type3" => suite_type3(p),
        "formula" => suite_formula(p),
        "construct" => suite_construct(p),
        "stability" => suite_stability(p),
        "lazard" => suite_lazard(p),
        "extremal" => suite_extremal(p),
        "regular" => suite_regular(p),
        other => Ok((vec![format!("unknown suite {other}")], String::new())),
    }
}

/// Runs every suite at each prime, calling `report` as each finishes.
pub fn verify_all(primes: &[u64], skip: &[String], fault: Option<Fault>, mut report: impl FnMut(&SuiteOutcome)) -> Vec<SuiteOutcome> {
    let mut out = Vec::new();
    for &p in primes {
        for suite in SUITES {
            let start = Instant::now();
            let (status, detail) = if skip.iter().any(|s| s == suite) {
                (Status::Skipped, String::new())
            } else {
                match run_suite(suite, p, fault) {
                    Ok((failures, detail)) => (outcome(failures), detail),
                    Err(e) => (Status::Failed(vec![e.to_string()]), String::new()),
                }
            };
            let o = SuiteOutcome { suite: suite.into(), p, status, detail, seconds: start.elapsed().as_secs_f64() };
            report(&o);
            out.push(o);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_fault_is_caught() {
        let (failures, _) = run_suite("orbits", 5, Some(Fault::Reps)).unwrap();
        assert!(!failures.is_empty());
        let (failures, _) = run_suite("orbits", 5, None).unwrap();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn skipped_suites_are_marked() {
        let skip: Vec<String> = SUITES.iter().map(|s| s.to_string()).collect();
        let out = verify_all(&[5], &skip, None, |_| {});
        assert!(out.iter().all(|o| o.status == Status::Skipped));
    }

    #[test]
    fn small_rings_are_nilpotent_of_low_class() {
        for p in [5, 7] {
            for r in small_rings(p).unwrap() {
                assert!(r.class().unwrap() < p as usize);
            }
        }
    }
}
