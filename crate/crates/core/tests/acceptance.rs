//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use coexlab_core::bch::{formal_associativity, MAX_DEGREE};
use coexlab_core::census::{
    base_z, check_221, psi_assembled, psi_formula, representatives_221, stability_221, stability_type3, type3_orbits,
    verify_221, BaseRing,
};
use coexlab_core::construct::{omega_recovers_base, u_construction, UConstructionSpec};
use coexlab_core::derivation::derivation_subgroup;
use coexlab_core::equivalence::{orbit_partition, orbit_partition_with, sampling_seed, Engine};
use coexlab_core::extremal::{extremal_group, lower_central_matches, power_lemma_failures};
use coexlab_core::graded::HomLayout;
use coexlab_core::group::{
    associative_exhaustive, associativity_failures, class, exponent_log, identity_and_inverse_hold, inclusion_claim,
    invariants_with, regularity_check, FiniteGroup, PairPolicy, PowerTable,
};
use coexlab_core::lazard::{group_from_liering, roundtrip};
use coexlab_core::verify::{census_rings, regular_sample, small_rings};
use coexlab_core::Result;

type Check = Result<(bool, String)>;

fn orbit_counts() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [5u64, 7] {
        let expected = [2 * p as usize + 1, 3 * p as usize + 11, 18];
        let mut got = Vec::new();
        for (base, want) in BaseRing::ALL.into_iter().zip(expected) {
            let n = orbit_partition(&base.ring(p), &base_z(p))?.class_count();
            ok &= n == want;
            got.push(format!("{} {n}/{want}", base.name()));
        }
        notes.push(format!("p={p}: {}", got.join(" ")));
    }
    Ok((ok, notes.join("; ")))
}

fn representative_completeness() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    let p = 5;
    let z = base_z(p);
    let reps = representatives_221(p);
    for base in BaseRing::ALL {
        let ring = base.ring(p);
        let engine = Engine::new(&ring, &z)?;
        let layout = HomLayout::new(ring.ty());
        let partition = orbit_partition(&ring, &z)?;
        let mine: Vec<Vec<u64>> = reps.iter().filter(|r| r.base == base).map(|r| r.sigma.entries().to_vec()).collect();
        let audit = engine.full_group_audit(&partition, &mine)?;
        // Nilpotent centralizing derivations counted from the full derivation group.
        let nilpotent = derivation_subgroup(&ring, &z)
            .elements()
            .into_iter()
            .filter(|d| layout.is_nilpotent(&layout.from_digits(d)))
            .count();
        let sizes: u64 = partition.sizes.iter().sum();
        ok &= audit.orbit_escapes == 0 && audit.cross_equivalences == 0 && sizes as usize == nilpotent;
        notes.push(format!(
            "{}: {} reps, {} auts, escapes {}, cross {}, Σ sizes {sizes} = {nilpotent}",
            base.name(),
            mine.len(),
            audit.automorphisms,
            audit.orbit_escapes,
            audit.cross_equivalences
        ));
    }
    let report = check_221(p, &reps)?;
    ok &= report.rings.iter().all(|r| r.representatives_exact());
    // Optional gate at p = 7: orbits are stable under 100 extra random automorphisms.
    let mut stable = true;
    for base in BaseRing::ALL {
        let n = orbit_partition_with(&base.ring(7), &base_z(7), 100, sampling_seed())?.class_count();
        stable &= n == base.expected_classes(7);
    }
    ok &= stable && check_221(7, &representatives_221(7))?.rings.iter().all(|r| r.representatives_exact());
    notes.push(format!("p=7 enlarged move set stable: {stable}"));
    Ok((ok, notes.join("; ")))
}

fn decomposition_totals() -> Check {
    let (a, b) = (verify_221(5)?.total(), verify_221(7)?.total());
    Ok((a == 55 && b == 65, format!("p=5: {a}/55, p=7: {b}/65")))
}

fn type3_counts() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, want) in [(7, 6), (8, 8), (9, 9)] {
        let r = type3_orbits(5, n)?;
        ok &= r.class_count == want && r.table_exact();
        notes.push(format!("n={n}: {}/{want} table exact {}", r.class_count, r.table_exact()));
    }
    Ok((ok, notes.join(", ")))
}

fn formula_agreement() -> Check {
    let mut ok = true;
    let mut checked = 0;
    for p in [5, 7, 11, 13] {
        for n in [7, 8, 9, 12] {
            ok &= psi_formula(p, n)? == psi_assembled(p, n)?;
            checked += 1;
        }
    }
    let spots = [(5, 7, 90), (5, 9, 93), (7, 8, 104)];
    let mut notes = Vec::new();
    for (p, n, want) in spots {
        let got = psi_assembled(p, n)?;
        ok &= got == want;
        notes.push(format!("({p},{n}) {got}/{want}"));
    }
    Ok((ok, format!("{checked} (p, n) pairs; spot values {}", notes.join(" "))))
}

fn construction_lemma() -> Check {
    let p = 5;
    let z = base_z(p);
    let reps = representatives_221(p);
    let mut bad = 0;
    for rep in &reps {
        let ring = u_construction(&UConstructionSpec { u: rep.ring.clone(), m: 4, sigma: rep.sigma.clone(), z: z.clone() })?;
        let fp = ring.fingerprint()?;
        let good = fp.order_log == 7 && fp.invariants.coexponent == 3 && fp.class <= 4 && omega_recovers_base(&ring, &rep.ring)?;
        bad += usize::from(!good);
    }
    Ok((bad == 0 && reps.len() == 55, format!("{} constructions, {bad} failing", reps.len())))
}

fn stability() -> Check {
    let a = stability_221(5, 4, 6)?;
    let b = stability_type3(5, 9, 10)?;
    Ok((
        a.class_mismatches.is_empty() && a.compared == 55 && b.ok(),
        format!("(2,1) m=4 vs 6: {} compared, {} class mismatches; type (3) n=9 vs 10 multisets equal: {}", a.compared, a.class_mismatches.len(), b.ok()),
    ))
}

fn lazard_bridge() -> Check {
    let mut ok = (1..=MAX_DEGREE).all(|d| formal_associativity(d).unwrap_or(false));
    let mut notes = vec![format!("formal associativity D≤5: {ok}")];
    let mut exhaustive = 0;
    for ring in small_rings(5)? {
        let g = group_from_liering(&ring)?;
        ok &= associative_exhaustive(&g) && identity_and_inverse_hold(&g);
        exhaustive += 1;
    }
    notes.push(format!("{exhaustive} groups of order ≤ 5^4 exhaustive"));
    let seed = sampling_seed();
    let mut mismatches = 0;
    let mut rings = 0;
    let mut sampled_done = false;
    for p in [5, 7] {
        let census = census_rings(p)?;
        if p == 5 {
            let top = census.iter().max_by_key(|r| r.fingerprint.class).expect("census");
            let bad = associativity_failures(&group_from_liering(&top.ring)?, 1_000_000, seed);
            ok &= bad == 0;
            sampled_done = true;
            notes.push(format!("10^6 triples at 5^7 (class {}): {bad} failures", top.fingerprint.class));
        }
        for rec in &census {
            let g = group_from_liering(&rec.ring)?;
            let e = exponent_log(&g)?;
            let good = e == rec.ring.ty().exponent_log()
                && g.order_log() - e == rec.fingerprint.invariants.coexponent
                && class(&g)? == rec.fingerprint.class
                && roundtrip(&rec.ring, seed)?;
            mismatches += usize::from(!good);
            rings += 1;
        }
    }
    ok &= sampled_done && mismatches == 0;
    notes.push(format!("{rings} census rings (p=5,7): {mismatches} invariant or roundtrip mismatches"));
    Ok((ok, notes.join("; ")))
}

fn extremal_claims() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, f, n) in [(5u64, 2usize, 4u32), (5, 3, 5), (7, 3, 5)] {
        let (one, two) = extremal_group(p, f, n)?;
        let (c, e) = (class(&two)?, exponent_log(&two)?);
        let lcs = lower_central_matches(&one)?.iter().all(|&(_, m)| m);
        ok &= c == f + 1 && two.order_log() - e == f as u32 && lcs;
        notes.push(format!("({p},{f},{n}) class {c} coexp {} γ ok {lcs}", two.order_log() - e));
    }
    let (one, _) = extremal_group(5, 3, 5)?;
    let bad = power_lemma_failures(&one).len();
    ok &= bad == 0;
    notes.push(format!("power lemma at (5,3,5): {bad} failures of 15625"));
    Ok((ok, notes.join("; ")))
}

fn regular_structure() -> Check {
    let sample = regular_sample(5, 5)?;
    let seed = sampling_seed();
    let mut ok = sample.len() >= 5;
    let mut admissible = 0;
    for rec in &sample {
        let g = group_from_liering(&rec.ring)?;
        let table = PowerTable::new(&g)?;
        ok &= invariants_with(&g, &table)?.duality_holds();
        for (_, holds) in inclusion_claim(&g, &table)? {
            ok &= holds;
            admissible += 1;
        }
        ok &= regularity_check(&g, PairPolicy::Sampled { pairs: 2000, seed }).passed();
    }
    Ok((ok, format!("{} groups, {admissible} admissible inclusions, 2000 pairs each", sample.len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("orbit counts", orbit_counts),
        ("representative completeness", representative_completeness),
        ("(2,1) totals", decomposition_totals),
        ("type (3) orbits", type3_counts),
        ("closed formula", formula_agreement),
        ("construction lemma", construction_lemma),
        ("stability", stability),
        ("Lazard bridge", lazard_bridge),
        ("extremal groups", extremal_claims),
        ("regular structure", regular_structure),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", k + 1);
        if filter.as_ref().is_some_and(|f| !label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("{label}: {} [{detail}] {:.1}s", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
