use proptest::prelude::*;

use coexlab_core::census::{psi_assembled, psi_formula, BaseRing};
use coexlab_core::extremal::extremal_group;
use coexlab_core::group::FiniteGroup;
use coexlab_core::lazard::group_from_liering;
use coexlab_core::persist::{run_census, CensusFile, PartitionChoice};

fn group_laws<G: FiniteGroup>(g: &G, a: u64, b: u64, c: u64) {
    let (x, y, z) = (g.element(a % g.size()), g.element(b % g.size()), g.element(c % g.size()));
    assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
    assert!(g.is_identity(&g.mul(&x, &g.inv(&x))));
    assert_eq!(g.mul(&x, &g.identity()), x);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lazard_groups_satisfy_group_laws(base in 0usize..3, p in prop::sample::select(vec![5u64, 7]), a: u64, b: u64, c: u64) {
        let g = group_from_liering(&BaseRing::ALL[base].ring(p)).unwrap();
        group_laws(&g, a, b, c);
    }

    #[test]
    fn extremal_groups_satisfy_group_laws(case in 0usize..3, a: u64, b: u64, c: u64) {
        let (p, f, n) = [(5u64, 2usize, 4u32), (5, 3, 5), (7, 3, 5)][case];
        let (one, two) = extremal_group(p, f, n).unwrap();
        group_laws(&one, a, b, c);
        group_laws(&two, a, b, c);
    }

    #[test]
    fn closed_formula_matches_assembly(p in prop::sample::select(vec![5u64, 7]), n in 7u32..=14) {
        prop_assert_eq!(psi_formula(p, n).unwrap(), psi_assembled(p, n).unwrap());
    }
}

#[test]
fn census_file_roundtrips() {
    for choice in ["2,1", "3"] {
        let file = run_census(5, 8, &PartitionChoice::parse(choice).unwrap()).unwrap();
        let text = file.to_json();
        let back = CensusFile::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.records().unwrap().len(), file.records.len());
    }
}

#[test]
fn tampered_census_file_is_rejected() {
    let file = run_census(5, 7, &PartitionChoice::parse("3").unwrap()).unwrap();
    let text = file.to_json().replacen("\"p\": 5", "\"p\": 7", 1);
    assert!(CensusFile::from_json(&text).is_err());
}
