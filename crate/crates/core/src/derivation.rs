//! Derivations annihilating a central element, as a subgroup of Hom(A, A).
//!
//! Der(L)_z is the kernel of the linear map sending a graded matrix M to the
//! Leibniz defects on all generator pairs together with z·M. Its nilpotent members
//! are exactly those whose reduction modulo p is nilpotent, so they are enumerated
//! as (nilpotent image in the mod-p reduction) + (kernel of the reduction).

use crate::error::{Error, Result};
use crate::graded::{fp_is_nilpotent, GradedMatrix, HomLayout};
use crate::liering::LieRing;
use crate::residue::{inverse_mod, GroupElement};
use crate::search::SEARCH_CAP_LOG;
use crate::subgroup::Subgroup;

/// Derivation defects and z·M for the matrix with digit vector `digits`.
fn defect(l: &LieRing, layout: &HomLayout, z: &GroupElement, m: &[u64]) -> Vec<u64> {
    let r = l.rank();
    let ty = l.ty();
    let mut out = Vec::new();
    let row = |i: usize| GroupElement(m[i * r..(i + 1) * r].to_vec());
    for i in 0..r {
        for j in i + 1..r {
            let lhs = GroupElement(layout.apply(&l.gen_bracket(i, j).0, m));
            let a = l.bracket(&row(i), &ty.basis(j));
            let b = l.bracket(&ty.basis(i), &row(j));
            out.extend(ty.sub(&lhs, &ty.add(&a, &b)).0);
        }
    }
    out.extend(layout.apply(&z.0, m));
    out
}

/// Der(L)_z in the digit coordinates of `HomLayout`.
pub fn derivation_subgroup(l: &LieRing, z: &GroupElement) -> Subgroup {
    let layout = HomLayout::new(l.ty());
    let r = l.rank();
    let npairs = r * r.saturating_sub(1) / 2;
    let mut dst = Vec::new();
    for _ in 0..=npairs {
        dst.extend_from_slice(l.ty().exponents());
    }
    let images: Vec<Vec<u64>> = (0..layout.len())
        .map(|b| {
            let mut digits = vec![0u64; layout.len()];
            digits[b] = 1;
            defect(l, &layout, z, &layout.from_digits(&digits))
        })
        .collect();
    Subgroup::kernel(l.p(), layout.digit_exps(), &dst, &images)
}

/// Inner derivations y ↦ [y, x] in digit coordinates.
pub fn inner_subgroup(l: &LieRing) -> Subgroup {
    let layout = HomLayout::new(l.ty());
    let gens: Vec<Vec<u64>> = (0..l.rank())
        .map(|k| layout.to_digits(crate::graded::inner_derivation(l, &l.ty().basis(k)).entries()))
        .collect();
    Subgroup::closure(l.p(), layout.digit_exps(), &gens)
}

/// Codes of all nilpotent members of Der(L)_z, sorted.
pub fn nilpotent_derivation_codes(l: &LieRing, z: &GroupElement) -> Result<Vec<u64>> {
    if l.order_log() > SEARCH_CAP_LOG {
        return Err(Error::TooLarge(format!("ring of order p^{} exceeds p^{SEARCH_CAP_LOG}", l.order_log())));
    }
    if !l.is_central(z) {
        return Err(Error::InvalidElement("z is not central".into()));
    }
    let layout = HomLayout::new(l.ty());
    if !layout.codes_fit() {
        return Err(Error::TooLarge("matrix codes overflow u64".into()));
    }
    let p = l.p();
    let r = l.rank();
    let der = derivation_subgroup(l, z);
    // Kernel of the reduction: digits at unit-step positions divisible by p.
    let red_kernel_gens: Vec<Vec<u64>> = (0..layout.len())
        .map(|b| {
            let mut d = vec![0u64; layout.len()];
            d[b] = if layout.step(b) == 1 { p } else { 1 };
            d
        })
        .collect();
    let red_kernel = Subgroup::closure(p, layout.digit_exps(), &red_kernel_gens);
    let lifts = der.intersect(&red_kernel).elements();

    // F_p basis of the reduction image, with preimages in Der(L)_z.
    let mut basis: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
    for g in der.generators() {
        let m = layout.from_digits(&g);
        let mut v: Vec<u64> = m.iter().map(|&x| x % p).collect();
        let mut pre = g.clone();
        for (c, bv, bpre) in &basis {
            let f = v[*c];
            if f != 0 {
                for (a, &b) in v.iter_mut().zip(bv) {
                    *a = (*a + p - f * b % p) % p;
                }
                pre = sub_digits(&layout, &pre, bpre, f);
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = inverse_mod(v[piv], p).expect("nonzero");
            for a in v.iter_mut() {
                *a = *a * inv % p;
            }
            pre = scale_digits(&layout, &pre, inv);
            basis.push((piv, v, pre));
        }
    }
    let d = basis.len();
    let mut codes = Vec::new();
    let mut coeffs = vec![0u64; d];
    let combos = p.pow(d as u32);
    for _ in 0..combos {
        let mut img = vec![0u64; layout.len()];
        let mut pre = vec![0u64; layout.len()];
        for (k, &a) in coeffs.iter().enumerate() {
            if a != 0 {
                for (x, &b) in img.iter_mut().zip(&basis[k].1) {
                    *x = (*x + a * b) % p;
                }
                pre = add_digits(&layout, &pre, &basis[k].2, a);
            }
        }
        if fp_is_nilpotent(&img, r, p) {
            for lift in &lifts {
                let total = add_digits(&layout, &pre, lift, 1);
                codes.push(layout.encode(&layout.from_digits(&total)));
            }
        }
        for k in (0..d).rev() {
            coeffs[k] += 1;
            if coeffs[k] < p {
                break;
            }
            coeffs[k] = 0;
        }
    }
    codes.sort_unstable();
    Ok(codes)
}

fn digit_mod(layout: &HomLayout, b: usize) -> u64 {
    layout.p().pow(layout.digit_exps()[b])
}

fn add_digits(layout: &HomLayout, a: &[u64], b: &[u64], f: u64) -> Vec<u64> {
    (0..a.len())
        .map(|k| {
            let m = digit_mod(layout, k);
            (a[k] + crate::residue::mul_mod(f % m, b[k], m)) % m
        })
        .collect()
}

fn sub_digits(layout: &HomLayout, a: &[u64], b: &[u64], f: u64) -> Vec<u64> {
    (0..a.len())
        .map(|k| {
            let m = digit_mod(layout, k);
            (a[k] + m - crate::residue::mul_mod(f % m, b[k], m)) % m
        })
        .collect()
}

fn scale_digits(layout: &HomLayout, a: &[u64], f: u64) -> Vec<u64> {
    (0..a.len()).map(|k| crate::residue::mul_mod(f % digit_mod(layout, k), a[k], digit_mod(layout, k))).collect()
}

/// All M with M a derivation, z·M = 0 and, optionally, M nilpotent.
pub fn enumerate_derivations_centralizing(
    l: &LieRing,
    z: &GroupElement,
    nilpotent_only: bool,
) -> Result<Vec<GradedMatrix>> {
    let layout = HomLayout::new(l.ty());
    if nilpotent_only {
        let codes = nilpotent_derivation_codes(l, z)?;
        return Ok(codes.into_iter().map(|c| GradedMatrix::new(l.ty(), layout.decode(c)).expect("graded")).collect());
    }
    if l.order_log() > SEARCH_CAP_LOG {
        return Err(Error::TooLarge(format!("ring of order p^{} exceeds p^{SEARCH_CAP_LOG}", l.order_log())));
    }
    Ok(derivation_subgroup(l, z)
        .elements()
        .into_iter()
        .map(|d| GradedMatrix::new(l.ty(), layout.from_digits(&d)).expect("graded"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{ring_v, ring_w, ring_x};
    use crate::graded::{is_derivation, is_nilpotent_endo};
    use crate::residue::AbelianType;

    fn z() -> GroupElement {
        GroupElement(vec![1, 0, 0])
    }

    #[test]
    fn spec_counts() {
        assert_eq!(nilpotent_derivation_codes(&ring_x(5), &z()).unwrap().len(), 15625);
        assert_eq!(nilpotent_derivation_codes(&ring_v(5), &z()).unwrap().len(), 3125);
        assert_eq!(nilpotent_derivation_codes(&ring_w(5), &z()).unwrap().len(), 15625);
        let c1 = LieRing::abelian(AbelianType::new(5, vec![1]).unwrap());
        let all = enumerate_derivations_centralizing(&c1, &GroupElement(vec![1]), false).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_zero());
    }

    /// Brute force over every graded matrix of V: derivation, z·M = 0 and exact nilpotency.
    #[test]
    fn matches_brute_force_on_v() {
        let v = ring_v(5);
        let layout = HomLayout::new(v.ty());
        let mut brute = Vec::new();
        let mut all_der = 0usize;
        // Row 0 holds the most significant digits, so these codes are exactly the matrices with z·M = 0.
        let total = 5u64.pow(layout.order_log() - 5);
        for code in 0..total {
            let e = layout.decode(code);
            let m = GradedMatrix::new(v.ty(), e).unwrap();
            if is_derivation(&v, &m) {
                all_der += 1;
                if is_nilpotent_endo(&m) {
                    brute.push(code);
                }
            }
        }
        assert_eq!(brute, nilpotent_derivation_codes(&v, &z()).unwrap());
        assert_eq!(all_der, enumerate_derivations_centralizing(&v, &z(), false).unwrap().len());
    }

    #[test]
    fn derivations_form_a_lie_ring_with_inner_ideal() {
        let w = ring_w(5);
        let all = enumerate_derivations_centralizing(&w, &z(), false).unwrap();
        let inner: Vec<GradedMatrix> = w.ty().elements().step_by(97).map(|x| crate::graded::inner_derivation(&w, &x)).collect();
        let inn = inner_subgroup(&w);
        let layout = HomLayout::new(w.ty());
        for (k, d) in all.iter().enumerate().step_by(1013) {
            let e = &all[(k * 7 + 3) % all.len()];
            assert!(is_derivation(&w, &d.commutator(e).unwrap()));
            for a in &inner {
                let c = d.commutator(a).unwrap();
                assert!(inn.contains(&layout.to_digits(c.entries())));
            }
        }
    }
}
