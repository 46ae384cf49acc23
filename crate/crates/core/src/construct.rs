//! Semidirect extensions of a Lie ring by a cyclic ring acting through a derivation,
//! and the quotient U(m, w, σ, z) = (U ⋊ ⟨w⟩) / ⟨p^{m−μ₁}w − z⟩.

use crate::error::{Error, Result};
use crate::graded::{is_derivation, GradedMatrix};
use crate::liering::LieRing;
use crate::residue::{AbelianType, GroupElement};
use crate::search::isomorphic_small;
use crate::subgroup::Subgroup;

#[derive(Debug, Clone)]
pub struct UConstructionSpec {
    pub u: LieRing,
    pub m: u32,
    pub sigma: GradedMatrix,
    pub z: GroupElement,
}

/// Position of a new cyclic factor of order p^m among non-increasing exponents,
/// and the new index of each old generator.
fn insertion(exps: &[u32], m: u32) -> (usize, Vec<usize>) {
    let pos = exps.iter().take_while(|&&e| e >= m).count();
    let map = (0..exps.len()).map(|i| if i < pos { i } else { i + 1 }).collect();
    (pos, map)
}

fn embed(x: &GroupElement, map: &[usize], rank: usize) -> GroupElement {
    let mut out = vec![0u64; rank];
    for (i, &c) in x.0.iter().enumerate() {
        out[map[i]] = c;
    }
    GroupElement(out)
}

fn check_order_obstruction(sigma: &GradedMatrix, m: u32) -> Result<()> {
    let ty = sigma.ty();
    let p = ty.p();
    let killed = (0..ty.rank()).all(|i| {
        let row = sigma.row(i);
        (0..m).fold(row, |acc, _| ty.scale(p, &acc)).is_zero()
    });
    if killed {
        Ok(())
    } else {
        Err(Error::OrderObstruction)
    }
}

/// L ⊕ (Z/p^m)w with [l, w] = l·σ.
pub fn semidirect_cyclic(l: &LieRing, m: u32, sigma: &GradedMatrix) -> Result<LieRing> {
    if sigma.ty() != l.ty() {
        return Err(Error::TypeMismatch("derivation and ring differ in type".into()));
    }
    if m == 0 {
        return Err(Error::InvalidType("cyclic factor must be nontrivial".into()));
    }
    if !is_derivation(l, sigma) {
        return Err(Error::NotADerivation);
    }
    check_order_obstruction(sigma, m)?;
    let exps = l.ty().exponents();
    let (pos, map) = insertion(exps, m);
    let mut new_exps = exps.to_vec();
    new_exps.insert(pos, m);
    let ty = AbelianType::new(l.p(), new_exps)?;
    let r = ty.rank();
    let mut brackets = Vec::new();
    for ((i, j), c) in l.table() {
        brackets.push(((map[i], map[j]), embed(&c, &map, r)));
    }
    for i in 0..l.rank() {
        brackets.push(((map[i], pos), embed(&sigma.row(i), &map, r)));
    }
    LieRing::new(ty, &brackets)
}

fn validate_spec(spec: &UConstructionSpec) -> Result<u32> {
    let ty = spec.u.ty();
    let violation = |s: &str| Err(Error::SpecViolation(s.into()));
    if spec.sigma.ty() != ty {
        return violation("sigma is not an endomorphism of U");
    }
    ty.check(&spec.z).map_err(|_| Error::SpecViolation("z is not an element of U".into()))?;
    let mu = ty.exponent_log();
    if !spec.u.is_central(&spec.z) {
        return violation("z is not central in U");
    }
    if ty.element_order_log(&spec.z) != mu {
        return violation("z does not have maximal order");
    }
    if !spec.sigma.apply(&spec.z)?.is_zero() {
        return violation("z·sigma is not zero");
    }
    if !is_derivation(&spec.u, &spec.sigma) {
        return violation("sigma is not a derivation");
    }
    if spec.m < 2 * mu {
        return Err(Error::SpecViolation(format!("m = {} is below 2·μ₁ = {}", spec.m, 2 * mu)));
    }
    if check_order_obstruction(&spec.sigma, spec.m).is_err() {
        return violation("p^m·sigma is not zero");
    }
    Ok(mu)
}

/// The quotient of U ⋊ ⟨w⟩ by ⟨p^{m−μ₁}w − z⟩.
///
/// When z is a basis element the quotient is written on the basis w, x_i (i ≠ k) by
/// substituting x_k := p^{m−μ₁}w; otherwise the general quotient is used.
pub fn u_construction(spec: &UConstructionSpec) -> Result<LieRing> {
    let mu = validate_spec(spec)?;
    let ty = spec.u.ty();
    let support: Vec<usize> = (0..ty.rank()).filter(|&i| spec.z.0[i] != 0).collect();
    let ring = match support.as_slice() {
        [k] if spec.z.0[*k] == 1 => substitute(spec, *k, mu)?,
        _ => general_quotient(spec, mu)?,
    };
    if spec.sigma.layout().is_nilpotent(spec.sigma.entries()) && ring.class().is_err() {
        return Err(Error::NotNilpotentWitness(format!("m = {}", spec.m)));
    }
    Ok(ring)
}

fn substitute(spec: &UConstructionSpec, k: usize, mu: u32) -> Result<LieRing> {
    let ty = spec.u.ty();
    let p = ty.p();
    let m = spec.m;
    let shift = p.pow(m - mu);
    let modw = p.pow(m);
    // New basis: w first (largest order), then the remaining generators in order.
    let others: Vec<usize> = (0..ty.rank()).filter(|&i| i != k).collect();
    let mut exps = vec![m];
    exps.extend(others.iter().map(|&i| ty.exponents()[i]));
    let new_ty = AbelianType::new(p, exps)?;
    let convert = |x: &GroupElement| {
        let mut out = vec![x.0[k] * shift % modw];
        out.extend(others.iter().map(|&i| x.0[i]));
        GroupElement(out)
    };
    let mut brackets = Vec::new();
    for (a, &i) in others.iter().enumerate() {
        for (b, &j) in others.iter().enumerate().skip(a + 1) {
            brackets.push(((a + 1, b + 1), convert(&spec.u.gen_bracket(i, j))));
        }
        brackets.push(((a + 1, 0), convert(&spec.sigma.row(i))));
    }
    LieRing::new(new_ty, &brackets)
}

fn general_quotient(spec: &UConstructionSpec, mu: u32) -> Result<LieRing> {
    let s = semidirect_cyclic(&spec.u, spec.m, &spec.sigma)?;
    let (pos, map) = insertion(spec.u.ty().exponents(), spec.m);
    let sty = s.ty();
    let mut gen = embed(&spec.z, &map, sty.rank());
    gen = sty.neg(&gen);
    gen.0[pos] = spec.u.p().pow(spec.m - mu);
    let ideal = Subgroup::of_type(sty, &[gen]);
    Ok(s.quotient(&ideal)?.0)
}

/// Whether Ω_{μ₁}(result) is isomorphic to U.
pub fn omega_recovers_base(result: &LieRing, u: &LieRing) -> Result<bool> {
    let omega = result.omega(u.ty().exponent_log());
    let (sub, _) = result.subring(&omega)?;
    Ok(isomorphic_small(&sub, u)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{representatives_221, ring_v, ring_x};

    fn z() -> GroupElement {
        GroupElement(vec![1, 0, 0])
    }

    #[test]
    fn spec_semidirect() {
        let v = ring_v(5);
        let sigma = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![5, 0, 1], vec![0, 0, 0]]).unwrap();
        let s = semidirect_cyclic(&v, 4, &sigma).unwrap();
        assert_eq!(s.order_log(), 9);
        // w has order 5^4 and sits first.
        assert_eq!(s.ty().exponents(), &[4, 2, 2, 1]);
        let u1 = GroupElement(vec![0, 0, 1, 0]);
        let w = GroupElement(vec![1, 0, 0, 0]);
        assert_eq!(s.bracket(&u1, &w).0, vec![0, 5, 0, 1]);
        let x = ring_x(5);
        let t = semidirect_cyclic(&x, 1, &GradedMatrix::zero(x.ty())).unwrap();
        assert!(t.is_abelian());
        assert_eq!(t.ty().exponents(), &[2, 2, 1, 1]);
    }

    #[test]
    fn semidirect_errors() {
        let v = ring_v(5);
        let bad = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]).unwrap();
        assert!(matches!(semidirect_cyclic(&v, 4, &bad), Err(Error::NotADerivation)));
        let sigma = GradedMatrix::from_rows(v.ty(), &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert!(matches!(semidirect_cyclic(&v, 0, &sigma), Err(Error::InvalidType(_))));
        let x = ring_x(5);
        let unit = GradedMatrix::from_rows(x.ty(), &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]).unwrap();
        assert!(matches!(semidirect_cyclic(&x, 1, &unit), Err(Error::OrderObstruction)));
    }

    #[test]
    fn spec_u_construction() {
        let v = ring_v(5);
        let spec = UConstructionSpec { u: v.clone(), m: 4, sigma: GradedMatrix::zero(v.ty()), z: z() };
        let r = u_construction(&spec).unwrap();
        let fp = r.fingerprint().unwrap();
        assert_eq!((fp.order_log, fp.invariants.coexponent, fp.class), (7, 3, 2));
        assert!(omega_recovers_base(&r, &v).unwrap());
        let short = UConstructionSpec { m: 3, ..spec };
        assert!(matches!(u_construction(&short), Err(Error::SpecViolation(_))));
    }

    #[test]
    fn substitution_agrees_with_general_quotient() {
        for rep in representatives_221(5).iter().step_by(4) {
            let spec = UConstructionSpec { u: rep.ring.clone(), m: 4, sigma: rep.sigma.clone(), z: z() };
            let a = u_construction(&spec).unwrap();
            let b = general_quotient(&spec, 2).unwrap();
            assert_eq!(a.fingerprint().unwrap(), b.fingerprint().unwrap());
            assert_eq!(a.order_log() + 2, 5 + 4);
        }
    }
}
