//! Backtracking over generator images: isomorphisms between small Lie rings and
//! Lie automorphisms fixing a line.
//!
//! Generator i may only go to elements of Ω_{e_i} of the target with the same order,
//! height and membership in every term of the lower central series and the center.
//! Images are kept linearly independent modulo p, which is exactly bijectivity, and
//! each generator bracket is checked as soon as every generator it involves is placed.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::graded::{line_scalar, GradedMatrix};
use crate::liering::LieRing;
use crate::residue::{add_mod, inverse_mod, mul_mod, AbelianType, GroupElement};
use crate::subgroup::Subgroup;

pub const SEARCH_CAP_LOG: u32 = 5;

/// Invariant subgroups used as candidate filters, listed in the same order for both rings.
fn filter_subgroups(l: &LieRing) -> Result<Vec<Subgroup>> {
    let mut subs = l.lower_central_series()?;
    subs.push(l.center());
    Ok(subs)
}

struct Plan {
    r: usize,
    candidates: Vec<Vec<GroupElement>>,
    /// Generator pairs (i, j, [x_i, x_j]) to check once generator `level` is placed.
    checks: Vec<Vec<(usize, usize, GroupElement)>>,
    line: Option<LineGoal>,
}

/// Condition on φ(z), checked at the level where every generator in z's support is placed:
/// φ(z) ∈ ⟨z⟩ as a unit multiple, or φ(z) equal to a given target.
struct LineGoal {
    level: usize,
    z: GroupElement,
    target: Option<GroupElement>,
}

fn top_support(z: &GroupElement) -> usize {
    z.0.iter().rposition(|&v| v != 0).unwrap_or(0)
}

fn plan(src: &LieRing, dst: &LieRing, fix_line: Option<&GroupElement>) -> Result<Plan> {
    let r = src.rank();
    let src_subs = filter_subgroups(src)?;
    let dst_subs = filter_subgroups(dst)?;
    if src_subs.len() != dst_subs.len() {
        return Ok(Plan { r, candidates: vec![Vec::new(); r], checks: vec![Vec::new(); r], line: None });
    }
    let (sty, dty) = (src.ty(), dst.ty());
    let signature = |ty: &AbelianType, subs: &[Subgroup], x: &GroupElement| {
        let member: Vec<bool> = subs.iter().map(|s| s.contains(&x.0)).collect();
        (ty.element_order_log(x), ty.height(x), member)
    };
    let mut candidates = Vec::with_capacity(r);
    for i in 0..r {
        let xi = sty.basis(i);
        let want = signature(sty, &src_subs, &xi);
        let pool = dty.omega_elements(sty.exponents()[i]);
        candidates.push(pool.into_iter().filter(|y| signature(dty, &dst_subs, y) == want).collect::<Vec<_>>());
    }
    let mut checks = vec![Vec::new(); r];
    for i in 0..r {
        for j in i + 1..r {
            let c = src.gen_bracket(i, j);
            let level = c.0.iter().enumerate().filter(|(_, &v)| v != 0).map(|(k, _)| k).fold(j, usize::max);
            checks[level].push((i, j, c));
        }
    }
    let line = fix_line.map(|z| LineGoal { level: top_support(z), z: z.clone(), target: None });
    Ok(Plan { r, candidates, checks, line })
}

struct Walker<'a, F> {
    dst: &'a LieRing,
    plan: &'a Plan,
    images: Vec<GroupElement>,
    /// Echelon rows of the images modulo p, with pivot columns.
    echelon: Vec<(usize, Vec<u64>)>,
    visit: F,
}

impl<'a, F: FnMut(&[GroupElement]) -> ControlFlow<()>> Walker<'a, F> {
    fn image_of(&self, x: &GroupElement, upto: usize) -> Vec<u64> {
        let ty = self.dst.ty();
        let mut out = vec![0u64; ty.rank()];
        for (k, &c) in x.0.iter().enumerate().take(upto + 1) {
            if c == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = ty.modulus(j);
                *o = add_mod(*o, mul_mod(c % m, self.images[k].0[j], m), m);
            }
        }
        out
    }

    fn independent_push(&mut self, y: &GroupElement) -> bool {
        let p = self.dst.p();
        let mut v: Vec<u64> = y.0.iter().map(|&c| c % p).collect();
        for (c, row) in &self.echelon {
            let f = v[*c];
            if f != 0 {
                for (a, &b) in v.iter_mut().zip(row) {
                    *a = (*a + p - f * b % p) % p;
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else { return false };
        let inv = inverse_mod(v[piv], p).expect("nonzero");
        for a in v.iter_mut() {
            *a = *a * inv % p;
        }
        self.echelon.push((piv, v));
        true
    }

    fn go(&mut self, level: usize) -> ControlFlow<()> {
        if level == self.plan.r {
            return (self.visit)(&self.images);
        }
        for y in &self.plan.candidates[level] {
            if !self.independent_push(y) {
                continue;
            }
            self.images.push(y.clone());
            let mut ok = true;
            for (i, j, c) in &self.plan.checks[level] {
                let lhs = self.dst.bracket(&self.images[*i], &self.images[*j]);
                if lhs.0 != self.image_of(c, level) {
                    ok = false;
                    break;
                }
            }
            if ok {
                if let Some(goal) = &self.plan.line {
                    if goal.level == level {
                        let img = self.image_of(&goal.z, level);
                        ok = match &goal.target {
                            Some(t) => img == t.0,
                            None => line_scalar(self.dst.ty(), &goal.z, &img).is_some(),
                        };
                    }
                }
            }
            let flow = if ok { self.go(level + 1) } else { ControlFlow::Continue(()) };
            self.images.pop();
            self.echelon.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn check_size(l: &LieRing) -> Result<()> {
    if l.order_log() > SEARCH_CAP_LOG {
        return Err(Error::TooLarge(format!("ring of order p^{} exceeds p^{SEARCH_CAP_LOG}", l.order_log())));
    }
    Ok(())
}

/// Visits every bijective bracket-preserving map src → dst (with φ(z) ∈ ⟨z⟩ when a
/// line is given), as the list of generator images.
pub fn for_each_isomorphism<F>(src: &LieRing, dst: &LieRing, fix_line: Option<&GroupElement>, visit: F) -> Result<()>
where
    F: FnMut(&[GroupElement]) -> ControlFlow<()>,
{
    if src.ty() != dst.ty() {
        return Ok(());
    }
    let plan = plan(src, dst, fix_line)?;
    let mut walker = Walker { dst, plan: &plan, images: Vec::new(), echelon: Vec::new(), visit };
    let _ = walker.go(0);
    Ok(())
}

fn to_matrix(ty: &AbelianType, images: &[GroupElement]) -> GradedMatrix {
    GradedMatrix::new(ty, images.iter().flat_map(|y| y.0.iter().copied()).collect()).expect("images respect orders")
}

/// An isomorphism L₁ → L₂ if one exists, found by exhaustive search after a
/// fingerprint comparison.
pub fn isomorphic_small(l1: &LieRing, l2: &LieRing) -> Result<Option<GradedMatrix>> {
    check_size(l1)?;
    check_size(l2)?;
    if l1.ty() != l2.ty() || l1.fingerprint()? != l2.fingerprint()? {
        return Ok(None);
    }
    let mut found = None;
    for_each_isomorphism(l1, l2, None, |images| {
        found = Some(to_matrix(l2.ty(), images));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Visits every Lie automorphism π with z·π ∈ ⟨z⟩, passing the matrix entries and
/// the unit α with z·π = α·z.
pub fn for_each_lie_aut_fixing_line<F>(l: &LieRing, z: &GroupElement, mut visit: F) -> Result<()>
where
    F: FnMut(&[u64], u64) -> ControlFlow<()>,
{
    check_size(l)?;
    let ty = l.ty().clone();
    let mut buf = vec![0u64; ty.rank() * ty.rank()];
    for_each_isomorphism(l, l, Some(z), |images| {
        for (i, y) in images.iter().enumerate() {
            buf[i * ty.rank()..(i + 1) * ty.rank()].copy_from_slice(&y.0);
        }
        let zi = crate::graded::HomLayout::new(&ty).apply(&z.0, &buf);
        let alpha = line_scalar(&ty, z, &zi).expect("line is fixed");
        visit(&buf, alpha)
    })
}

pub fn enumerate_lie_auts_fixing_line(l: &LieRing, z: &GroupElement) -> Result<Vec<GradedMatrix>> {
    let mut out = Vec::new();
    for_each_lie_aut_fixing_line(l, z, |m, _| {
        out.push(GradedMatrix::new(l.ty(), m.to_vec()).expect("graded"));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Some Lie automorphism sending z to `target`, if any.
pub fn automorphism_moving(l: &LieRing, z: &GroupElement, target: &GroupElement) -> Result<Option<GradedMatrix>> {
    check_size(l)?;
    let mut plan = plan(l, l, None)?;
    plan.line = Some(LineGoal { level: top_support(z), z: z.clone(), target: Some(target.clone()) });
    let mut found = None;
    let mut walker = Walker {
        dst: l,
        plan: &plan,
        images: Vec::new(),
        echelon: Vec::new(),
        visit: |images: &[GroupElement]| {
            found = Some(to_matrix(l.ty(), images));
            ControlFlow::Break(())
        },
    };
    let _ = walker.go(0);
    Ok(found)
}

/// Whether M maps brackets of `src` to brackets of `dst` on all generator pairs.
pub fn preserves_brackets(src: &LieRing, dst: &LieRing, m: &GradedMatrix) -> bool {
    let layout = m.layout();
    let r = src.rank();
    (0..r).all(|i| {
        (i + 1..r).all(|j| {
            let lhs = layout.apply(&src.gen_bracket(i, j).0, m.entries());
            lhs == dst.bracket(&m.row(i), &m.row(j)).0
        })
    })
}
