//! Subgroups of GL₂(F_ℓ): Dickson classes with witnesses, saturation, the
//! determinant-one part, projective images and maximal normal pro-ℓ subgroups.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::GroupClosure;
use crate::mat::Mat2;
use crate::padic::PadicContext;

/// A point (x : y) of P¹(Z/ℓᵐ), normalized to (1, t) or (ℓu, 1).
pub type Line = [u64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExceptionalKind {
    A4,
    S4,
    A5,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DicksonClass {
    SplitCartan { lines: [Line; 2] },
    NonsplitCartan { generator: Mat2 },
    NormalizerSplitCartan { lines: [Line; 2] },
    NormalizerNonsplitCartan { generator: Mat2 },
    Borel { line: Line },
    Exceptional { kind: ExceptionalKind, projective_order: usize },
    ContainsSL2,
}

impl DicksonClass {
    pub fn tag(&self) -> &'static str {
        match self {
            DicksonClass::SplitCartan { .. } => "split-cartan",
            DicksonClass::NonsplitCartan { .. } => "nonsplit-cartan",
            DicksonClass::NormalizerSplitCartan { .. } => "normalizer-split-cartan",
            DicksonClass::NormalizerNonsplitCartan { .. } => "normalizer-nonsplit-cartan",
            DicksonClass::Borel { .. } => "borel",
            DicksonClass::Exceptional { kind: ExceptionalKind::A4, .. } => "exceptional-a4",
            DicksonClass::Exceptional { kind: ExceptionalKind::S4, .. } => "exceptional-s4",
            DicksonClass::Exceptional { kind: ExceptionalKind::A5, .. } => "exceptional-a5",
            DicksonClass::ContainsSL2 => "contains-sl2",
        }
    }

    pub fn is_cartan(&self) -> bool {
        matches!(self, DicksonClass::SplitCartan { .. } | DicksonClass::NonsplitCartan { .. })
    }

    pub fn is_normalizer(&self) -> bool {
        matches!(
            self,
            DicksonClass::NormalizerSplitCartan { .. } | DicksonClass::NormalizerNonsplitCartan { .. }
        )
    }

    /// Witness data as `key=value` text.
    pub fn witness(&self) -> String {
        let line = |l: &Line| format!("({}:{})", l[0], l[1]);
        match self {
            DicksonClass::SplitCartan { lines } | DicksonClass::NormalizerSplitCartan { lines } => {
                format!("lines={},{}", line(&lines[0]), line(&lines[1]))
            }
            DicksonClass::NonsplitCartan { generator }
            | DicksonClass::NormalizerNonsplitCartan { generator } => format!("generator={generator}"),
            DicksonClass::Borel { line: l } => format!("line={}", line(l)),
            DicksonClass::Exceptional { projective_order, .. } => {
                format!("projective_order={projective_order}")
            }
            DicksonClass::ContainsSL2 => "sl2=contained".to_string(),
        }
    }
}

impl fmt::Display for DicksonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tag(), self.witness())
    }
}

/// All points of P¹(Z/ℓᵐ).
pub fn projective_line(ctx: PadicContext) -> Vec<Line> {
    let m = ctx.modulus();
    let p = ctx.prime();
    let mut out: Vec<Line> = (0..m).map(|t| [1, t]).collect();
    out.extend((0..m / p).map(|u| [u * p, 1]));
    out
}

/// Whether g maps the line spanned by `v` to itself.
pub fn fixes_line(g: &Mat2, v: &Line) -> bool {
    image_line(g, v) == *v
}

/// The line g·v, normalized.
pub fn image_line(g: &Mat2, v: &Line) -> Line {
    let ctx = g.context();
    let m = ctx.modulus();
    let [a, b, c, d] = g.entries();
    let x = (crate::padic::mulmod(a, v[0], m) + crate::padic::mulmod(b, v[1], m)) % m;
    let y = (crate::padic::mulmod(c, v[0], m) + crate::padic::mulmod(d, v[1], m)) % m;
    normalize_line(ctx, [x, y])
}

fn normalize_line(ctx: PadicContext, v: Line) -> Line {
    let m = ctx.modulus();
    let p = ctx.prime();
    if v[0] % p != 0 {
        let inv = crate::padic::invmod(v[0], m).expect("unit");
        [1, crate::padic::mulmod(v[1], inv, m)]
    } else {
        let inv = crate::padic::invmod(v[1], m).expect("primitive vector");
        [crate::padic::mulmod(v[0], inv, m), 1]
    }
}

/// Lines fixed by every generator of J.
pub fn common_eigenlines(j: &GroupClosure) -> Vec<Line> {
    projective_line(j.context())
        .into_iter()
        .filter(|v| j.generators().iter().all(|g| fixes_line(g, v)))
        .collect()
}

fn eigenlines(g: &Mat2) -> Vec<Line> {
    projective_line(g.context()).into_iter().filter(|v| fixes_line(g, v)).collect()
}

fn commutes(x: &Mat2, y: &Mat2) -> bool {
    x.mul(y) == y.mul(x)
}

/// Whether y = αI + βh for some α, β.
fn in_span_of_identity_and(y: &Mat2, h: &Mat2) -> bool {
    let ctx = h.context();
    let m = ctx.modulus();
    (0..m).any(|beta| {
        let r = y.sub(&h.scale(beta));
        r.is_scalar()
    })
}

fn sl2_order_mod_ell(p: u64) -> usize {
    (p * (p * p - 1)) as usize
}

/// Dickson classification of J ⊆ GL₂(F_ℓ).
pub fn classify_mod_ell(j: &GroupClosure) -> Result<DicksonClass> {
    let ctx = j.context();
    if ctx.precision() != 1 {
        return Err(Error::PreconditionViolated("classification needs precision 1".into()));
    }
    let p = ctx.prime();
    let order = j.order();
    if order as u64 % p == 0 {
        if let Some(&line) = common_eigenlines(j).first() {
            return Ok(DicksonClass::Borel { line });
        }
        let one = 1 % ctx.modulus();
        let sl = j.elements().filter(|g| g.det().residue() == one).count();
        if sl == sl2_order_mod_ell(p) {
            return Ok(DicksonClass::ContainsSL2);
        }
        return Err(Error::UnclassifiableInternal(format!(
            "order {order} divisible by {p} without Borel line or SL2"
        )));
    }
    if j.is_abelian() {
        let lines = common_eigenlines(j);
        if lines.len() >= 2 {
            return Ok(DicksonClass::SplitCartan { lines: [lines[0], lines[1]] });
        }
        if lines.is_empty() {
            if let Some(h) = j.elements().find(|h| eigenlines(h).is_empty()) {
                return Ok(DicksonClass::NonsplitCartan { generator: h });
            }
        }
        return Err(Error::UnclassifiableInternal("abelian group with one common line".into()));
    }
    let gens = j.generators();
    for h in j.elements().filter(|h| !h.is_scalar()) {
        let ls = eigenlines(&h);
        if ls.len() == 2 {
            let pair = [ls[0], ls[1]];
            let permuted = gens.iter().all(|g| {
                let (a, b) = (image_line(g, &pair[0]), image_line(g, &pair[1]));
                (a == pair[0] && b == pair[1]) || (a == pair[1] && b == pair[0])
            });
            if permuted {
                return Ok(DicksonClass::NormalizerSplitCartan { lines: pair });
            }
        } else if ls.is_empty() {
            let normalizes = gens.iter().all(|g| {
                let gi = g.inverse().expect("group element");
                in_span_of_identity_and(&g.mul(&h).mul(&gi), &h)
            });
            if normalizes {
                return Ok(DicksonClass::NormalizerNonsplitCartan { generator: h });
            }
        }
    }
    let pd = projective_data(j)?;
    let kind = match pd.order {
        12 => ExceptionalKind::A4,
        24 if pd.element_orders.contains_key(&4) => ExceptionalKind::S4,
        60 => ExceptionalKind::A5,
        _ => {
            return Err(Error::UnclassifiableInternal(format!(
                "projective order {} outside the exceptional list",
                pd.order
            )))
        }
    };
    Ok(DicksonClass::Exceptional { kind, projective_order: pd.order })
}

/// Classification of the reduction of G modulo ℓ.
pub fn classify(g: &GroupClosure) -> Result<DicksonClass> {
    classify_mod_ell(&g.reduce(1)?)
}

/// Re-checks the defining property of `class` against J.
pub fn verify_witness(j: &GroupClosure, class: &DicksonClass) -> bool {
    let gens = j.generators();
    let ctx = j.context();
    match class {
        DicksonClass::ContainsSL2 => {
            let one = 1 % ctx.modulus();
            j.elements().filter(|g| g.det().residue() == one).count()
                == sl2_order_mod_ell(ctx.prime())
        }
        DicksonClass::Borel { line } => gens.iter().all(|g| fixes_line(g, line)),
        DicksonClass::SplitCartan { lines } => {
            lines[0] != lines[1] && gens.iter().all(|g| lines.iter().all(|l| fixes_line(g, l)))
        }
        DicksonClass::NonsplitCartan { generator } => {
            eigenlines(generator).is_empty() && gens.iter().all(|g| commutes(g, generator))
        }
        DicksonClass::NormalizerSplitCartan { lines } => {
            lines[0] != lines[1]
                && gens.iter().all(|g| {
                    let (a, b) = (image_line(g, &lines[0]), image_line(g, &lines[1]));
                    (a == lines[0] && b == lines[1]) || (a == lines[1] && b == lines[0])
                })
        }
        DicksonClass::NormalizerNonsplitCartan { generator } => {
            eigenlines(generator).is_empty()
                && gens.iter().all(|g| {
                    let gi = g.inverse().expect("group element");
                    in_span_of_identity_and(&g.mul(generator).mul(&gi), generator)
                })
        }
        DicksonClass::Exceptional { kind, projective_order } => match projective_data(j) {
            Ok(pd) => {
                pd.order == *projective_order
                    && match kind {
                        ExceptionalKind::A4 => pd.order == 12 && !pd.element_orders.contains_key(&4),
                        ExceptionalKind::S4 => pd.order == 24 && pd.element_orders.contains_key(&4),
                        ExceptionalKind::A5 => pd.order == 60,
                    }
            }
            Err(_) => false,
        },
    }
}

/// Order of PJ = J / (J ∩ scalars) and how many elements of PJ have each order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveData {
    pub order: usize,
    pub element_orders: BTreeMap<u32, usize>,
}

pub fn projective_data(j: &GroupClosure) -> Result<ProjectiveData> {
    if j.context().precision() != 1 {
        return Err(Error::PreconditionViolated("projective data needs precision 1".into()));
    }
    let scalars = j.elements().filter(|g| g.is_scalar()).count();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for g in j.elements() {
        let mut k = 1u32;
        let mut x = g;
        while !x.is_scalar() {
            x = x.mul(&g);
            k += 1;
        }
        *counts.entry(k).or_default() += 1;
    }
    for v in counts.values_mut() {
        *v /= scalars;
    }
    Ok(ProjectiveData { order: j.order() / scalars, element_orders: counts })
}

/// Closure of G and the unit scalars.
pub fn saturate(g: &GroupClosure, cap: usize) -> Result<GroupClosure> {
    let ctx = g.context();
    let scalars: Vec<Mat2> =
        ctx.unit_group_generators().into_iter().map(|u| Mat2::scalar(ctx, u)).collect();
    g.extend(&scalars, cap)
}

/// G ∩ SL₂.
pub fn det1_part(g: &GroupClosure) -> Result<GroupClosure> {
    let one = 1 % g.context().modulus();
    g.filter(|x| x.det().residue() == one)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProLCase {
    PrimeToEll,
    BorelWithEll,
    FullSL2,
}

#[derive(Clone, Debug)]
pub struct ProLStructure {
    pub case: ProLCase,
    pub subgroup: GroupClosure,
    /// |G / N(G)| at this precision.
    pub quotient_order: usize,
}

/// Maximal normal pro-ℓ subgroup N(G) of G ⊆ SL₂.
pub fn max_normal_pro_ell(g: &GroupClosure) -> Result<ProLStructure> {
    if !g.is_sl2_subset() {
        return Err(Error::PreconditionViolated("max_normal_pro_ell needs G inside SL2".into()));
    }
    let p = g.context().prime();
    let j = g.reduce(1)?;
    let (case, subgroup) = if j.order() as u64 % p != 0 {
        (ProLCase::PrimeToEll, g.filter(|x| x.congruent_to_identity(1))?)
    } else {
        match classify_mod_ell(&j)? {
            DicksonClass::Borel { .. } => {
                let two = 2 % p;
                (ProLCase::BorelWithEll, g.filter(|x| x.trace().residue() % p == two)?)
            }
            DicksonClass::ContainsSL2 => (ProLCase::FullSL2, g.filter(|x| x.congruent_to_identity(1))?),
            other => {
                return Err(Error::CaseNotCovered(format!(
                    "image mod l of order divisible by l classified as {}",
                    other.tag()
                )))
            }
        }
    };
    let quotient_order = g.order() / subgroup.order();
    Ok(ProLStructure { case, subgroup, quotient_order })
}
