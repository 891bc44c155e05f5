//! Finite-precision checks of the structure theorems relating a closed subgroup
//! G ⊆ GL₂(Z_ℓ) to its special Lie algebra.
//!
//! A closure modulo ℓᴺ stands for its full preimage Ĝ in GL₂(Z_ℓ) (or in SL₂(Z_ℓ)
//! for groups inside SL₂). Lie algebras, derived subgroups and maximal normal
//! pro-ℓ subgroups of Ĝ reduce to the corresponding objects computed modulo ℓᴺ,
//! so every conclusion checked here is a necessary consequence of the theorem
//! and a `Violated` outcome is a genuine counterexample. Checks refuse to run
//! when N is too small for the conclusion to be visible.

use std::fmt;
use std::time::{Duration, Instant};

use crate::dickson::{
    classify_mod_ell, common_eigenlines, det1_part, max_normal_pro_ell, projective_data, saturate,
    DicksonClass, ExceptionalKind,
};
use crate::error::{Error, Result};
use crate::group::{GroupClosure, DEFAULT_CAP};
use crate::lie::{special_lie_algebra, LieModule};
use crate::mat::Mat2;
use crate::padic::{mulmod, powmod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// L(G) ⊇ ℓˢ·sl₂ ⇒ L(N(G)) ⊇ ℓ^{2s}·sl₂, for G ⊆ SL₂ with Cartan or Borel image.
    Star,
    /// L(G) ⊇ ℓˢ·sl₂ ⇒ G' ⊇ B_ℓ(4s).
    StarStar,
    /// ℓ = 2, G ⊆ SL₂ trivial mod 4: L(G) ⊇ 2ˢ·sl₂ ⇒ G ⊇ B₂(6s).
    Sl2Z2,
    /// ℓ = 2, G trivial mod 4 with det ≡ 1 mod 8: L(G) ⊇ 2ⁿ·sl₂ ⇒ G' ⊇ B₂(12n + 2).
    Gl2Z2,
    /// The j_n case distinction for L(G) modulo ℓⁿ.
    Trichotomy,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::Star => "star",
            Theorem::StarStar => "starstar",
            Theorem::Sl2Z2 => "sl2z2",
            Theorem::Gl2Z2 => "gl2z2",
            Theorem::Trichotomy => "trichotomy",
        }
    }

    pub fn from_tag(s: &str) -> Option<Theorem> {
        [Theorem::Star, Theorem::StarStar, Theorem::Sl2Z2, Theorem::Gl2Z2, Theorem::Trichotomy]
            .into_iter()
            .find(|t| t.tag() == s)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified { hypothesis_held: bool },
    /// `witness` lies in the claimed subgroup (or module) but not in the computed one.
    Violated { witness: Mat2 },
    Inapplicable(String),
    InsufficientPrecision { required: u32 },
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Verified { .. } => "verified",
            Outcome::Violated { .. } => "violated",
            Outcome::Inapplicable(_) => "inapplicable",
            Outcome::InsufficientPrecision { .. } => "insufficient",
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Outcome::Violated { .. })
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub prime: u64,
    pub precision: u32,
    /// s for the implications, n for the trichotomy and the GL₂(Z₂) statement.
    pub parameter: u32,
    pub generators: Vec<Mat2>,
    pub outcome: Outcome,
    /// Which branch fired, thresholds observed, and similar.
    pub detail: String,
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(theorem: Theorem, g: &GroupClosure, parameter: u32) -> Self {
        let ctx = g.context();
        VerificationReport {
            theorem,
            prime: ctx.prime(),
            precision: ctx.precision(),
            parameter,
            generators: g.generators().to_vec(),
            outcome: Outcome::Inapplicable(String::new()),
            detail: String::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// Deterministic `key=value` line (no timing).
    pub fn to_line(&self) -> String {
        let mut s = format!(
            "theorem={} prime={} precision={} param={} outcome={}",
            self.theorem,
            self.prime,
            self.precision,
            self.parameter,
            self.outcome.tag()
        );
        match &self.outcome {
            Outcome::Verified { hypothesis_held } => s += &format!(" hypothesis={hypothesis_held}"),
            Outcome::Violated { witness } => s += &format!(" witness={witness}"),
            Outcome::Inapplicable(r) => s += &format!(" reason={}", r.replace(' ', "_")),
            Outcome::InsufficientPrecision { required } => s += &format!(" required={required}"),
        }
        if !self.detail.is_empty() {
            s += &format!(" {}", self.detail);
        }
        s
    }
}

fn finish(mut r: VerificationReport, start: Instant, outcome: Outcome) -> VerificationReport {
    r.outcome = outcome;
    r.elapsed = start.elapsed();
    r
}

fn is_square_unit_mod_ell(u: u64, p: u64) -> bool {
    let r = u % p;
    r != 0 && powmod(r, (p - 1) / 2, p) == 1
}

/// Whether every determinant of G is a square in Z_ℓ^× (ℓ odd).
pub fn dets_are_squares(g: &GroupClosure) -> bool {
    let p = g.context().prime();
    g.generators().iter().all(|x| is_square_unit_mod_ell(x.det().residue(), p))
}

/// The hypothesis of the (⋆) implication for G ⊆ SL₂: G(ℓ) inside a Cartan or
/// Borel subgroup and |G/N(G)| ≠ 4. Returns the reason when it fails.
pub fn star_applicability(g: &GroupClosure) -> Result<std::result::Result<(), String>> {
    let j = g.reduce(1)?;
    let class = classify_mod_ell(&j)?;
    if !(class.is_cartan() || matches!(class, DicksonClass::Borel { .. })) {
        return Ok(Err(format!("image mod l is {}", class.tag())));
    }
    let p = g.context().prime() as usize;
    let q = if j.order() % p == 0 { j.order() / p } else { j.order() };
    if q == 4 {
        return Ok(Err("|G/N(G)| = 4".into()));
    }
    Ok(Ok(()))
}

/// Hypotheses (a), (b) of the (⋆⋆) implication, read off Sat(G(ℓ))^{det=1}.
pub fn starstar_applicability(g: &GroupClosure) -> Result<std::result::Result<(), String>> {
    let ctx = g.context();
    if ctx.prime() == 2 {
        return Ok(Err("needs an odd prime".into()));
    }
    if !dets_are_squares(g) {
        return Ok(Err("determinants are not all squares".into()));
    }
    let j = g.reduce(1)?;
    let s = det1_part(&saturate(&j, DEFAULT_CAP)?)?;
    let class = classify_mod_ell(&s)?;
    let p = ctx.prime() as usize;
    match class {
        DicksonClass::SplitCartan { .. } | DicksonClass::NonsplitCartan { .. } => {
            if s.order() == 4 {
                return Ok(Err("Sat(G)^{det=1}(l) has order 4".into()));
            }
        }
        DicksonClass::Borel { .. } => {
            if s.order() / p == 4 {
                return Ok(Err("Sat(G)^{det=1}(l) has quotient of order 4 by its Sylow".into()));
            }
        }
        other => return Ok(Err(format!("Sat(G)^{{det=1}}(l) is {}", other.tag()))),
    }
    Ok(Ok(()))
}

fn scaled_sl2_witness(l: &LieModule, s: u32) -> Mat2 {
    let ctx = l.context();
    let q = ctx.pow_prime(s);
    [Mat2::traceless(ctx, q, 0, 0), Mat2::traceless(ctx, 0, q, 0), Mat2::traceless(ctx, 0, 0, q)]
        .into_iter()
        .find(|x| !l.contains(x))
        .unwrap_or_else(|| Mat2::zero(ctx))
}

/// (⋆): for G ⊆ SL₂, ℓ odd.
pub fn check_star(g: &GroupClosure, s: u32) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = VerificationReport::new(Theorem::Star, g, s);
    let ctx = g.context();
    if s == 0 {
        return Err(Error::InvalidParams("s must be positive".into()));
    }
    if ctx.prime() == 2 {
        return Ok(finish(r, start, Outcome::Inapplicable("needs an odd prime".into())));
    }
    if !g.is_sl2_subset() {
        return Ok(finish(r, start, Outcome::Inapplicable("G is not inside SL2".into())));
    }
    if let Err(reason) = star_applicability(g)? {
        return Ok(finish(r, start, Outcome::Inapplicable(reason)));
    }
    if ctx.precision() < 2 * s + 1 {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required: 2 * s + 1 }));
    }
    let l = special_lie_algebra(g)?;
    if !l.contains_scaled_sl2(s)? {
        return Ok(finish(r, start, Outcome::Verified { hypothesis_held: false }));
    }
    let n = max_normal_pro_ell(g)?;
    let ln = special_lie_algebra(&n.subgroup)?;
    let mut r = r;
    r.detail = format!("quotient={} min_scale_n={}", n.quotient_order, fmt_opt(ln.min_scale()));
    if ln.contains_scaled_sl2(2 * s)? {
        Ok(finish(r, start, Outcome::Verified { hypothesis_held: true }))
    } else {
        let w = scaled_sl2_witness(&ln, 2 * s);
        Ok(finish(r, start, Outcome::Violated { witness: w }))
    }
}

fn fmt_opt(v: Option<u32>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

/// G' ⊇ B_ℓ(level), computing the derived subgroup only until the inclusion is seen.
fn derived_contains(g: &GroupClosure, level: u32, cap: usize) -> Result<Option<Mat2>> {
    let d = g.derived_until(cap, |h| h.contains_congruence(level))?;
    if d.contains_congruence(level) {
        Ok(None)
    } else {
        Ok(Some(d.congruence_witness(level)?.expect("missing element")))
    }
}

/// (⋆⋆): ℓ odd, G ⊆ GL₂.
pub fn check_starstar(g: &GroupClosure, s: u32) -> Result<VerificationReport> {
    check_starstar_with_cap(g, s, DEFAULT_CAP)
}

pub fn check_starstar_with_cap(g: &GroupClosure, s: u32, cap: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = VerificationReport::new(Theorem::StarStar, g, s);
    let ctx = g.context();
    if s == 0 {
        return Err(Error::InvalidParams("s must be positive".into()));
    }
    if ctx.prime() == 2 {
        return Ok(finish(r, start, Outcome::Inapplicable("needs an odd prime".into())));
    }
    let mut r = r;
    if ctx.prime() >= 5 && classify_mod_ell(&g.reduce(1)?)? == DicksonClass::ContainsSL2 {
        r.detail = "route=derived-full".into();
    } else if let Err(reason) = starstar_applicability(g)? {
        return Ok(finish(r, start, Outcome::Inapplicable(reason)));
    }
    if ctx.precision() < 4 * s + 1 {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required: 4 * s + 1 }));
    }
    let l = special_lie_algebra(g)?;
    if !l.contains_scaled_sl2(s)? {
        return Ok(finish(r, start, Outcome::Verified { hypothesis_held: false }));
    }
    match derived_contains(g, 4 * s, cap)? {
        None => Ok(finish(r, start, Outcome::Verified { hypothesis_held: true })),
        Some(w) => Ok(finish(r, start, Outcome::Violated { witness: w })),
    }
}

/// ℓ = 2, G ⊆ SL₂ trivial modulo 4, s ≥ 2.
pub fn check_sl2z2(g: &GroupClosure, s: u32) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = VerificationReport::new(Theorem::Sl2Z2, g, s);
    let ctx = g.context();
    if s < 2 {
        return Err(Error::InvalidParams("s must be at least 2".into()));
    }
    if ctx.prime() != 2 {
        return Ok(finish(r, start, Outcome::Inapplicable("needs l = 2".into())));
    }
    if !g.is_sl2_subset() {
        return Ok(finish(r, start, Outcome::Inapplicable("G is not inside SL2".into())));
    }
    if ctx.precision() < 2 || !g.generators().iter().all(|x| x.congruent_to_identity(2)) {
        return Ok(finish(r, start, Outcome::Inapplicable("G is not trivial mod 4".into())));
    }
    if ctx.precision() < 6 * s + 1 {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required: 6 * s + 1 }));
    }
    let l = special_lie_algebra(g)?;
    if !l.contains_scaled_sl2(s)? {
        return Ok(finish(r, start, Outcome::Verified { hypothesis_held: false }));
    }
    match g.congruence_witness(6 * s)? {
        None => Ok(finish(r, start, Outcome::Verified { hypothesis_held: true })),
        Some(w) => Ok(finish(r, start, Outcome::Violated { witness: w })),
    }
}

fn trivial_mod4_det1_mod8(g: &GroupClosure) -> bool {
    g.generators()
        .iter()
        .all(|x| x.congruent_to_identity(2) && x.det().residue() % 8 == 1)
}

/// ℓ = 2, G trivial mod 4 with det ≡ 1 mod 8, n ≥ 1.
pub fn check_gl2z2(g: &GroupClosure, n: u32) -> Result<VerificationReport> {
    check_gl2z2_with_cap(g, n, DEFAULT_CAP)
}

pub fn check_gl2z2_with_cap(g: &GroupClosure, n: u32, cap: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = VerificationReport::new(Theorem::Gl2Z2, g, n);
    let ctx = g.context();
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    if ctx.prime() != 2 {
        return Ok(finish(r, start, Outcome::Inapplicable("needs l = 2".into())));
    }
    if ctx.precision() < 3 || !trivial_mod4_det1_mod8(g) {
        return Ok(finish(
            r,
            start,
            Outcome::Inapplicable("needs G trivial mod 4 and det = 1 mod 8".into()),
        ));
    }
    if ctx.precision() < 12 * n + 3 {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required: 12 * n + 3 }));
    }
    let l = special_lie_algebra(g)?;
    if !l.contains_scaled_sl2(n)? {
        return Ok(finish(r, start, Outcome::Verified { hypothesis_held: false }));
    }
    match derived_contains(g, 12 * n + 2, cap)? {
        None => Ok(finish(r, start, Outcome::Verified { hypothesis_held: true })),
        Some(w) => Ok(finish(r, start, Outcome::Violated { witness: w })),
    }
}

/// A line of P¹(Z/ℓᵐ) fixed by every generator of G mod ℓᵐ.
pub fn triangularizing_line(g: &GroupClosure, m: u32) -> Result<Option<[u64; 2]>> {
    let r = g.reduce(m)?;
    Ok(common_eigenlines(&r).first().copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrichotomyMode {
    /// The j_n case distinction alone; needs N ≥ 2n.
    Proposition,
    /// Additionally the congruence level in G' for the large-Lie-algebra cases.
    Corollary,
}

/// The j_n case analysis for G, in `mode`.
pub fn trichotomy(g: &GroupClosure, n: u32, mode: TrichotomyMode) -> Result<VerificationReport> {
    trichotomy_with_cap(g, n, mode, DEFAULT_CAP)
}

pub fn trichotomy_with_cap(
    g: &GroupClosure,
    n: u32,
    mode: TrichotomyMode,
    cap: usize,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut r = VerificationReport::new(Theorem::Trichotomy, g, n);
    let ctx = g.context();
    let (p, v) = (ctx.prime(), ctx.v2());
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    if p == 2 && !g.mod2_trivial() {
        return Ok(finish(r, start, Outcome::Inapplicable("G is not trivial mod 2".into())));
    }
    if mode == TrichotomyMode::Corollary {
        let ok = if p == 2 {
            if ctx.precision() >= 3 && trivial_mod4_det1_mod8(g) {
                Ok(())
            } else {
                Err("needs G trivial mod 4 and det = 1 mod 8".to_string())
            }
        } else {
            starstar_applicability(g)?
        };
        if let Err(reason) = ok {
            return Ok(finish(r, start, Outcome::Inapplicable(reason)));
        }
    }
    let level = if p == 2 { 48 * n - 10 } else { 16 * n - 4 };
    let required = match mode {
        TrichotomyMode::Proposition => 2 * n,
        TrichotomyMode::Corollary => (2 * n).max(level + 1),
    };
    if ctx.precision() < required {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required }));
    }
    let l = special_lie_algebra(g)?;
    let k = l.k_of();
    if let Some(k) = k {
        if k > n {
            return Ok(finish(r, start, Outcome::Inapplicable(format!("n < k(L) = {k}"))));
        }
    }
    let (jn, j2n) = (l.j_n(n)?, l.j_n(2 * n)?);
    r.detail = format!("k={} j_n={jn} j_2n={j2n}", fmt_opt(k));
    let corollary_check = |r: VerificationReport| -> Result<VerificationReport> {
        if mode == TrichotomyMode::Proposition {
            return Ok(finish(r, start, Outcome::Verified { hypothesis_held: true }));
        }
        match derived_contains(g, level, cap)? {
            None => Ok(finish(r, start, Outcome::Verified { hypothesis_held: true })),
            Some(w) => Ok(finish(r, start, Outcome::Violated { witness: w })),
        }
    };
    if jn <= 1 {
        r.detail += " branch=abelian";
        let red = g.reduce(n)?;
        let gens = red.generators();
        for (i, x) in gens.iter().enumerate() {
            for y in &gens[i + 1..] {
                if x.mul(y) != y.mul(x) {
                    let w = x.commutator(y)?;
                    return Ok(finish(r, start, Outcome::Violated { witness: w }));
                }
            }
        }
        return Ok(finish(r, start, Outcome::Verified { hypothesis_held: true }));
    }
    if jn == 2 {
        if j2n == 3 {
            r.detail += " branch=j2n";
            return corollary_check(r);
        }
        let m = match k {
            Some(k) => (n + 1) as i64 - 2 * v as i64 - k as i64,
            None => n as i64,
        };
        r.detail += &format!(" branch=triangular level={m}");
        if m < 1 {
            return Ok(finish(r, start, Outcome::Verified { hypothesis_held: true }));
        }
        return match triangularizing_line(g, m as u32)? {
            Some(line) => {
                r.detail += &format!(" line=({}:{})", line[0], line[1]);
                Ok(finish(r, start, Outcome::Verified { hypothesis_held: true }))
            }
            None => {
                let w = g.generators().first().copied().unwrap_or_else(|| Mat2::identity(ctx));
                Ok(finish(r, start, Outcome::Violated { witness: w }))
            }
        };
    }
    let k = k.expect("j_n = 3 forces a nonzero x1");
    let s = n + 2 * k - 1;
    r.detail += &format!(" branch=full scale={s}");
    if s >= ctx.precision() {
        return Ok(finish(r, start, Outcome::InsufficientPrecision { required: s + 1 }));
    }
    if !l.contains_scaled_sl2(s)? {
        let w = scaled_sl2_witness(&l, s);
        return Ok(finish(r, start, Outcome::Violated { witness: w }));
    }
    corollary_check(r)
}

/// Case-3 data for a bare module: j_n, the predicted scale n + 2k − 1 and the
/// least scale actually contained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieTrichotomy {
    pub k: Option<u32>,
    pub j_n: u32,
    pub j_2n: Option<u32>,
    pub predicted_scale: Option<u32>,
    pub min_scale: Option<u32>,
}

impl LieTrichotomy {
    /// j_n = 3 and ℓ^{n+2k−1}·sl₂ ⊆ L.
    pub fn holds(&self) -> bool {
        match (self.j_n, self.predicted_scale, self.min_scale) {
            (3, Some(p), Some(m)) => m <= p,
            (3, _, _) => false,
            _ => true,
        }
    }

    /// The prediction is attained exactly.
    pub fn tight(&self) -> bool {
        self.j_n == 3 && self.predicted_scale.is_some() && self.predicted_scale == self.min_scale
    }
}

pub fn trichotomy_lie(l: &LieModule, n: u32) -> Result<LieTrichotomy> {
    let big_n = l.context().precision();
    let k = l.k_of();
    let j_n = l.j_n(n)?;
    let j_2n = if 2 * n <= big_n { Some(l.j_n(2 * n)?) } else { None };
    let predicted_scale = if j_n == 3 { k.map(|k| n + 2 * k - 1) } else { None };
    Ok(LieTrichotomy { k, j_n, j_2n, predicted_scale, min_scale: l.min_scale() })
}

/// A subgroup H₁ ⊆ G together with the case that produced it.
#[derive(Clone, Debug)]
pub struct H1Selection {
    pub subgroup: GroupClosure,
    pub index: usize,
    pub route: String,
}

fn preimage_filter<F: Fn(&Mat2) -> bool>(g: &GroupClosure, keep_mod_ell: F) -> Result<GroupClosure> {
    let sub = g.context().at_precision(1)?;
    g.filter(|x| keep_mod_ell(&x.reduce_to(sub)))
}

/// Bounded-index subgroup H₁ ⊆ G satisfying the (⋆⋆) hypotheses (ℓ odd), or
/// G itself when G' is all of SL₂.
pub fn select_h1(g: &GroupClosure) -> Result<H1Selection> {
    let ctx = g.context();
    let p = ctx.prime();
    if p == 2 {
        return Err(Error::PreconditionViolated("select_h1 needs an odd prime; use select_h1_two".into()));
    }
    let j = g.reduce(1)?;
    let class = classify_mod_ell(&j)?;
    if p >= 5 && class == DicksonClass::ContainsSL2 {
        return Ok(H1Selection { subgroup: g.clone(), index: 1, route: "derived-full".into() });
    }
    let g1 = g.filter(|x| is_square_unit_mod_ell(x.det().residue(), p))?;
    let (h, route) = select_after_det(&g1)?;
    let index = g.order() / h.order();
    Ok(H1Selection { subgroup: h, index, route })
}

fn select_after_det(g1: &GroupClosure) -> Result<(GroupClosure, String)> {
    let ctx = g1.context();
    let p = ctx.prime();
    let j1 = g1.reduce(1)?;
    if p == 3 {
        let order3 = j1.elements().find(|x| !x.is_identity() && x.pow(3).is_identity());
        return Ok(match order3 {
            Some(b) => {
                let sylow = [Mat2::identity(j1.context()), b, b.pow(2)];
                (preimage_filter(g1, |x| sylow.contains(x))?, "sylow-3".into())
            }
            None => (preimage_filter(g1, |x| x.is_identity())?, "sylow-3-trivial".into()),
        });
    }
    let class = classify_mod_ell(&j1)?;
    match class {
        DicksonClass::Exceptional { kind, .. } => {
            let want = if kind == ExceptionalKind::A5 { 5 } else { 3 };
            let b = j1
                .elements()
                .find(|x| projective_order(x) == want)
                .ok_or_else(|| Error::CaseNotCovered("no element of the expected order".into()))?;
            let powers: Vec<Mat2> = (0..want).map(|e| b.pow(e as u64)).collect();
            let h = preimage_filter(g1, |x| {
                powers.iter().any(|y| {
                    let yi = y.inverse().expect("unit");
                    x.mul(&yi).is_scalar()
                })
            })?;
            Ok((h, format!("exceptional-cyclic-{want}")))
        }
        DicksonClass::SplitCartan { .. } | DicksonClass::NonsplitCartan { .. } => {
            let s = det1_part(&saturate(&j1, DEFAULT_CAP)?)?;
            if s.order() != 4 {
                Ok((g1.clone(), "cartan".into()))
            } else {
                Ok((preimage_filter(g1, |x| x.is_scalar())?, "cartan-projective-kernel".into()))
            }
        }
        DicksonClass::NormalizerSplitCartan { lines } => {
            let c = preimage_filter(g1, |x| lines.iter().all(|l| crate::dickson::fixes_line(x, l)))?;
            let (h, route) = select_after_det(&c)?;
            Ok((h, format!("normalizer-{route}")))
        }
        DicksonClass::NormalizerNonsplitCartan { generator } => {
            let c = preimage_filter(g1, |x| x.mul(&generator) == generator.mul(x))?;
            let (h, route) = select_after_det(&c)?;
            Ok((h, format!("normalizer-{route}")))
        }
        DicksonClass::Borel { line } => {
            let s = det1_part(&saturate(&j1, DEFAULT_CAP)?)?;
            if s.order() / p as usize != 4 {
                return Ok((g1.clone(), "borel".into()));
            }
            let jc = j1.context();
            let m = jc.modulus();
            let tau_trivial = |x: &Mat2| {
                // eigenvalue a on the fixed line, c = det / a.
                let [a11, a12, a21, a22] = x.entries();
                let a = if line[0] % p != 0 {
                    (a11 + mulmod(a12, line[1], m)) % m
                } else {
                    (mulmod(a21, line[0], m) + a22) % m
                };
                let det = x.det().residue();
                mulmod(a, a, m) == det
            };
            Ok((preimage_filter(g1, tau_trivial)?, "borel-tau-kernel".into()))
        }
        DicksonClass::ContainsSL2 => {
            Err(Error::CaseNotCovered("image contains SL2 after the determinant step".into()))
        }
    }
}

fn projective_order(x: &Mat2) -> u32 {
    let mut k = 1;
    let mut y = *x;
    while !y.is_scalar() {
        y = y.mul(x);
        k += 1;
    }
    k
}

/// H = ker(G → G(4)) ∩ ker(G → G(8) → (Z/8)^×) for ℓ = 2.
pub fn select_h1_two(g: &GroupClosure) -> Result<H1Selection> {
    let ctx = g.context();
    if ctx.prime() != 2 {
        return Err(Error::PreconditionViolated("select_h1_two needs l = 2".into()));
    }
    if ctx.precision() < 3 {
        return Err(Error::InsufficientPrecision { required: 3 });
    }
    let h = g.filter(|x| x.congruent_to_identity(2) && x.det().residue() % 8 == 1)?;
    let index = g.order() / h.order();
    Ok(H1Selection { subgroup: h, index, route: "mod4-det8-kernel".into() })
}

/// |PJ| of the reduction of G, for reports.
pub fn projective_order_of(g: &GroupClosure) -> Result<usize> {
    Ok(projective_data(&g.reduce(1)?)?.order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{close, congruence_subgroup, general_linear_group, special_linear_group};
    use crate::padic::PadicContext;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn star_on_pro_ell_groups() {
        let c = ctx(3, 4);
        let b = congruence_subgroup(c, 1).unwrap();
        let r = check_star(&b, 1).unwrap();
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });
        let r = check_star(&b, 2).unwrap();
        assert_eq!(r.outcome, Outcome::InsufficientPrecision { required: 5 });
        let small = close(c, &[Mat2::upper(c, 3)], DEFAULT_CAP).unwrap();
        assert_eq!(check_star(&small, 1).unwrap().outcome, Outcome::Verified { hypothesis_held: false });
    }

    #[test]
    fn starstar_on_full_groups() {
        let c = ctx(3, 5);
        let b = congruence_subgroup(c, 1).unwrap();
        let r = check_starstar(&b, 1).unwrap();
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });
        let c5 = ctx(5, 5);
        let sl = close(c5, &[Mat2::upper(c5, 1), Mat2::lower(c5, 1)], DEFAULT_CAP);
        // SL₂(Z/5⁵) exceeds the key range; the image mod 5 is all of SL₂ anyway.
        assert!(sl.is_err());
        let c = ctx(5, 2);
        let sl = special_linear_group(c).unwrap();
        let r = check_starstar(&sl, 1).unwrap();
        assert_eq!(r.outcome, Outcome::InsufficientPrecision { required: 5 });
    }

    #[test]
    fn sl2z2_examples() {
        let c = ctx(2, 13);
        let cyc = close(c, &[Mat2::upper(c, 4)], DEFAULT_CAP).unwrap();
        assert_eq!(check_sl2z2(&cyc, 2).unwrap().outcome, Outcome::Verified { hypothesis_held: false });
        let c8 = ctx(2, 8);
        let b = congruence_subgroup(c8, 2).unwrap();
        assert_eq!(check_sl2z2(&b, 2).unwrap().outcome, Outcome::InsufficientPrecision { required: 13 });
        let odd = close(c8, &[Mat2::upper(c8, 2)], DEFAULT_CAP).unwrap();
        assert!(matches!(check_sl2z2(&odd, 2).unwrap().outcome, Outcome::Inapplicable(_)));
    }

    #[test]
    fn gl2z2_preconditions() {
        let c = ctx(2, 15);
        let g = close(c, &[Mat2::diag(c, 5, 1)], DEFAULT_CAP).unwrap();
        assert!(matches!(check_gl2z2(&g, 1).unwrap().outcome, Outcome::Inapplicable(_)));
        let g = close(c, &[Mat2::upper(c, 1 << 10), Mat2::diag(c, 9, 1)], DEFAULT_CAP).unwrap();
        assert_eq!(check_gl2z2(&g, 1).unwrap().outcome, Outcome::Verified { hypothesis_held: false });
        let c = ctx(2, 10);
        let g = close(c, &[Mat2::upper(c, 4)], DEFAULT_CAP).unwrap();
        assert_eq!(check_gl2z2(&g, 1).unwrap().outcome, Outcome::InsufficientPrecision { required: 15 });
    }

    #[test]
    fn trichotomy_branches() {
        let c = ctx(5, 2);
        let scalar = close(c, &[Mat2::scalar(c, 7)], DEFAULT_CAP).unwrap();
        let r = trichotomy(&scalar, 1, TrichotomyMode::Proposition).unwrap();
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });
        assert!(r.detail.contains("branch=abelian"), "{}", r.detail);

        let borel = close(c, &[Mat2::diag(c, 2, 13), Mat2::upper(c, 1)], DEFAULT_CAP).unwrap();
        let r = trichotomy(&borel, 1, TrichotomyMode::Proposition).unwrap();
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });
        assert!(r.detail.contains("branch=triangular") && r.detail.contains("line=(1:0)"), "{}", r.detail);

        let lower = close(c, &[Mat2::diag(c, 2, 13), Mat2::upper(c, 1), Mat2::lower(c, 5)], DEFAULT_CAP)
            .unwrap();
        let r = trichotomy(&lower, 1, TrichotomyMode::Proposition).unwrap();
        assert!(r.detail.contains("k=1 j_n=2 j_2n=3"), "{}", r.detail);
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });

        let sl = special_linear_group(ctx(3, 2)).unwrap();
        let r = trichotomy(&sl, 1, TrichotomyMode::Proposition).unwrap();
        assert!(r.detail.contains("branch=full scale=0"), "{}", r.detail);
        assert_eq!(r.outcome, Outcome::Verified { hypothesis_held: true });
    }

    #[test]
    fn lie_trichotomy_is_tight_on_the_optimal_family() {
        for (k, n) in [(0u32, 1u32), (0, 2), (1, 1), (1, 2)] {
            let c = ctx(3, n + 2 * k + 2);
            let l = LieModule::span(
                c,
                &[
                    Mat2::traceless(c, 3u64.pow(k), 1, 0),
                    Mat2::traceless(c, 0, 3u64.pow(k + n - 1), 0),
                    Mat2::traceless(c, 0, 0, 3u64.pow(n - 1)),
                ],
            )
            .unwrap();
            let level = if k == 0 { n } else { n + k };
            let t = trichotomy_lie(&l, level).unwrap();
            assert_eq!(t.j_n, 3);
            assert!(t.holds());
            assert_eq!(t.tight(), k == 0);
            assert_eq!(l.min_scale(), Some(n + 2 * k - 1));
        }
    }

    #[test]
    fn select_h1_examples() {
        let c = ctx(5, 1);
        let w = Mat2::new(c, [0, 1, 1, 0]);
        let norm = close(c, &[Mat2::diag(c, 2, 3), w], DEFAULT_CAP).unwrap();
        let sel = select_h1(&norm).unwrap();
        assert!(sel.index <= 24 && 48 % sel.index == 0);
        assert!(sel.route.starts_with("normalizer"), "{}", sel.route);
        assert_eq!(starstar_applicability(&sel.subgroup).unwrap(), Ok(()));

        let c = ctx(3, 2);
        let b = congruence_subgroup(c, 1).unwrap();
        let sel = select_h1(&b).unwrap();
        assert_eq!(sel.index, 1);

        let c = ctx(5, 1);
        let gl = general_linear_group(c, DEFAULT_CAP).unwrap();
        assert_eq!(select_h1(&gl).unwrap().route, "derived-full");
    }

    #[test]
    fn select_h1_over_all_gl2_f3_subgroups() {
        let c = ctx(3, 1);
        let gl: Vec<Mat2> = general_linear_group(c, DEFAULT_CAP).unwrap().elements().collect();
        for x in &gl {
            for y in gl.iter().step_by(5) {
                let g = close(c, &[*x, *y], DEFAULT_CAP).unwrap();
                let sel = select_h1(&g).unwrap();
                assert!(sel.index <= 24 && 48 % sel.index == 0, "{} {}", sel.index, sel.route);
                assert_eq!(starstar_applicability(&sel.subgroup).unwrap(), Ok(()), "{}", sel.route);
            }
        }
    }

    #[test]
    fn select_h1_two_examples() {
        let c = ctx(2, 3);
        let gl = general_linear_group(c, DEFAULT_CAP).unwrap();
        let s = select_h1_two(&gl).unwrap();
        assert!(s.index <= 192);
        assert_eq!(s.index, 1536 / s.subgroup.order());
        let sl = special_linear_group(c).unwrap();
        let s = select_h1_two(&sl).unwrap();
        assert_eq!(s.index, 48);
        assert_eq!(s.subgroup, congruence_subgroup(c, 2).unwrap());
        let b = congruence_subgroup(c, 2).unwrap();
        assert_eq!(select_h1_two(&b).unwrap().index, 1);
        assert!(select_h1_two(&congruence_subgroup(ctx(2, 2), 1).unwrap()).is_err());
    }
}
