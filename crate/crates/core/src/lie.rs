//! Submodules of sl₂(Z/ℓᴺ): reduced bases, the invariants k(L) and j_n, trace
//! ideals, and the special Lie algebra of a group closure.
//!
//! Vectors use the coordinates (m21, m11, m12) of a traceless matrix.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{close, GroupClosure, DEFAULT_CAP};
use crate::mat::Mat2;
use crate::padic::{addmod, invmod, mulmod, submod, PadicContext};

type Vec3 = [u64; 3];

/// Triangular basis x₁, x₂, x₃ of a submodule of sl₂(Z/ℓᴺ).
///
/// x₂ has zero m21 entry, x₃ has zero m21 and m11 entries. A missing vector is zero
/// and its valuation is `None`. Every module element is uniquely
/// Σ tᵢ·xᵢ with 0 ≤ tᵢ < ℓ^{N−vᵢ}, where ℓ^{vᵢ} is the pivot of xᵢ.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct ReducedBasis {
    ctx: PadicContext,
    vectors: [Vec3; 3],
    pivots: [Option<u32>; 3],
}

impl ReducedBasis {
    /// Elimination over Z/ℓᴺ with minimal-valuation pivots, lowest index first on ties.
    pub fn reduce(ctx: PadicContext, input: &[Mat2]) -> Result<ReducedBasis> {
        let m = ctx.modulus();
        let n = ctx.precision();
        let mut rows: Vec<Vec3> = Vec::with_capacity(input.len() + 3);
        for x in input {
            if x.context() != ctx {
                return Err(Error::ContextMismatch);
            }
            if x.trace().residue() != 0 {
                return Err(Error::PreconditionViolated(format!("{x} is not traceless")));
            }
            rows.push(x.sl2_coords());
        }
        let mut vectors = [[0u64; 3]; 3];
        let mut pivots = [None; 3];
        for col in 0..3 {
            let best = rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| ctx.valuation_of(r[col]).map(|v| (v, i)))
                .min();
            let Some((v, idx)) = best else { continue };
            let mut p = rows.remove(idx);
            let q = ctx.prime().pow(v);
            let unit = invmod(p[col] / q, m).expect("unit part");
            p = p.map(|x| mulmod(x, unit, m));
            for r in rows.iter_mut() {
                let f = r[col] / q;
                if f != 0 {
                    for k in 0..3 {
                        r[k] = submod(r[k], mulmod(f, p[k], m), m);
                    }
                }
            }
            let ann = ctx.prime().pow(n - v);
            let a = p.map(|x| mulmod(x, ann % m, m));
            if a != [0; 3] {
                rows.push(a);
            }
            rows.retain(|r| *r != [0; 3]);
            vectors[col] = p;
            pivots[col] = Some(v);
        }
        Ok(ReducedBasis { ctx, vectors, pivots })
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn x(&self, i: usize) -> Mat2 {
        let [c21, c11, c12] = self.vectors[i];
        Mat2::traceless(self.ctx, c21, c11, c12)
    }

    pub fn basis(&self) -> [Mat2; 3] {
        [self.x(0), self.x(1), self.x(2)]
    }

    pub fn pivots(&self) -> [Option<u32>; 3] {
        self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    /// Coefficients expressing `y` in the basis, if `y` lies in the module.
    pub fn solve(&self, y: &Mat2) -> Option<[u64; 3]> {
        let m = self.ctx.modulus();
        let mut r = y.sl2_coords();
        if y.trace().residue() != 0 {
            return None;
        }
        let mut t = [0u64; 3];
        for col in 0..3 {
            match self.pivots[col] {
                None => {
                    if r[col] != 0 {
                        return None;
                    }
                }
                Some(v) => {
                    let q = self.ctx.prime().pow(v);
                    if r[col] % q != 0 {
                        return None;
                    }
                    let f = r[col] / q;
                    t[col] = f;
                    for k in 0..3 {
                        r[k] = submod(r[k], mulmod(f, self.vectors[col][k], m), m);
                    }
                }
            }
        }
        Some(t)
    }

    /// Number of module elements, ℓ^{Σ(N − vᵢ)}.
    pub fn size_log(&self) -> u32 {
        let n = self.ctx.precision();
        self.pivots.iter().flatten().map(|v| n - v).sum()
    }
}

impl fmt::Debug for ReducedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedBasis(x1={}, x2={}, x3={})", self.x(0), self.x(1), self.x(2))
    }
}

/// A submodule of sl₂(Z/ℓᴺ), kept in reduced form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieModule {
    basis: ReducedBasis,
}

impl LieModule {
    pub fn span(ctx: PadicContext, generators: &[Mat2]) -> Result<LieModule> {
        Ok(LieModule { basis: ReducedBasis::reduce(ctx, generators)? })
    }

    pub fn zero(ctx: PadicContext) -> LieModule {
        Self::span(ctx, &[]).expect("empty span")
    }

    /// ℓˢ·sl₂.
    pub fn scaled_sl2(ctx: PadicContext, s: u32) -> LieModule {
        let q = ctx.pow_prime(s);
        let gens = [
            Mat2::traceless(ctx, q, 0, 0),
            Mat2::traceless(ctx, 0, q, 0),
            Mat2::traceless(ctx, 0, 0, q),
        ];
        Self::span(ctx, &gens).expect("traceless")
    }

    pub fn context(&self) -> PadicContext {
        self.basis.ctx
    }

    pub fn reduced_basis(&self) -> &ReducedBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn contains(&self, y: &Mat2) -> bool {
        y.context() == self.context() && self.basis.solve(y).is_some()
    }

    pub fn is_submodule_of(&self, other: &LieModule) -> bool {
        self.basis.basis().iter().all(|x| other.contains(x))
    }

    /// Module generated by this one and `extra`.
    pub fn extend(&self, extra: &[Mat2]) -> Result<LieModule> {
        let mut gens: Vec<Mat2> = self.basis.basis().to_vec();
        gens.extend_from_slice(extra);
        Self::span(self.context(), &gens)
    }

    /// k(L): the valuation of a₂₁, `None` when every m21 entry vanishes.
    pub fn k_of(&self) -> Option<u32> {
        self.basis.pivots[0]
    }

    /// j_n: how many of x₁, x₂, x₃ are nonzero modulo ℓⁿ.
    pub fn j_n(&self, n: u32) -> Result<u32> {
        if n > self.context().precision() {
            return Err(Error::InsufficientPrecision { required: n });
        }
        let q = self.context().prime().pow(n);
        Ok(self.basis.vectors.iter().filter(|v| v.iter().any(|x| x % q != 0)).count() as u32)
    }

    /// Whether ℓˢ·sl₂ ⊆ L.
    pub fn contains_scaled_sl2(&self, s: u32) -> Result<bool> {
        let ctx = self.context();
        if s >= ctx.precision() {
            return Err(Error::InsufficientPrecision { required: s + 1 });
        }
        Ok(Self::scaled_sl2(ctx, s).is_submodule_of(self))
    }

    /// Least s < N with ℓˢ·sl₂ ⊆ L.
    pub fn min_scale(&self) -> Option<u32> {
        (0..self.context().precision()).find(|&s| self.contains_scaled_sl2(s).unwrap_or(false))
    }

    /// Valuation of the ideal generated by tr(xy), x, y ∈ L (`None` if zero).
    pub fn trace_ideal(&self) -> Option<u32> {
        let ctx = self.context();
        let m = ctx.modulus();
        let v = &self.basis.vectors;
        let mut best: Option<u32> = None;
        for i in 0..3 {
            for j in i..3 {
                let ([c, a, b], [c2, a2, b2]) = (v[i], v[j]);
                let t = addmod(
                    mulmod(2, mulmod(a, a2, m), m),
                    addmod(mulmod(b, c2, m), mulmod(c, b2, m), m),
                    m,
                );
                if let Some(val) = ctx.valuation_of(t) {
                    best = Some(best.map_or(val, |b| b.min(val)));
                }
            }
        }
        best
    }

    /// [L, L], spanned by brackets of basis vectors.
    pub fn derived(&self) -> LieModule {
        let x = self.basis.basis();
        let gens = [x[0].bracket(&x[1]), x[0].bracket(&x[2]), x[1].bracket(&x[2])];
        Self::span(self.context(), &gens).expect("brackets are traceless")
    }

    /// Whether the bracket of any two basis vectors stays in L.
    pub fn is_lie_closed(&self) -> bool {
        self.derived().is_submodule_of(self)
    }

    /// Image modulo ℓᵐ.
    pub fn reduce(&self, m: u32) -> Result<LieModule> {
        let sub = self.context().at_precision(m)?;
        let gens: Vec<Mat2> = self.basis.basis().iter().map(|x| x.reduce_to(sub)).collect();
        Self::span(sub, &gens)
    }

    /// All module elements (ℓ^{size_log} of them).
    pub fn elements(&self) -> Vec<Mat2> {
        let ctx = self.context();
        let m = ctx.modulus();
        let n = ctx.precision();
        let mut out = vec![[0u64; 3]];
        for (vec, piv) in self.basis.vectors.iter().zip(self.basis.pivots) {
            let Some(v) = piv else { continue };
            let count = ctx.prime().pow(n - v);
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for base in &out {
                let mut cur = *base;
                for _ in 0..count {
                    next.push(cur);
                    for k in 0..3 {
                        cur[k] = addmod(cur[k], vec[k], m);
                    }
                }
            }
            out = next;
        }
        out.into_iter().map(|[c21, c11, c12]| Mat2::traceless(ctx, c21, c11, c12)).collect()
    }
}

impl fmt::Display for LieModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.basis;
        write!(f, "<{}, {}, {}>", b.x(0), b.x(1), b.x(2))
    }
}

/// L(G): the span of Θ(g) over every element of G.
///
/// At ℓ = 2 Θ is exact for groups inside SL₂; otherwise the diagonal of Θ is only
/// defined modulo 2^{N−1}, and the module is widened by 2^{N−1}·diag(1, −1).
pub fn special_lie_algebra(g: &GroupClosure) -> Result<LieModule> {
    let ctx = g.context();
    let mut l = LieModule::zero(ctx);
    if ctx.prime() == 2 && !g.is_sl2_subset() {
        let h = ctx.pow_prime(ctx.precision() - 1);
        l = l.extend(&[Mat2::traceless(ctx, 0, h, 0)])?;
    }
    for x in g.elements() {
        let t = x.theta()?;
        if !l.contains(&t) {
            l = l.extend(&[t])?;
        }
    }
    Ok(l)
}

/// Precision of the window on which `pink_derived` is compared with the derived
/// subgroup: N − (2s + v), with s the least exponent such that ℓˢ·sl₂ ⊆ L.
pub fn pink_window(l: &LieModule) -> Option<u32> {
    let ctx = l.context();
    let s = l.min_scale()?;
    ctx.precision().checked_sub(2 * s + ctx.v2()).filter(|&w| w >= 1)
}

/// The group {x ∈ SL₂ : Θ(x) ∈ [L, L], tr x − 2 ∈ C} generated from the
/// Lie data of a pro-ℓ group G ⊆ SL₂, ℓ odd.
pub fn pink_derived(g: &GroupClosure) -> Result<GroupClosure> {
    let ctx = g.context();
    if ctx.prime() == 2 {
        return Err(Error::PreconditionViolated("pink_derived needs an odd prime".into()));
    }
    if !g.is_sl2_subset() {
        return Err(Error::PreconditionViolated("pink_derived needs G inside SL2".into()));
    }
    if g.generators().iter().any(|x| !x.congruent_to_identity(1)) {
        return Err(Error::PreconditionViolated("pink_derived needs a pro-l group".into()));
    }
    let l = special_lie_algebra(g)?;
    let dl = l.derived();
    let c = l.trace_ideal();
    let m = ctx.modulus();
    let cq = c.map_or(0, |v| ctx.pow_prime(v));
    let in_ideal = |t: u64| if cq == 0 { t == 0 } else { t % cq == 0 };
    let mut set = Vec::new();
    for y in dl.elements() {
        let [a, b, cc, _] = y.entries();
        let q = addmod(mulmod(a, a, m), mulmod(b, cc, m), m);
        let lambda = ctx.from_residue(q).sqrt_one_plus()?.residue();
        for l in [lambda, submod(0, lambda, m)] {
            if in_ideal(submod(mulmod(2, l, m), 2, m)) {
                set.push(y.add(&Mat2::scalar(ctx, l)));
            }
        }
    }
    close(ctx, &set, DEFAULT_CAP)
}
