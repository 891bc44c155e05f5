//! Explicit finite subgroups of GL₂(Z/ℓᴺ).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::mat::{mul_raw, Mat2};
use crate::padic::{invmod, mulmod, PadicContext};

pub const DEFAULT_CAP: usize = 1 << 24;

/// Largest modulus for which packed keys fit in a `u64`.
pub const MAX_CLOSURE_MODULUS: u64 = 1 << 16;

#[inline]
fn pack(e: &[u64; 4], m: u64) -> u64 {
    ((e[0] * m + e[1]) * m + e[2]) * m + e[3]
}

#[inline]
fn unpack(k: u64, m: u64) -> [u64; 4] {
    [k / (m * m * m), (k / (m * m)) % m, (k / m) % m, k % m]
}

/// Packed key of `g` as stored in a closure.
pub(crate) fn key64(g: &Mat2) -> u64 {
    pack(&g.entries(), g.context().modulus())
}

fn check_modulus(ctx: PadicContext) -> Result<()> {
    if ctx.modulus() > MAX_CLOSURE_MODULUS {
        return Err(Error::PrecisionTooLarge { prime: ctx.prime(), precision: ctx.precision() });
    }
    Ok(())
}

/// A finite subgroup of GL₂(Z/ℓᴺ), stored as a sorted list of packed keys.
///
/// Equality compares element sets only.
#[derive(Clone, Debug)]
pub struct GroupClosure {
    ctx: PadicContext,
    generators: Vec<Mat2>,
    elements: Vec<u64>,
    is_sl2_subset: bool,
    mod2_trivial: bool,
}

impl PartialEq for GroupClosure {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.elements == other.elements
    }
}

impl Eq for GroupClosure {}

/// Incremental breadth-first closure.
struct Builder {
    ctx: PadicContext,
    m: u64,
    cap: usize,
    seen: FxHashSet<u64>,
    order: Vec<u64>,
    gens: Vec<[u64; 4]>,
}

impl Builder {
    fn new(ctx: PadicContext, cap: usize) -> Result<Self> {
        check_modulus(ctx)?;
        let m = ctx.modulus();
        let id = pack(&Mat2::identity(ctx).entries(), m);
        let mut seen = FxHashSet::default();
        seen.insert(id);
        Ok(Builder { ctx, m, cap, seen, order: vec![id], gens: Vec::new() })
    }

    fn from_group(g: &GroupClosure, cap: usize) -> Result<Self> {
        check_modulus(g.ctx)?;
        let mut seen = FxHashSet::with_capacity_and_hasher(g.elements.len() * 2, Default::default());
        seen.extend(g.elements.iter().copied());
        Ok(Builder {
            ctx: g.ctx,
            m: g.ctx.modulus(),
            cap,
            seen,
            order: g.elements.clone(),
            gens: g.generators.iter().map(|x| x.entries()).collect(),
        })
    }

    fn contains(&self, g: &Mat2) -> bool {
        self.seen.contains(&pack(&g.entries(), self.m))
    }

    /// Adds a generator; returns whether the group grew.
    fn add(&mut self, g: &Mat2) -> Result<bool> {
        if !g.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let ge = g.entries();
        if self.contains(g) {
            return Ok(false);
        }
        self.gens.push(ge);
        let m = self.m;
        let mut frontier = Vec::new();
        for &k in &self.order {
            let p = mul_raw(&unpack(k, m), &ge, m);
            let pk = pack(&p, m);
            if self.seen.insert(pk) {
                frontier.push(pk);
            }
        }
        self.check_cap()?;
        while !frontier.is_empty() {
            self.order.extend_from_slice(&frontier);
            let mut next = Vec::new();
            for &k in &frontier {
                let e = unpack(k, m);
                for s in &self.gens {
                    let pk = pack(&mul_raw(&e, s, m), m);
                    if self.seen.insert(pk) {
                        next.push(pk);
                    }
                }
                if self.seen.len() > self.cap {
                    return Err(Error::CapExceeded(self.cap));
                }
            }
            frontier = next;
        }
        Ok(true)
    }

    fn check_cap(&self) -> Result<()> {
        if self.seen.len() > self.cap {
            return Err(Error::CapExceeded(self.cap));
        }
        Ok(())
    }

    fn finish(self) -> GroupClosure {
        let ctx = self.ctx;
        let gens: Vec<Mat2> = self.gens.iter().map(|e| Mat2::from_residues(ctx, *e)).collect();
        let mut elements = self.order;
        elements.sort_unstable();
        GroupClosure::assemble(ctx, gens, elements)
    }
}

/// Closure of the subgroup generated by `generators`.
pub fn close(ctx: PadicContext, generators: &[Mat2], cap: usize) -> Result<GroupClosure> {
    for g in generators {
        if g.context() != ctx {
            return Err(Error::ContextMismatch);
        }
        if !g.is_invertible() {
            return Err(Error::PreconditionViolated(format!("generator {g} is not invertible")));
        }
    }
    let mut b = Builder::new(ctx, cap)?;
    for g in generators {
        b.add(g)?;
    }
    Ok(b.finish())
}

/// B_ℓ(n): matrices ≡ Id mod ℓⁿ of determinant 1, by direct enumeration.
pub fn congruence_subgroup(ctx: PadicContext, n: u32) -> Result<GroupClosure> {
    if n == 0 || n > ctx.precision() {
        return Err(Error::PreconditionViolated(format!("congruence level {n} outside 1..=N")));
    }
    check_modulus(ctx)?;
    let m = ctx.modulus();
    let step = ctx.pow_prime(n);
    let count = if step == 0 { 1 } else { m / step };
    let mut elements = Vec::with_capacity((count * count * count) as usize);
    for i in 0..count {
        let a = (1 + i * step) % m;
        let ainv = invmod(a, m).expect("unit");
        for j in 0..count {
            let b = j * step % m;
            for k in 0..count {
                let c = k * step % m;
                let d = mulmod((1 + mulmod(b, c, m)) % m, ainv, m);
                elements.push(pack(&[a, b, c, d], m));
            }
        }
    }
    elements.sort_unstable();
    GroupClosure::from_elements(ctx, elements)
}

/// SL₂(Z/ℓᴺ) by enumeration.
pub fn special_linear_group(ctx: PadicContext) -> Result<GroupClosure> {
    check_modulus(ctx)?;
    let m = ctx.modulus();
    let p = ctx.prime();
    let mut elements = Vec::new();
    for a in 0..m {
        for c in 0..m {
            if a % p != 0 {
                let ainv = invmod(a, m).expect("unit");
                for b in 0..m {
                    let d = mulmod((1 + mulmod(b, c, m)) % m, ainv, m);
                    elements.push(pack(&[a, b, c, d], m));
                }
            } else if c % p != 0 {
                let cinv = invmod(c, m).expect("unit");
                for d in 0..m {
                    // ad − bc = 1  ⇒  b = (ad − 1)/c
                    let b = mulmod((mulmod(a, d, m) + m - 1) % m, cinv, m);
                    elements.push(pack(&[a, b, c, d], m));
                }
            }
        }
    }
    elements.sort_unstable();
    GroupClosure::from_elements(ctx, elements)
}

/// GL₂(Z/ℓᴺ) by closing SL₂ with the unit diagonal matrices.
pub fn general_linear_group(ctx: PadicContext, cap: usize) -> Result<GroupClosure> {
    let sl = special_linear_group(ctx)?;
    let extra: Vec<Mat2> =
        ctx.unit_group_generators().into_iter().map(|u| Mat2::diag(ctx, u, 1)).collect();
    sl.extend(&extra, cap)
}

impl GroupClosure {
    fn assemble(ctx: PadicContext, generators: Vec<Mat2>, elements: Vec<u64>) -> GroupClosure {
        let m = ctx.modulus();
        let is_sl2_subset = if generators.is_empty() {
            elements.iter().all(|&k| Mat2::from_residues(ctx, unpack(k, m)).det().residue() == 1 % m)
        } else {
            generators.iter().all(|g| g.det().residue() == 1 % m)
        };
        let mod2_trivial = ctx.prime() == 2 && {
            let t = |g: &Mat2| g.congruent_to_identity(1);
            if generators.is_empty() {
                elements.iter().all(|&k| t(&Mat2::from_residues(ctx, unpack(k, m))))
            } else {
                generators.iter().all(t)
            }
        };
        GroupClosure { ctx, generators, elements, is_sl2_subset, mod2_trivial }
    }

    /// Builds a closure from a sorted key list that is known to be a group, and
    /// picks a small generating set for it (seeded, deterministic).
    pub fn from_elements(ctx: PadicContext, mut elements: Vec<u64>) -> Result<GroupClosure> {
        check_modulus(ctx)?;
        elements.sort_unstable();
        elements.dedup();
        let mut b = Builder::new(ctx, elements.len())?;
        let m = ctx.modulus();
        let mut order: Vec<u64> = elements.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(elements.len() as u64);
        order.shuffle(&mut rng);
        for k in order {
            if b.seen.len() == elements.len() {
                break;
            }
            let g = Mat2::from_residues(ctx, unpack(k, m));
            if !b.contains(&g) {
                b.add(&g).map_err(|_| {
                    Error::PreconditionViolated("element list is not closed under products".into())
                })?;
            }
        }
        let gens: Vec<Mat2> = b.gens.iter().map(|e| Mat2::from_residues(ctx, *e)).collect();
        if b.seen.len() != elements.len() {
            return Err(Error::PreconditionViolated("element list is not a group".into()));
        }
        Ok(Self::assemble(ctx, gens, elements))
    }

    /// Subgroup of elements satisfying `keep` (which must define a subgroup).
    pub fn filter<F: Fn(&Mat2) -> bool>(&self, keep: F) -> Result<GroupClosure> {
        let m = self.ctx.modulus();
        let ctx = self.ctx;
        let el: Vec<u64> = self
            .elements
            .iter()
            .copied()
            .filter(|&k| keep(&Mat2::from_residues(ctx, unpack(k, m))))
            .collect();
        Self::from_elements(ctx, el)
    }

    /// Closure of this group together with `extra` generators.
    pub fn extend(&self, extra: &[Mat2], cap: usize) -> Result<GroupClosure> {
        let mut b = Builder::from_group(self, cap)?;
        for g in extra {
            if g.context() != self.ctx {
                return Err(Error::ContextMismatch);
            }
            b.add(g)?;
        }
        Ok(b.finish())
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn keys(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_sl2_subset(&self) -> bool {
        self.is_sl2_subset
    }

    pub fn mod2_trivial(&self) -> bool {
        self.mod2_trivial
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        let ctx = self.ctx;
        let m = ctx.modulus();
        self.elements.iter().map(move |&k| Mat2::from_residues(ctx, unpack(k, m)))
    }

    pub fn key_of(&self, g: &Mat2) -> u64 {
        pack(&g.entries(), self.ctx.modulus())
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        g.context() == self.ctx && self.elements.binary_search(&self.key_of(g)).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &GroupClosure) -> bool {
        self.ctx == other.ctx && self.elements.iter().all(|k| other.elements.binary_search(k).is_ok())
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().enumerate().all(|(i, x)| g[i + 1..].iter().all(|y| x.mul(y) == y.mul(x)))
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Whether `h` is normalized by every generator.
    pub fn normalizes(&self, h: &GroupClosure) -> bool {
        self.generators.iter().all(|g| {
            let gi = g.inverse().expect("group element");
            h.generators.iter().all(|x| h.contains(&g.mul(x).mul(&gi)))
        })
    }

    /// Image modulo ℓᵐ.
    pub fn reduce(&self, m: u32) -> Result<GroupClosure> {
        if m == 0 || m > self.ctx.precision() {
            return Err(Error::PreconditionViolated(format!("reduction level {m} outside 1..=N")));
        }
        if m == self.ctx.precision() {
            return Ok(self.clone());
        }
        let sub = self.ctx.at_precision(m)?;
        let (big, small) = (self.ctx.modulus(), sub.modulus());
        let mut el: Vec<u64> = self
            .elements
            .iter()
            .map(|&k| pack(&unpack(k, big).map(|x| x % small), small))
            .collect();
        el.sort_unstable();
        el.dedup();
        let gens: Vec<Mat2> = self.generators.iter().map(|g| g.reduce_to(sub)).collect();
        Ok(Self::assemble(sub, gens, el))
    }

    /// Whether B_ℓ(n) ⊆ G, by counting elements ≡ Id mod ℓⁿ of determinant 1.
    pub fn contains_congruence(&self, n: u32) -> bool {
        let big_n = self.ctx.precision();
        if n >= big_n {
            return true;
        }
        let p = self.ctx.prime() as usize;
        let mut expected = p.pow(3 * (big_n - n));
        if n == 0 {
            expected = expected / (p * p) * (p * p - 1);
        }
        let one = 1 % self.ctx.modulus();
        let count = self
            .elements()
            .filter(|g| g.congruent_to_identity(n) && g.det().residue() == one)
            .count();
        count == expected
    }

    /// An element of B_ℓ(n) missing from G, if any.
    pub fn congruence_witness(&self, n: u32) -> Result<Option<Mat2>> {
        let b = congruence_subgroup(self.ctx, n.max(1))?;
        let w = b.elements().find(|g| !self.contains(g));
        Ok(w)
    }

    /// Derived subgroup, computed as the normal closure of the commutators of generators.
    pub fn derived_subgroup(&self, cap: usize) -> Result<GroupClosure> {
        self.derived_until(cap, |_| false)
    }

    /// Like `derived_subgroup`, but stops as soon as `done` holds for an
    /// intermediate subgroup (every intermediate is contained in G').
    pub fn derived_until<F: Fn(&GroupClosure) -> bool>(
        &self,
        cap: usize,
        done: F,
    ) -> Result<GroupClosure> {
        let ctx = self.ctx;
        let gens = &self.generators;
        let mut b = Builder::new(ctx, cap)?;
        for (i, x) in gens.iter().enumerate() {
            for y in &gens[i + 1..] {
                b.add(&x.commutator(y)?)?;
            }
        }
        let inverses: Vec<Mat2> = gens.iter().map(|g| g.inverse()).collect::<Result<_>>()?;
        loop {
            let snapshot = GroupClosure::assemble(ctx, Vec::new(), {
                let mut v = b.order.clone();
                v.sort_unstable();
                v
            });
            if done(&snapshot) {
                return Ok(b.finish());
            }
            let mut grew = false;
            let hgens: Vec<[u64; 4]> = b.gens.clone();
            for (g, gi) in gens.iter().zip(&inverses) {
                for h in &hgens {
                    let conj = g.mul(&Mat2::from_residues(ctx, *h)).mul(gi);
                    if !b.contains(&conj) {
                        b.add(&conj)?;
                        grew = true;
                    }
                }
            }
            if !grew {
                return Ok(b.finish());
            }
        }
    }

    /// Index [self : sub] (assuming sub ⊆ self).
    pub fn index_of(&self, sub: &GroupClosure) -> usize {
        self.order() / sub.order()
    }

    /// Sorted packed-key dump, one decimal key per line.
    pub fn dump_keys(&self) -> String {
        let mut s = String::with_capacity(self.elements.len() * 12);
        for k in &self.elements {
            s.push_str(&k.to_string());
            s.push('\n');
        }
        s
    }
}
