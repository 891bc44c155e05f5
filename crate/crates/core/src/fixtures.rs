//! Explicit groups and modules with known Lie-theoretic behaviour.

use crate::error::{Error, Result};
use crate::group::{close, key64, GroupClosure, DEFAULT_CAP};
use crate::lie::LieModule;
use crate::mat::Mat2;
use crate::padic::{mulmod, powmod, prime_factors, submod, PadicContext};

/// Teichmüller lift of a mod ℓ to Z/ℓᴺ.
pub fn teichmuller(ctx: PadicContext, a: u64) -> u64 {
    let m = ctx.modulus();
    powmod(a % m, ctx.pow_prime(ctx.precision() - 1).max(1), m)
}

/// A root of unity of exact order `order` in Z/ℓᴺ (order | ℓ − 1).
pub fn root_of_unity(ctx: PadicContext, order: u64) -> Result<u64> {
    let p = ctx.prime();
    if order == 0 || p == 2 || (p - 1) % order != 0 {
        return Err(Error::InvalidParams(format!("no root of unity of order {order} mod {p}")));
    }
    let qs = prime_factors(order);
    let r = (1..p)
        .find(|&a| powmod(a, order, p) == 1 && qs.iter().all(|&q| powmod(a, order / q, p) != 1))
        .expect("cyclic group");
    Ok(teichmuller(ctx, r))
}

/// A lift of the S₃ ⊂ SL₂(F_ℓ) of order 12 built from √−1, times B_ℓ(t).
/// Needs ℓ ≡ 1 mod 4 and 1 ≤ t ≤ N. Has order 12·ℓ^{3(N−t)}.
pub fn s3_lift(prime: u64, t: u32, precision: u32) -> Result<GroupClosure> {
    if prime % 4 != 1 {
        return Err(Error::InvalidParams("s3-lift needs l = 1 mod 4".into()));
    }
    if t == 0 || t > precision {
        return Err(Error::InvalidParams("s3-lift needs 1 <= t <= N".into()));
    }
    let ctx = PadicContext::new(prime, precision)?;
    let m = ctx.modulus();
    let i = root_of_unity(ctx, 4)?;
    let ni = submod(0, i, m);
    let mut gens = vec![
        Mat2::new(ctx, [0, 1, -1, 1]),
        Mat2::new(ctx, [1, -1, 1, 0]),
        Mat2::from_residues(ctx, [0, i, i, 0]),
        Mat2::from_residues(ctx, [ni, i, 0, i]),
        Mat2::from_residues(ctx, [i, 0, i, ni]),
        Mat2::scalar(ctx, m - 1),
    ];
    let q = ctx.pow_prime(t);
    gens.push(Mat2::upper(ctx, q));
    gens.push(Mat2::lower(ctx, q));
    if let Some(d) = Mat2::diag_unit(ctx, q) {
        gens.push(d);
    }
    close(ctx, &gens, DEFAULT_CAP)
}

/// The Borel-type example: H = {λ(y)·I + y : y ∈ M} with
/// M = ℓˢE₁₂ ⊕ ℓˢE₂₁ ⊕ ℓ^{2s}·diag(1, −1), joined with diag(a, a⁻¹) for a root
/// of unity a of order `order`.
#[derive(Clone, Debug)]
pub struct PinkBorel {
    pub group: GroupClosure,
    pub kernel: GroupClosure,
    pub module: LieModule,
}

pub fn pink_borel(prime: u64, s: u32, order: u64, precision: u32) -> Result<PinkBorel> {
    if prime == 2 {
        return Err(Error::InvalidParams("pink-borel needs an odd prime".into()));
    }
    if s == 0 || precision <= 2 * s {
        return Err(Error::InvalidParams("pink-borel needs 1 <= s and N > 2s".into()));
    }
    let ctx = PadicContext::new(prime, precision)?;
    let m = ctx.modulus();
    let (q1, q2) = (ctx.pow_prime(s), ctx.pow_prime(2 * s));
    let a = root_of_unity(ctx, order)?;
    let module = LieModule::span(
        ctx,
        &[
            Mat2::traceless(ctx, q1, 0, 0),
            Mat2::traceless(ctx, 0, q2, 0),
            Mat2::traceless(ctx, 0, 0, q1),
        ],
    )?;
    let mut keys = Vec::new();
    for c21 in (0..m).step_by(q1 as usize) {
        for c11 in (0..m).step_by(q2 as usize) {
            for c12 in (0..m).step_by(q1 as usize) {
                let y = Mat2::traceless(ctx, c21, c11, c12);
                keys.push(key64(&y.theta_inverse()?));
            }
        }
    }
    let kernel = GroupClosure::from_elements(ctx, keys)?;
    let ainv = powmod(a, order - 1, m);
    debug_assert_eq!(mulmod(a, ainv, m), 1);
    let group = kernel.extend(&[Mat2::diag(ctx, a, ainv)], DEFAULT_CAP)?;
    Ok(PinkBorel { group, kernel, module })
}

/// The module spanned by [[1, 0], [ℓᵏ, −1]], ℓ^{k+n−1}·diag(1, −1) and ℓ^{n−1}·E₁₂.
/// It contains ℓ^{n+2k−1}·sl₂ and no larger multiple.
pub fn optimal_lie(prime: u64, k: u32, n: u32, precision: u32) -> Result<LieModule> {
    if n == 0 {
        return Err(Error::InvalidParams("optimal-lie needs n >= 1".into()));
    }
    let ctx = PadicContext::new(prime, precision)?;
    LieModule::span(
        ctx,
        &[
            Mat2::traceless(ctx, ctx.pow_prime(k), 1, 0),
            Mat2::traceless(ctx, 0, ctx.pow_prime(k + n - 1), 0),
            Mat2::traceless(ctx, 0, 0, ctx.pow_prime(n - 1)),
        ],
    )
}

/// A group realizing ℓ·(optimal module) together with −I (ℓ odd).
pub fn optimal_group(prime: u64, k: u32, n: u32, precision: u32) -> Result<GroupClosure> {
    let l = optimal_lie(prime, k, n, precision)?;
    let ctx = l.context();
    let mut gens = Vec::new();
    for x in l.reduced_basis().basis() {
        gens.push(x.scale(prime).theta_inverse()?);
    }
    gens.push(Mat2::scalar(ctx, ctx.modulus() - 1));
    close(ctx, &gens, DEFAULT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dickson::max_normal_pro_ell;
    use crate::lie::special_lie_algebra;

    #[test]
    fn roots_of_unity() {
        let c = PadicContext::new(5, 3).unwrap();
        let i = root_of_unity(c, 4).unwrap();
        assert_eq!(mulmod(i, i, 125), 124);
        assert!(root_of_unity(c, 8).is_err());
        let c = PadicContext::new(7, 2).unwrap();
        let w = root_of_unity(c, 3).unwrap();
        assert_eq!(powmod(w, 3, 49), 1);
        assert_ne!(w, 1);
    }

    #[test]
    fn s3_lift_order() {
        let g = s3_lift(5, 1, 2).unwrap();
        assert_eq!(g.order(), 1500);
        assert!(g.is_sl2_subset());
        assert_eq!(s3_lift(5, 1, 1).unwrap().order(), 12);
        assert_eq!(s3_lift(13, 2, 2).unwrap().order(), 12);
        assert!(s3_lift(7, 1, 2).is_err());
    }

    #[test]
    fn pink_borel_kernel_has_the_module_as_lie_algebra() {
        let pb = pink_borel(7, 1, 3, 3).unwrap();
        assert_eq!(pb.kernel.order(), 7usize.pow(5));
        assert_eq!(pb.group.order(), 3 * 7usize.pow(5));
        let n = max_normal_pro_ell(&pb.group).unwrap();
        assert_eq!(n.subgroup, pb.kernel);
        assert_eq!(n.quotient_order, 3);
        let l = special_lie_algebra(&pb.kernel).unwrap();
        assert!(l.is_submodule_of(&pb.module) && pb.module.is_submodule_of(&l));
        assert_eq!(l.min_scale(), Some(2));
        assert_eq!(special_lie_algebra(&pb.group).unwrap().min_scale(), Some(1));
    }

    #[test]
    fn optimal_group_lie_algebra() {
        let g = optimal_group(3, 0, 1, 4).unwrap();
        let l = special_lie_algebra(&g).unwrap();
        assert_eq!(l.min_scale(), Some(1));
    }
}
