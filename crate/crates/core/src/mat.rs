//! 2×2 matrices over Z/ℓᴺ, the Θ map and its inverse.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{addmod, invmod, mulmod, submod, PadicContext, PadicInt};

/// Row-major 2×2 matrix `[m11, m12, m21, m22]` with canonical residues.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    ctx: PadicContext,
    e: [u64; 4],
}

impl Mat2 {
    pub fn new(ctx: PadicContext, entries: [i64; 4]) -> Mat2 {
        Mat2 { ctx, e: entries.map(|v| ctx.reduce_i128(v as i128)) }
    }

    pub fn from_residues(ctx: PadicContext, entries: [u64; 4]) -> Mat2 {
        let m = ctx.modulus();
        Mat2 { ctx, e: entries.map(|v| v % m) }
    }

    pub fn identity(ctx: PadicContext) -> Mat2 {
        Self::from_residues(ctx, [1, 0, 0, 1])
    }

    pub fn zero(ctx: PadicContext) -> Mat2 {
        Self::from_residues(ctx, [0, 0, 0, 0])
    }

    pub fn scalar(ctx: PadicContext, s: u64) -> Mat2 {
        Self::from_residues(ctx, [s, 0, 0, s])
    }

    pub fn diag(ctx: PadicContext, a: u64, d: u64) -> Mat2 {
        Self::from_residues(ctx, [a, 0, 0, d])
    }

    /// The traceless matrix [[c11, c12], [c21, −c11]].
    pub fn traceless(ctx: PadicContext, c21: u64, c11: u64, c12: u64) -> Mat2 {
        let m = ctx.modulus();
        Self::from_residues(ctx, [c11, c12, c21, submod(0, c11 % m, m)])
    }

    /// L_a = [[1, 0], [a, 1]].
    pub fn lower(ctx: PadicContext, a: u64) -> Mat2 {
        Self::from_residues(ctx, [1, 0, a, 1])
    }

    /// R_b = [[1, b], [0, 1]].
    pub fn upper(ctx: PadicContext, b: u64) -> Mat2 {
        Self::from_residues(ctx, [1, b, 0, 1])
    }

    /// D_c = diag(1 + c, (1 + c)⁻¹); `None` when 1 + c is not a unit.
    pub fn diag_unit(ctx: PadicContext, c: u64) -> Option<Mat2> {
        let m = ctx.modulus();
        let u = addmod(1, c % m, m);
        let inv = invmod(u, m)?;
        Some(Self::diag(ctx, u, inv))
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> PadicInt {
        self.ctx.from_residue(self.e[2 * i + j])
    }

    /// Coordinates (m21, m11, m12) used for traceless matrices.
    pub fn sl2_coords(&self) -> [u64; 3] {
        [self.e[2], self.e[0], self.e[1]]
    }

    pub fn det(&self) -> PadicInt {
        let m = self.ctx.modulus();
        let [a, b, c, d] = self.e;
        self.ctx.from_residue(submod(mulmod(a, d, m), mulmod(b, c, m), m))
    }

    pub fn trace(&self) -> PadicInt {
        self.ctx.from_residue(addmod(self.e[0], self.e[3], self.ctx.modulus()))
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1 % self.ctx.modulus(), 0, 0, 1 % self.ctx.modulus()]
    }

    pub fn is_zero(&self) -> bool {
        self.e == [0; 4]
    }

    pub fn is_scalar(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0 && self.e[0] == self.e[3]
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.e[2] == 0
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        debug_assert_eq!(self.ctx, o.ctx);
        Mat2 { ctx: self.ctx, e: mul_raw(&self.e, &o.e, self.ctx.modulus()) }
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let m = self.ctx.modulus();
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(o.e) {
            *x = addmod(*x, y, m);
        }
        Mat2 { ctx: self.ctx, e }
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let m = self.ctx.modulus();
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(o.e) {
            *x = submod(*x, y, m);
        }
        Mat2 { ctx: self.ctx, e }
    }

    pub fn neg(&self) -> Mat2 {
        let m = self.ctx.modulus();
        Mat2 { ctx: self.ctx, e: self.e.map(|x| submod(0, x, m)) }
    }

    pub fn scale(&self, s: u64) -> Mat2 {
        let m = self.ctx.modulus();
        Mat2 { ctx: self.ctx, e: self.e.map(|x| mulmod(x, s % m, m)) }
    }

    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity(self.ctx);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let m = self.ctx.modulus();
        let dinv = invmod(self.det().residue(), m).ok_or(Error::NotInvertible)?;
        let [a, b, c, d] = self.e;
        Ok(Mat2 {
            ctx: self.ctx,
            e: [d, submod(0, b, m), submod(0, c, m), a].map(|x| mulmod(x, dinv, m)),
        })
    }

    /// Lie bracket xy − yx.
    pub fn bracket(&self, o: &Mat2) -> Mat2 {
        self.mul(o).sub(&o.mul(self))
    }

    /// Group commutator g h g⁻¹ h⁻¹.
    pub fn commutator(&self, o: &Mat2) -> Result<Mat2> {
        Ok(self.mul(o).mul(&self.inverse()?).mul(&o.inverse()?))
    }

    /// Image modulo ℓᵐ in `ctx` (which must share the prime and have precision m ≤ N).
    pub fn reduce_to(&self, ctx: PadicContext) -> Mat2 {
        debug_assert_eq!(ctx.prime(), self.ctx.prime());
        Mat2::from_residues(ctx, self.e)
    }

    pub fn congruent_to_identity(&self, n: u32) -> bool {
        let q = self.ctx.pow_prime(n);
        if q == 0 {
            return self.is_identity();
        }
        let [a, b, c, d] = self.e;
        (a + q - 1) % q == 0 && b % q == 0 && c % q == 0 && (d + q - 1) % q == 0
    }

    /// Packed key ((m11·M + m12)·M + m21)·M + m22 with M = ℓᴺ.
    pub fn key(&self) -> u128 {
        let m = self.ctx.modulus() as u128;
        let [a, b, c, d] = self.e.map(|x| x as u128);
        ((a * m + b) * m + c) * m + d
    }

    pub fn from_key(ctx: PadicContext, key: u128) -> Mat2 {
        let m = ctx.modulus() as u128;
        let d = key % m;
        let c = (key / m) % m;
        let b = (key / (m * m)) % m;
        let a = key / (m * m * m);
        Mat2 { ctx, e: [a, b, c, d].map(|x| x as u64) }
    }

    /// Θ(g) = g − ½ tr(g)·Id.
    ///
    /// At ℓ = 2 the half-trace is only defined modulo 2^{N−1} on residues. When
    /// det g ≡ 1 the value is taken on a determinant-one lift of g, which makes
    /// it exact modulo 2ᴺ for g ≡ Id mod 2; otherwise the canonical lift is used.
    pub fn theta(&self) -> Result<Mat2> {
        let ctx = self.ctx;
        let m = ctx.modulus();
        let [a, b, c, d] = self.e;
        if ctx.prime() != 2 {
            let half = invmod(2, m).expect("2 is a unit");
            let t = mulmod(self.trace().residue(), half, m);
            return Ok(Mat2 { ctx, e: [submod(a, t, m), b, c, submod(d, t, m)] });
        }
        if (a + d) % 2 != 0 {
            return Err(Error::OddTrace);
        }
        let (ai, bi, ci, di) = (a as i128, b as i128, c as i128, d as i128);
        let mut diff = ai - di;
        if self.det().residue() == 1 % m {
            let q = ((1 - (ai * di - bi * ci)) >> ctx.precision()) & 1;
            if a % 2 == 1 {
                diff -= q * m as i128;
            } else if d % 2 == 1 {
                diff += q * m as i128;
            }
        }
        let h = ctx.reduce_i128(diff / 2);
        Ok(Mat2 { ctx, e: [h, b, c, submod(0, h, m)] })
    }

    /// Θ⁻¹(x) = x + √(1 + ½ tr(x²))·Id for traceless x.
    pub fn theta_inverse(&self) -> Result<Mat2> {
        let ctx = self.ctx;
        let m = ctx.modulus();
        let [a, b, c, d] = self.e;
        if addmod(a, d, m) != 0 {
            return Err(Error::PreconditionViolated("theta_inverse needs a traceless matrix".into()));
        }
        if ctx.prime() == 2 && self.e.iter().any(|x| x % 4 != 0) {
            return Err(Error::PreconditionViolated("theta_inverse at l = 2 needs x = 0 mod 4".into()));
        }
        let q = addmod(mulmod(a, a, m), mulmod(b, c, m), m);
        let lambda = ctx.from_residue(q).sqrt_one_plus()?.residue();
        Ok(self.add(&Mat2::scalar(ctx, lambda)))
    }
}

#[inline]
pub(crate) fn mul_raw(x: &[u64; 4], y: &[u64; 4], m: u64) -> [u64; 4] {
    if m <= 1 << 31 {
        [
            (x[0] * y[0] + x[1] * y[2]) % m,
            (x[0] * y[1] + x[1] * y[3]) % m,
            (x[2] * y[0] + x[3] * y[2]) % m,
            (x[2] * y[1] + x[3] * y[3]) % m,
        ]
    } else {
        [
            addmod(mulmod(x[0], y[0], m), mulmod(x[1], y[2], m), m),
            addmod(mulmod(x[0], y[1], m), mulmod(x[1], y[3], m), m),
            addmod(mulmod(x[2], y[0], m), mulmod(x[3], y[2], m), m),
            addmod(mulmod(x[2], y[1], m), mulmod(x[3], y[3], m), m),
        ]
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn theta_examples() {
        let c = ctx(7, 3);
        let g = Mat2::upper(c, 12);
        assert_eq!(g.theta().unwrap(), Mat2::traceless(c, 0, 0, 12));
        let c5 = ctx(5, 2);
        let a = 2;
        let ainv = invmod(a, 25).unwrap();
        let t = Mat2::diag(c5, a, ainv).theta().unwrap();
        assert_eq!(t.entries(), [7, 0, 0, 18]);
        for p in [2, 3, 5] {
            let c = ctx(p, 4);
            assert!(Mat2::identity(c).neg().theta().unwrap().is_zero());
            assert!(Mat2::identity(c).theta().unwrap().is_zero());
        }
        assert_eq!(Mat2::new(ctx(2, 3), [1, 0, 0, 2]).theta(), Err(Error::OddTrace));
    }

    #[test]
    fn theta_inverse_examples() {
        let c = ctx(2, 5);
        assert!(Mat2::zero(c).theta_inverse().unwrap().is_identity());
        let x = Mat2::traceless(c, 0, 0, 4);
        assert_eq!(x.theta_inverse().unwrap(), Mat2::upper(c, 4));
        let h = Mat2::traceless(c, 0, 4, 0);
        let g = h.theta_inverse().unwrap();
        assert_eq!(g.det().residue(), 1);
        assert!(g.entries()[1] == 0 && g.entries()[2] == 0);
        let one_plus_c = g.entries()[0];
        assert_eq!(c.from_residue(one_plus_c - 1).valuation(), Some(2));
        assert_eq!(g.mul(&Mat2::diag(c, g.entries()[3], one_plus_c)).entries()[0], 1);
        assert!(Mat2::traceless(c, 2, 0, 0).theta_inverse().is_err());
    }

    #[test]
    fn key_round_trip() {
        let c = ctx(3, 4);
        let g = Mat2::new(c, [5, -1, 17, 80]);
        assert_eq!(Mat2::from_key(c, g.key()), g);
        assert_eq!(Mat2::identity(c).key(), 81u128.pow(3) + 1);
    }

    fn prime() -> impl Strategy<Value = u64> {
        prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
    }

    /// A random matrix ≡ Id mod 2 at ℓ = 2 (so Θ is defined) or arbitrary invertible for odd ℓ.
    fn sample(c: PadicContext, seed: [u64; 4]) -> Mat2 {
        let m = c.modulus();
        let mut e = seed.map(|x| x % m);
        if c.prime() == 2 {
            e[0] |= 1;
            e[3] |= 1;
            e[1] &= !1;
            e[2] &= !1;
        }
        let mut g = Mat2::from_residues(c, e);
        while !g.is_invertible() {
            g = g.add(&Mat2::identity(c));
        }
        g
    }

    proptest! {
        #[test]
        fn addition_formula(p in prime(), n in 1u32..=6, s1 in any::<[u64; 4]>(), s2 in any::<[u64; 4]>()) {
            let c = ctx(p, n);
            let (g1, g2) = (sample(c, s1), sample(c, s2));
            let (t1, t2) = (g1.theta().unwrap(), g2.theta().unwrap());
            let lhs = g1.mul(&g2).theta().unwrap().sub(&t1).sub(&t2).scale(2);
            let two = Mat2::scalar(c, 2);
            let rhs = t1.bracket(&t2)
                .add(&t2.scale(g1.trace().residue()).sub(&t2.mul(&two)))
                .add(&t1.scale(g2.trace().residue()).sub(&t1.mul(&two)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conjugation_equivariance(p in prime(), n in 1u32..=6, s1 in any::<[u64; 4]>(), s2 in any::<[u64; 4]>()) {
            let c = ctx(p, n);
            let g = sample(c, s1);
            let mut nn = sample(c, s2);
            if p == 2 {
                let d = nn.det().unit_inverse().unwrap().residue();
                nn = nn.mul(&Mat2::diag(c, 1, d));
            }
            let gi = g.inverse().unwrap();
            let lhs = gi.mul(&nn).mul(&g).theta().unwrap();
            let rhs = gi.mul(&nn.theta().unwrap()).mul(&g);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn theta_inverts_theta_inverse(p in prime(), n in 1u32..=8, s in any::<[u64; 3]>()) {
            let c = ctx(p, n);
            let shift = if p == 2 { 2 } else { 1 };
            let q = c.pow_prime(shift);
            let m = c.modulus();
            let x = Mat2::traceless(c, mulmod(s[0] % m, q, m), mulmod(s[1] % m, q, m), mulmod(s[2] % m, q, m));
            let g = x.theta_inverse().unwrap();
            prop_assert_eq!(g.det().residue(), 1 % c.modulus());
            let back = g.theta().unwrap();
            let out = p.pow(n - c.precision_loss());
            for (u, v) in back.entries().iter().zip(x.entries()) {
                prop_assert_eq!(u % out, v % out);
            }
        }

        #[test]
        fn two_adic_trace_of_theta_inverse(n in 4u32..=12, s in any::<[u64; 3]>(), e in 2u32..6) {
            let c = ctx(2, n);
            let e = e.min(n - 1);
            let m = c.modulus();
            let q = c.pow_prime(e);
            let x = Mat2::traceless(c, mulmod(s[0] % m, q, m), mulmod(s[1] % m, q, m), mulmod(s[2] % m, q, m));
            let g = x.theta_inverse().unwrap();
            prop_assert!(g.congruent_to_identity(2));
            let t = g.theta().unwrap();
            prop_assert!(t.entries().iter().all(|v| v % q == 0));
            let need = (2 * e).min(n);
            let tr2 = submod(g.trace().residue(), 2, m);
            prop_assert_eq!(tr2 % 2u64.pow(need), 0);
        }

        #[test]
        fn two_adic_trace_on_random_elements(n in 3u32..=12, s in any::<[u64; 3]>()) {
            let c = ctx(2, n);
            let m = c.modulus();
            let (a, b, cc) = ((1 + 4 * (s[0] % m)) % m, (4 * (s[1] % m)) % m, (4 * (s[2] % m)) % m);
            let d = mulmod(addmod(1, mulmod(b, cc, m), m), invmod(a, m).unwrap(), m);
            let g = Mat2::from_residues(c, [a, b, cc, d]);
            prop_assert_eq!(g.det().residue(), 1);
            let t = g.theta().unwrap();
            let e = t.entries().iter().map(|&v| c.valuation_of(v).unwrap_or(n)).min().unwrap();
            if e >= 2 {
                let need = (2 * e).min(n);
                prop_assert_eq!(submod(g.trace().residue(), 2, m) % 2u64.pow(need), 0);
            }
        }
    }
}
