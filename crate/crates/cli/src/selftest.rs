//! Embedded goldens at small parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use openimage::bounds::{isogeny_bound, parse_decimal, IsogenyVariant};
use openimage::dickson::{det1_part, saturate};
use openimage::{close, congruence_subgroup, CurveParams, Mat2, PadicContext, DEFAULT_CAP};

use crate::{Failure, Out, Run};

/// Sorted keys of B₂(2) modulo 8.
const B2_2_MOD8: &str = include_str!("../goldens/b2_level2_mod8.keys");

fn ctx(p: u64, n: u32) -> PadicContext {
    PadicContext::new(p, n).expect("valid context")
}

fn generation() -> bool {
    [(3u64, 1u32, 2u32, 27usize), (2, 2, 4, 64), (5, 1, 2, 125)].iter().all(|&(p, n, prec, want)| {
        let c = ctx(p, prec);
        let q = c.pow_prime(n);
        let mut gens = vec![Mat2::upper(c, q), Mat2::lower(c, q)];
        gens.extend(Mat2::diag_unit(c, q));
        close(c, &gens, DEFAULT_CAP).is_ok_and(|g| g.order() == want)
    })
}

fn derived() -> bool {
    let c = ctx(3, 3);
    let d = congruence_subgroup(c, 1).and_then(|b| b.derived_subgroup(DEFAULT_CAP));
    let target = congruence_subgroup(c, 2);
    match (d, target) {
        (Ok(d), Ok(t)) => t.elements().all(|x| d.contains(&x)),
        _ => false,
    }
}

fn addition_formula() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..2000).all(|i| {
        let p = [2u64, 3, 5, 7][i % 4];
        let c = ctx(p, rng.gen_range(1..=5));
        let mut draw = || {
            let m = c.modulus();
            let mut e: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..m));
            if p == 2 {
                e = [e[0] | 1, e[1] & !1, e[2] & !1, e[3] | 1];
            }
            let mut g = Mat2::from_residues(c, e);
            while !g.is_invertible() {
                g = g.add(&Mat2::identity(c));
            }
            g
        };
        let (g1, g2) = (draw(), draw());
        let (Ok(t1), Ok(t2), Ok(t12)) = (g1.theta(), g2.theta(), g1.mul(&g2).theta()) else {
            return false;
        };
        let two = Mat2::scalar(c, 2);
        let lhs = t12.sub(&t1).sub(&t2).scale(2);
        let rhs = t1
            .bracket(&t2)
            .add(&t2.scale(g1.trace().residue()).sub(&t2.mul(&two)))
            .add(&t1.scale(g2.trace().residue()).sub(&t1.mul(&two)));
        lhs == rhs
    })
}

fn saturation() -> bool {
    let c = ctx(5, 2);
    let run = || -> openimage::Result<bool> {
        let g = close(c, &[Mat2::new(c, [1, 5, 0, 1]), Mat2::diag(c, 7, 18)], DEFAULT_CAP)?;
        let s = saturate(&g, DEFAULT_CAP)?;
        let ss = saturate(&s, DEFAULT_CAP)?;
        let scalars = c.unit_group_generators().into_iter().all(|u| s.contains(&Mat2::scalar(c, u)));
        let d = det1_part(&s)?;
        Ok(g.is_subgroup_of(&s) && ss == s && scalars && d.is_sl2_subset() && det1_part(&g)?.is_subgroup_of(&d))
    };
    run().unwrap_or(false)
}

fn key_dump() -> bool {
    congruence_subgroup(ctx(2, 3), 2).is_ok_and(|b| b.dump_keys() == B2_2_MOD8)
}

fn elliptic_constant() -> bool {
    let (Ok(one), Ok(thirteen)) = (parse_decimal("1"), parse_decimal("13")) else {
        return false;
    };
    let p = CurveParams::new(1, one).expect("valid params");
    isogeny_bound(&p, IsogenyVariant::Elliptic, 64).is_ok_and(|b| *b.log10() == thirteen)
}

pub fn run(out: &mut Out) -> Run {
    let checks: [(&str, fn() -> bool); 6] = [
        ("generation", generation),
        ("derived", derived),
        ("addition", addition_formula),
        ("saturation", saturation),
        ("key-dump", key_dump),
        ("elliptic-constant", elliptic_constant),
    ];
    let mut ok = true;
    for (name, f) in checks {
        let pass = f();
        out.kv(name, if pass { "pass" } else { "fail" });
        ok &= pass;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Violated)
    }
}
