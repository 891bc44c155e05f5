//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use openimage::bounds::{
    adelic_index_bound, alpha, b0_bound, b0_y, d2_bound, d_infty_bound, e_upper,
    general_index_bound, index_divisor_bound, isogeny_bound, ln_upper, log10_upper,
    masser_exponent, masser_lcm_bound, parse_decimal, pow10_upper, psi_bound, round_sig,
    torsion_degree_bound, AdelicVariant, B0Variant, IsogenyVariant,
};
use openimage::dickson::{max_normal_pro_ell, verify_witness};
use openimage::fixtures::{optimal_lie, pink_borel, s3_lift};
use openimage::group::general_linear_group;
use openimage::theorems::check_starstar;
use openimage::{
    classify_mod_ell, close, congruence_subgroup, run_campaign, special_lie_algebra,
    CampaignConfig, CurveParams, DicksonClass, LogMagnitude, Mat2, Outcome, PadicContext, Theorem,
    DEFAULT_CAP,
};

struct Suite {
    failed: Vec<u32>,
}

impl Suite {
    fn run(&mut self, id: u32, name: &str, limit: Duration, f: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (ok, detail) = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = ok && in_time;
        println!(
            "criterion {id:>2} {name}: {} ({detail}; {:.2}s, limit {}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            self.failed.push(id);
        }
    }
}

fn ctx(p: u64, n: u32) -> PadicContext {
    PadicContext::new(p, n).unwrap()
}

fn dec(s: &str) -> BigRational {
    parse_decimal(s).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn generation() -> (bool, String) {
    let mut ok = true;
    let mut sizes = Vec::new();
    for (p, n, prec, want) in [(3u64, 1u32, 3u32, 729usize), (3, 1, 2, 27), (2, 2, 4, 64), (5, 1, 2, 125)] {
        let c = ctx(p, prec);
        let q = c.pow_prime(n);
        let mut gens = vec![Mat2::upper(c, q), Mat2::lower(c, q)];
        gens.extend(Mat2::diag_unit(c, q));
        let g = close(c, &gens, DEFAULT_CAP).unwrap();
        let b = congruence_subgroup(c, n).unwrap();
        ok &= g.order() == want && g.keys() == b.keys();
        sizes.push(g.order().to_string());
    }
    (ok, format!("sizes {}", sizes.join("/")))
}

fn derived() -> (bool, String) {
    let mut misses = 0;
    let mut sizes = Vec::new();
    for (p, prec, level) in [(3u64, 3u32, 2u32), (2, 6, 4)] {
        let c = ctx(p, prec);
        let d = congruence_subgroup(c, 1).unwrap().derived_subgroup(DEFAULT_CAP).unwrap();
        let target = congruence_subgroup(c, level).unwrap();
        misses += target.elements().filter(|x| !d.contains(x)).count();
        sizes.push(format!("{}/{}", target.order(), d.order()));
    }
    (misses == 0, format!("misses={misses} target/derived {}", sizes.join(" ")))
}

fn random_mat(rng: &mut ChaCha8Rng, c: PadicContext) -> Mat2 {
    let m = c.modulus();
    let mut e: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..m));
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

fn addition_formula() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut failures = 0;
    let mut total = 0;
    for p in [2u64, 3, 5, 7] {
        for _ in 0..10_000 {
            let c = ctx(p, rng.gen_range(1..=6));
            let (g1, g2) = (random_mat(&mut rng, c), random_mat(&mut rng, c));
            let (t1, t2) = (g1.theta().unwrap(), g2.theta().unwrap());
            let lhs = g1.mul(&g2).theta().unwrap().sub(&t1).sub(&t2).scale(2);
            let two = Mat2::scalar(c, 2);
            let rhs = t1
                .bracket(&t2)
                .add(&t2.scale(g1.trace().residue()).sub(&t2.mul(&two)))
                .add(&t1.scale(g2.trace().residue()).sub(&t1.mul(&two)));
            failures += (lhs != rhs) as usize;
            total += 1;
        }
    }
    (failures == 0, format!("{total} pairs, failures={failures}"))
}

fn roots() -> (bool, String) {
    let mut exceptions = 0;
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        let min_v = if p == 2 { 3 } else { 1 };
        for n in 1..=8 {
            let c = ctx(p, n);
            let m = c.modulus();
            let out = p.pow(n - c.precision_loss());
            for x in 0..m {
                let vx = c.valuation_of(x);
                if matches!(vx, Some(v) if v < min_v) {
                    continue;
                }
                checked += 1;
                let l = c.from_residue(x).sqrt_one_plus().unwrap().residue();
                let sq = (l as u128 * l as u128 % out as u128) as u64;
                let mut ok = sq == (1 + x) % out;
                let cap = n - c.precision_loss();
                let lm1 = (l + m - 1) % m % out;
                let vl = if lm1 == 0 { cap } else { c.valuation_of(lm1).unwrap() };
                ok &= match vx {
                    None => vl == cap,
                    Some(a) if p == 2 => vl + 1 >= a,
                    Some(a) => vl == a,
                };
                let unit_mod = if p == 2 { 4.min(out) } else { p };
                ok &= l % unit_mod == 1 % unit_mod;
                exceptions += (!ok) as usize;
            }
        }
    }
    (exceptions == 0, format!("{checked} residues, exceptions={exceptions}"))
}

fn starstar_campaign() -> (bool, String) {
    let cfg = CampaignConfig {
        theorem: Theorem::StarStar,
        prime: 3,
        precision: 5,
        parameter: 1,
        trials: 200,
        seed: 7,
        cap: DEFAULT_CAP,
        resample_capped: true,
    };
    let r = run_campaign(&cfg).unwrap();
    let s3 = s3_lift(5, 1, 2).unwrap();
    let fixture = check_starstar(&s3, 1).unwrap();
    let inapplicable = matches!(fixture.outcome, Outcome::Inapplicable(_));
    (
        r.summary.violated == 0 && r.summary.trials == 200 && inapplicable,
        format!("{}; s3-lift {}", r.summary, fixture.outcome.tag()),
    )
}

fn pink_tightness() -> (bool, String) {
    let pb = pink_borel(5, 1, 4, 4).unwrap();
    let n = max_normal_pro_ell(&pb.group).unwrap();
    let l = special_lie_algebra(&n.subgroup).unwrap();
    let at2 = l.contains_scaled_sl2(2).unwrap();
    let at1 = l.contains_scaled_sl2(1).unwrap();
    (
        at2 && !at1,
        format!("|G|={} |N(G)|={} contains 25sl2={at2} 5sl2={at1}", pb.group.order(), n.subgroup.order()),
    )
}

fn optimal_flip() -> (bool, String) {
    let mut hits = 0;
    for (k, n) in [(0u32, 1u32), (0, 2), (1, 1), (1, 2)] {
        let prec = n + 2 * k + 2;
        let flip = n + 2 * k - 1;
        let ok = [3u64, 5].iter().all(|&p| {
            let l = optimal_lie(p, k, n, prec).unwrap();
            (0..prec).all(|s| l.contains_scaled_sl2(s).unwrap() == (s >= flip))
        });
        hits += ok as usize;
    }
    (hits == 4, format!("{hits}/4 parameter points"))
}

fn sl2z2_campaign() -> (bool, String) {
    let cfg = CampaignConfig {
        theorem: Theorem::Sl2Z2,
        prime: 2,
        precision: 13,
        parameter: 2,
        trials: 50,
        seed: 11,
        cap: DEFAULT_CAP,
        resample_capped: false,
    };
    let r = run_campaign(&cfg).unwrap();
    let s = &r.summary;
    (
        s.violated == 0 && s.completed() >= 25,
        format!("{s} capped={} completed={} hypothesis_held={}", s.capped, s.completed(), s.hypothesis_held),
    )
}

fn dickson_exhaustive() -> (bool, String) {
    let c = ctx(3, 1);
    let gl = general_linear_group(c, DEFAULT_CAP).unwrap();
    let elems: Vec<Mat2> = gl.elements().collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut bad = 0;
    let mut dichotomy = 0;
    for a in &elems {
        for b in &elems {
            let j = close(c, &[*a, *b], DEFAULT_CAP).unwrap();
            if !seen.insert(j.keys().to_vec()) {
                continue;
            }
            let class = classify_mod_ell(&j).unwrap();
            bad += (!verify_witness(&j, &class)) as usize;
            if j.order() % 3 == 0
                && !matches!(class, DicksonClass::ContainsSL2 | DicksonClass::Borel { .. })
            {
                dichotomy += 1;
            }
        }
    }
    (
        bad == 0 && dichotomy == 0,
        format!("{} subgroups, witness failures={bad}, dichotomy exceptions={dichotomy}", seen.len()),
    )
}

fn p11() -> CurveParams {
    CurveParams::new(1, rat(1)).unwrap()
}

fn agree_to(x: &BigRational, r: &BigRational, digits: i32) -> bool {
    (x - r).abs() <= r.abs() * BigRational::new(BigInt::one(), BigInt::from(10).pow(digits as u32))
}

fn bound_constants() -> (bool, String) {
    let p = p11();
    let iso = isogeny_bound(&p, IsogenyVariant::Elliptic, 64).unwrap();
    let iso_ok = *iso.log10() == rat(13);
    let log10e = dec("0.43429448190325182765112891891660508229439700580367");
    let g12 = adelic_index_bound(&p, AdelicVariant::Gamma12, 64).unwrap();
    let g12_ref = BigRational::from_integer(BigInt::from(10).pow(21483)) * &log10e;
    let g12_ok = agree_to(g12.log10(), &g12_ref, 30);
    let g34 = adelic_index_bound(&p, AdelicVariant::Gamma34, 64).unwrap();
    let g34_ok = agree_to(g34.log10(), &(rat(19_000_000_000) * &log10e), 30);
    let mut masser_ok = true;
    for d in [2u64, 3, 24, 60] {
        let dr = rat(d as i64);
        let y = b0_y(&p, d, B0Variant::General, 64);
        let ly = rat(alpha(1) as i64)
            * (log10_upper(&dr) + rat(2) * log10_upper(&(BigRational::one() + ln_upper(&dr))));
        masser_ok &= *y.log10() == ly;
        let expo = masser_exponent(&y);
        masser_ok &= expo == BigRational::one() + y.ln_upper();
        let x = isogeny_bound(&p, IsogenyVariant::General, 64).unwrap();
        let small_y = b0_y(&p, d, B0Variant::Elliptic, 64);
        let got = masser_lcm_bound(&x, &small_y).unwrap();
        let want = e_upper() * pow10_upper(small_y.log10()).unwrap() * log10_upper(&rat(4))
            + masser_exponent(&small_y) * x.log10();
        masser_ok &= *got.log10() == round_sig(&want, 64, true);
    }
    (
        iso_ok && g12_ok && g34_ok && masser_ok,
        format!("elliptic log10={} gamma12={g12_ok} gamma34={g34_ok} masser identity={masser_ok}", iso.display_log10()),
    )
}

type Golden = (&'static str, fn(u32) -> LogMagnitude, &'static str);

fn goldens() -> Vec<Golden> {
    vec![
        ("isogeny-general", |b| isogeny_bound(&p11(), IsogenyVariant::General, b).unwrap(),
            "75112.646946209007267083396927791380578419492636988"),
        ("isogeny-elliptic", |b| isogeny_bound(&p11(), IsogenyVariant::Elliptic, b).unwrap(), "13"),
        ("masser-10-10", |b| {
            let ten = LogMagnitude::from_log10(rat(1), b);
            masser_lcm_bound(&ten, &ten).unwrap()
        }, "19.668272433684150929884103018643261170000330416497"),
        ("b0-elliptic-2", |b| b0_bound(&p11(), 2, B0Variant::Elliptic, b).unwrap(),
            "63.47965807202073152456472588669222907563381481862"),
        ("b0-elliptic-60", |b| b0_bound(&p11(), 60, B0Variant::Elliptic, b).unwrap(),
            "153063.86036229208245726536630306905778124995087581"),
        ("b0-esquare-2", |b| b0_bound(&p11(), 2, B0Variant::ESquare, b).unwrap(),
            "368.04801387220672878396694008442854128670534090731"),
        ("psi", |b| psi_bound(&p11(), b).unwrap(), "153433.38549741900884848662827105674143784585634558"),
        ("d-infty", |b| d_infty_bound(&p11(), b).unwrap(), "165536710.40600780385953192735357240345827436364045"),
        ("d2", |b| d2_bound(&p11(), b).unwrap(), "142.87653419318348215035984497525010759284824044006"),
        ("composed", |b| adelic_index_bound(&p11(), AdelicVariant::Composed, b).unwrap(),
            "7951306342.415864525401333020856944473541877218255"),
        ("gamma34", |b| adelic_index_bound(&p11(), AdelicVariant::Gamma34, b).unwrap(),
            "8251595156.1617847253714494594154965635935431102697"),
        ("index-divisor-3", |b| index_divisor_bound(3, &LogMagnitude::one(b)).unwrap(),
            "15.745001405748860430735920807418805203604252518293"),
        ("d3", |b| general_index_bound(3, &p11(), b).unwrap().d_ell,
            "127.17262727547021768801114917343823027369959813288"),
    ]
}

fn rounding_soundness() -> (bool, String) {
    let mut bad = Vec::new();
    let tol = dec("1e-45");
    for (name, f, reference) in goldens() {
        let (a, b) = (f(64), f(128));
        let r = dec(reference);
        let slack = &tol * r.abs().max(BigRational::one());
        if b.log10() > a.log10() || *a.log10() < &r - &slack || *a.log10() > &r + &slack {
            bad.push(name);
        }
    }
    let gamma12 = |b| adelic_index_bound(&p11(), AdelicVariant::Gamma12, b).unwrap();
    if gamma12(128).log10() > gamma12(64).log10() {
        bad.push("gamma12");
    }
    let t = |b| torsion_degree_bound(&LogMagnitude::one(b), 1).unwrap().log10_lower();
    let r = dec("-0.21614849500462407619376977860218941133503790310808");
    let (t64, t128) = (t(64), t(128));
    if t128 < t64 || t64 > &r + &tol || t64 < &r - &tol {
        bad.push("torsion");
    }
    let total = goldens().len() + 2;
    let ok = bad.is_empty();
    (ok, format!("{total} goldens, regressions={}{}", bad.len(), if ok { String::new() } else { format!(" {bad:?}") }))
}

fn main() {
    let mut suite = Suite { failed: Vec::new() };
    let secs = Duration::from_secs;
    suite.run(1, "congruence generation", secs(30), generation);
    suite.run(2, "derived congruence subgroup", secs(300), derived);
    suite.run(3, "addition formula", secs(60), addition_formula);
    suite.run(4, "square roots", secs(60), roots);
    suite.run(5, "starstar campaign", secs(600), starstar_campaign);
    suite.run(6, "borel-type tightness", secs(300), pink_tightness);
    suite.run(7, "optimal lie flip", secs(60), optimal_flip);
    suite.run(8, "sl2z2 campaign", secs(900), sl2z2_campaign);
    suite.run(9, "dickson exhaustive", secs(60), dickson_exhaustive);
    suite.run(10, "bound constants", secs(1), bound_constants);
    suite.run(11, "rounding soundness", secs(300), rounding_soundness);
    if suite.failed.is_empty() {
        println!("acceptance: 11/11 PASS");
    } else {
        println!("acceptance: {} FAIL {:?}", suite.failed.len(), suite.failed);
        std::process::exit(1);
    }
}
