//! Seeded random campaigns: sample generators, close, check.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::teichmuller;
use crate::group::{close, GroupClosure};
use crate::mat::Mat2;
use crate::padic::{invmod, powmod, PadicContext};
use crate::theorems::{
    check_gl2z2_with_cap, check_sl2z2, check_star, check_starstar_with_cap, star_applicability,
    starstar_applicability, trichotomy_with_cap, Outcome, Theorem, TrichotomyMode,
    VerificationReport,
};

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub theorem: Theorem,
    pub prime: u64,
    pub precision: u32,
    pub parameter: u32,
    pub trials: usize,
    pub seed: u64,
    pub cap: usize,
    /// Draw a fresh sample instead of counting a trial whose closure hit the cap.
    pub resample_capped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CampaignSummary {
    pub trials: usize,
    pub verified: usize,
    pub hypothesis_held: usize,
    pub violated: usize,
    pub inapplicable: usize,
    pub insufficient: usize,
    pub capped: usize,
}

impl CampaignSummary {
    fn record(&mut self, o: &Outcome) {
        match o {
            Outcome::Verified { hypothesis_held } => {
                self.verified += 1;
                self.hypothesis_held += *hypothesis_held as usize;
            }
            Outcome::Violated { .. } => self.violated += 1,
            Outcome::Inapplicable(_) => self.inapplicable += 1,
            Outcome::InsufficientPrecision { .. } => self.insufficient += 1,
        }
    }

    /// Trials whose closure finished.
    pub fn completed(&self) -> usize {
        self.trials - self.capped
    }
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} verified={} violated={} inapplicable={} insufficient={}",
            self.trials, self.verified, self.violated, self.inapplicable, self.insufficient
        )
    }
}

#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub summary: CampaignSummary,
    pub reports: Vec<VerificationReport>,
}

fn random_traceless(rng: &mut ChaCha8Rng, ctx: PadicContext, scale: u64) -> Mat2 {
    let m = ctx.modulus();
    let q = m / scale;
    Mat2::traceless(
        ctx,
        rng.gen_range(0..q) * scale,
        rng.gen_range(0..q) * scale,
        rng.gen_range(0..q) * scale,
    )
}

/// Θ⁻¹ of a random element of ℓʲ·sl₂, an element of SL₂ congruent to I mod ℓʲ.
fn perturbation(rng: &mut ChaCha8Rng, ctx: PadicContext, j: u32) -> Mat2 {
    if j >= ctx.precision() {
        return Mat2::identity(ctx);
    }
    let x = random_traceless(rng, ctx, ctx.pow_prime(j));
    x.theta_inverse().expect("x = 0 mod l^j")
}

/// g^{ℓ^E} for E = 4(N − 1): for semisimple g mod ℓ this is the lift of finite
/// order with the same reduction.
fn finite_order_lift(g: &Mat2) -> Mat2 {
    let ctx = g.context();
    let mut x = *g;
    for _ in 0..4 * (ctx.precision() - 1) {
        x = x.pow(ctx.prime());
    }
    x
}

fn random_unit(rng: &mut ChaCha8Rng, p: u64) -> u64 {
    rng.gen_range(1..p)
}

fn nonsplit_element(rng: &mut ChaCha8Rng, ctx: PadicContext) -> Mat2 {
    let p = ctx.prime();
    loop {
        let (a, b, c) = (rng.gen_range(0..p), rng.gen_range(1..p), rng.gen_range(0..p));
        if a == 0 {
            continue;
        }
        let d = ((1 + b * c) % p) * invmod(a, p).unwrap() % p;
        let disc = ((a + d) * (a + d) + 4 * (p - 1)) % p;
        if disc != 0 && powmod(disc, (p - 1) / 2, p) != 1 {
            return finite_order_lift(&Mat2::from_residues(ctx, [a, b, c, d]));
        }
    }
}

fn odd_base(rng: &mut ChaCha8Rng, ctx: PadicContext) -> Mat2 {
    let p = ctx.prime();
    let m = ctx.modulus();
    let w = teichmuller(ctx, random_unit(rng, p));
    let winv = invmod(w, m).unwrap();
    match rng.gen_range(0..3) {
        0 => Mat2::diag(ctx, w, winv),
        1 => nonsplit_element(rng, ctx),
        _ => Mat2::diag(ctx, w, winv).mul(&Mat2::upper(ctx, rng.gen_range(0..m))),
    }
}

/// Random generators for `theorem` over `ctx`.
pub fn sample_generators(rng: &mut ChaCha8Rng, theorem: Theorem, ctx: PadicContext) -> Vec<Mat2> {
    let p = ctx.prime();
    let n = ctx.precision();
    let count = rng.gen_range(1..=3);
    let mut gens = Vec::with_capacity(count + 1);
    if p == 2 {
        for _ in 0..count {
            let j = rng.gen_range(2..=n.max(2));
            gens.push(perturbation(rng, ctx, j));
        }
        if theorem != Theorem::Sl2Z2 && rng.gen_bool(0.25) {
            gens.push(Mat2::diag(ctx, (1 + 8 * rng.gen_range(0..ctx.modulus() / 8)) % ctx.modulus(), 1));
        }
        return gens;
    }
    let base = odd_base(rng, ctx);
    for i in 0..count {
        let j = rng.gen_range(1..=n.min(3));
        let x = perturbation(rng, ctx, j);
        gens.push(if i == 0 { base.mul(&x) } else { x });
    }
    if theorem != Theorem::Star && rng.gen_bool(0.25) {
        let w = teichmuller(ctx, random_unit(rng, p));
        gens.push(Mat2::scalar(ctx, w));
    }
    gens
}

/// Cheap conditions read off the reduction of the generators.
pub fn prefilter(theorem: Theorem, ctx: PadicContext, gens: &[Mat2]) -> Result<bool> {
    if ctx.prime() == 2 {
        return Ok(true);
    }
    let c1 = ctx.at_precision(1)?;
    let red: Vec<Mat2> = gens.iter().map(|g| g.reduce_to(c1)).collect();
    let j = close(c1, &red, usize::MAX)?;
    Ok(match theorem {
        Theorem::Star => star_applicability(&j)?.is_ok(),
        Theorem::StarStar | Theorem::Trichotomy => starstar_applicability(&j)?.is_ok(),
        _ => true,
    })
}

fn check(cfg: &CampaignConfig, g: &GroupClosure) -> Result<VerificationReport> {
    match cfg.theorem {
        Theorem::Star => check_star(g, cfg.parameter),
        Theorem::StarStar => check_starstar_with_cap(g, cfg.parameter, cfg.cap),
        Theorem::Sl2Z2 => check_sl2z2(g, cfg.parameter),
        Theorem::Gl2Z2 => check_gl2z2_with_cap(g, cfg.parameter, cfg.cap),
        Theorem::Trichotomy => {
            trichotomy_with_cap(g, cfg.parameter, TrichotomyMode::Proposition, cfg.cap)
        }
    }
}

/// Runs `cfg.trials` trials that pass the pre-filter. Gives up after
/// 50·trials samples.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    let ctx = PadicContext::new(cfg.prime, cfg.precision)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut summary = CampaignSummary::default();
    let mut reports = Vec::new();
    let max_attempts = 50 * cfg.trials.max(1);
    let mut attempts = 0;
    while summary.trials < cfg.trials {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::CaseNotCovered(format!(
                "only {} of {} trials passed the filter",
                summary.trials, cfg.trials
            )));
        }
        let gens = sample_generators(&mut rng, cfg.theorem, ctx);
        if !prefilter(cfg.theorem, ctx, &gens)? {
            continue;
        }
        let report = close(ctx, &gens, cfg.cap).and_then(|g| check(cfg, &g));
        match report {
            Ok(r) => {
                summary.trials += 1;
                summary.record(&r.outcome);
                reports.push(r);
            }
            Err(Error::CapExceeded(_)) => {
                if !cfg.resample_capped {
                    summary.trials += 1;
                    summary.capped += 1;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CampaignResult { summary, reports })
}
