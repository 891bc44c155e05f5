use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use openimage::bounds::{
    adelic_index_bound, parse_decimal, torsion_degree_bound, AdelicVariant, DEFAULT_BUDGET,
};
use openimage::campaign::CampaignResult;
use openimage::fixtures::{optimal_group, optimal_lie, pink_borel, s3_lift};
use openimage::io::{parse_group, parse_key_dump, render_group, GroupDescription};
use openimage::theorems::{check_gl2z2_with_cap, check_starstar_with_cap, trichotomy_lie, trichotomy_with_cap};
use openimage::{
    check_sl2z2, check_star, classify_mod_ell, run_campaign, special_lie_algebra, CampaignConfig,
    CurveParams, Error, GroupClosure, LieModule, Outcome, PadicContext, Theorem, TrichotomyMode,
    VerificationReport, DEFAULT_CAP,
};

mod selftest;

#[derive(Parser)]
#[command(name = "openimage", version, about = "Explicit open-image computations for GL2 over the l-adic integers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Maximum number of elements in a group closure.
    #[arg(long, env = "OPENIMAGE_CAP", default_value_t = DEFAULT_CAP, global = true)]
    cap: usize,
    /// Significant decimal digits kept by bound evaluation.
    #[arg(long, env = "OPENIMAGE_BUDGET", default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the adelic index bound and, optionally, the torsion degree bound.
    Bound {
        #[arg(long)]
        degree: u64,
        #[arg(long, default_value = "1")]
        height: String,
        #[arg(long, default_value = "composed", value_parser = ["composed", "gamma12", "gamma34"])]
        variant: String,
        /// Order of a torsion point.
        #[arg(long)]
        torsion: Option<u64>,
    },
    /// Dickson class of the reduction mod l of a group file.
    Classify { file: PathBuf },
    /// Reduced basis and invariants of the special Lie algebra of a group file.
    Lie { file: PathBuf },
    /// Check a theorem on a group file, a fixture, or a seeded random campaign.
    Verify(VerifyArgs),
    /// Print a fixture as a group file.
    Fixture {
        #[arg(value_parser = ["s3-lift", "pink-borel", "optimal-lie"])]
        name: String,
        #[command(flatten)]
        params: FixtureParams,
        /// Print the sorted key dump instead of the group file.
        #[arg(long)]
        dump: bool,
    },
    /// Run the embedded golden suite.
    Selftest,
    /// Read a sorted key dump and print its order.
    Keys {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        precision: u32,
    },
}

#[derive(Args, Clone)]
struct FixtureParams {
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    /// Level of the congruence part of s3-lift.
    #[arg(long, default_value_t = 1)]
    t: u32,
    #[arg(long)]
    s: Option<u32>,
    /// Order of the root of unity in pink-borel.
    #[arg(long, default_value_t = 4)]
    order: u64,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = ["star", "starstar", "sl2z2", "gl2z2", "trichotomy"])]
    theorem: String,
    /// Group file to check.
    #[arg(long, conflicts_with = "fixture")]
    file: Option<PathBuf>,
    #[arg(long, value_parser = ["s3-lift", "pink-borel", "optimal-lie"])]
    fixture: Option<String>,
    #[command(flatten)]
    params: FixtureParams,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Count trials that hit the cap instead of resampling them.
    #[arg(long)]
    count_capped: bool,
    /// Use the corollary form of the trichotomy.
    #[arg(long)]
    corollary: bool,
}

struct Out {
    format: Format,
    lines: Vec<String>,
}

impl Out {
    fn kv(&mut self, key: &str, value: impl Display) {
        self.lines.push(match self.format {
            Format::Text => format!("{key:<18} {value}"),
            Format::Structured => format!("{key}={value}"),
        });
    }

    fn raw(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn timing(&mut self, start: Instant) {
        if self.format == Format::Text {
            self.kv("elapsed", format!("{:.3}s", start.elapsed().as_secs_f64()));
        }
    }

    fn flush(&self) {
        for l in &self.lines {
            println!("{l}");
        }
    }
}

enum Failure {
    Violated,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Run = std::result::Result<(), Failure>;

fn read_group(path: &PathBuf) -> Result<GroupDescription, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_group(&text)
}

fn cmd_bound(out: &mut Out, budget: u32, degree: u64, height: &str, variant: &str, torsion: Option<u64>) -> Run {
    let p = CurveParams::new(degree, parse_decimal(height)?)?;
    let v = AdelicVariant::from_tag(variant).expect("checked by clap");
    let b = adelic_index_bound(&p, v, budget)?;
    out.kv("variant", variant);
    out.kv("degree", degree);
    out.kv("height", height);
    out.kv("budget", budget);
    out.kv("log10_index", b.display_log10());
    if let Some(order) = torsion {
        let t = torsion_degree_bound(&b, order)?;
        out.kv("torsion_order", order);
        let l = openimage::LogMagnitude::from_log10(t.log10_lower(), budget);
        out.kv("log10_degree_lower", openimage::bounds::format_sig(l.log10(), budget, false));
    }
    Ok(())
}

fn cmd_classify(out: &mut Out, cap: usize, file: &PathBuf) -> Run {
    let d = read_group(file)?.at_precision(1)?;
    let j = d.close(cap)?;
    let class = classify_mod_ell(&j)?;
    out.kv("prime", d.context.prime());
    out.kv("order", j.order());
    out.kv("class", class.tag());
    out.kv("witness", class.witness());
    Ok(())
}

fn lie_report(out: &mut Out, l: &LieModule) -> Run {
    let b = l.reduced_basis();
    for (i, x) in b.basis().iter().enumerate() {
        out.kv(&format!("x{}", i + 1), x);
    }
    out.kv("rank", l.rank());
    out.kv("k", l.k_of().map_or("none".to_string(), |k| k.to_string()));
    for n in 1..=l.context().precision() {
        out.kv(&format!("j_{n}"), l.j_n(n)?);
    }
    out.kv("min_scale", l.min_scale().map_or("none".to_string(), |s| s.to_string()));
    out.kv("trace_ideal", l.trace_ideal().map_or("none".to_string(), |s| s.to_string()));
    out.kv("lie_closed", l.is_lie_closed());
    Ok(())
}

fn cmd_lie(out: &mut Out, cap: usize, file: &PathBuf) -> Run {
    let d = read_group(file)?;
    let l = match d.lie {
        Some(basis) => LieModule::span(d.context, &basis)?,
        None => special_lie_algebra(&d.close(cap)?)?,
    };
    out.kv("prime", d.context.prime());
    out.kv("precision", d.context.precision());
    lie_report(out, &l)
}

fn fixture_group(name: &str, f: &FixtureParams) -> Result<(GroupClosure, Option<LieModule>), Error> {
    match name {
        "s3-lift" => {
            let p = f.prime.unwrap_or(5);
            Ok((s3_lift(p, f.t, f.precision.unwrap_or(2))?, None))
        }
        "pink-borel" => {
            let p = f.prime.unwrap_or(5);
            let s = f.s.unwrap_or(1);
            let pb = pink_borel(p, s, f.order, f.precision.unwrap_or(2 * s + 2))?;
            Ok((pb.group, Some(pb.module)))
        }
        _ => {
            let p = f.prime.unwrap_or(3);
            let n = f.n.unwrap_or(1);
            let prec = f.precision.unwrap_or(n + 2 * f.k + 2);
            let l = optimal_lie(p, f.k, n, prec)?;
            Ok((optimal_group(p, f.k, n, prec)?, Some(l)))
        }
    }
}

fn cmd_fixture(out: &mut Out, name: &str, f: &FixtureParams, dump: bool) -> Run {
    let (g, l) = fixture_group(name, f)?;
    if dump {
        out.raw(g.dump_keys().trim_end());
    } else {
        let text = render_group(g.context(), g.generators(), l.as_ref().map(|l| l.reduced_basis()));
        out.raw(text.trim_end());
    }
    Ok(())
}

fn check_one(
    theorem: Theorem,
    g: &GroupClosure,
    param: u32,
    mode: TrichotomyMode,
    cap: usize,
) -> Result<VerificationReport, Error> {
    match theorem {
        Theorem::Star => check_star(g, param),
        Theorem::StarStar => check_starstar_with_cap(g, param, cap),
        Theorem::Sl2Z2 => check_sl2z2(g, param),
        Theorem::Gl2Z2 => check_gl2z2_with_cap(g, param, cap),
        Theorem::Trichotomy => trichotomy_with_cap(g, param, mode, cap),
    }
}

fn print_report(out: &mut Out, r: &VerificationReport) -> bool {
    out.raw(r.to_line());
    if let Outcome::Violated { .. } = r.outcome {
        let ctx = PadicContext::new(r.prime, r.precision).expect("valid report");
        out.raw("# counterexample generators");
        for l in render_group(ctx, &r.generators, None).lines() {
            out.raw(format!("# {l}"));
        }
        return true;
    }
    false
}

fn default_param(theorem: Theorem) -> u32 {
    match theorem {
        Theorem::Sl2Z2 => 2,
        _ => 1,
    }
}

fn cmd_verify(out: &mut Out, cap: usize, a: &VerifyArgs) -> Run {
    let theorem = Theorem::from_tag(&a.theorem).expect("checked by clap");
    let mode = if a.corollary { TrichotomyMode::Corollary } else { TrichotomyMode::Proposition };
    let param = match theorem {
        Theorem::Gl2Z2 | Theorem::Trichotomy => a.params.n.or(a.params.s),
        _ => a.params.s.or(a.params.n),
    }
    .unwrap_or(default_param(theorem));
    let mut violated = false;
    if let Some(name) = &a.fixture {
        let (g, l) = fixture_group(name, &a.params)?;
        out.kv("fixture", name);
        if let (Theorem::Trichotomy, Some(l), "optimal-lie") = (theorem, &l, name.as_str()) {
            let t = trichotomy_lie(l, param)?;
            out.kv("k", t.k.map_or("none".into(), |k| k.to_string()));
            out.kv("j_n", t.j_n);
            out.kv("predicted_scale", t.predicted_scale.map_or("none".into(), |s| s.to_string()));
            out.kv("min_scale", t.min_scale.map_or("none".into(), |s| s.to_string()));
            out.kv("holds", t.holds());
            out.kv("tight", t.tight());
            violated |= !t.holds();
        }
        violated |= print_report(out, &check_one(theorem, &g, param, mode, cap)?);
    } else if let Some(file) = &a.file {
        let g = read_group(file)?.close(cap)?;
        violated |= print_report(out, &check_one(theorem, &g, param, mode, cap)?);
    } else {
        let prime = a.params.prime.ok_or_else(|| Error::InvalidParams("--prime is required".into()))?;
        let precision =
            a.params.precision.ok_or_else(|| Error::InvalidParams("--precision is required".into()))?;
        let cfg = CampaignConfig {
            theorem,
            prime,
            precision,
            parameter: param,
            trials: a.trials,
            seed: a.seed,
            cap,
            resample_capped: !a.count_capped,
        };
        let CampaignResult { summary, reports } = run_campaign(&cfg)?;
        for r in &reports {
            if out.format == Format::Structured || r.outcome.is_violated() {
                violated |= print_report(out, r);
            }
        }
        out.raw(match out.format {
            Format::Text => format!("summary            {summary} capped={}", summary.capped),
            Format::Structured => format!("summary {summary} capped={}", summary.capped),
        });
    }
    if violated {
        Err(Failure::Violated)
    } else {
        Ok(())
    }
}

fn cmd_keys(out: &mut Out, file: &PathBuf, prime: u64, precision: u32) -> Run {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Parse(format!("{}: {e}", file.display())))?;
    let g = parse_key_dump(PadicContext::new(prime, precision)?, &text)?;
    out.kv("order", g.order());
    out.kv("sl2", g.is_sl2_subset());
    out.kv("class", classify_mod_ell(&g.reduce(1)?)?.tag());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out { format: cli.format, lines: Vec::new() };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Bound { degree, height, variant, torsion } => {
            cmd_bound(&mut out, cli.budget, *degree, height, variant, *torsion)
        }
        Command::Classify { file } => cmd_classify(&mut out, cli.cap, file),
        Command::Lie { file } => cmd_lie(&mut out, cli.cap, file),
        Command::Verify(a) => cmd_verify(&mut out, cli.cap, a),
        Command::Fixture { name, params, dump } => cmd_fixture(&mut out, name, params, *dump),
        Command::Selftest => selftest::run(&mut out),
        Command::Keys { file, prime, precision } => cmd_keys(&mut out, file, *prime, *precision),
    };
    if result.is_ok() && !matches!(cli.command, Command::Fixture { .. }) {
        out.timing(start);
    }
    out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violated) => ExitCode::from(1),
        Err(Failure::Error(e @ Error::CapExceeded(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
