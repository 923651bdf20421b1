mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use pairladder::eigenstates::{classify_normalizable, enumerate_degenerate, psi_p_theta, residual, EigenstateSpec};
use pairladder::hypergeom::gram_witness;
use pairladder::lattice::{alpha_sum, half_lattice, mode_params, ytilde, ModelParams, Momentum};
use pairladder::pair_transform::{apply_exp_pair, domain_check, to_rescaled, DomainVerdict};
use pairladder::verify::{self, Suite};
use pairladder::wu_sector::{
    build_transformed_wu, exp_w_roundtrip_error, wu_eigenstate, wu_residual, wu_ytilde, WuSector,
};
use pairladder::C64;

use output::{Doc, Format};

#[derive(Parser, Debug)]
#[command(name = "pairladder", version, about = "Pair-excitation ladders of the weakly interacting Bose gas")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Also write the report to this file, byte for byte.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// Scattering length.
    #[arg(long, default_value_t = 1.0 / (16.0 * PI))]
    a: f64,
    /// Density.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Box side.
    #[arg(long = "L", default_value_t = 2.0 * PI)]
    l: f64,
}

impl ModelArgs {
    fn model(&self) -> pairladder::Result<ModelParams> {
        ModelParams::new(self.a, self.rho, self.l)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-mode constants over the half lattice.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        nmax: i32,
    },
    /// Coefficients of an ab-ladder eigenstate, optionally pair-transformed.
    #[command(allow_negative_numbers = true)]
    Eigenstate {
        #[arg(long, conflicts_with = "k_mode", required_unless_present = "k_mode")]
        y: Option<f64>,
        /// Lattice mode `n1,n2,n3`; y follows from the model.
        #[arg(long, value_parser = parse_triple)]
        k_mode: Option<[i32; 3]>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        p: usize,
        /// `re` or `re,im`.
        #[arg(long, value_parser = parse_complex, default_value = "0")]
        theta: C64,
        #[arg(long, default_value_t = 40)]
        smax: usize,
        /// Apply `exp(-alpha a*b*)`.
        #[arg(long)]
        transform: Option<f64>,
    },
    /// Run invariant suites; exit 2 on any failure.
    Verify {
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Singular values of the transported-eigenstate Gram matrix.
    #[command(allow_negative_numbers = true)]
    Gram {
        #[arg(long, default_value_t = 0.45)]
        y: f64,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Defaults to `max(20 nmax, 80)`.
        #[arg(long)]
        smax: Option<usize>,
    },
    /// Spectrum and eigenstate residuals of one fixed-N three-mode sector.
    #[command(allow_negative_numbers = true)]
    Wu {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_triple, default_value = "0,0,1")]
        kn: [i32; 3],
        #[arg(long = "N")]
        n_total: usize,
        #[arg(long, default_value_t = 0)]
        p: usize,
    },
    /// All (p, N, mirror) sharing the energy p/2 + N.
    Degenerate {
        /// Twice the energy.
        #[arg(long)]
        twice_energy: usize,
        #[arg(long)]
        max_p: Option<usize>,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let f = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(f(re)?, 0.0)),
        [re, im] => Ok(C64::new(f(re)?, f(im)?)),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

fn parse_triple(s: &str) -> Result<[i32; 3], String> {
    let v: Vec<i32> = s
        .split(',')
        .map(|t| t.trim().parse::<i32>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected n1,n2,n3, got {s:?}"))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Ok(match s {
        "lattice" => Suite::Lattice,
        "eigen" => Suite::Eigen,
        "genfunc" => Suite::Genfunc,
        "hypergeom" => Suite::Hypergeom,
        "wu" => Suite::Wu,
        "all" => Suite::All,
        _ => return Err(format!("unknown suite {s:?}")),
    })
}

/// Rendered report and whether a verification or domain check failed.
struct Outcome {
    doc: Doc,
    failed: bool,
}

fn spectrum(model: ModelArgs, nmax: i32) -> anyhow::Result<Outcome> {
    let mp = model.model()?;
    let mut doc = Doc::default();
    doc.record(
        "model",
        vec![("a", mp.a.into()), ("rho", mp.rho.into()), ("L", mp.l.into()), ("N", mp.n_particles.into()), ("nmax", nmax.into())],
    );
    let mut rows = Vec::new();
    for k in half_lattice(mp.l, nmax)? {
        let m = mode_params(&mp, &k)?;
        rows.push(vec![
            k.n[0].into(),
            k.n[1].into(),
            k.n[2].into(),
            k.norm().into(),
            m.ksq.into(),
            m.y.into(),
            m.ytilde.into(),
            m.alpha.into(),
            m.epsilon.into(),
        ]);
    }
    doc.table("modes", &["n1", "n2", "n3", "k", "k2", "y", "ytilde", "alpha", "epsilon"], rows);
    let s = alpha_sum(&mp, nmax)?;
    doc.record(
        "constants",
        vec![
            ("mean_field_energy", mp.mean_field_energy().into()),
            ("alpha_sum", s.value.into()),
            ("alpha_sum_modes", s.modes.into()),
            ("alpha_sum_divergent", s.divergent.into()),
        ],
    );
    Ok(Outcome { doc, failed: false })
}

#[allow(clippy::too_many_arguments)]
fn eigenstate(
    y: Option<f64>,
    k_mode: Option<[i32; 3]>,
    model: ModelArgs,
    p: usize,
    theta: C64,
    smax: usize,
    transform: Option<f64>,
) -> anyhow::Result<Outcome> {
    let y = match (y, k_mode) {
        (Some(y), _) => y,
        (None, Some(n)) => {
            let mp = model.model()?;
            mode_params(&mp, &Momentum::new(n, mp.l))?.y
        }
        (None, None) => bail!("one of --y or --k-mode is required"),
    };
    let yt = ytilde(y)?;
    let class = classify_normalizable(yt, theta, p)?;
    let psi = psi_p_theta(&EigenstateSpec::new(p, theta, yt, smax), false)?;
    let energy = C64::new(p as f64 / 2.0, 0.0) + theta;

    let mut doc = Doc::default();
    doc.record(
        "state",
        vec![
            ("p", p.into()),
            ("theta_re", theta.re.into()),
            ("theta_im", theta.im.into()),
            ("y", y.into()),
            ("ytilde", yt.into()),
            ("classification", format!("{class:?}").into()),
            ("energy_re", energy.re.into()),
            ("energy_im", energy.im.into()),
            ("smax", smax.into()),
            ("terms", psi.len().into()),
        ],
    );
    doc.table("coefficients", &["s", "re", "im"], coeff_rows(psi.coeffs()));

    let mut failed = false;
    if let Some(alpha) = transform {
        if !(alpha.is_finite() && alpha >= 0.0) {
            bail!("--transform must be a finite alpha >= 0, got {alpha}");
        }
        let (verdict, growth) = if theta.im == 0.0 {
            let horizon = smax.max(100);
            let long = psi_p_theta(&EigenstateSpec::new(p, theta, yt, horizon), false)?;
            let big = to_rescaled(&long.resized(horizon + 1));
            let r = domain_check(|s| big[s].re, alpha, p, horizon)?;
            (format!("{:?}", r.verdict), r.log_growth)
        } else {
            ("Unchecked".to_string(), f64::NAN)
        };
        failed = verdict == format!("{:?}", DomainVerdict::NotInDomain);
        let st = apply_exp_pair(&psi, -alpha, smax);
        let e = energy * (1.0 - 2.0 * alpha * y) - alpha * y;
        let res = residual(&st, y, y, e) / st.norm();
        doc.record(
            "transform",
            vec![
                ("alpha", alpha.into()),
                ("energy_re", e.re.into()),
                ("energy_im", e.im.into()),
                ("hab_residual_rel", res.into()),
                ("domain", verdict.into()),
                ("log_growth", growth.into()),
            ],
        );
        doc.table("transformed", &["s", "re", "im"], coeff_rows(st.coeffs()));
    }
    Ok(Outcome { doc, failed })
}

fn coeff_rows(c: &[C64]) -> Vec<Vec<output::Cell>> {
    c.iter().enumerate().map(|(s, z)| vec![s.into(), z.re.into(), z.im.into()]).collect()
}

fn run_verify(suite: Suite, seed: u64, fault: bool) -> anyhow::Result<Outcome> {
    let r = verify::run(suite, seed, fault)?;
    let mut doc = Doc::default();
    let passed = r.checks.iter().filter(|c| c.pass).count();
    doc.record(
        "summary",
        vec![
            ("suite", suite.name().into()),
            ("seed", seed.into()),
            ("passed", passed.into()),
            ("total", r.checks.len().into()),
            ("all_pass", r.all_pass().into()),
        ],
    );
    let rows = r
        .checks
        .iter()
        .map(|c| vec![c.suite.into(), c.name.clone().into(), c.measured.into(), c.tolerance.into(), c.pass.into()])
        .collect();
    doc.table("checks", &["suite", "name", "measured", "tolerance", "pass"], rows);
    Ok(Outcome { doc, failed: !r.all_pass() })
}

fn gram(y: f64, p: usize, nmax: usize, smax: Option<usize>) -> anyhow::Result<Outcome> {
    let smax = smax.unwrap_or((20 * nmax).max(80));
    let w = gram_witness(p, y, nmax, smax)?;
    let mut doc = Doc::default();
    doc.record(
        "gram",
        vec![
            ("p", p.into()),
            ("y", y.into()),
            ("nmax", nmax.into()),
            ("smax", smax.into()),
            ("relative_floor", w.relative_floor().into()),
            ("rank", w.rank().into()),
        ],
    );
    doc.table(
        "singular_values",
        &["index", "sigma"],
        w.singular_values.iter().enumerate().map(|(i, s)| vec![i.into(), (*s).into()]).collect(),
    );
    doc.table(
        "norms",
        &["N", "norm_sq"],
        w.norms_sq.iter().enumerate().map(|(i, s)| vec![i.into(), (*s).into()]).collect(),
    );
    Ok(Outcome { doc, failed: w.rank() < nmax + 1 })
}

fn wu(model: ModelArgs, kn: [i32; 3], n_total: usize, p: usize) -> anyhow::Result<Outcome> {
    let mp = model.model()?;
    let k = Momentum::new(kn, mp.l);
    let sector = WuSector::new(n_total, p, k)?;
    let mode = mode_params(&mp, &k)?;
    let coupling = wu_ytilde(&mode, &mp);
    let m = build_transformed_wu(&sector, &mp)?;
    let round = exp_w_roundtrip_error(&sector, mode.alpha)?;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (s, e) in m.eigenvalues().iter().enumerate() {
        let v = wu_eigenstate(&sector, &mp, s)?;
        let r = wu_residual(&m, &v, *e);
        worst = worst.max(r);
        let [nk, nmk, n0] = sector.occupations(s);
        rows.push(vec![s.into(), nk.into(), nmk.into(), n0.into(), (2 * s + p).into(), (*e).into(), r.into()]);
    }
    let mut doc = Doc::default();
    doc.record(
        "sector",
        vec![
            ("N", n_total.into()),
            ("p", p.into()),
            ("n1", kn[0].into()),
            ("n2", kn[1].into()),
            ("n3", kn[2].into()),
            ("dim", sector.dim().into()),
            ("epsilon", m.epsilon.into()),
            ("alpha", mode.alpha.into()),
            ("ytilde", coupling.value.into()),
            ("free", coupling.free.into()),
            ("exp_w_roundtrip", round.into()),
        ],
    );
    doc.table("levels", &["s", "n_k", "n_minus_k", "n_0", "n", "energy", "residual"], rows);
    Ok(Outcome { doc, failed: worst > 1e-10 || round > 1e-13 })
}

fn degenerate(twice_energy: usize, max_p: Option<usize>) -> Outcome {
    let rows = enumerate_degenerate(twice_energy, max_p)
        .iter()
        .map(|d| vec![d.p.into(), d.n.into(), d.mirror.into()])
        .collect();
    let mut doc = Doc::default();
    doc.record("energy", vec![("twice_energy", twice_energy.into()), ("energy", (twice_energy as f64 / 2.0).into())]);
    doc.table("states", &["p", "N", "mirror"], rows);
    Outcome { doc, failed: false }
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Spectrum { model, nmax } => spectrum(model, nmax),
        Command::Eigenstate { y, k_mode, model, p, theta, smax, transform } => {
            eigenstate(y, k_mode, model, p, theta, smax, transform)
        }
        Command::Verify { suite, seed, inject_fault } => run_verify(suite, seed, inject_fault),
        Command::Gram { y, p, nmax, smax } => gram(y, p, nmax, smax),
        Command::Wu { model, kn, n_total, p } => wu(model, kn, n_total, p),
        Command::Degenerate { twice_energy, max_p } => Ok(degenerate(twice_energy, max_p)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let text = outcome.doc.render(cli.format);
    print!("{text}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())) {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    if outcome.failed {
        eprintln!("verification failed");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
