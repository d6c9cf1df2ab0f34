//! Command-line surface: argument parsing and dispatch to the checks.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use oae_core::flows::{self, CommutationReport, FlowBundle};
use oae_core::spectral::{self, Seeds};
use oae_core::symmetry::{self, SymmetryGenerator};
use oae_core::transforms::{self, BacklundImage};
use oae_core::{
    connection_from_displacement, gradient_reduce, residual_oae, residual_structure, DisplacementField,
    Error as CoreError, Polynomial, Prepotential, ResidualTensor,
};
use serde_json::Value;

use crate::bundled;
use crate::format::{parse_seeds, write_solution, Kind, Solution};
use crate::load::{load_solution, read_solution, LoadError, SolutionBundle};
use crate::report::{Input, Record, Report, Verdict};
use crate::sampling::Sampler;

const OAE: &str = "K^ν_{,αρ}K^ρ_{,βγ} = K^ρ_{,αβ}K^ν_{,ργ}";
const WDVV: &str = "F_{,αβδ}η^{δγ}F_{,γνρ} = F_{,ανδ}η^{δγ}F_{,γβρ}";
const GRADIENT: &str = "K^α = η^{αβ}∂F/∂x^β";
const STRUCTURE_SYM: &str = "c^α_{βγ} = K^α_{,βγ} symmetric, ∂_ρc^α_{βγ} symmetric in (β,ρ)";
const STRUCTURE_ASSOC: &str = "c^ν_{αρ}c^ρ_{βγ} = c^ν_{ργ}c^ρ_{αβ}";
const W_TOWER: &str = "∂(w_{k+1})^α_γ/∂x^β = K^α_{,βρ}(w_k)^ρ_γ";
const V_TOWER: &str = "∂²v_{k+1}^α/∂x^β∂x^γ = K^ν_{,βγ}∂v_k^α/∂x^ν";
const VECTOR: &str = "∂ψ^α/∂x^β = λK^α_{,βγ}ψ^γ";
const SCALAR: &str = "χ_{,αγ} = λK^ν_{,αγ}χ_{,ν}";
const COVECTOR: &str = "∂φ_α/∂x^β = λK^δ_{,αβ}φ_δ";
const COHERENCE: &str = "ψ^α = η^{αβ}∂χ/∂x^β for h = ηd";
const LINEARIZED: &str = "G^ν_{,αρ}K^ρ_{,βγ} + K^ν_{,αρ}G^ρ_{,βγ} = G^ρ_{,αβ}K^ν_{,ργ} + K^ρ_{,αβ}G^ν_{,ργ}";
const WDVV_LINEARIZED: &str = "linearized WDVV at F in direction g";
const DARBOUX_SYM: &str = "c̃^α_{βγ} = c̃^α_{γβ} under x̃ = ψ(λ)";
const DARBOUX_ASSOC: &str = "c̃^α_{βγ}c̃^γ_{ρν} = c̃^α_{νγ}c̃^γ_{ρβ} under x̃ = ψ(λ)";
const BACKLUND: &str = "∂²H^β/∂x^α∂x^γ = K^β_{,αρ}K^ρ_{,γ}";
const WDVV_BACKLUND: &str = "∂²H^β/∂x^α∂x^γ = η^{βν}η^{ρκ}F_{,αρν}F_{,γκ}";

#[derive(Debug, Parser)]
#[command(
    name = "oae",
    version,
    about = "Exact checks for the oriented associativity equations"
)]
struct Cli {
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Seed for sampled points and spectral seeds.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Record per-check wall time (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairSet {
    Tau,
    Sigma,
    W,
    Wdvv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the input solves its equations.
    Verify { input: String },
    /// Build the potential towers and check the spectral problems.
    Hierarchy {
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Seed file (`h|b|d <level> <values>`); default: three random sets.
        #[arg(long)]
        seeds: Option<PathBuf>,
        input: String,
    },
    /// Check the nonlocal symmetries against the linearized equations.
    Symmetries {
        #[arg(long, default_value_t = 4)]
        order: usize,
        input: String,
    },
    /// Check commutativity of the extended flows.
    Commute {
        /// Total degree kept in the flow parameters.
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, value_delimiter = ',')]
        pairs: Vec<PairSet>,
        input: String,
    },
    /// Check the Darboux change of variables at sampled points.
    Darboux {
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 10)]
        points: usize,
        input: String,
    },
    /// Apply the Bäcklund-type maps.
    Backlund { input: String },
    /// Emit the gradient-reduced oriented solution of a WDVV input.
    Reduce {
        #[arg(long)]
        output: Option<PathBuf>,
        input: String,
    },
    /// List the bundled solutions.
    List,
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    /// 0 all checks pass, 1 some check fails, 2 usage or input error.
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: message,
            report: None,
        }
    }
}

struct Ctx {
    report: Report,
    timing: bool,
    lap: Instant,
    sampler: Sampler,
}

impl Ctx {
    fn push(&mut self, mut record: Record) {
        if self.timing {
            record.elapsed_ms = Some(self.lap.elapsed().as_millis() as u64);
        }
        self.lap = Instant::now();
        self.report.push(record);
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                    report: None,
                },
                _ => Outcome::usage(text),
            };
        }
    };
    let name = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Hierarchy { .. } => "hierarchy",
        Command::Symmetries { .. } => "symmetries",
        Command::Commute { .. } => "commute",
        Command::Darboux { .. } => "darboux",
        Command::Backlund { .. } => "backlund",
        Command::Reduce { .. } => "reduce",
        Command::List => "list",
    };
    let mut ctx = Ctx {
        report: Report::new(name),
        timing: cli.timing,
        lap: Instant::now(),
        sampler: Sampler::new(cli.seed),
    };
    ctx.report.option("seed", cli.seed);
    let mut stdout = String::new();
    let result = match cli.command {
        Command::List => {
            for b in bundled::BUNDLED {
                stdout.push_str(&format!("{:<16} {}\n", b.id, b.summary));
            }
            return Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
                report: None,
            };
        }
        Command::Verify { input } => read_solution(&input).map(|b| verify(&mut ctx, b)),
        Command::Hierarchy { order, seeds, input } => {
            ctx.report.option("order", order);
            with_trusted(&mut ctx, &input, |ctx, b| {
                let seeds = match &seeds {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                        let s = parse_seeds(&text, b.dim(), order).map_err(|e| format!("{}: {e}", path.display()))?;
                        ctx.report.option("seeds", path.display().to_string());
                        vec![s]
                    }
                    None => (0..3).map(|_| ctx.sampler.seeds(b.dim(), order)).collect(),
                };
                hierarchy(ctx, b, order, &seeds);
                Ok(())
            })
        }
        Command::Symmetries { order, input } => {
            ctx.report.option("order", order);
            with_trusted(&mut ctx, &input, |ctx, b| {
                symmetries(ctx, b, order);
                Ok(())
            })
        }
        Command::Commute { order, pairs, input } => {
            ctx.report.option("order", order);
            with_trusted(&mut ctx, &input, |ctx, b| {
                let mut pairs = if pairs.is_empty() {
                    vec![PairSet::Tau, PairSet::Sigma, PairSet::W, PairSet::Wdvv]
                } else {
                    pairs
                };
                pairs.sort_by_key(|p| *p as u8);
                pairs.dedup();
                let names: Vec<Value> = pairs
                    .iter()
                    .map(|p| p.to_possible_value().map(|v| v.get_name().to_string()).into())
                    .collect();
                ctx.report.option("pairs", names);
                commute(ctx, b, order, &pairs);
                Ok(())
            })
        }
        Command::Darboux { order, points, input } => {
            ctx.report.option("order", order);
            ctx.report.option("points", points);
            with_trusted(&mut ctx, &input, |ctx, b| {
                darboux(ctx, b, order, points);
                Ok(())
            })
        }
        Command::Backlund { input } => with_trusted(&mut ctx, &input, |ctx, b| {
            backlund(ctx, b);
            Ok(())
        }),
        Command::Reduce { output, input } => with_trusted(&mut ctx, &input, |ctx, b| {
            let Solution::Wdvv(f) = &b.solution else {
                return Err(format!("{input}: reduce needs a `kind wdvv` input"));
            };
            let k = gradient_reduce(f);
            let text = write_solution(&Solution::Oae(k.clone()));
            ctx.push(Record::zero("reduce/residual", OAE, witness(&residual_oae(&k))));
            match &output {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?
                }
                None => stdout.push_str(&text),
            }
            Ok(())
        }),
    };
    let report = match result {
        Ok(Ok(())) => ctx.report,
        Ok(Err(message)) => return Outcome::usage(message + "\n"),
        Err(e) => return Outcome::usage(format!("{e}\n")),
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return Outcome::usage(format!("cannot write {}: {e}\n", path.display()));
        }
    }
    // reduce prints the solution itself, so its summary goes to stderr
    let summary = report.to_text();
    let (stdout, stderr) = if name == "reduce" && stdout.is_empty() {
        (summary, String::new())
    } else if name == "reduce" {
        (stdout, summary)
    } else {
        (summary, String::new())
    };
    Outcome {
        code: if report.passed() { 0 } else { 1 },
        stdout,
        stderr,
        report: Some(report),
    }
}

fn input_of(b: &SolutionBundle) -> Input {
    Input {
        id: b.id.clone(),
        sha256: b.digest.clone(),
        kind: b.kind().name().to_string(),
        dim: b.dim(),
    }
}

/// Loads `input`; a nonzero residual becomes a failing record instead of a
/// usage error.
fn with_trusted(
    ctx: &mut Ctx,
    input: &str,
    body: impl FnOnce(&mut Ctx, &mut SolutionBundle) -> Result<(), String>,
) -> Result<Result<(), String>, LoadError> {
    match load_solution(input) {
        Ok(mut b) => {
            ctx.report.input = Some(input_of(&b));
            Ok(body(ctx, &mut b))
        }
        Err(LoadError::Rejected { index, value, .. }) => {
            let b = read_solution(input)?;
            ctx.report.input = Some(input_of(&b));
            let anchor = if b.kind() == Kind::Oae { OAE } else { WDVV };
            ctx.push(Record::zero(
                "input/residual",
                anchor,
                Some(format_witness(&index, &value)),
            ));
            Ok(Ok(()))
        }
        Err(e) => Err(e),
    }
}

fn format_witness(index: &[usize], value: &Polynomial) -> String {
    let idx: Vec<String> = index.iter().map(|i| (i + 1).to_string()).collect();
    format!("({}) = {}", idx.join(","), value)
}

fn witness(r: &ResidualTensor) -> Option<String> {
    r.witness()
        .map(|i| format_witness(i, r.witness_value().expect("witness has a value")))
}

fn residual_record(check: String, anchor: &str, r: &ResidualTensor) -> Record {
    Record::zero(check, anchor, witness(r)).detail("nonzero_entries", r.nonzero_count())
}

fn core_failure(check: String, anchor: &str, e: &CoreError) -> Record {
    Record::new(check, anchor, Verdict::Fail).with_witness(e.to_string())
}

fn verify(ctx: &mut Ctx, mut b: SolutionBundle) -> Result<(), String> {
    ctx.report.input = Some(input_of(&b));
    let r = b.verify();
    let anchor = if b.kind() == Kind::Oae { OAE } else { WDVV };
    ctx.push(residual_record("solution/residual".into(), anchor, &r));
    if !b.trusted {
        return Ok(());
    }
    let k = b.solution.displacement();
    if let Solution::Wdvv(_) = b.solution {
        ctx.push(residual_record("solution/reduced".into(), GRADIENT, &residual_oae(&k)));
    }
    let (assoc, pot) = residual_structure(&connection_from_displacement(&k));
    ctx.push(residual_record(
        "solution/structure/associativity".into(),
        STRUCTURE_ASSOC,
        &assoc,
    ));
    ctx.push(residual_record(
        "solution/structure/potentiality".into(),
        STRUCTURE_SYM,
        &pot,
    ));
    Ok(())
}

fn hierarchy(ctx: &mut Ctx, b: &mut SolutionBundle, order: usize, seeds: &[Seeds]) {
    let k = b.solution.displacement();
    let tower = match b.tower(order) {
        Ok(t) => t.clone(),
        Err(e) => {
            ctx.push(core_failure("tower/build".into(), W_TOWER, &e));
            return;
        }
    };
    ctx.push(Record::new("tower/w", W_TOWER, Verdict::Pass).detail("levels", tower.w.order() + 1));
    ctx.push(Record::new("tower/v", V_TOWER, Verdict::Pass).detail("levels", tower.v.order() + 1));
    for (i, s) in seeds.iter().enumerate() {
        let tag = format!("seed{}", i + 1);
        let psi = spectral::assemble_psi(&tower.w, &s.h);
        let chi = spectral::assemble_chi(&tower.v, &s.b, &s.d);
        let phi = spectral::covector_from_scalar(&chi);
        ctx.push(residual_record(
            format!("spectral/{tag}/vector"),
            VECTOR,
            &spectral::verify_vector_spectral(&k, &psi),
        ));
        ctx.push(residual_record(
            format!("spectral/{tag}/scalar"),
            SCALAR,
            &spectral::verify_scalar_spectral(&k, &chi),
        ));
        ctx.push(residual_record(
            format!("spectral/{tag}/covector"),
            COVECTOR,
            &spectral::verify_covector_spectral(&k, &phi),
        ));
        if let Solution::Wdvv(f) = &b.solution {
            let check = format!("spectral/{tag}/coherence");
            match spectral::reduction_coherence(f, s, order) {
                Ok(r) => ctx.push(residual_record(check, COHERENCE, &r)),
                Err(e) => ctx.push(core_failure(check, COHERENCE, &e)),
            }
        }
    }
}

fn linearized_record(ctx: &mut Ctx, check: String, k: &DisplacementField, gens: &[SymmetryGenerator]) {
    let mut first = None;
    for g in gens {
        match symmetry::linearized_residual(k, g) {
            Ok(r) => {
                if let Some(w) = witness(&r) {
                    first.get_or_insert(format!("{:?} {w}", g.kind));
                }
            }
            Err(e) => {
                first.get_or_insert(format!("{:?} {e}", g.kind));
            }
        }
    }
    ctx.push(Record::zero(check, LINEARIZED, first).detail("generators", gens.len()));
}

fn wdvv_record(ctx: &mut Ctx, check: String, f: &Prepotential, gens: &[SymmetryGenerator]) {
    let mut first = None;
    for g in gens {
        match symmetry::wdvv_linearized_residual(f, g) {
            Ok(r) => {
                if let Some(w) = witness(&r) {
                    first.get_or_insert(format!("{:?} {w}", g.kind));
                }
            }
            Err(e) => {
                first.get_or_insert(format!("{:?} {e}", g.kind));
            }
        }
    }
    ctx.push(Record::zero(check, WDVV_LINEARIZED, first).detail("generators", gens.len()));
}

fn symmetries(ctx: &mut Ctx, b: &mut SolutionBundle, order: usize) {
    let k = b.solution.displacement();
    let n = b.dim();
    let tower = match b.tower(order) {
        Ok(t) => t.clone(),
        Err(e) => {
            ctx.push(core_failure("tower/build".into(), W_TOWER, &e));
            return;
        }
    };
    for i in 0..3 {
        let tag = format!("seed{}", i + 1);
        let s = ctx.sampler.seeds(n, order);
        let s = match &b.solution {
            Solution::Wdvv(f) => s.with_h_from_d(f.metric().upper()),
            Solution::Oae(_) => s,
        };
        let psi = spectral::assemble_psi(&tower.w, &s.h);
        let chi = spectral::assemble_chi(&tower.v, &s.b, &s.d);
        let tau = symmetry::make_tau_symmetry(&psi);
        linearized_record(ctx, format!("symmetry/{tag}/tau"), &k, &[tau]);
        for (name, g) in [
            ("sigma", symmetry::make_sigma_symmetry(&psi, &chi)),
            ("zeta", symmetry::make_zeta_symmetry(&psi, &chi)),
        ] {
            match g {
                Ok(g) => linearized_record(ctx, format!("symmetry/{tag}/{name}"), &k, &[g]),
                Err(e) => ctx.push(core_failure(format!("symmetry/{tag}/{name}"), LINEARIZED, &e)),
            }
        }
        if let Solution::Wdvv(f) = &b.solution {
            let scalars = [symmetry::make_wdvv_chi(&chi), symmetry::make_wdvv_chichi(&chi)];
            wdvv_record(ctx, format!("wdvv/{tag}/chi"), f, &scalars[..1]);
            wdvv_record(ctx, format!("wdvv/{tag}/chichi"), f, &scalars[1..]);
            let raised: Vec<SymmetryGenerator> =
                scalars.iter().map(|g| symmetry::raise_scalar(f.metric(), g)).collect();
            linearized_record(ctx, format!("wdvv/{tag}/raised"), &k, &raised);
        }
    }
    for level in 0..=order {
        match symmetry::coefficient_symmetries(&tower, level) {
            Ok(gens) => {
                let (x, y) = gens.split_at(n);
                linearized_record(ctx, format!("symmetry/coefficient/k{level}/X"), &k, x);
                linearized_record(ctx, format!("symmetry/coefficient/k{level}/Y"), &k, y);
            }
            Err(e) => ctx.push(core_failure(format!("symmetry/coefficient/k{level}"), LINEARIZED, &e)),
        }
        if let Solution::Wdvv(f) = &b.solution {
            match symmetry::wdvv_coefficient_symmetries(&tower, level) {
                Ok(gens) => {
                    let (x, z) = gens.split_at(n);
                    wdvv_record(ctx, format!("wdvv/coefficient/k{level}/XTilde"), f, x);
                    wdvv_record(ctx, format!("wdvv/coefficient/k{level}/ZTilde"), f, z);
                }
                Err(e) => ctx.push(core_failure(format!("wdvv/coefficient/k{level}"), WDVV_LINEARIZED, &e)),
            }
        }
    }
}

fn commutation_records(ctx: &mut Ctx, check: &str, anchor: &str, r: &CommutationReport) {
    let compared: usize = r.asserted().map(|c| c.compared_terms).sum();
    let mut rec = Record::zero(
        check,
        anchor,
        r.witness().map(|c| format!("{} = {}", c.label(), c.residual)),
    )
    .detail("checks", r.asserted().count())
    .detail("compared_terms", compared);
    if let Some(o) = r.order {
        rec = rec.detail("order", o);
    }
    ctx.push(rec);
    let reported: Vec<_> = r.reported().collect();
    if !reported.is_empty() {
        let nonzero: Vec<Value> = reported
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| Value::from(c.label()))
            .collect();
        ctx.push(
            Record::new(format!("{check}/extended"), anchor, Verdict::Info)
                .detail("checks", reported.len())
                .detail("nonzero", nonzero),
        );
    }
}

fn commute(ctx: &mut Ctx, b: &mut SolutionBundle, order: usize, pairs: &[PairSet]) {
    let seeds = ctx.sampler.seeds(b.dim(), order);
    let bundle = match &b.solution {
        Solution::Oae(k) => FlowBundle::new(k, &seeds, order),
        Solution::Wdvv(f) => FlowBundle::from_prepotential(f, &seeds, order),
    };
    let bundle = match bundle {
        Ok(x) => x,
        Err(e) => {
            ctx.push(core_failure("commute/bundle".into(), W_TOWER, &e));
            return;
        }
    };
    for p in pairs {
        match p {
            PairSet::Tau => {
                let anchor = "[∂/∂τ_λ, ∂/∂τ_μ] = 0 on K, ψ(ζ), χ(ζ)";
                match flows::check_tau_tau(&bundle) {
                    Ok(r) => commutation_records(ctx, "commute/tau", anchor, &r),
                    Err(e) => ctx.push(core_failure("commute/tau".into(), anchor, &e)),
                }
            }
            PairSet::Sigma => {
                let anchor = "[τ, σ], [σ, σ], [τ, ζ], [ζ, ζ] = 0 on K";
                match flows::check_sigma_pairs(&bundle) {
                    Ok(r) => commutation_records(ctx, "commute/sigma", anchor, &r),
                    Err(e) => ctx.push(core_failure("commute/sigma".into(), anchor, &e)),
                }
            }
            PairSet::W => {
                let anchor = "[∂/∂τ^β_k, ∂/∂τ^γ_l] = 0 on K and w";
                let top = order.min(4).saturating_sub(1);
                for kk in 0..=top {
                    for ll in kk..=top {
                        let check = format!("commute/w/k{kk}-l{ll}");
                        match flows::check_w_hierarchy(&bundle, kk, ll) {
                            Ok(r) => commutation_records(ctx, &check, anchor, &r),
                            Err(e) => ctx.push(core_failure(check, anchor, &e)),
                        }
                    }
                }
            }
            PairSet::Wdvv => {
                let anchor = "[∂/∂τ_λ, ∂/∂τ_μ] on F and χ(ζ), [τ, ζ] and [ζ, ζ] on F";
                if bundle.potential().is_none() {
                    ctx.push(
                        Record::new("commute/wdvv", anchor, Verdict::Info)
                            .detail("applicable", false)
                            .detail("reason", "input is not a WDVV solution"),
                    );
                    continue;
                }
                match flows::check_wdvv_flows(&bundle) {
                    Ok(r) => commutation_records(ctx, "commute/wdvv", anchor, &r),
                    Err(e) => ctx.push(core_failure("commute/wdvv".into(), anchor, &e)),
                }
            }
        }
    }
}

fn darboux(ctx: &mut Ctx, b: &mut SolutionBundle, order: usize, wanted: usize) {
    let k = b.solution.displacement();
    let n = b.dim();
    if connection_from_displacement(&k)
        .entries()
        .iter()
        .flatten()
        .flatten()
        .all(Polynomial::is_zero)
    {
        for (check, anchor) in [
            ("darboux/associativity", DARBOUX_ASSOC),
            ("darboux/symmetry", DARBOUX_SYM),
        ] {
            ctx.push(
                Record::new(check, anchor, Verdict::Info)
                    .detail("applicable", false)
                    .detail("reason", "K^α_{,βγ} ≡ 0, so ∂ψ/∂x vanishes identically"),
            );
        }
        return;
    }
    let tower = match b.tower(order + 1) {
        Ok(t) => t.clone(),
        Err(e) => {
            ctx.push(core_failure("darboux/tower".into(), W_TOWER, &e));
            return;
        }
    };
    let mut used = Vec::new();
    let mut skipped = 0usize;
    let mut attempts = 0;
    while used.len() < wanted && attempts < 8 {
        attempts += 1;
        let seeds = ctx.sampler.seeds(n, order + 1);
        let psi = spectral::assemble_psi(&tower.w, &seeds.h);
        let candidates = ctx.sampler.points(n, 2 * wanted);
        match transforms::darboux_verify(&k, &psi, &candidates) {
            Ok(r) => {
                skipped += r.skipped.len();
                used = r.points;
                used.truncate(wanted.max(1));
            }
            Err(CoreError::NoUsablePoints) => skipped += candidates.len(),
            Err(e) => {
                ctx.push(core_failure("darboux/verify".into(), DARBOUX_SYM, &e));
                return;
            }
        }
    }
    let enough = used.len() >= wanted;
    for (check, anchor, assoc) in [
        ("darboux/associativity", DARBOUX_ASSOC, true),
        ("darboux/symmetry", DARBOUX_SYM, false),
    ] {
        let mut w = used.iter().find_map(|p| {
            let r = if assoc { &p.associativity } else { &p.symmetry };
            witness(r).map(|w| {
                format!(
                    "at {:?}: {w}",
                    p.point.iter().map(|x| x.to_string()).collect::<Vec<_>>()
                )
            })
        });
        if !enough && w.is_none() {
            w = Some(format!("only {} nonsingular points found", used.len()));
        }
        ctx.push(
            Record::zero(check, anchor, w)
                .detail("points", used.len())
                .detail("skipped", skipped)
                .detail("modulo", format!("λ^{}", order + 1)),
        );
    }
}

fn backlund_record(ctx: &mut Ctx, check: &str, anchor: &str, result: Result<BacklundImage, CoreError>) {
    let rec = match result {
        Ok(img) => {
            let h: Vec<Value> = img.h.components().iter().map(|c| Value::from(c.to_string())).collect();
            Record::zero(
                check,
                anchor,
                witness(&img.residual).map(|w| format!("residual_oae(H) {w}")),
            )
            .detail("H", h)
        }
        Err(CoreError::ConditionFailed {
            condition,
            index,
            value,
        }) => Record::new(check, anchor, Verdict::Fail)
            .with_witness(format!(
                "ConditionFailed: {condition} {}",
                format_witness(&index, &value)
            ))
            .detail("condition", condition),
        Err(e) => core_failure(check.to_string(), anchor, &e),
    };
    ctx.push(rec);
}

fn backlund(ctx: &mut Ctx, b: &mut SolutionBundle) {
    let k = b.solution.displacement();
    backlund_record(ctx, "backlund/oae", BACKLUND, transforms::backlund_oae(&k));
    if let Solution::Wdvv(f) = &b.solution {
        backlund_record(ctx, "backlund/wdvv", WDVV_BACKLUND, transforms::wdvv_to_oae(f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("oae").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["verify", "a3-wdvv"]).code, 0);
        assert_eq!(run_args(&["verify", "bad-oae"]).code, 1);
        assert_eq!(run_args(&["frobnicate"]).code, 2);
        assert_eq!(run_args(&["verify", "--bogus", "a3-wdvv"]).code, 2);
        assert_eq!(run_args(&["verify", "/no/such/file.sol"]).code, 2);
        assert_eq!(run_args(&["reduce", "linear-n3"]).code, 2);
    }

    #[test]
    fn hierarchy_of_linear_field_is_zero() {
        let out = run_args(&["hierarchy", "--order", "4", "linear-n3"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let report = out.report.unwrap();
        assert!(report.records.iter().all(|r| r.verdict == Verdict::Pass));
    }

    #[test]
    fn backlund_on_bad_input_fails_with_condition() {
        let out = run_args(&["backlund", "bad-input"]);
        assert_eq!(out.code, 1);
        let rec = &out.report.unwrap().records[0];
        assert!(rec.witness.as_deref().unwrap().starts_with("ConditionFailed"));
    }

    #[test]
    fn reduce_prints_oae_file() {
        let out = run_args(&["reduce", "a3-wdvv"]);
        assert_eq!(out.code, 0);
        let s = crate::format::parse_solution(&out.stdout).unwrap();
        assert_eq!(s.kind(), Kind::Oae);
    }
}
