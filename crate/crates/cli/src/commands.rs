use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use phfkit::hashfam::{family_count, CollisionEquation};
use phfkit::scalar::from_bigint;
use phfkit::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::numexpr::{parse_int, parse_list, parse_u64};

/// What the process exit code reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    fn from_verified(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::VerificationFailed
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<S: Serialize>(value: &S) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn read_list(inline: Option<&str>, file: Option<&Path>) -> Result<Vec<BigInt>> {
    match (inline, file) {
        (Some(s), None) => parse_list(s),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let tokens: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
            tokens.into_iter().map(parse_int).collect()
        }
        (Some(_), Some(_)) => bail!("give the list inline or by file, not both"),
        (None, None) => bail!("a list is required"),
    }
}

fn narrow<T: Int>(values: &[BigInt]) -> Option<Vec<T>> {
    values.iter().map(from_bigint::<T>).collect()
}

fn fits_i64(values: &[BigInt]) -> bool {
    values.iter().all(|v| v.to_i64().is_some())
}

/// `"1,1;2"` is `x_1 + x_2 = 2 y_1`.
fn parse_equation(text: &str) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let (pos, neg) = text.split_once(';').ok_or_else(|| anyhow!("equation `{text}` needs `;` between the sides"))?;
    Ok((parse_list(pos)?, parse_list(neg)?))
}

fn array_of<T: Int>(pos: &[BigInt], neg: &[BigInt]) -> Result<BipartiteArray<T>> {
    let p = narrow(pos).ok_or_else(|| anyhow!("coefficient too large"))?;
    let n = narrow(neg).ok_or_else(|| anyhow!("coefficient too large"))?;
    Ok(BipartiteArray::new(p, n)?)
}

#[derive(Args, Debug)]
pub struct SeqArgs {
    /// Comma-separated sequence, e.g. `3,6,8,4,5,1,7,2`.
    pub sequence: Option<String>,
    /// Read the sequence from a file instead.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

pub fn seq(args: &SeqArgs) -> Result<Outcome> {
    let values = read_list(args.sequence.as_deref(), args.file.as_deref())?;
    let u = PermSeq::new(values)?;
    let a = analyze(&u)?;
    if args.json {
        emit(None, &to_json(&a)?)?;
        return Ok(Outcome::Success);
    }
    let mut out = String::new();
    writeln!(out, "sequence: ({})", join(u.entries()))?;
    writeln!(out, "tau: {}", a.tau)?;
    writeln!(out, "epsilon: {}", a.epsilon)?;
    writeln!(out, "chi: ({})", join(&a.chi))?;
    writeln!(out, "deletions:")?;
    for (i, d) in a.deletions.iter().enumerate() {
        writeln!(out, "  {i}: ({})", join(d.entries()))?;
    }
    emit(None, &out)?;
    Ok(Outcome::Success)
}

#[derive(Args, Debug)]
pub struct EquationsArgs {
    /// List every equation L(U) of this set.
    #[arg(long, conflicts_with = "seq")]
    pub r: Option<String>,
    /// Show the equation of one sequence.
    #[arg(long)]
    pub seq: Option<String>,
    /// Also build the ancestor string of the sequence's equation.
    #[arg(long, requires = "seq")]
    pub string: bool,
    /// Exponent a of the θ schedule.
    #[arg(long)]
    pub a: Option<f64>,
    /// Report feasibility measurements against m (needs a, b, t).
    #[arg(long, requires = "seq")]
    pub check_plasticity: bool,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Serialize)]
struct SeqEquation {
    sequence: PermSeq<BigInt>,
    equation: BigArray,
}

pub fn equations(args: &EquationsArgs, cfg: &RunConfig) -> Result<Outcome> {
    if let Some(r) = &args.r {
        let r = parse_list(r)?;
        let mut rows = Vec::new();
        for k in 3..=r.len() {
            for u in enumerate_sequences(&r, k)? {
                let equation = array_from_sequence(&u)?;
                rows.push(SeqEquation { sequence: u, equation });
            }
        }
        if args.json {
            emit(None, &to_json(&rows)?)?;
        } else {
            let mut out = String::new();
            for row in &rows {
                writeln!(out, "({}): {}", join(row.sequence.entries()), row.equation)?;
            }
            writeln!(out, "distinct equations: {}", equations_of_set(&r)?.len())?;
            emit(None, &out)?;
        }
        return Ok(Outcome::Success);
    }
    let Some(text) = &args.seq else {
        bail!("give --r or --seq");
    };
    let u = PermSeq::new(parse_list(text)?)?;
    let equation = array_from_sequence(&u)?;
    let diag = diagnostics(&equation)?;
    let a_param = args.a.or(cfg.a).unwrap_or(0.5);
    let string = if args.string { Some(algorithm1_in(&u, a_param, cfg.log_base)) } else { None };
    let feasibility = if args.check_plasticity || cfg.check_plasticity {
        let mut c = cfg.clone();
        c.a = args.a.or(cfg.a);
        let params = c.plastic_params()?;
        let m = parse_int(args.m.as_deref().or(cfg.m.as_deref()).ok_or_else(|| anyhow!("feasibility needs --m"))?)?;
        Some(feasibility_report(&equation, &m, &params)?)
    } else {
        None
    };
    if args.json {
        #[derive(Serialize)]
        struct Report<'a> {
            equation: &'a BigArray,
            diagnostics: &'a ArrayDiagnostics<BigInt>,
            #[serde(skip_serializing_if = "Option::is_none")]
            string: Option<std::result::Result<&'a AncestorString<BigInt>, String>>,
            #[serde(skip_serializing_if = "Option::is_none")]
            feasibility: Option<&'a FeasibilityReport<f64>>,
        }
        let report = Report {
            equation: &equation,
            diagnostics: &diag,
            string: string.as_ref().map(|s| s.as_ref().map_err(ToString::to_string)),
            feasibility: feasibility.as_ref(),
        };
        emit(None, &to_json(&report)?)?;
        return Ok(Outcome::Success);
    }
    let mut out = String::new();
    writeln!(out, "equation: {equation}")?;
    writeln!(out, "kind: {:?}", equation.kind())?;
    writeln!(out, "alpha: {}  alpha': {}  delta: {}", diag.alpha, diag.alpha_prime, diag.delta)?;
    writeln!(out, "monotonic: {}", equation.is_monotonic())?;
    match &string {
        Some(Ok(s)) => {
            writeln!(out, "string (tau = {}):", s.tau())?;
            for (i, arr) in s.arrays.iter().enumerate() {
                if i == 0 {
                    writeln!(out, "  0: {arr}")?;
                } else {
                    let (theta, bit, loc) = (&s.thetas[i - 1], s.choices[i - 1], &s.locations[i - 1]);
                    writeln!(out, "  {i}: {arr}  theta={theta} type={} location={loc}", bit + 1)?;
                }
            }
        }
        Some(Err(e)) => writeln!(out, "string: {e}")?,
        None => {}
    }
    if let Some(f) = &feasibility {
        writeln!(
            out,
            "feasibility: unequal={} gap_ratio={:.4} alpha_growth={:.4} z_lower={:.4} z_upper={:.4}",
            f.mutually_unequal, f.gap_ratio, f.alpha_growth, f.z_lower, f.z_upper
        )?;
    }
    emit(None, &out)?;
    Ok(Outcome::Success)
}

#[derive(Args, Debug)]
pub struct TowerArgs {
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

pub fn tower(args: &TowerArgs, cfg: &RunConfig) -> Result<Outcome> {
    let m = parse_int(args.m.as_deref().or(cfg.m.as_deref()).ok_or_else(|| anyhow!("--m is required"))?)?;
    let t = args.t.or(cfg.t).ok_or_else(|| anyhow!("--t is required"))?;
    let r = plastic_tower_in(&m, t, cfg.log_base)?;
    if args.json {
        emit(None, &to_json(&r)?)?;
    } else {
        emit(None, &format!("{r}\nrank: {}\n", r.rank()))?;
    }
    Ok(Outcome::Success)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Greedy,
    Exact,
    Behrend,
    Pipeline,
}

#[derive(Args, Debug)]
pub struct SolfreeArgs {
    /// Equations of every permutation sequence of this set.
    #[arg(long)]
    pub r: Option<String>,
    /// The equation of one sequence.
    #[arg(long)]
    pub seq: Option<String>,
    /// Explicit equation `pos;neg`, e.g. `1,1;2`. Repeatable.
    #[arg(long = "equation")]
    pub equations: Vec<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, value_enum, default_value = "greedy")]
    pub strategy: Strategy,
    /// Exponent a of the θ schedule (pipeline).
    #[arg(long)]
    pub a: Option<f64>,
    /// Certificate JSON destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Destination for the set, one element per line.
    #[arg(long)]
    pub set_out: Option<PathBuf>,
    /// Print the certificate JSON instead of the summary.
    #[arg(long)]
    pub json: bool,
}

struct SolfreeInput {
    arrays: Vec<(Vec<BigInt>, Vec<BigInt>)>,
    seq: Option<Vec<BigInt>>,
    m: BigInt,
}

fn collect_solfree(args: &SolfreeArgs, cfg: &RunConfig) -> Result<SolfreeInput> {
    let mut arrays = Vec::new();
    if let Some(r) = &args.r {
        for eq in equations_of_set(&parse_list(r)?)? {
            arrays.push((eq.pos().to_vec(), eq.neg().to_vec()));
        }
    }
    let seq = args.seq.as_deref().map(parse_list).transpose()?;
    if let Some(s) = &seq {
        let eq = array_from_sequence(&PermSeq::new(s.clone())?)?;
        arrays.push((eq.pos().to_vec(), eq.neg().to_vec()));
    }
    for e in &args.equations {
        arrays.push(parse_equation(e)?);
    }
    if arrays.is_empty() {
        bail!("no equations: give --r, --seq or --equation");
    }
    let m = parse_int(args.m.as_deref().or(cfg.m.as_deref()).ok_or_else(|| anyhow!("--m is required"))?)?;
    Ok(SolfreeInput { arrays, seq, m })
}

pub fn solfree(args: &SolfreeArgs, cfg: &RunConfig) -> Result<Outcome> {
    let input = collect_solfree(args, cfg)?;
    let mut all: Vec<BigInt> = input.arrays.iter().flat_map(|(p, n)| p.iter().chain(n)).cloned().collect();
    all.push(input.m.clone());
    all.extend(input.seq.iter().flatten().cloned());
    if fits_i64(&all) {
        solfree_typed::<i64>(args, cfg, &input)
    } else {
        solfree_typed::<BigInt>(args, cfg, &input)
    }
}

fn solfree_typed<T: Int>(args: &SolfreeArgs, cfg: &RunConfig, input: &SolfreeInput) -> Result<Outcome> {
    let equations: Vec<BipartiteArray<T>> =
        input.arrays.iter().map(|(p, n)| array_of::<T>(p, n)).collect::<Result<_>>()?;
    let limits = cfg.limits;
    let m_u64 = || input.m.to_u64().ok_or_else(|| anyhow!("m = {} must fit in 64 bits for this strategy", input.m));
    let cert = match args.strategy {
        Strategy::Greedy => greedy_solution_free(m_u64()?, &equations, &limits)?,
        Strategy::Exact => max_solution_free_exact(m_u64()?, &equations, &limits)?,
        Strategy::Behrend => {
            let [eq] = equations.as_slice() else {
                bail!("the behrend strategy takes exactly one one-sided equation");
            };
            behrend_base(eq, m_u64()?, &limits)?
        }
        Strategy::Pipeline => {
            let Some(s) = &input.seq else {
                bail!("the pipeline strategy needs --seq");
            };
            if equations.len() != 1 {
                bail!("the pipeline strategy builds a set for the single equation of --seq");
            }
            let u = PermSeq::new(narrow::<T>(s).ok_or_else(|| anyhow!("sequence entry too large"))?)?;
            let m: T = from_bigint(&input.m).ok_or_else(|| anyhow!("m too large"))?;
            let a = args.a.or(cfg.a).unwrap_or(0.5);
            pipeline_single_equation(&u, a, &m, &cfg.pipeline())?
        }
    };
    let out = args.out.as_deref().or(cfg.out.as_deref());
    let set_out = args.set_out.as_deref().or(cfg.set_out.as_deref());
    if let Some(p) = out {
        emit(Some(p), &to_json(&cert)?)?;
    }
    if let Some(p) = set_out {
        emit(Some(p), &cert.set_text())?;
    }
    if args.json {
        if out.is_none() {
            emit(None, &to_json(&cert)?)?;
        }
    } else {
        let mut text = String::new();
        writeln!(text, "strategy: {:?}", args.strategy)?;
        writeln!(text, "size: {}", cert.len())?;
        writeln!(text, "method: {:?}", cert.method)?;
        writeln!(text, "verified: {}", cert.verified)?;
        if let Some(w) = &cert.witness {
            writeln!(
                text,
                "witness: equation {} ({}) with values ({})",
                w.equation,
                cert.equations[w.equation],
                join(&w.witness.values())
            )?;
        }
        writeln!(text, "set: {}", join(&cert.set_m))?;
        emit(None, &text)?;
    }
    Ok(Outcome::from_verified(cert.verified))
}

#[derive(Subcommand, Debug)]
pub enum PhfCommand {
    /// Build the matrix with columns (y + b_i m) mod q.
    Build(PhfBuildArgs),
    /// Check separation and report a witness and rainbow cycle on failure.
    Verify(PhfVerifyArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct PhfBuildArgs {
    #[arg(long, conflicts_with = "tower_m")]
    pub r: Option<String>,
    /// Use plastic_tower(m, t) as R.
    #[arg(long)]
    pub tower_m: Option<String>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub q: Option<String>,
    /// Greedy R-solution-free M over [0, ⌊(q-1)/rank⌋].
    #[arg(long, conflicts_with_all = ["m_list", "m_file"])]
    pub auto_m: bool,
    /// With --auto-m, scan only up to the bound under which collisions modulo q
    /// are collisions over the integers.
    #[arg(long, requires = "auto_m")]
    pub lift_safe: bool,
    #[arg(long, conflicts_with = "m_file")]
    pub m_list: Option<String>,
    /// Set file: numbers separated by commas or whitespace, or a certificate JSON.
    #[arg(long)]
    pub m_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: MatrixFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_set_file(path: &Path) -> Result<Vec<BigInt>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let cert: BigCert = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(cert.set_m);
    }
    read_list(None, Some(path))
}

pub fn phf_build(args: &PhfBuildArgs, cfg: &RunConfig) -> Result<Outcome> {
    let r_big: Vec<BigInt> = match (&args.r, &args.tower_m) {
        (Some(r), None) => parse_list(r)?,
        (None, Some(m)) => {
            let t = args.t.or(cfg.t).ok_or_else(|| anyhow!("--tower-m needs --t"))?;
            plastic_tower_in(&parse_int(m)?, t, cfg.log_base)?.elements().to_vec()
        }
        _ => bail!("give --r or --tower-m"),
    };
    let q = parse_u64(args.q.as_deref().or(cfg.q.as_deref()).ok_or_else(|| anyhow!("--q is required"))?)?;
    let r_vals = narrow::<i64>(&r_big).ok_or_else(|| anyhow!("R does not fit in [0, q-1]"))?;
    let r = PlasticSet::new(r_vals)?;
    let q_i = i64::try_from(q).context("q is too large")?;
    let equations = r.equations()?;
    let (m, verified) = if args.auto_m {
        let hi = if args.lift_safe { integer_lift_bound(&r, &q_i)? } else { (q_i - 1) / r.rank().max(1) };
        let cert = greedy_solution_free_in(0, hi.max(0) as u64, &equations, &cfg.limits)?;
        (cert.set_m, cert.verified)
    } else {
        let values = match (&args.m_list, &args.m_file) {
            (Some(list), _) => parse_list(list)?,
            (None, Some(p)) => read_set_file(p)?,
            (None, None) => bail!("give --auto-m, --m-list or --m-file"),
        };
        let m = narrow::<i64>(&values).ok_or_else(|| anyhow!("M element too large"))?;
        let cert = verify_solution_free(&m, &equations, &cfg.limits)?;
        (m, cert.verified)
    };
    let a = build_phf(&r, &m, &q_i, verified).map_err(|e| match e {
        Error::OutOfRange { value, hi, .. } if r.rank() > 0 && hi.parse::<i64>().ok() == Some((q_i - 1) / r.rank()) => {
            anyhow!("M element {value} is outside [0, ⌊(q-1)/rank⌋] = [0, {hi}] (q = {q}, rank = {})", r.rank())
        }
        other => other.into(),
    })?;
    let body = match args.format {
        MatrixFormat::Csv => a.to_csv(),
        MatrixFormat::Json => serde_json::to_string(&a)? + "\n",
    };
    let out = args.out.as_deref().or(cfg.out.as_deref());
    emit(out, &body)?;
    if let Some(p) = out {
        println!(
            "{}x{} matrix over Z_{q} from R={r} and |M|={} (M solution-free: {verified}) written to {}",
            a.n_rows(),
            a.n_cols(),
            m.len(),
            p.display()
        );
    }
    Ok(Outcome::Success)
}

#[derive(Args, Debug)]
pub struct PhfVerifyArgs {
    /// Matrix in CSV or JSON.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Weights w_1,…,w_t; defaults to all ones with one part per row.
    #[arg(long = "type")]
    pub shf_type: Option<String>,
    #[arg(long)]
    pub max_families: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

pub fn read_matrix(path: &Path) -> Result<HashFamilyMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
    } else {
        Ok(HashFamilyMatrix::from_csv(&text)?)
    }
}

fn parse_type(text: &str) -> Result<ShfType> {
    let weights = parse_list(text)?
        .iter()
        .map(|w| w.to_usize().ok_or_else(|| anyhow!("weight {w} out of range")))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShfType::new(weights)?)
}

pub fn phf_verify(args: &PhfVerifyArgs, cfg: &RunConfig) -> Result<Outcome> {
    let a = read_matrix(&args.matrix)?;
    let ty = match &args.shf_type {
        Some(t) => parse_type(t)?,
        None => ShfType::all_ones(a.n_rows())?,
    };
    let cap = args.max_families.unwrap_or(cfg.max_families) as u128;
    let report = verify_shf(&a, &ty, cap)?;
    let (cycle, collision): (Option<RainbowCycle>, Option<CollisionEquation>) =
        if !report.separated && ty.is_perfect() && ty.t() <= a.n_rows() {
            let cycle = find_rainbow_cycle(&a, ty.t(), cap)?;
            let collision = match (&cycle, a.provenance()) {
                (Some(c), Some(_)) if c.k() >= 3 => Some(collision_equation(&a, c)?),
                _ => None,
            };
            (cycle, collision)
        } else {
            (None, None)
        };
    if args.json {
        #[derive(Serialize)]
        struct Report<'a> {
            #[serde(rename = "type")]
            ty: &'a ShfType,
            report: &'a ShfReport,
            #[serde(skip_serializing_if = "Option::is_none")]
            rainbow_cycle: Option<&'a RainbowCycle>,
            #[serde(skip_serializing_if = "Option::is_none")]
            collision: Option<&'a CollisionEquation>,
        }
        let body = Report { ty: &ty, report: &report, rainbow_cycle: cycle.as_ref(), collision: collision.as_ref() };
        emit(None, &to_json(&body)?)?;
        return Ok(Outcome::from_verified(report.separated));
    }
    let mut out = String::new();
    let shape = format!("{}x{} over Z_{}", a.n_rows(), a.n_cols(), a.q());
    if report.separated {
        writeln!(out, "PASS: {shape} separates every family of type {ty} ({} families)", report.families)?;
    } else {
        let groups: Vec<String> = report.witness.iter().flatten().map(|g| format!("{{{}}}", join(g))).collect();
        writeln!(out, "FAIL: {shape} does not separate columns {}", groups.join(" "))?;
        if let Some(c) = &cycle {
            writeln!(out, "rainbow {}-cycle: columns ({}) rows ({})", c.k(), join(&c.columns), join(&c.rows))?;
        }
        if let Some(e) = &collision {
            writeln!(
                out,
                "collision: {} at m = ({}) leaves {} (zero mod q: {})",
                e.equation,
                join(&e.values),
                e.residual,
                e.holds_mod_q
            )?;
        }
    }
    emit(None, &out)?;
    Ok(Outcome::from_verified(report.separated))
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Number of rows N.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long = "type", default_value = "1,1,1")]
    pub shf_type: String,
}

pub fn bounds(args: &BoundsArgs, cfg: &RunConfig) -> Result<Outcome> {
    let q = parse_int(args.q.as_deref().or(cfg.q.as_deref()).ok_or_else(|| anyhow!("--q is required"))?)?;
    let ty = parse_type(&args.shf_type)?;
    let upper = bound_upper(args.n, &q, &ty)?;
    let q64 = q.to_u64().ok_or_else(|| anyhow!("q too large for the lower bound"))?;
    let lower: f64 = bound_lower_lll(args.n, q64, ty.u() as u64)?;
    emit(None, &format!("type: {ty}\nupper: {upper}\nlower: {lower}\n"))?;
    Ok(Outcome::Success)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchStrategy {
    Greedy,
    Exact,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Alphabet sizes, comma-separated. An empty list gives an empty table.
    #[arg(long, default_value = "")]
    pub q: String,
    #[arg(long)]
    pub t: Option<usize>,
    /// R; defaults to {0, 1, …, t-1}.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long, value_enum, default_value = "greedy")]
    pub strategy: BenchStrategy,
    /// Also run the separation check and add a column for it.
    #[arg(long)]
    pub verify: bool,
    /// Leave out the runtime column so the table is byte-stable.
    #[arg(long)]
    pub no_timing: bool,
}

pub fn bench(args: &BenchArgs, cfg: &RunConfig) -> Result<Outcome> {
    let t = args.t.or(cfg.t).unwrap_or(3);
    let r_vals: Vec<i64> = match &args.r {
        Some(r) => narrow(&parse_list(r)?).ok_or_else(|| anyhow!("R element too large"))?,
        None => (0..t as i64).collect(),
    };
    let r = PlasticSet::new(r_vals)?;
    if r.t() != t {
        bail!("R has {} elements but t = {t}", r.t());
    }
    let equations = r.equations()?;
    let ty = ShfType::all_ones(t)?;
    let qs: Vec<u64> = parse_list(&args.q)?
        .iter()
        .map(|q| q.to_u64().ok_or_else(|| anyhow!("q = {q} out of range")))
        .collect::<Result<_>>()?;
    let mut out = String::from("q,m_size,n,upper,lower");
    if args.verify {
        out.push_str(",separated");
    }
    if !args.no_timing {
        out.push_str(",runtime_ms");
    }
    out.push('\n');
    let mut outcome = Outcome::Success;
    for q in qs {
        let start = Instant::now();
        let q_i = i64::try_from(q)?;
        let hi = ((q_i - 1) / r.rank()).max(0) as u64;
        let m = match args.strategy {
            BenchStrategy::Greedy => greedy_solution_free_in(0, hi, &equations, &cfg.limits)?.set_m,
            // the exact search runs on [1, hi+1]; shifting by one keeps solution-freeness
            BenchStrategy::Exact => max_solution_free_exact(hi + 1, &equations, &cfg.limits)?
                .set_m
                .into_iter()
                .map(|v| v - 1)
                .collect(),
        };
        let n = q as u128 * m.len() as u128;
        let upper = bound_upper(t as u64, &BigInt::from(q), &ty)?;
        let lower: f64 = bound_lower_lll(t as u64, q, t as u64)?;
        write!(out, "{q},{},{n},{upper},{lower}", m.len())?;
        if args.verify {
            let a = build_phf(&r, &m, &q_i, true)?;
            let ok = family_count(a.n_cols(), &ty) == BigInt::from(0)
                || verify_shf(&a, &ty, cfg.max_families as u128)?.separated;
            if !ok {
                outcome = Outcome::VerificationFailed;
            }
            write!(out, ",{ok}")?;
        }
        if !args.no_timing {
            write!(out, ",{}", start.elapsed().as_millis())?;
        }
        out.push('\n');
    }
    emit(None, &out)?;
    Ok(outcome)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// A matrix (CSV or JSON) or a certificate JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub to: ExportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn export(args: &ExportArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let is_cert = text.trim_start().starts_with('{')
        && serde_json::from_str::<serde_json::Value>(&text).map(|v| v.get("set").is_some()).unwrap_or(false);
    let body = if is_cert {
        let cert: BigCert = serde_json::from_str(&text)?;
        match args.to {
            ExportFormat::Text => cert.set_text(),
            ExportFormat::Json => to_json(&cert)?,
            ExportFormat::Csv => bail!("certificates export as text or json"),
        }
    } else {
        let a = read_matrix(&args.input)?;
        match args.to {
            ExportFormat::Csv => a.to_csv(),
            ExportFormat::Json => serde_json::to_string(&a)? + "\n",
            ExportFormat::Text => bail!("matrices export as csv or json"),
        }
    };
    emit(args.out.as_deref(), &body)?;
    Ok(Outcome::Success)
}
