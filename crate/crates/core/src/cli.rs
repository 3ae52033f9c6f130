//! The `orliczkit` command line.
//!
//! Exit status: 0 on success or a passing verdict, 2 when a verdict fails,
//! 1 on usage or validation errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::boyd::{boyd_upper_index, growth_condition, Variant};
use crate::field::SampledFunction;
use crate::harness::{cutoff, steps_csv, Harness, HarnessOptions, Profile};
use crate::norms::{luxemburg_norm, sobolev_terms};
use crate::raster::{
    density_constant, generate, radius_grid, read_ord1, sample_points, write_ord1, DensityVerdict, RasterDomain,
    Sampling, Shape,
};
use crate::sobolev::{glue_is_equivalent, higher_order_target, ratio_decay_check, EmbeddingContext, FirstOrder};
use crate::young::{build_young, conjugate, read_yf1, write_yf1, Family, Grid, Monotone, Side, YoungFunction};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "orliczkit", version, about = "Orlicz-Sobolev embeddings and measure density on rasters")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    group: Group,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Young function: `family:params` (e.g. `power:2`, `powerlog:2,1`) or a YF1 file
    #[arg(long, global = true)]
    young: Option<String>,
    /// Dimension
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Derivative order
    #[arg(long, global = true, default_value_t = 1)]
    m: u32,
    /// Grid spacing for generated domains
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true, env = "ORLICZKIT_WORKERS")]
    workers: Option<usize>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Yf1,
    Ord1,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Young functions
    #[command(subcommand)]
    Young(YoungCmd),
    /// Optimal embedding targets
    #[command(subcommand)]
    Target(TargetCmd),
    /// Boyd index and growth conditions
    #[command(subcommand)]
    Boyd(BoydCmd),
    /// Luxemburg and Orlicz-Sobolev norms of sampled fields
    #[command(subcommand)]
    Norm(NormCmd),
    /// Raster domains
    #[command(subcommand)]
    Domain(DomainCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Cut-off / radius-halving harness
    #[command(subcommand)]
    Harness(HarnessCmd),
}

#[derive(Subcommand, Debug)]
enum YoungCmd {
    Show,
    Conjugate,
    Invert {
        #[arg(long)]
        y: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Subcommand, Debug)]
enum TargetCmd {
    /// `Ā_n`
    First,
    /// `A_{n/m}`
    Higher,
    /// Glue points between `A` and `A_n`
    Glue,
}

#[derive(Subcommand, Debug)]
enum BoydCmd {
    Index,
    Check {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::Iii)]
        variant: VariantArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Ii,
    Iii,
}

#[derive(Args, Debug, Clone)]
struct DomainSrc {
    /// ORD1 file
    #[arg(long, conflicts_with = "gen")]
    domain: Option<PathBuf>,
    /// Generated shape: cube, ball, lipschitz-graph, inward-cusp, fat-carpet (with `:params`)
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Subcommand, Debug)]
enum NormCmd {
    Lux {
        #[command(flatten)]
        src: DomainSrc,
        /// `const:c`, `coord:i`, `sqnorm` or `cutoff:x1,..,xn,R,Rt`
        #[arg(long)]
        field: String,
    },
    Sobolev {
        #[command(flatten)]
        src: DomainSrc,
        #[arg(long)]
        field: String,
    },
}

#[derive(Subcommand, Debug)]
enum DomainCmd {
    Gen {
        #[arg(long)]
        gen: String,
    },
    Density {
        #[command(flatten)]
        src: DomainSrc,
        /// `boundary` or `random:<count>`
        #[arg(long, default_value = "boundary")]
        sampling: String,
        /// Smallest radius in cells
        #[arg(long, default_value_t = 8.0)]
        c_min: f64,
        #[arg(long, default_value_t = 8)]
        radii: usize,
    },
    Halve {
        #[command(flatten)]
        src: DomainSrc,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        r: f64,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Boundedness of `target⁻¹(2r)/A⁻¹(r)·r^{m/n}` for large `r`
    RatioLemma {
        #[arg(long, default_value_t = 1e3)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e8)]
        r_hi: f64,
    },
}

#[derive(Subcommand, Debug)]
enum HarnessCmd {
    Run {
        #[command(flatten)]
        src: DomainSrc,
        /// Explicit center; otherwise `--centers` random points
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        centers: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        family_centers: usize,
        #[arg(long, default_value_t = 5)]
        family_radii: usize,
        #[arg(long)]
        linear: bool,
        /// Lemma threshold `r₀` (default `1/|B_R|`)
        #[arg(long)]
        r0: Option<f64>,
        /// Run even when the Boyd index is not below `n/m`
        #[arg(long)]
        skip_boyd: bool,
    },
}

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(w) = cli.common.workers {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    match run(&cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    match &cli.group {
        Group::Young(cmd) => {
            let a = young(c)?;
            match cmd {
                YoungCmd::Show => emit_yf1(c, &a),
                YoungCmd::Conjugate => emit_yf1(c, &conjugate(&a)?),
                YoungCmd::Invert { y, side } => {
                    let side = match side {
                        SideArg::Left => Side::Left,
                        SideArg::Right => Side::Right,
                    };
                    let inv = a.inverse(*y, side);
                    emit_json(c, &json!({ "young": a.label(), "y": y, "side": format!("{side:?}").to_lowercase(),
                        "value": inv.value, "saturated": inv.saturated }))
                }
            }
        }
        Group::Target(cmd) => {
            let a = young(c)?;
            let ctx = ctx(c)?;
            match cmd {
                TargetCmd::First => emit_yf1(c, FirstOrder::build(&a, ctx.n)?.target()),
                TargetCmd::Higher => emit_yf1(c, &higher_order_target(&a, ctx)?.target),
                TargetCmd::Glue => {
                    let fo = FirstOrder::build(&a, ctx.n)?;
                    let equivalent = glue_is_equivalent(&fo.glue, &fo.a_n);
                    emit_json(c, &json!({ "young": a.label(), "n": ctx.n, "s1": fo.glue.s1, "s2": fo.glue.s2,
                        "slope": fo.glue.slope, "tail_exponent": fo.a_n.tail_exponent(), "equivalent_at_infinity": equivalent }))?;
                    Ok(outcome(equivalent))
                }
            }
        }
        Group::Boyd(cmd) => {
            let a = young(c)?;
            match cmd {
                BoydCmd::Index => {
                    let mut est = boyd_upper_index(&a)?;
                    if let Some(n) = c.n {
                        est = est.with_verdicts(&[EmbeddingContext::new(n, c.m)?.critical_index()]);
                    }
                    let mut v = to_value(&est)?;
                    v["young"] = json!(a.label());
                    emit_json(c, &v)
                }
                BoydCmd::Check { alpha, variant } => {
                    let variant = match variant {
                        VariantArg::Ii => Variant::Ii,
                        VariantArg::Iii => Variant::Iii,
                    };
                    let g = growth_condition(&a, *alpha, variant)?;
                    let idx = boyd_upper_index(&a)?;
                    let mut v = to_value(&g)?;
                    v["young"] = json!(a.label());
                    v["index"] = json!(idx.index);
                    v["index_verdict"] = to_value(&idx.verdict(1.0 / alpha))?;
                    emit_json(c, &v)?;
                    Ok(outcome(g.pass))
                }
            }
        }
        Group::Norm(cmd) => {
            let a = young(c)?;
            let (src, spec, sob) = match cmd {
                NormCmd::Lux { src, field } => (src, field, false),
                NormCmd::Sobolev { src, field } => (src, field, true),
            };
            let d = domain(c, src)?;
            let order = if sob { c.m } else { 0 };
            let f = field(&d, spec, order)?;
            if sob {
                let terms = sobolev_terms(&f, &a, c.m)?;
                let total: f64 = terms.iter().map(|t| t.1).sum();
                let rows: Vec<Value> = terms.iter().map(|(al, v)| json!({ "alpha": al, "norm": v })).collect();
                emit_json(c, &json!({ "domain": d.id(), "young": a.label(), "field": spec, "m": c.m,
                    "norm": total, "terms": rows }))
            } else {
                let v = luxemburg_norm(&f, &a)?;
                emit_json(c, &json!({ "domain": d.id(), "young": a.label(), "field": spec, "norm": v }))
            }
        }
        Group::Domain(cmd) => match cmd {
            DomainCmd::Gen { gen } => {
                let d = generate(&gen.parse::<Shape>()?, dim(c)?, spacing(c)?)?;
                match c.format {
                    Some(Format::Json) => emit_json(
                        c,
                        &json!({ "domain": d.id(), "n": d.dim(), "h": d.h(), "dims": &d.dims()[..d.dim()],
                            "measure": d.measure(), "meta": d.meta() }),
                    ),
                    None | Some(Format::Ord1) => emit_text(c, &write_ord1(&d)).map(|_| Outcome::Pass),
                    Some(f) => Err(Error::InvalidArgument(format!("domain gen writes ord1 or json, not {f:?}"))),
                }
            }
            DomainCmd::Density { src, sampling, c_min, radii } => {
                let d = domain(c, src)?;
                let s = parse_sampling(sampling, c.seed)?;
                let rs = radius_grid(d.h(), *c_min, *radii)?;
                let rep = density_constant(&d, &s, &rs)?;
                if c.format == Some(Format::Csv) {
                    let mut out = String::from("point,r,c\n");
                    for (p, row) in rep.points.iter().zip(&rep.matrix) {
                        let p: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                        for (r, v) in rep.radii.iter().zip(row) {
                            out.push_str(&format!("{},{r},{v}\n", p.join(" ")));
                        }
                    }
                    emit_text(c, &out)?;
                } else {
                    emit_json(c, &rep)?;
                }
                Ok(outcome(rep.verdict == DensityVerdict::Holds))
            }
            DomainCmd::Halve { src, x, r } => {
                let d = domain(c, src)?;
                let hv = d.halving_radius(x, *r)?;
                let mut v = to_value(&hv)?;
                v["domain"] = json!(d.id());
                v["x"] = json!(x);
                v["measure_r"] = json!(hv.cells_r as f64 * d.cell_volume());
                v["measure_tilde"] = json!(hv.cells_tilde as f64 * d.cell_volume());
                emit_json(c, &v)
            }
        },
        Group::Verify(VerifyCmd::RatioLemma { r_lo, r_hi }) => {
            let a = young(c)?;
            let ctx = ctx(c)?;
            let target = match ctx.m {
                1 => FirstOrder::build(&a, ctx.n)?.target().clone(),
                _ => higher_order_target(&a, ctx)?.target,
            };
            let rep = ratio_decay_check(&a, &target, ctx, (*r_lo, *r_hi))?;
            let mut v = to_value(&rep)?;
            v["young"] = json!(a.label());
            v["n"] = json!(ctx.n);
            v["m"] = json!(ctx.m);
            emit_json(c, &v)?;
            Ok(outcome(rep.pass))
        }
        Group::Harness(HarnessCmd::Run { src, x, centers, radii, family_centers, family_radii, linear, r0, skip_boyd }) => {
            let a = young(c)?;
            let ctx = ctx(c)?;
            let d = domain(c, src)?;
            let opts = HarnessOptions {
                seed: c.seed,
                family_centers: *family_centers,
                family_radii: *family_radii,
                profile: if *linear { Profile::Linear } else { Profile::Smoothstep },
                r0: *r0,
                enforce_boyd: !skip_boyd,
            };
            let hs = Harness::prepare(&d, &a, ctx, opts)?;
            let pts = if x.is_empty() {
                sample_points(&d, &Sampling::Random { count: *centers, seed: c.seed.wrapping_add(1) })
            } else {
                vec![x.clone()]
            };
            let batch = hs.batch(&pts, radii)?;
            if c.format == Some(Format::Csv) {
                emit_text(c, &steps_csv(&batch.reports))?;
            } else {
                emit_json(c, &batch)?;
            }
            Ok(outcome(batch.pass))
        }
    }
}

fn young(c: &Common) -> Result<YoungFunction> {
    let spec = c.young.as_deref().ok_or_else(|| Error::InvalidArgument("--young is required".into()))?;
    if Path::new(spec).is_file() {
        return read_yf1(&fs::read_to_string(spec)?);
    }
    build_young(&spec.parse::<Family>()?, &Grid::default())
}

fn dim(c: &Common) -> Result<usize> {
    c.n.map(|n| n as usize).ok_or_else(|| Error::InvalidArgument("--n is required".into()))
}

fn ctx(c: &Common) -> Result<EmbeddingContext> {
    EmbeddingContext::new(dim(c)? as u32, c.m)
}

fn spacing(c: &Common) -> Result<f64> {
    c.h.ok_or_else(|| Error::InvalidArgument("--h is required".into()))
}

fn domain(c: &Common, src: &DomainSrc) -> Result<RasterDomain> {
    let d = match (&src.domain, &src.gen) {
        (Some(p), _) => read_ord1(&fs::read_to_string(p)?)?,
        (None, Some(g)) => generate(&g.parse::<Shape>()?, c.n.unwrap_or(2) as usize, spacing(c)?)?,
        (None, None) => return Err(Error::InvalidArgument("give --domain <file> or --gen <shape>".into())),
    };
    if let Some(n) = c.n {
        if n as usize != d.dim() {
            return Err(Error::InvalidArgument(format!("--n {n} but the raster is {}-dimensional", d.dim())));
        }
    }
    Ok(d)
}

fn parse_sampling(s: &str, seed: u64) -> Result<Sampling> {
    match s.split_once(':') {
        None if s == "boundary" => Ok(Sampling::AllBoundaryCells),
        Some(("random", k)) => Ok(Sampling::Random {
            count: k.parse().map_err(|_| Error::InvalidArgument(format!("bad sample count {k:?}")))?,
            seed,
        }),
        _ => Err(Error::InvalidArgument(format!("sampling must be `boundary` or `random:<count>`, got {s:?}"))),
    }
}

fn field<'a>(d: &'a RasterDomain, spec: &str, order: u32) -> Result<SampledFunction<'a>> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> {
        rest.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number {t:?} in {spec:?}"))))
            .collect()
    };
    match kind {
        "const" => {
            let v = nums()?;
            let k = *v.first().ok_or_else(|| Error::InvalidArgument("const needs a value".into()))?;
            SampledFunction::from_fn(d, order, move |_| k)
        }
        "coord" => {
            let i: usize = rest.parse().map_err(|_| Error::InvalidArgument(format!("bad axis {rest:?}")))?;
            if i >= d.dim() {
                return Err(Error::InvalidArgument(format!("axis {i} in dimension {}", d.dim())));
            }
            SampledFunction::from_fn(d, order, move |x| x[i])
        }
        "sqnorm" => SampledFunction::from_fn(d, order, |x| x.iter().map(|v| v * v).sum()),
        "cutoff" => {
            let v = nums()?;
            let n = d.dim();
            if v.len() != n + 2 {
                return Err(Error::InvalidArgument(format!("cutoff needs {n} coordinates, R and R̃")));
            }
            Ok(cutoff(d, &v[..n], v[n], v[n + 1], order.max(1), Profile::Smoothstep)?.field)
        }
        _ => Err(Error::InvalidArgument(format!("unknown field {spec:?}"))),
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn emit_json<T: Serialize>(c: &Common, report: &T) -> Result<Outcome> {
    if matches!(c.format, Some(f) if f != Format::Json) {
        return Err(Error::InvalidArgument(format!("this command writes json, not {:?}", c.format.unwrap())));
    }
    let mut v = to_value(report)?;
    if let Value::Object(map) = &mut v {
        map.entry("seed").or_insert(json!(c.seed));
    }
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    emit_text(c, &text)?;
    Ok(Outcome::Pass)
}

fn emit_yf1(c: &Common, a: &YoungFunction) -> Result<Outcome> {
    match c.format {
        None | Some(Format::Yf1) => {
            emit_text(c, &write_yf1(a))?;
            Ok(Outcome::Pass)
        }
        Some(Format::Json) => emit_json(
            c,
            &json!({ "young": a.label(), "tail_exponent": a.tail_exponent(), "yf1": write_yf1(a) }),
        ),
        Some(f) => Err(Error::InvalidArgument(format!("Young functions are written as yf1 or json, not {f:?}"))),
    }
}

fn emit_text(c: &Common, text: &str) -> Result<()> {
    match &c.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
