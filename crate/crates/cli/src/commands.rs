use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saddlefocus::analysis::{self, DEFAULT_PERIOD_TOL, DEFAULT_SAMPLES, DEFAULT_TRANSIENT};
use saddlefocus::curves::{self, IMPLICIT_RESIDUAL_TOL};
use saddlefocus::map::{self, DEFAULT_ZERO_EPS};
use saddlefocus::sweep::{run_sweep, sentinel};
use saddlefocus::symbolic::{self, embed, normalized_lz};
use saddlefocus::{
    AxisSpec, Branch, CurveSet, FieldKind, FieldSpec, ImplicitForm, MapError, MapParams, SeedRule, Status, Variant,
};

use crate::colormap::Colormap;
use crate::curvefile;
use crate::gridfile::GridFile;
use crate::raster::{self, ImageFormat};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Ok = 0,
    VerifyFailed = 1,
    Usage = 2,
    Io = 3,
    NotFound = 4,
    OverlayMismatch = 5,
}

#[derive(Debug)]
struct Failure {
    exit: Exit,
    msg: String,
}

fn usage(msg: impl ToString) -> Failure {
    Failure { exit: Exit::Usage, msg: msg.to_string() }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { exit: Exit::Io, msg: format!("{}: {e}", path.display()) }
}

fn not_found(msg: impl ToString) -> Failure {
    Failure { exit: Exit::NotFound, msg: msg.to_string() }
}

type Outcome = Result<Exit, Failure>;

#[derive(Debug, Parser)]
#[command(name = "sfmap", version, about = "Sweeps, curves and heatmaps for saddle-focus interval maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a field over a two-parameter lattice and write an HSFG1 grid.
    Sweep(SweepArgs),
    /// Write bifurcation curves as CSV.
    Curves(CurvesArgs),
    /// Render a grid as a PPM or PGM heatmap.
    Render(RenderArgs),
    /// Orbit diagram over a rho range as `rho,x` CSV.
    Orbit(OrbitArgs),
    /// Cobweb segments of one orbit as CSV.
    Cobweb(CobwebArgs),
    /// Symbolic itinerary of the unstable separatrix.
    Encode(EncodeArgs),
    /// Lyapunov exponent and period of one orbit.
    Lyapunov(LyapunovArgs),
    /// Run residual and membership checks, printing PASS/FAIL lines.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Map variant: symmetric or one-sided.
    #[arg(long, default_value = "symmetric")]
    variant: Variant,
    /// Saddle index (ignored when bound to a sweep axis).
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    rho: f64,
    /// Splitting parameter (ignored when bound to a sweep axis).
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    mu: f64,
    /// Focal frequency.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    omega: f64,
    /// Phase inside the cosine.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
}

impl MapArgs {
    fn params(&self) -> Result<MapParams, Failure> {
        MapParams::new(self.rho, self.mu, self.omega, self.phi, self.variant).map_err(usage)
    }
}

/// `--field` value: `iterate[:N]`, `embedding[:LEN]`, `lyapunov`, `lz[:LEN]`
/// or `period[:MAX]`. A suffix overrides the matching knob.
#[derive(Debug, Clone, Copy)]
struct FieldArg {
    name: FieldName,
    n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FieldName {
    Iterate,
    Embedding,
    Lyapunov,
    Lz,
    Period,
}

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let name = match head {
            "iterate" => FieldName::Iterate,
            "embedding" => FieldName::Embedding,
            "lyapunov" => FieldName::Lyapunov,
            "lz" => FieldName::Lz,
            "period" => FieldName::Period,
            _ => return Err(format!("unknown field `{s}` (iterate[:N], embedding[:LEN], lyapunov, lz[:LEN], period[:MAX])")),
        };
        let n = match tail {
            None => None,
            Some(_) if name == FieldName::Lyapunov => return Err("lyapunov takes --le-transient/--le-samples instead of a suffix".into()),
            Some(t) => match t.parse::<usize>() {
                Ok(v) if v > 0 => Some(v),
                _ => return Err(format!("bad count in `{s}`")),
            },
        };
        Ok(FieldArg { name, n })
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Field to evaluate: iterate[:N], embedding[:LEN], lyapunov, lz[:LEN], period[:MAX].
    #[arg(long)]
    field: FieldArg,
    /// Horizontal axis, PARAM:MIN:MAX:COUNT with PARAM in rho, mu, omega, phi.
    #[arg(long, allow_hyphen_values = true)]
    x: AxisSpec,
    /// Vertical axis, PARAM:MIN:MAX:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    y: AxisSpec,
    /// Departure branch of the separatrix.
    #[arg(long, default_value = "positive")]
    branch: Branch,
    /// Output grid file.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads [default: available cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Map applications for the iterate field.
    #[arg(long, default_value_t = 1)]
    iter_n: usize,
    /// Symbols per itinerary [default: 64 for embedding, 5000 for lz].
    #[arg(long)]
    seq_len: Option<usize>,
    /// Lyapunov samples after the transient.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    le_samples: usize,
    /// Discarded iterates before Lyapunov sampling.
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    le_transient: usize,
    /// Largest period tested by the period field.
    #[arg(long, default_value_t = 16)]
    max_period: usize,
    /// States closer than this to the origin count as having reached it.
    #[arg(long, default_value_t = DEFAULT_ZERO_EPS)]
    zero_eps: f64,
}

impl SweepArgs {
    fn kind(&self) -> Result<FieldKind, Failure> {
        let positive = |v: usize, what: &str| if v == 0 { Err(usage(format!("{what} must be at least 1"))) } else { Ok(v) };
        let f = self.field;
        Ok(match f.name {
            FieldName::Iterate => FieldKind::IterateValue(positive(f.n.unwrap_or(self.iter_n), "--iter-n")?),
            FieldName::Embedding => FieldKind::SymbolEmbedding(positive(f.n.or(self.seq_len).unwrap_or(64), "--seq-len")?),
            FieldName::Lz => FieldKind::LzComplexity(positive(f.n.or(self.seq_len).unwrap_or(5000), "--seq-len")?),
            FieldName::Period => FieldKind::Period(positive(f.n.unwrap_or(self.max_period), "--max-period")?),
            FieldName::Lyapunov => {
                FieldKind::Lyapunov { transient: self.le_transient, samples: positive(self.le_samples, "--le-samples")? }
            }
        })
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn check_branch(variant: Variant, branch: Branch) -> Result<(), Failure> {
    if variant == Variant::OneSided && branch == Branch::Negative {
        return Err(usage("the one-sided map only leaves the origin along the positive branch"));
    }
    Ok(())
}

fn check_zero_eps(z: f64) -> Result<(), Failure> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--zero-eps must be positive, got {z}")))
    }
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Outcome {
    let base = a.map.params()?;
    check_branch(base.variant(), a.branch)?;
    check_zero_eps(a.zero_eps)?;
    let spec = FieldSpec::new(a.kind()?, base).with_branch(a.branch).with_zero_eps(a.zero_eps);
    let workers = a.workers.unwrap_or_else(default_workers);
    let start = Instant::now();
    let grid = run_sweep(a.x, a.y, spec, workers).map_err(usage)?;
    let wall = start.elapsed().as_secs_f64();
    let counts = grid.sentinel_counts();
    let file = GridFile::new(grid);
    fs::write(&a.out, file.to_bytes()).map_err(|e| io_fail(&a.out, e))?;
    let _ = writeln!(
        out,
        "sweep {} {}x{}: cells={} diverged={} reached_zero={} undefined={} wall={wall:.3}s out={}",
        spec.kind,
        a.x.count,
        a.y.count,
        a.x.count * a.y.count,
        counts.diverged,
        counts.reached_zero,
        counts.undefined,
        a.out.display()
    );
    Ok(Exit::Ok)
}

/// `LO:HI:N`
#[derive(Debug, Clone, Copy)]
struct Range(f64, f64, usize);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let p: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected LO:HI:N, got `{s}`");
        if p.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = p[0].parse().map_err(|_| bad())?;
        let hi: f64 = p[1].parse().map_err(|_| bad())?;
        let n: usize = p[2].parse().map_err(|_| bad())?;
        if !(lo < hi) || n < 2 {
            return Err(format!("need LO < HI and N >= 2 in `{s}`"));
        }
        Ok(Range(lo, hi, n))
    }
}

/// `LO:HI`
#[derive(Debug, Clone, Copy)]
struct Pair(f64, f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected LO:HI, got `{s}`");
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let lo: f64 = a.parse().map_err(|_| bad())?;
        let hi: f64 = b.parse().map_err(|_| bad())?;
        if !(lo < hi) {
            return Err(format!("need LO < HI in `{s}`"));
        }
        Ok(Pair(lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CurveKindArg {
    GammaG,
    GammaP,
    BelyakovExplicit,
    BelyakovImplicit,
    Homoclinic(usize),
}

impl FromStr for CurveKindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "gamma-g" => CurveKindArg::GammaG,
            "gamma-p" => CurveKindArg::GammaP,
            "belyakov-explicit" => CurveKindArg::BelyakovExplicit,
            "belyakov-implicit" => CurveKindArg::BelyakovImplicit,
            _ => match s.strip_prefix("homoclinic:").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 2 => CurveKindArg::Homoclinic(n),
                _ => {
                    return Err(format!(
                        "unknown kind `{s}` (gamma-g, gamma-p, belyakov-explicit, belyakov-implicit, homoclinic:N with N >= 2)"
                    ))
                }
            },
        })
    }
}

#[derive(Debug, Args)]
struct CurvesArgs {
    /// gamma-g, gamma-p, belyakov-explicit, belyakov-implicit or homoclinic:N.
    #[arg(long)]
    kind: CurveKindArg,
    #[arg(long, default_value_t = 10.0)]
    omega: f64,
    /// Largest tangency index k.
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// rho lattice LO:HI:N.
    #[arg(long, default_value = "0.2:2:200")]
    rho: Range,
    /// mu search interval for implicit tangencies.
    #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
    mu_bracket: Pair,
    /// Implicit system: `published` as commonly stated, or `map` (image of the critical point).
    #[arg(long, default_value = "published")]
    form: ImplicitForm,
    /// Grid of F^(N-1)(mu) values for homoclinic:N.
    #[arg(long)]
    from_grid: Option<PathBuf>,
    /// Largest accepted |F^(N-1)(mu)| at a contour vertex.
    #[arg(long, default_value_t = 1e-9)]
    contour_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

fn read_grid(path: &Path) -> Result<GridFile, Failure> {
    let bytes = fs::read(path).map_err(|e| io_fail(path, e))?;
    GridFile::from_bytes(&bytes).map_err(|e| io_fail(path, e))
}

fn curves_cmd(a: CurvesArgs, out: &mut dyn Write) -> Outcome {
    let range = (a.rho.0, a.rho.1, a.rho.2);
    if !(a.omega > 0.0) {
        return Err(usage(format!("--omega must be positive, got {}", a.omega)));
    }
    let set = match a.kind {
        CurveKindArg::GammaG | CurveKindArg::GammaP => {
            let c = if a.kind == CurveKindArg::GammaG {
                curves::gamma_g_curve(range)
            } else {
                curves::gamma_p_curve(a.omega, range)
            }
            .map_err(usage)?;
            if c.points.is_empty() {
                return Err(usage("the gamma bounds need rho > 1 somewhere in --rho"));
            }
            CurveSet { curves: vec![c] }
        }
        CurveKindArg::BelyakovExplicit => curves::belyakov_explicit_curves(a.omega, a.k_max, range).map_err(usage)?,
        CurveKindArg::BelyakovImplicit => {
            let set = curves::belyakov_implicit_curves(a.form, a.omega, a.k_max, range, (a.mu_bracket.0, a.mu_bracket.1))
                .map_err(usage)?;
            let missing: Vec<usize> =
                (0..=a.k_max).filter(|k| !set.curves.iter().any(|c| c.label.index == Some(*k))).collect();
            if !missing.is_empty() {
                return Err(not_found(format!(
                    "no implicit tangency root in mu {}:{} for k = {missing:?}",
                    a.mu_bracket.0, a.mu_bracket.1
                )));
            }
            set
        }
        CurveKindArg::Homoclinic(n) => {
            let path = a.from_grid.as_deref().ok_or_else(|| usage("homoclinic:N needs --from-grid"))?;
            let grid = read_grid(path)?.grid;
            if grid.field.kind != FieldKind::IterateValue(n - 1) {
                return Err(usage(format!("homoclinic:{n} needs an iterate:{} grid, got {}", n - 1, grid.field.kind)));
            }
            match curves::extract_zero_contours(&grid, a.contour_tol) {
                Ok(s) if !s.is_empty() => s,
                Ok(_) | Err(MapError::EmptyResult) => return Err(not_found("no zero contour in the grid")),
                Err(e) => return Err(usage(e)),
            }
        }
    };
    let mut buf = Vec::new();
    curvefile::write_curves(&set, &mut buf).map_err(|e| io_fail(&a.out, e))?;
    fs::write(&a.out, buf).map_err(|e| io_fail(&a.out, e))?;
    let _ = writeln!(out, "curves: {} polylines, {} points -> {}", set.len(), set.points().count(), a.out.display());
    Ok(Exit::Ok)
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    grid: PathBuf,
    /// Output image; the extension selects PPM (.ppm) or PGM (.pgm).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "diverging")]
    colormap: Colormap,
    /// Value range mapped onto the colormap [default: data extent, symmetric for diverging].
    #[arg(long, allow_hyphen_values = true)]
    clip: Option<Pair>,
    /// Curve CSV drawn on top; repeatable.
    #[arg(long)]
    overlay: Vec<PathBuf>,
}

fn render_cmd(a: RenderArgs, out: &mut dyn Write) -> Outcome {
    let format = ImageFormat::from_path(&a.out).ok_or_else(|| usage("--out must end in .ppm or .pgm"))?;
    let grid = read_grid(&a.grid)?.grid;
    let clip = a.clip.map(|p| (p.0, p.1)).unwrap_or_else(|| raster::auto_clip(&grid, a.colormap));
    let mut img = raster::render(&grid, a.colormap, clip);
    for path in &a.overlay {
        let text = fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
        let set = curvefile::parse(&text).map_err(|e| io_fail(path, e))?;
        raster::overlay(&mut img, &grid, &set)
            .map_err(|e| Failure { exit: Exit::OverlayMismatch, msg: format!("{}: {e}", path.display()) })?;
    }
    fs::write(&a.out, img.to_bytes(format)).map_err(|e| io_fail(&a.out, e))?;
    let _ = writeln!(out, "render: {}x{} clip={}:{} -> {}", img.width, img.height, clip.0, clip.1, a.out.display());
    Ok(Exit::Ok)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Seed {
    FromMu,
    Continuation,
}

#[derive(Debug, Args)]
struct OrbitArgs {
    #[command(flatten)]
    map: MapArgs,
    /// rho lattice LO:HI:N (replaces --rho).
    #[arg(long = "rho-range", alias = "rho-lattice")]
    rho_range: Range,
    #[arg(long, value_enum, default_value = "from-mu")]
    seed: Seed,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    /// Post-transient states kept per column.
    #[arg(long, default_value_t = 64)]
    keep: usize,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: String, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_fail(p, e))?,
        None => out.write_all(text.as_bytes()).map_err(|e| io_fail(Path::new("<stdout>"), e))?,
    }
    Ok(Exit::Ok)
}

fn status_code(s: Status) -> f64 {
    match s {
        Status::Diverged => sentinel::DIVERGED,
        Status::ReachedZero => sentinel::REACHED_ZERO,
        _ => sentinel::UNDEFINED,
    }
}

fn orbit_cmd(a: OrbitArgs, out: &mut dyn Write) -> Outcome {
    let base = a.map.params()?;
    let rule = match a.seed {
        Seed::FromMu => SeedRule::FromMu,
        Seed::Continuation => SeedRule::Continuation,
    };
    let cols = analysis::orbit_diagram(&base, (a.rho_range.0, a.rho_range.1, a.rho_range.2), rule, a.transient, a.keep)
        .map_err(usage)?;
    let mut text = String::from("rho,x\n");
    for c in cols {
        if c.samples.is_empty() {
            // Terminated columns carry the grid sentinel code.
            text.push_str(&format!("{},{}\n", c.rho, status_code(c.status)));
        }
        for x in c.samples {
            text.push_str(&format!("{},{x}\n", c.rho));
        }
    }
    emit(text, a.out.as_deref(), out)
}

#[derive(Debug, Args)]
struct CobwebArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Initial state [default: mu].
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Number of map steps.
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cobweb_cmd(a: CobwebArgs, out: &mut dyn Write) -> Outcome {
    let p = a.map.params()?;
    let x0 = a.x0.unwrap_or(p.mu());
    if x0 == 0.0 || a.n == 0 {
        return Err(usage("cobweb needs a nonzero --x0 and --n >= 1"));
    }
    let mut text = String::from("x_from,y_from,x_to,y_to\n");
    for s in analysis::cobweb(&p, x0, a.n) {
        text.push_str(&format!("{},{},{},{}\n", s.from.0, s.from.1, s.to.0, s.to.1));
    }
    emit(text, a.out.as_deref(), out)
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value = "positive")]
    branch: Branch,
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_ZERO_EPS)]
    zero_eps: f64,
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::MaxIterations => "max_iterations",
        Status::ReachedZero => "reached_zero",
        Status::Diverged => "diverged",
        Status::LeftDomain => "left_domain",
    }
}

fn encode_cmd(a: EncodeArgs, out: &mut dyn Write) -> Outcome {
    let p = a.map.params()?;
    check_branch(p.variant(), a.branch)?;
    check_zero_eps(a.zero_eps)?;
    let seq = symbolic::encode(&p, a.branch, a.max_len, a.zero_eps).map_err(usage)?;
    let lz = normalized_lz(&seq).map(|v| v.to_string()).unwrap_or_else(|_| "undefined".into());
    let _ = writeln!(out, "bits={}", seq.to_bit_string());
    let _ = writeln!(out, "terminated={}", seq.terminated);
    let _ = writeln!(out, "status={}", status_name(seq.source_status));
    let _ = writeln!(out, "embedding={}", embed(&seq));
    let _ = writeln!(out, "normalized_lz={lz}");
    Ok(Exit::Ok)
}

#[derive(Debug, Args)]
struct LyapunovArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Initial state [default: mu].
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    max_period: usize,
}

fn lyapunov_cmd(a: LyapunovArgs, out: &mut dyn Write) -> Outcome {
    let p = a.map.params()?;
    let x0 = a.x0.unwrap_or(p.mu());
    let le = analysis::lyapunov(&p, x0, a.transient, a.samples).map_err(usage)?;
    let period = analysis::detect_period(&p, x0, a.transient, a.max_period, DEFAULT_PERIOD_TOL);
    let _ = writeln!(out, "lyapunov={le}");
    let _ = writeln!(out, "period={}", period.map(|v| v.to_string()).unwrap_or_else(|| "none".into()));
    Ok(Exit::Ok)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Belyakov,
    Implicit,
    Gamma,
    Lz,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 10.0)]
    omega: f64,
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Comma-separated rho values checked by the tangency suites.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.7,1.0,1.5")]
    rho: Vec<f64>,
    /// Implicit system checked by the implicit suite.
    #[arg(long, default_value = "published")]
    form: ImplicitForm,
}

struct Report<'a> {
    out: &'a mut dyn Write,
    failed: usize,
}

impl Report<'_> {
    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.failed += 1;
        }
        let _ = writeln!(self.out, "{} {what}", if ok { "PASS" } else { "FAIL" });
    }
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    if !(a.omega > 0.0) {
        return Err(usage(format!("--omega must be positive, got {}", a.omega)));
    }
    let mut r = Report { out, failed: 0 };
    match a.suite {
        Suite::Belyakov => verify_belyakov(&a, &mut r)?,
        Suite::Implicit => verify_implicit(&a, &mut r),
        Suite::Gamma => verify_gamma(&a, &mut r)?,
        Suite::Lz => verify_lz(&mut r),
    }
    Ok(if r.failed == 0 { Exit::Ok } else { Exit::VerifyFailed })
}

fn verify_belyakov(a: &VerifyArgs, r: &mut Report) -> Result<(), Failure> {
    for &rho in &a.rho {
        for k in 0..=a.k_max {
            let t = curves::belyakov_explicit(rho, a.omega, k);
            let p = MapParams::symmetric(rho, t.mu, a.omega).map_err(usage)?;
            let d = map::derivative(&p, t.x_c).map_err(usage)?.abs();
            let f = map::step(&p, t.x_c).map_err(usage)?.abs();
            let half = (t.mu > 0.0) == (k % 2 == 0);
            r.check(
                d < 1e-9 && f < 1e-9 && half,
                format!("belyakov rho={rho} omega={} k={k} mu={:e} |f'(x_c)|={d:.3e} |f(x_c)|={f:.3e}", a.omega, t.mu),
            );
        }
    }
    Ok(())
}

fn verify_implicit(a: &VerifyArgs, r: &mut Report) {
    for &rho in &a.rho {
        for k in 0..=a.k_max {
            // Even k below the axis, odd k above.
            let bracket = if k % 2 == 0 { (-1.0, -1e-12) } else { (1e-12, 1.0) };
            let head = format!("implicit[{}] rho={rho} omega={} k={k}", a.form.as_str(), a.omega);
            match curves::belyakov_implicit_with(a.form, rho, a.omega, k, bracket) {
                None => r.check(false, format!("{head} no root in mu {}:{}", bracket.0, bracket.1)),
                Some(mu) => {
                    let res = curves::implicit_residual(a.form, rho, a.omega, k, mu).abs();
                    let defect = curves::second_image_defect(rho, a.omega, k, mu);
                    r.check(
                        res < IMPLICIT_RESIDUAL_TOL && defect < 1e-8,
                        format!("{head} mu={mu:e} residual={res:.3e} |F^2(x_c)|={defect:.3e}"),
                    );
                }
            }
        }
    }
}

fn verify_gamma(a: &VerifyArgs, r: &mut Report) -> Result<(), Failure> {
    for rho in [1.1, 1.5, 2.0, 3.0, 4.0] {
        let (gg, gp) = (curves::gamma_g(rho).map_err(usage)?, curves::gamma_p(rho, a.omega).map_err(usage)?);
        r.check(gp <= gg, format!("gamma order rho={rho} omega={} gamma_p={gp:e} gamma_g={gg:e}", a.omega));
        for frac in [0.25, 0.5, 0.9] {
            let mu = frac * gp;
            let p = MapParams::symmetric(rho, mu, a.omega).map_err(usage)?;
            let period = analysis::detect_period(&p, mu, 20_000, 16, DEFAULT_PERIOD_TOL);
            let beta = map::invariant_bound(&p).unwrap_or(f64::NAN);
            let slope = analysis::find_fixed_point(&p, 1e-12, beta)
                .and_then(|x| map::derivative(&p, x).ok())
                .map_or(f64::NAN, f64::abs);
            r.check(
                period == Some(1) && slope < 1.0,
                format!("purple rho={rho} mu={mu:e} period={period:?} |f'(x*)|={slope:.3e}"),
            );
        }
        if gg > gp {
            let mu = 0.5 * (gp + gg);
            let p = MapParams::symmetric(rho, mu, a.omega).map_err(usage)?;
            let beta = map::invariant_bound(&p).unwrap_or(f64::NAN);
            let t = map::iterate(&p, mu, 5000, DEFAULT_ZERO_EPS);
            let peak = t.points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            r.check(peak <= beta, format!("green rho={rho} mu={mu:e} max|x|={peak:e} beta={beta:e}"));
        }
    }
    Ok(())
}

fn verify_lz(r: &mut Report) {
    let paper = symbolic::SymbolSequence::from_bits(vec![0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1]);
    let c = symbolic::lempel_ziv(&paper).unwrap_or(0);
    r.check(c == 6, format!("lz 010110010111 -> {c} (expected 6)"));
    let ones = symbolic::SymbolSequence::from_bits(vec![1; 4]);
    let c = symbolic::lempel_ziv(&ones).unwrap_or(0);
    r.check(c == 2, format!("lz 1111 -> {c} (expected 2)"));
    let n = normalized_lz(&paper).unwrap_or(f64::NAN);
    r.check((n - 1.2425).abs() < 1e-4, format!("normalized lz 010110010111 -> {n:.6} (expected 1.2425)"));
}

/// Run the command line `args` (program name first), writing reports to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                Exit::Usage as u8
            } else {
                let _ = write!(out, "{text}");
                Exit::Ok as u8
            };
        }
    };
    let outcome = match cli.cmd {
        Command::Sweep(a) => sweep(a, out),
        Command::Curves(a) => curves_cmd(a, out),
        Command::Render(a) => render_cmd(a, out),
        Command::Orbit(a) => orbit_cmd(a, out),
        Command::Cobweb(a) => cobweb_cmd(a, out),
        Command::Encode(a) => encode_cmd(a, out),
        Command::Lyapunov(a) => lyapunov_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
    };
    match outcome {
        Ok(code) => code as u8,
        Err(f) => {
            let _ = writeln!(err, "sfmap: {}", f.msg);
            f.exit as u8
        }
    }
}
