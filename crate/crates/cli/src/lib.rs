//! Command-line front end for `torus-orbits`.
//!
//! [`dispatch`] parses an argument vector, runs one subcommand and returns
//! the process exit code: 0 on success, 1 for usage errors, 2 when an input
//! violates a precondition (or cannot be parsed or written), 3 when the
//! fixed-point precision is exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use torus_orbits::arith::{bits_for, parse_point, parse_rational, Rat, TorusPoint};
use torus_orbits::construct::{check_preimage_property, track_preimages, RhombusSet};
use torus_orbits::density::{
    best_approx_profile, covering_radius_estimate, grid_coverage, littlewood_track, Weight,
};
use torus_orbits::directions::{estimate_der, estimate_der_q, union_directions, DEFAULT_THETA_TOL};
use torus_orbits::geometry::{
    apply_matrix, covering_radius, direction_to_horizontal, line_contains, rationalize_slope,
    Direction, RationalLine, SlopeVerdict,
};
use torus_orbits::orbit::{classify, collect_orbit_parallel, rational_closure, OrbitSample};
use torus_orbits::raster::{render_heatmap, rhombus_mask};
use torus_orbits::report::{self, Backend, RunManifest};
use torus_orbits::selection::{select_pair, verify_pair};
use torus_orbits::smooth::{density_threshold, log_gap, ExpTriple, Generators};
use torus_orbits::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "torbit", version, about = "Orbits of x2, x3, x5 on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Orbit start and enumeration bound, shared by the orbit-based subcommands.
#[derive(Args, Debug, Clone)]
struct OrbitArgs {
    /// Start point `x,y`; each side is `p/q`, a decimal, `sqrt(n)` or `sqrt(n)+p/q`.
    #[arg(long)]
    start: String,
    /// Largest multiplier, e.g. `1e9`.
    #[arg(long, default_value = "1e6")]
    smax: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Generator set.
    #[arg(long, default_value = "2,3,5")]
    gens: String,
    /// Fixed-point bits; derived from `--smax` and `--err-target` when absent.
    #[arg(long)]
    bits: Option<u32>,
    /// Largest acceptable error of any sample.
    #[arg(long, default_value_t = 1e-15)]
    err_target: f64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the table to this file (plus a `.manifest` sidecar) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit samples as CSV.
    Orbit(OrbitArgs),
    /// Exact orbit closure of a rational start.
    Closure {
        #[arg(long)]
        start: String,
        #[command(flatten)]
        common: Common,
    },
    /// Finite, line union or dense.
    Classify {
        #[arg(long)]
        start: String,
        /// Coefficient bound of the relation search.
        #[arg(long = "C", default_value_t = 50)]
        c: u32,
        /// Residual tolerance; defaults to a value safely above the certified error.
        #[arg(long)]
        tau: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Largest gaps of the log-semigroup in windows `[M, M+1]`.
    Gaps {
        /// Comma-separated window starts.
        #[arg(long = "M", default_value = "10,100,1000")]
        m: String,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest `M` after which every window gap is at most `delta`.
    Threshold {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        mcap: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Pick two of {2,3,5} that keep `r` outside `Z/N`.
    Lemma235 {
        #[arg(long)]
        r: String,
        #[arg(long = "N")]
        n: String,
        /// Also check all exponents up to this bound exactly.
        #[arg(long)]
        verify: Option<u32>,
    },
    /// Facts about a rational line, or rationalize a slope.
    Line {
        /// `a,b,c` for `a x + b y = c mod 1`.
        #[arg(long)]
        line: Option<String>,
        /// Point to test against the line.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value = "0")]
        tol: String,
        /// Vector `vx,vy` to rationalize.
        #[arg(long)]
        slope: Option<String>,
        #[arg(long = "D", default_value_t = 8)]
        d: u64,
        #[arg(long, default_value_t = 1e-3)]
        angle_tol: f64,
    },
    /// Unimodular change of coordinates sending a direction to (1,0).
    Chcoords {
        #[arg(long)]
        direction: String,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 128)]
        bits: u32,
    },
    /// Local direction sets at rational anchors.
    Dirset {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long, default_value_t = 5)]
        qmax: u64,
        /// Annulus radius.
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_THETA_TOL)]
        theta_tol: f64,
        /// Single anchor instead of all rationals up to `--qmax`.
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Grid coverage and covering radius.
    Density {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long, default_value_t = 8)]
        grid: u32,
        /// Also write the histogram as a `.pgm` or `.ppm` image.
        #[arg(long)]
        heatmap: Option<PathBuf>,
    },
    /// Best simultaneous approximation of a target.
    Approx {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long)]
        target: String,
        /// Extra increasing checkpoints below `--smax`.
        #[arg(long)]
        checkpoints: Option<String>,
    },
    /// Weighted products `f(k) ||S x|| ||S y||` with running minima.
    Littlewood {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long = "f", default_value = "log-product")]
        f: String,
        /// Only rows where the multiplier crosses a power of ten.
        #[arg(long)]
        decades: bool,
    },
    /// Randomized check of the pre-image property of `E`.
    Ppcheck {
        #[arg(long, default_value = "1e-5")]
        delta: String,
        /// One or more comma-separated `N`.
        #[arg(long = "N")]
        n: String,
        #[arg(long, default_value = "1e6")]
        samples: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Walk an orbit sample back to its start.
    Track {
        #[arg(long)]
        start: String,
        /// Exponents `k2,k3,k5`.
        #[arg(long)]
        triple: String,
        #[arg(long, default_value = "1e-5")]
        delta: String,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Image of the rhombus chain, or of an orbit histogram when `--start` is given.
    Render {
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value = "1e6")]
        smax: String,
        #[arg(long, default_value_t = 512)]
        grid: u32,
        #[arg(long, default_value = "0.02")]
        delta: String,
        #[arg(long = "N", default_value_t = 5)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Command failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_precision() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs `argv` (including the program name) and returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut ctx = Ctx {
        argv: argv.get(1..).map(<[String]>::to_vec).unwrap_or_default(),
        started: Instant::now(),
        out,
    };
    match run(cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Ctx<'a> {
    argv: Vec<String>,
    started: Instant,
    out: &'a mut dyn Write,
}

/// What a table run used, for the manifest.
struct Provenance {
    backend: Backend,
    bits: Option<u32>,
    s_max: Option<String>,
    seed: Option<u64>,
}

impl Provenance {
    fn none() -> Self {
        Provenance {
            backend: Backend::Exact,
            bits: None,
            s_max: None,
            seed: None,
        }
    }

    fn of(start: &TorusPoint, s_max: &BigUint) -> Self {
        Provenance {
            backend: if start.is_exact() { Backend::Exact } else { Backend::Fixed },
            bits: start.bits(),
            s_max: Some(s_max.to_string()),
            seed: None,
        }
    }
}

impl Ctx<'_> {
    fn print(&mut self, text: &str) -> Outcome {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write output: {e}")))
    }

    fn manifest(&self, prov: &Provenance) -> RunManifest {
        RunManifest {
            subcommand: self.argv.first().cloned().unwrap_or_default(),
            args: self.argv.clone(),
            backend: prov.backend,
            bits: prov.bits,
            s_max: prov.s_max.clone(),
            seed: prov.seed,
            version: VERSION.to_string(),
            wall_time: self.started.elapsed(),
        }
    }

    fn write_manifest(&self, path: &Path, prov: &Provenance) -> Outcome {
        let mut side = path.as_os_str().to_owned();
        side.push(".manifest");
        write_file(Path::new(&side), self.manifest(prov).to_text().as_bytes())
    }

    /// Table to `--out` (with manifest) or stdout.
    fn emit(&mut self, table: &str, out: Option<&Path>, prov: &Provenance) -> Outcome {
        match out {
            Some(path) => {
                write_file(path, table.as_bytes())?;
                self.write_manifest(path, prov)
            }
            None => self.print(table),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| {
        Failure::from(Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    })
}

/// Integer count such as `1000`, `1e9` or `10^6`.
fn parse_count(text: &str) -> Result<BigUint, Failure> {
    let t = text.trim();
    if let Some((b, e)) = t.split_once('^') {
        let b: BigUint = b.trim().parse().map_err(|_| usage(format!("bad integer `{t}`")))?;
        let e: u32 = e.trim().parse().map_err(|_| usage(format!("bad integer `{t}`")))?;
        return Ok(b.pow(e));
    }
    let r = parse_rational(t)?;
    if !r.is_integer() {
        return Err(usage(format!("`{t}` is not an integer")));
    }
    r.to_integer()
        .to_biguint()
        .ok_or_else(|| usage(format!("`{t}` is negative")))
}

fn parse_u64(text: &str) -> Result<u64, Failure> {
    parse_count(text)?
        .to_u64()
        .ok_or_else(|| usage(format!("`{text}` is too large")))
}

fn parse_gens(text: &str) -> Result<Generators, Failure> {
    Ok(text.parse()?)
}

fn bits(common: &Common, s_max: &BigUint) -> Result<u32, Failure> {
    if let Some(b) = common.bits {
        return Ok(b);
    }
    if !(common.err_target > 0.0 && common.err_target < 1.0) {
        return Err(usage("--err-target must lie in (0, 1)"));
    }
    Ok(bits_for(s_max, common.err_target))
}

fn orbit_setup(a: &OrbitArgs) -> Result<(TorusPoint, Generators, BigUint), Failure> {
    let s_max = parse_count(&a.smax)?;
    if s_max.is_zero() {
        return Err(usage("--smax must be at least 1"));
    }
    let gens = parse_gens(&a.common.gens)?;
    let start = parse_point(&a.start, bits(&a.common, &s_max)?)?;
    Ok((start, gens, s_max))
}

fn samples(a: &OrbitArgs) -> Result<(TorusPoint, Generators, BigUint, Vec<OrbitSample>), Failure> {
    let (start, gens, s_max) = orbit_setup(a)?;
    let s = collect_orbit_parallel(&start, &gens, &s_max, a.common.threads)?;
    Ok((start, gens, s_max, s))
}

fn parse_delta(text: &str) -> Result<Rat, Failure> {
    Ok(Rat::from_big_rational(&parse_rational(text)?))
}

fn run(cmd: Command, ctx: &mut Ctx<'_>) -> Outcome {
    match cmd {
        Command::Orbit(a) => {
            let (start, gens, s_max, s) = samples(&a)?;
            ctx.emit(&report::orbit_csv(&s, &gens), a.common.out.as_deref(), &Provenance::of(&start, &s_max))
        }
        Command::Closure { start, common } => {
            let gens = parse_gens(&common.gens)?;
            let p = parse_point(&start, 64)?;
            if !p.is_exact() {
                return Err(usage("closure needs a rational start such as 1/2,1/3"));
            }
            let pts = rational_closure(&p, &gens)?;
            ctx.emit(&report::points_csv(&pts), common.out.as_deref(), &Provenance::none())
        }
        Command::Classify { start, c, tau, common } => {
            let gens = parse_gens(&common.gens)?;
            let b = common.bits.unwrap_or(128);
            let p = parse_point(&start, b)?;
            let tau = match tau {
                Some(t) => parse_rational(&t)?,
                None => default_tau(&p, c),
            };
            let verdict = classify(&p, &gens, c, &tau)?;
            ctx.print(&format!("{verdict}\n"))
        }
        Command::Gaps { m, common } => {
            let gens = parse_gens(&common.gens)?;
            let mut reps = Vec::new();
            for w in m.split(',') {
                let v: f64 = w.trim().parse().map_err(|_| usage(format!("bad window `{w}`")))?;
                reps.push(log_gap(v, &gens)?);
            }
            ctx.emit(&report::gaps_csv(&reps), common.out.as_deref(), &Provenance::none())
        }
        Command::Threshold { delta, mcap, common } => {
            let gens = parse_gens(&common.gens)?;
            let line = match density_threshold(delta, &gens, mcap)? {
                Some(m) => format!("M={m}\n"),
                None => format!("not-found (M_cap={mcap})\n"),
            };
            ctx.print(&line)
        }
        Command::Lemma235 { r, n, verify } => {
            let r = Rat::from_big_rational(&parse_rational(&r)?);
            let n = parse_count(&n)?;
            let sel = select_pair(&r, &n)?;
            let mut line = sel.to_string();
            if let Some(bound) = verify {
                let ok = verify_pair(&r, &n, sel.a, sel.b, bound);
                line.push_str(&format!(" verified={ok} bound={bound}"));
            }
            ctx.print(&format!("{line}\n"))
        }
        Command::Line { line, point, tol, slope, d, angle_tol } => run_line(ctx, line, point, &tol, slope, d, angle_tol),
        Command::Chcoords { direction, point, bits } => {
            let t: Direction = direction.parse()?;
            let m = direction_to_horizontal(t);
            let mut text = format!("matrix={m}\n");
            if let Some(p) = point {
                let p = parse_point(&p, bits)?;
                text.push_str(&format!("image={}\n", apply_matrix(&m, &p)?));
            }
            ctx.print(&text)
        }
        Command::Dirset { orbit, qmax, eps, theta_tol, anchor } => {
            let (start, _, s_max, s) = samples(&orbit)?;
            let est = match anchor {
                Some(a) => {
                    let a = parse_point(&a, 64)?;
                    let e = estimate_der(&a, &s, eps, theta_tol)?;
                    if e.is_empty() { vec![] } else { vec![(a, e)] }
                }
                None => estimate_der_q(&s, qmax, eps, theta_tol, orbit.common.threads)?,
            };
            let table = report::dirset_csv(&est);
            let dirs = union_directions(&est);
            ctx.emit(&table, orbit.common.out.as_deref(), &Provenance::of(&start, &s_max))?;
            if orbit.common.out.is_some() {
                ctx.print(&format!("anchors={} directions={}\n", est.len(), dirs.len()))?;
            }
            Ok(())
        }
        Command::Density { orbit, grid, heatmap } => {
            let (start, _, s_max, s) = samples(&orbit)?;
            let stats = grid_coverage(&s, grid)?;
            let prov = Provenance::of(&start, &s_max);
            if let Some(path) = heatmap {
                render_heatmap(&stats.counts, grid, &path)?;
                ctx.write_manifest(&path, &prov)?;
            }
            let mut table = report::density_csv(std::slice::from_ref(&stats));
            if grid >= 8 {
                let r = covering_radius_estimate(&s, grid)?;
                table.push_str(&format!("# covering_radius_bound={r}\n"));
            }
            ctx.emit(&table, orbit.common.out.as_deref(), &prov)
        }
        Command::Approx { orbit, target, checkpoints } => {
            let (start, gens, s_max) = orbit_setup(&orbit)?;
            let t = match start.bits() {
                Some(b) => parse_point(&target, b)?,
                None => parse_point(&target, 64)?,
            };
            let mut cps = Vec::new();
            if let Some(c) = checkpoints {
                for v in c.split(',') {
                    cps.push(parse_count(v)?);
                }
            }
            cps.retain(|c| c < &s_max);
            cps.push(s_max.clone());
            let recs = best_approx_profile(&start, &t, &gens, &cps)?;
            ctx.emit(&report::approx_csv(&recs, &gens), orbit.common.out.as_deref(), &Provenance::of(&start, &s_max))
        }
        Command::Littlewood { orbit, f, decades } => {
            let (start, gens, s_max) = orbit_setup(&orbit)?;
            let w: Weight = f.parse()?;
            let mut recs = littlewood_track(&start, &gens, &s_max, w)?;
            if decades {
                recs = decade_rows(recs);
            }
            ctx.emit(&report::littlewood_csv(&recs, &gens), orbit.common.out.as_deref(), &Provenance::of(&start, &s_max))
        }
        Command::Ppcheck { delta, n, samples, seed, common } => {
            let delta = parse_delta(&delta)?;
            let count = parse_u64(&samples)?;
            let mut rows = Vec::new();
            for part in n.split(',') {
                let n = parse_u64(part)?;
                let e = RhombusSet::new(delta.clone(), n)?;
                rows.push((n, check_preimage_property(&e, count, seed, common.threads)?));
            }
            let prov = Provenance {
                seed: Some(seed),
                ..Provenance::none()
            };
            let table = report::ppcheck_csv(&rows);
            ctx.emit(&table, common.out.as_deref(), &prov)?;
            if common.out.is_some() {
                let bad: u64 = rows.iter().map(|(_, r)| r.violations).sum();
                ctx.print(&format!("violations={bad}\n"))?;
            }
            Ok(())
        }
        Command::Track { start, triple, delta, n, common } => {
            let gens = parse_gens(&common.gens)?;
            let exps: Vec<u32> = triple
                .split(',')
                .map(|k| k.trim().parse().map_err(|_| usage(format!("bad exponent in `{triple}`"))))
                .collect::<Result<_, _>>()?;
            let t = ExpTriple::new(exps, &gens)?;
            let b = bits(&common, t.multiplier())?;
            let p = parse_point(&start, b)?;
            let e = RhombusSet::new(parse_delta(&delta)?, n)?;
            let sample = OrbitSample {
                point: p.mul_int(t.multiplier())?,
                triple: t.clone(),
            };
            let steps = track_preimages(&p, &sample, &e, &gens)?;
            ctx.emit(&report::track_csv(&steps, &gens), common.out.as_deref(), &Provenance::of(&p, t.multiplier()))
        }
        Command::Render { start, smax, grid, delta, n, common } => {
            let path = common.out.clone().ok_or_else(|| usage("render needs --out image.pgm"))?;
            match start {
                Some(s) => {
                    let a = OrbitArgs {
                        start: s,
                        smax,
                        common: common.clone(),
                    };
                    let (start, _, s_max, s) = samples(&a)?;
                    let stats = grid_coverage(&s, grid)?;
                    render_heatmap(&stats.counts, grid, &path)?;
                    ctx.write_manifest(&path, &Provenance::of(&start, &s_max))
                }
                None => {
                    let e = RhombusSet::wide(parse_delta(&delta)?, n)?;
                    render_heatmap(&rhombus_mask(&e, grid), grid, &path)?;
                    ctx.write_manifest(&path, &Provenance::none())
                }
            }
        }
    }
}

/// Large enough that any certified error fits, small enough to reject
/// coincidences: `max(1e-20, 4 C err)`.
fn default_tau(p: &TorusPoint, c: u32) -> BigRational {
    let floor = BigRational::new(One::one(), BigUint::from(10u32).pow(20).into());
    let need = p.error_bound() * BigRational::from_integer((4 * c).into());
    floor.max(need)
}

fn decade_rows(recs: Vec<torus_orbits::density::LittlewoodRecord>) -> Vec<torus_orbits::density::LittlewoodRecord> {
    let mut out = Vec::new();
    let mut next = BigUint::from(10u32);
    let mut prev: Option<torus_orbits::density::LittlewoodRecord> = None;
    for r in recs {
        while r.triple.multiplier() >= &next {
            if let Some(p) = prev.take() {
                out.push(p);
            }
            next *= 10u32;
        }
        prev = Some(r);
    }
    out.extend(prev);
    out
}

fn run_line(
    ctx: &mut Ctx<'_>,
    line: Option<String>,
    point: Option<String>,
    tol: &str,
    slope: Option<String>,
    d: u64,
    angle_tol: f64,
) -> Outcome {
    let mut text = String::new();
    if let Some(l) = line {
        let l: RationalLine = l.parse()?;
        let t = l.direction();
        text.push_str(&format!(
            "line={l} direction={t} homogeneous={} covering_radius={}\n",
            l.is_homogeneous(),
            covering_radius(t)
        ));
        if let Some(p) = point {
            let p = parse_point(&p, 128)?;
            let tol = parse_rational(tol)?;
            text.push_str(&format!("contains={}\n", line_contains(&l, &p, &tol)?));
        }
    }
    if let Some(s) = slope {
        let (vx, vy) = s.split_once(',').ok_or_else(|| usage(format!("bad vector `{s}`")))?;
        let v = |t: &str| -> Result<f64, Failure> {
            t.trim().parse::<f64>().map_err(|_| usage(format!("bad component `{t}`")))
        };
        match rationalize_slope((v(vx)?, v(vy)?), d, angle_tol) {
            SlopeVerdict::Rational(t) => text.push_str(&format!("direction={t}\n")),
            SlopeVerdict::Irrational => text.push_str("irrational\n"),
        }
    }
    if text.is_empty() {
        return Err(usage("line needs --line or --slope"));
    }
    ctx.print(&text)
}
