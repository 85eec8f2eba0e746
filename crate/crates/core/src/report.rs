//! CSV output and run manifests.
//!
//! Every table starts with a header row. Exact values print as `p/q`,
//! fixed-point coordinates as 20-digit truncated decimals, and derived
//! reals with Rust's shortest round-trip formatting, so equal inputs give
//! equal bytes.

use std::fmt::Write as _;
use std::time::Duration;

use num_traits::ToPrimitive;

use crate::arith::{Bound, TorusValue};
use crate::construct::{PpReport, TrackStep};
use crate::density::{ApproxRecord, GridStats, LittlewoodRecord};
use crate::directions::DirectionEstimate;
use crate::orbit::OrbitSample;
use crate::smooth::{GapReport, Generators};

/// `k2,k3,k5` for the default set, `k<g>` per generator in general.
pub fn exponent_header(gens: &Generators) -> String {
    gens.as_slice()
        .iter()
        .map(|g| format!("k{g}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn exps(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn real(v: f64) -> String {
    format!("{v}")
}

/// Error bounds in scientific notation.
fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn err(v: &TorusValue) -> String {
    sci(v.error_bound().to_f64().unwrap_or(f64::NAN))
}

/// Exact bounds as fractions, others as the midpoint.
fn bound(b: &Bound) -> String {
    if b.is_exact() {
        if b.mid.is_integer() {
            b.mid.to_integer().to_string()
        } else {
            b.mid.to_string()
        }
    } else {
        real(b.to_f64())
    }
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Columns `k2,k3,k5,multiplier,x,y,errbound`.
pub fn orbit_csv(samples: &[OrbitSample], gens: &Generators) -> String {
    let mut out = format!("{},multiplier,x,y,errbound\n", exponent_header(gens));
    for s in samples {
        let e = s.point.x().error_bound().max(s.point.y().error_bound());
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            exps(s.triple.exps()),
            s.triple.multiplier(),
            s.point.x(),
            s.point.y(),
            sci(e.to_f64().unwrap_or(f64::NAN)),
        );
    }
    out
}

/// Columns `x,y`, one row per closure point.
pub fn points_csv(points: &[crate::arith::TorusPoint]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.x(), p.y());
    }
    out
}

/// Columns `M,count,max_gap,generators`; generators are `;`-separated.
pub fn gaps_csv(reports: &[GapReport]) -> String {
    let mut out = String::from("M,count,max_gap,generators\n");
    for r in reports {
        let gens = r
            .generators
            .as_slice()
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(out, "{},{},{},{}", real(r.m), r.count, real(r.max_gap), gens);
    }
    out
}

/// Columns `k2,k3,k5,x,y,in_e,dist_to_l0,dist_err,halved`.
pub fn track_csv(steps: &[TrackStep], gens: &Generators) -> String {
    let mut out = format!("{},x,y,in_e,dist_to_l0,dist_err,halved\n", exponent_header(gens));
    for s in steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            exps(s.triple.exps()),
            s.point.x(),
            s.point.y(),
            s.in_e,
            bound(&s.dist_to_l0),
            err(s.point.x()),
            s.halved,
        );
    }
    out
}

/// Columns `anchor_x,anchor_y,cluster_angle,weight,rational_p,rational_q`;
/// the last two are empty for an irrational verdict.
pub fn dirset_csv(estimates: &[(crate::arith::TorusPoint, DirectionEstimate)]) -> String {
    let mut out = String::from("anchor_x,anchor_y,cluster_angle,weight,rational_p,rational_q\n");
    for (a, est) in estimates {
        for c in &est.clusters {
            let (p, q) = match c.rational.direction() {
                Some(d) => (d.p().to_string(), d.q().to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                a.x(),
                a.y(),
                real(c.mean_angle),
                c.weight,
                p,
                q
            );
        }
    }
    out
}

/// One summary row: `G,samples,coverage,empty_cells,max_deviation`.
pub fn density_csv(stats: &[GridStats]) -> String {
    let mut out = String::from("G,samples,coverage,empty_cells,max_deviation\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.g,
            s.total,
            real(s.coverage),
            s.empty_cells,
            real(s.max_deviation)
        );
    }
    out
}

/// Columns `s_max,best,errbound,k2,k3,k5`.
pub fn approx_csv(records: &[ApproxRecord], gens: &Generators) -> String {
    let mut out = format!("s_max,best,errbound,{}\n", exponent_header(gens));
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.s_max,
            bound(&r.best),
            sci(r.best.rad_f64()),
            exps(r.argmin.exps())
        );
    }
    out
}

/// Columns `k2,k3,k5,product,running_min,included,headline_min`.
pub fn littlewood_csv(records: &[LittlewoodRecord], gens: &Generators) -> String {
    let mut out = format!(
        "{},product,running_min,included,headline_min\n",
        exponent_header(gens)
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            exps(r.triple.exps()),
            real(r.product),
            real(r.running_min),
            u8::from(r.included),
            opt_real(r.headline_min)
        );
    }
    out
}

/// Columns `seed,samples,in_e,tested,violations,first_index,first_generator`.
pub fn ppcheck_csv(reports: &[(u64, PpReport)]) -> String {
    let mut out = String::from("N,seed,samples,in_e,tested,violations,first_index,first_generator\n");
    for (n, r) in reports {
        let (i, g) = match &r.first {
            Some(v) => (v.index.to_string(), v.generator.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            n, r.seed, r.samples, r.in_e, r.tested, r.violations, i, g
        );
    }
    out
}

/// Which arithmetic produced a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Fixed,
}

/// Everything needed to replay a run. Written next to each output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub backend: Backend,
    pub bits: Option<u32>,
    pub s_max: Option<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time: Duration,
}

impl RunManifest {
    /// `key = value` lines; the wall time is the only field that varies
    /// between identical runs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "subcommand = {}", self.subcommand);
        let _ = writeln!(out, "args = {}", self.args.join(" "));
        let _ = writeln!(
            out,
            "backend = {}",
            match self.backend {
                Backend::Exact => "exact",
                Backend::Fixed => "fixed",
            }
        );
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let _ = writeln!(out, "bits = {}", opt(self.bits.map(|b| b.to_string())));
        let _ = writeln!(out, "s_max = {}", opt(self.s_max.clone()));
        let _ = writeln!(out, "seed = {}", opt(self.seed.map(|s| s.to_string())));
        let _ = writeln!(out, "version = {}", self.version);
        let _ = writeln!(out, "wall_time_ms = {}", self.wall_time.as_millis());
        out
    }
}
