use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use xva_core::numgrid::Surface;
use xva_core::xva::{fair_forward_price, ForwardSetup, IterationReport, PricingProblem, Side};
use xva_core::PricingError;

use crate::config::{ClaimSpec, ModelSpec, RunSpec};
use crate::error::{CliError, Result};
use crate::format::sig6;

pub const PRICE_HEADER: &str = "t,state,crf,without_bid,without_ask,with_bid,with_ask,spread";

/// Files written by one command, data files first.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    name: String,
    outcome: Outcome,
    meta: String,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path, spec: &RunSpec, command: &str) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
        let mut meta = String::new();
        let _ = writeln!(meta, "command: {command}");
        let _ = writeln!(meta, "engine: xva {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(meta, "\n# resolved configuration\n{}", spec.to_config_string());
        Ok(Self {
            dir,
            name: spec.output.name.clone(),
            outcome: Outcome::default(),
            meta,
        })
    }

    fn write(&mut self, suffix: &str, body: &str) -> Result<()> {
        let path = self.dir.join(format!("{}_{suffix}", self.name));
        fs::write(&path, body).map_err(|e| CliError::io(path.display().to_string(), e))?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn note(&mut self, line: impl AsRef<str>) {
        self.meta.push_str(line.as_ref());
        self.meta.push('\n');
    }

    fn finish(mut self, started: Instant) -> Result<Outcome> {
        let elapsed = started.elapsed().as_secs_f64();
        self.note(format!("elapsed_seconds: {elapsed:.3}"));
        let meta = std::mem::take(&mut self.meta);
        self.write("meta.txt", &meta)?;
        Ok(self.outcome)
    }
}

/// Every surface needed for one price row.
struct Quotes {
    crf: Surface,
    without: [Option<Surface>; 2],
    with: [Option<(Surface, IterationReport)>; 2],
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Buyer => 0,
        Side::Seller => 1,
    }
}

fn quote(spec: &RunSpec, problem: &PricingProblem, probes: &[(f64, f64)]) -> Result<Quotes> {
    let crf = problem.solve_crf()?;
    let settings = spec.settings(probes.to_vec());
    let mut q = Quotes {
        crf,
        without: [None, None],
        with: [None, None],
    };
    let solved: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = spec
            .solver
            .sides
            .iter()
            .map(|&side| {
                let (crf, settings) = (&q.crf, &settings);
                scope.spawn(move || -> Result<_> {
                    let without = problem.solve_without_provision(crf, side)?;
                    let with = problem.solve_with_provision(side, settings)?;
                    Ok((side, without, with))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("pricing thread panicked"))
            .collect()
    });
    for r in solved {
        let (side, without, with) = r?;
        q.without[side_index(side)] = Some(without);
        q.with[side_index(side)] = Some(with);
    }
    Ok(q)
}

fn cell(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_default()
}

fn price_row(q: &Quotes, t: f64, x: f64) -> Result<String> {
    let at = |s: &Surface| s.at_node(t, x);
    let crf = at(&q.crf)?;
    let without: Vec<Option<f64>> = q
        .without
        .iter()
        .map(|s| s.as_ref().map(at).transpose())
        .collect::<std::result::Result<_, PricingError>>()?;
    let with: Vec<Option<f64>> = q
        .with
        .iter()
        .map(|s| s.as_ref().map(|(s, _)| at(s)).transpose())
        .collect::<std::result::Result<_, PricingError>>()?;
    let spread = match (with[0], with[1]) {
        (Some(b), Some(a)) => Some(a - b),
        _ => None,
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{}",
        sig6(t),
        sig6(x),
        sig6(crf),
        cell(without[0]),
        cell(without[1]),
        cell(with[0]),
        cell(with[1]),
        cell(spread)
    ))
}

fn note_iterations(w: &mut Writer, q: &Quotes) {
    for (side, entry) in [Side::Buyer, Side::Seller].iter().zip(&q.with) {
        if let Some((_, r)) = entry {
            w.note(format!(
                "{} iterations: {} last_error: {:e} lipschitz_bound: {}",
                side.name(),
                r.iterations,
                r.last_error().unwrap_or(0.0),
                r.lipschitz_bound
            ));
        }
    }
}

/// Probe table plus the full `t = 0` profile.
pub fn price(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let problem = spec.problem()?;
    let probes = spec.probes()?;
    let q = quote(spec, &problem, &probes)?;
    let mut w = Writer::new(out, spec, "price")?;

    let mut body = format!("{PRICE_HEADER}\n");
    for &(t, x) in &probes {
        body.push_str(&price_row(&q, t, x)?);
        body.push('\n');
    }
    w.write("price.csv", &body)?;

    let mut profile = format!("{PRICE_HEADER}\n");
    for x in problem.grid.xs() {
        profile.push_str(&price_row(&q, 0.0, x)?);
        profile.push('\n');
    }
    w.write("profile.csv", &profile)?;
    note_iterations(&mut w, &q);
    w.finish(started)
}

/// Per-iteration probe values and sup-norm errors; fails after writing if unconverged.
pub fn converge_table(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let problem = spec.problem()?;
    let probes = spec.probes()?;
    let settings = spec.settings(probes.clone());
    let mut w = Writer::new(out, spec, "converge-table")?;
    let mut failure = None;
    for &side in &spec.solver.sides {
        let (_, report) = problem.iterate(side, &settings)?;
        for (k, &(t, x)) in probes.iter().enumerate() {
            let mut body = String::from("n,value_at_probe,sup_error\n");
            for (n, (err, values)) in report.errors.iter().zip(&report.probe_values).enumerate() {
                let _ = writeln!(body, "{},{},{}", n + 1, sig6(values[k]), sig6(*err));
            }
            w.write(&format!("convergence_{}_p{k}.csv", side.name()), &body)?;
            w.note(format!("probe p{k}: t = {t}, x = {x}"));
        }
        w.note(format!(
            "{} iterations: {} converged: {} lipschitz_bound: {}",
            side.name(),
            report.iterations,
            report.converged,
            report.lipschitz_bound
        ));
        if !report.converged && failure.is_none() {
            failure = Some(PricingError::NoConvergence {
                iterations: report.iterations,
                last_error: report.last_error().unwrap_or(f64::NAN),
                tolerance: report.tolerance,
            });
        }
    }
    let outcome = w.finish(started)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(outcome),
    }
}

/// One price row at the first probe for every value of the swept parameter.
///
/// Points are evaluated in parallel and written in the listed order.
pub fn sweep(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let sw = spec
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::validation("sweep", "missing required section"))?;
    let variants = sw
        .values
        .iter()
        .map(|&v| spec.with_override(&sw.parameter, v).map(|s| (v, s)))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<String> = variants
        .par_iter()
        .map(|(v, s)| -> Result<String> {
            let problem = s.problem()?;
            let (t, x) = s.probes()?[0];
            let q = quote(s, &problem, &[(t, x)])?;
            Ok(format!("{},{}\n", sig6(*v), price_row(&q, t, x)?))
        })
        .collect::<Result<_>>()?;
    let mut w = Writer::new(out, spec, "sweep")?;
    w.write("sweep.csv", &format!("value,{PRICE_HEADER}\n{}", rows.concat()))?;
    w.note(format!("parameter: {}", sw.parameter));
    w.finish(started)
}

/// Forward price that makes the value with provision vanish at inception.
pub fn fair_forward(spec: &RunSpec, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let ModelSpec::Equity(model) = spec.model else {
        return Err(CliError::validation("model.type", "fair-forward needs an equity model"));
    };
    let ClaimSpec::Forward { spot, .. } = spec.claim else {
        return Err(CliError::validation("claim.type", "fair-forward needs a forward claim"));
    };
    let spot = spot.ok_or_else(|| CliError::validation("claim.spot", "missing required key"))?;
    let setup = ForwardSetup {
        model,
        buyer: spec.buyer,
        seller: spec.seller,
        spot,
        maturity: spec.maturity,
        grid: spec.grid_spec()?,
    };
    let settings = spec.settings(Vec::new());
    let mut body = String::from("side,forward,residual,evaluations\n");
    let mut w = Writer::new(out, spec, "fair-forward")?;
    for &side in &spec.solver.sides {
        let root = fair_forward_price(&setup, side, &settings)?;
        let _ = writeln!(
            body,
            "{},{},{},{}",
            side.name(),
            sig6(root.forward),
            sig6(root.residual),
            root.evaluations
        );
        w.note(format!("{} forward: {:.12}", side.name(), root.forward));
    }
    w.write("fair_forward.csv", &body)?;
    w.finish(started)
}
