//! Sectioned `key = value` run configuration.
//!
//! ```text
//! [model]
//! type = equity
//! r = 2%        # percent suffix means x 0.01
//! dt = 1/1000   # fractions are allowed
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use xva_core::analytic::bond_price;
use xva_core::claims::{self, CallSpreadParams, ClaimTriplet};
use xva_core::models::{Dynamics, EquityModel, FactorKind, FactorModel, IntensitySpec};
use xva_core::numgrid::GridSpec;
use xva_core::xva::{FixedPointSettings, InitialGuess, PartyParams, PricingProblem, Side};

use crate::error::{CliError, Result};

const SECTIONS: [&str; 7] = ["model", "claim", "parties", "grid", "solver", "output", "sweep"];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw parsed sections before typing.
#[derive(Debug, Clone, Default)]
struct Document {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::parse(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::parse(line, format!("unknown section [{name}]")));
                }
                if doc.sections.contains_key(name) {
                    return Err(CliError::parse(line, format!("duplicate section [{name}]")));
                }
                doc.sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::parse(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(CliError::parse(line, format!("malformed key `{key}`")));
            }
            if value.is_empty() {
                return Err(CliError::parse(line, format!("empty value for `{key}`")));
            }
            let section = current
                .as_ref()
                .ok_or_else(|| CliError::parse(line, "key outside of any section"))?;
            let entries = doc.sections.get_mut(section).expect("section inserted above");
            if entries.contains_key(key) {
                return Err(CliError::parse(line, format!("duplicate key `{key}`")));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(doc)
    }

    fn section(&self, name: &'static str) -> Section {
        Section {
            name,
            entries: self.sections.get(name).cloned().unwrap_or_default(),
            present: self.sections.contains_key(name),
        }
    }

    fn set(&mut self, section: &str, key: &str, value: String) {
        self.sections.entry(section.to_string()).or_default().insert(
            key.to_string(),
            Entry { value, line: 0 },
        );
    }

    fn remove(&mut self, section: &str, key: &str) {
        if let Some(s) = self.sections.get_mut(section) {
            s.remove(key);
        }
    }
}

/// Typed reader that consumes keys and rejects leftovers.
struct Section {
    name: &'static str,
    entries: BTreeMap<String, Entry>,
    present: bool,
}

impl Section {
    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn take_raw(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn text(&mut self, key: &str) -> Result<String> {
        self.take_raw(key)
            .map(|e| e.value)
            .ok_or_else(|| CliError::validation(self.key(key), "missing required key"))
    }

    fn opt_text(&mut self, key: &str) -> Option<String> {
        self.take_raw(key).map(|e| e.value)
    }

    fn opt_number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take_raw(key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value)
                .map(Some)
                .ok_or_else(|| CliError::parse(e.line, format!("`{key}`: `{}` is not a number", e.value))),
        }
    }

    fn number(&mut self, key: &str) -> Result<f64> {
        self.opt_number(key)?
            .ok_or_else(|| CliError::validation(self.key(key), "missing required key"))
    }

    fn number_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_number(key)?.unwrap_or(default))
    }

    fn positive(&mut self, key: &str) -> Result<f64> {
        let v = self.number(key)?;
        check(self.key(key), v, v > 0.0, "must be > 0")
    }

    fn nonnegative(&mut self, key: &str) -> Result<f64> {
        let v = self.number(key)?;
        check(self.key(key), v, v >= 0.0, "must be >= 0")
    }

    fn number_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.take_raw(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|v| {
                parse_number(v)
                    .ok_or_else(|| CliError::parse(e.line, format!("`{key}`: `{}` is not a number", v.trim())))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().min_by_key(|(_, e)| e.line) {
            Some((k, _)) => Err(CliError::validation(format!("{}.{k}", self.name), "unknown key")),
            None => Ok(()),
        }
    }
}

fn check(key: String, v: f64, ok: bool, bound: &str) -> Result<f64> {
    if ok && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(key, format!("{v} {bound}")))
    }
}

/// Decimal, `a/b` fraction, or either followed by `%`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let (body, scale) = match t.strip_suffix('%') {
        Some(b) => (b.trim(), 100.0),
        None => (t, 1.0),
    };
    let v = match body.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if b == 0.0 {
                return None;
            }
            a / b
        }
        None => body.parse().ok()?,
    };
    v.is_finite().then_some(v / scale)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Equity(EquityModel),
    Factor { model: FactorModel, r: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClaimSpec {
    CallSpread(CallSpreadParams),
    Forward { f0: f64, spot: Option<f64> },
    EquityTrs { s0: f64, premium: f64 },
    Call { strike: f64 },
    ZeroCoupon,
    Cds { premium: f64 },
    BondTrs {
        bond_maturity: f64,
        premium: f64,
        strike: Option<f64>,
        x0: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub tolerance: f64,
    pub max_iter: usize,
    pub sides: Vec<Side>,
    pub initial: InitialGuess,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub name: String,
    /// Explicit `(t, x)` probes; empty means the defaults for the model.
    pub probes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// `section.key` of the varied parameter.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub claim: ClaimSpec,
    pub maturity: f64,
    pub buyer: PartyParams,
    pub seller: PartyParams,
    pub grid: GridSection,
    pub solver: SolverSpec,
    pub output: OutputSpec,
    pub sweep: Option<SweepSpec>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunSpec> {
    RunSpec::from_document(&Document::parse(text)?)
}

fn parse_model(mut s: Section) -> Result<ModelSpec> {
    let kind = s.text("type")?;
    let r = s.nonnegative("r")?;
    let model = match kind.as_str() {
        "equity" => {
            let sigma = s.positive("sigma")?;
            let intensity = match s.opt_text("intensity").as_deref() {
                None | Some("constant") => IntensitySpec::Constant(s.nonnegative("lambda0")?),
                Some("capped_power") => IntensitySpec::CappedPower {
                    c: s.nonnegative("intensity_c")?,
                    p: s.nonnegative("intensity_p")?,
                    cap: s.nonnegative("intensity_cap")?,
                },
                Some(other) => {
                    return Err(CliError::validation(
                        "model.intensity",
                        format!("`{other}` is not one of constant, capped_power"),
                    ))
                }
            };
            ModelSpec::Equity(EquityModel::new(r, sigma, intensity)?)
        }
        "ou" | "cir" => {
            let kind = if kind == "ou" { FactorKind::Ou } else { FactorKind::Cir };
            let kappa = s.positive("kappa")?;
            let theta = s.positive("theta")?;
            let sigma = s.positive("sigma")?;
            let psi0 = s.number_or("psi0", 0.0)?;
            let psi0 = check(s.key("psi0"), psi0, psi0 >= 0.0, "must be >= 0")?;
            let w0 = s.number_or("w0", 1.0)?;
            let w0 = check(s.key("w0"), w0, w0 >= 0.0, "must be >= 0")?;
            let x_cap = s.number_or("x_cap", 0.2)?;
            let x_cap = check(s.key("x_cap"), x_cap, x_cap > 0.0, "must be > 0")?;
            let model = FactorModel::new(kind, kappa, theta, sigma, psi0, w0, x_cap)?;
            ModelSpec::Factor { model, r }
        }
        other => {
            return Err(CliError::validation(
                "model.type",
                format!("`{other}` is not one of equity, ou, cir"),
            ))
        }
    };
    s.finish()?;
    Ok(model)
}

fn parse_claim(mut s: Section) -> Result<(ClaimSpec, f64)> {
    let kind = s.text("type")?;
    let maturity = s.positive("maturity")?;
    let claim = match kind.as_str() {
        "call_spread" => {
            let strike = s.positive("strike")?;
            let eps = s.opt_number("eps")?;
            let m = s.opt_number("m")?;
            let mut pair = |single: Option<f64>, lo: &str, hi: &str| -> Result<(f64, f64)> {
                match single {
                    Some(v) => {
                        if s.entries.contains_key(lo) || s.entries.contains_key(hi) {
                            return Err(CliError::validation(
                                s.key(lo),
                                "conflicts with the symmetric key",
                            ));
                        }
                        let v = check(s.key(lo), v, v > 0.0, "must be > 0")?;
                        Ok((v, v))
                    }
                    None => Ok((s.positive(lo)?, s.positive(hi)?)),
                }
            };
            let (eps_lo, eps_hi) = pair(eps, "eps_lo", "eps_hi")?;
            let (m_lo, m_hi) = pair(m, "m_lo", "m_hi")?;
            ClaimSpec::CallSpread(CallSpreadParams {
                strike,
                eps_lo,
                eps_hi,
                m_lo,
                m_hi,
            })
        }
        "forward" => ClaimSpec::Forward {
            f0: s.positive("f0")?,
            spot: s.opt_number("spot")?,
        },
        "equity_trs" => ClaimSpec::EquityTrs {
            s0: s.positive("s0")?,
            premium: s.nonnegative("premium")?,
        },
        "call" => ClaimSpec::Call {
            strike: s.positive("strike")?,
        },
        "zero_coupon" => ClaimSpec::ZeroCoupon,
        "cds" => ClaimSpec::Cds {
            premium: s.nonnegative("premium")?,
        },
        "bond_trs" => {
            let bond_maturity = s.positive("bond_maturity")?;
            check(
                s.key("bond_maturity"),
                bond_maturity,
                bond_maturity >= maturity,
                "must be >= maturity",
            )?;
            let spec = ClaimSpec::BondTrs {
                bond_maturity,
                premium: s.nonnegative("premium")?,
                strike: s.opt_number("strike")?,
                x0: s.opt_number("x0")?,
            };
            if let ClaimSpec::BondTrs {
                strike: None,
                x0: None,
                ..
            } = spec
            {
                return Err(CliError::validation(
                    "claim.x0",
                    "missing; needed for the default strike when `strike` is absent",
                ));
            }
            spec
        }
        other => {
            return Err(CliError::validation(
                "claim.type",
                format!(
                    "`{other}` is not one of call_spread, forward, equity_trs, call, zero_coupon, cds, bond_trs"
                ),
            ))
        }
    };
    s.finish()?;
    Ok((claim, maturity))
}

fn parse_party(s: &mut Section, i: u8) -> Result<PartyParams> {
    let intensity = s.nonnegative(&format!("lambda{i}"))?;
    let (rk, lk) = (format!("recovery{i}"), format!("loss{i}"));
    let loss_rate = match (s.opt_number(&rk)?, s.opt_number(&lk)?) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(s.key(&lk), format!("conflicts with `{rk}`")))
        }
        (Some(rec), None) => 1.0 - check(s.key(&rk), rec, (0.0..=1.0).contains(&rec), "outside [0, 1]")?,
        (None, Some(loss)) => check(s.key(&lk), loss, (0.0..=1.0).contains(&loss), "outside [0, 1]")?,
        (None, None) => {
            return Err(CliError::validation(s.key(&rk), "missing required key"))
        }
    };
    let dk = format!("delta{i}");
    let delta = s.number_or(&dk, 0.0)?;
    check(s.key(&dk), delta, (0.0..=1.2).contains(&delta), "outside [0, 1.2]")?;
    let collateral_rate = s.number_or(&format!("c{i}"), 0.0)?;
    Ok(PartyParams::new(intensity, loss_rate, delta, collateral_rate)?)
}

fn parse_sides(text: &str) -> Result<Vec<Side>> {
    let mut sides = Vec::new();
    for item in text.split(',').map(str::trim) {
        let side = match item {
            "buyer" | "bid" => Side::Buyer,
            "seller" | "ask" => Side::Seller,
            other => {
                return Err(CliError::validation(
                    "solver.sides",
                    format!("`{other}` is not one of buyer, seller"),
                ))
            }
        };
        if !sides.contains(&side) {
            sides.push(side);
        }
    }
    Ok(sides)
}

fn parse_probes(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|item| {
            let bad = || {
                CliError::validation(
                    "output.probes",
                    format!("`{}` is not a `t:x` pair", item.trim()),
                )
            };
            let (t, x) = item.split_once(':').ok_or_else(bad)?;
            Ok((parse_number(t).ok_or_else(bad)?, parse_number(x).ok_or_else(bad)?))
        })
        .collect()
}

impl RunSpec {
    fn from_document(doc: &Document) -> Result<Self> {
        for required in ["model", "claim", "parties", "grid"] {
            if !doc.sections.contains_key(required) {
                return Err(CliError::validation(required, "missing required section"));
            }
        }
        let model = parse_model(doc.section("model"))?;
        let (claim, maturity) = parse_claim(doc.section("claim"))?;

        let mut p = doc.section("parties");
        let buyer = parse_party(&mut p, 1)?;
        let seller = parse_party(&mut p, 2)?;
        p.finish()?;

        let mut g = doc.section("grid");
        let grid = GridSection {
            x_min: g.number_or("x_min", 0.0)?,
            x_max: g.number("x_max")?,
            dx: g.positive("dx")?,
            dt: g.positive("dt")?,
        };
        g.finish()?;

        let mut s = doc.section("solver");
        let tolerance = s.number_or("tolerance", 1e-5)?;
        check(s.key("tolerance"), tolerance, tolerance > 0.0, "must be > 0")?;
        let max_iter = s.number_or("max_iter", 50.0)?;
        check(
            s.key("max_iter"),
            max_iter,
            max_iter >= 1.0 && max_iter.fract() == 0.0,
            "must be a whole number >= 1",
        )?;
        let sides = match s.opt_text("sides") {
            Some(t) => parse_sides(&t)?,
            None => vec![Side::Buyer, Side::Seller],
        };
        let initial = match s.opt_text("initial").as_deref() {
            None | Some("zero") => InitialGuess::Zero,
            Some("flat") => InitialGuess::FlatTerminal,
            Some(other) => {
                return Err(CliError::validation(
                    "solver.initial",
                    format!("`{other}` is not one of zero, flat"),
                ))
            }
        };
        s.finish()?;
        let solver = SolverSpec {
            tolerance,
            max_iter: max_iter as usize,
            sides,
            initial,
        };

        let mut o = doc.section("output");
        let name = o.opt_text("name").unwrap_or_else(|| "run".into());
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(CliError::validation("output.name", "only [A-Za-z0-9_.-] allowed"));
        }
        let probes = match o.opt_text("probes") {
            Some(t) => parse_probes(&t)?,
            None => Vec::new(),
        };
        o.finish()?;

        let mut w = doc.section("sweep");
        let sweep = if w.present {
            let parameter = w.text("parameter")?;
            let values = w
                .number_list("values")?
                .ok_or_else(|| CliError::validation("sweep.values", "missing required key"))?;
            let Some((sec, key)) = parameter.split_once('.') else {
                return Err(CliError::validation(
                    "sweep.parameter",
                    format!("`{parameter}` is not of the form section.key"),
                ));
            };
            if !["model", "claim", "parties", "grid", "solver"].contains(&sec) || key.is_empty() {
                return Err(CliError::validation(
                    "sweep.parameter",
                    format!("`{parameter}` does not name a sweepable section"),
                ));
            }
            w.finish()?;
            Some(SweepSpec { parameter, values })
        } else {
            None
        };

        let spec = RunSpec {
            model,
            claim,
            maturity,
            buyer,
            seller,
            grid,
            solver,
            output: OutputSpec { name, probes },
            sweep,
        };
        spec.validate_combination()?;
        Ok(spec)
    }

    fn validate_combination(&self) -> Result<()> {
        let equity_claim = matches!(
            self.claim,
            ClaimSpec::CallSpread(_)
                | ClaimSpec::Forward { .. }
                | ClaimSpec::EquityTrs { .. }
                | ClaimSpec::Call { .. }
        );
        let factor_claim = matches!(self.claim, ClaimSpec::Cds { .. } | ClaimSpec::BondTrs { .. });
        match self.model {
            ModelSpec::Equity(_) if factor_claim => Err(CliError::validation(
                "claim.type",
                "needs a factor model (ou or cir)",
            )),
            ModelSpec::Factor { .. } if equity_claim => Err(CliError::validation(
                "claim.type",
                "needs an equity model",
            )),
            _ => {
                self.grid_spec()?;
                Ok(())
            }
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.x_min, self.grid.x_max, self.grid.dx, self.maturity, self.grid.dt)
            .map_err(|e| CliError::validation("grid", e.to_string()))
    }

    pub fn dynamics(&self) -> Dynamics {
        match self.model {
            ModelSpec::Equity(m) => Dynamics::Equity(m),
            ModelSpec::Factor { model, r } => Dynamics::Factor { model, r },
        }
    }

    pub fn claim_triplet(&self) -> Result<ClaimTriplet> {
        let r = self.dynamics().rate();
        let t = self.maturity;
        let claim = match self.claim {
            ClaimSpec::CallSpread(p) => claims::call_spread(p, t, r)?,
            ClaimSpec::Forward { f0, .. } => claims::equity_forward(f0, t, r)?,
            ClaimSpec::EquityTrs { s0, premium } => claims::equity_trs(s0, premium, t, r)?,
            ClaimSpec::Call { strike } => claims::european_call(strike, t)?,
            ClaimSpec::ZeroCoupon => claims::zero_coupon(t)?,
            ClaimSpec::Cds { premium } => claims::cds(premium, t)?,
            ClaimSpec::BondTrs {
                bond_maturity,
                premium,
                strike,
                x0,
            } => {
                let ModelSpec::Factor { model, .. } = self.model else {
                    return Err(CliError::validation("claim.type", "needs a factor model"));
                };
                let strike = match (strike, x0) {
                    (Some(k), _) => k,
                    (None, Some(x0)) => bond_price(&model, 0.0, x0, bond_maturity, r)?,
                    (None, None) => return Err(CliError::validation("claim.x0", "missing")),
                };
                claims::bond_trs(t, bond_maturity, premium, strike, r, move |x| {
                    bond_price(&model, t, x, bond_maturity, r).unwrap_or(f64::NAN)
                })?
            }
        };
        Ok(claim)
    }

    pub fn problem(&self) -> Result<PricingProblem> {
        Ok(PricingProblem::new(
            self.dynamics(),
            self.claim_triplet()?,
            self.buyer,
            self.seller,
            self.grid_spec()?,
        )?)
    }

    /// Configured probes, or the standard ones for the model that lie on the grid.
    pub fn probes(&self) -> Result<Vec<(f64, f64)>> {
        let grid = self.grid_spec()?;
        if !self.output.probes.is_empty() {
            for &(t, x) in &self.output.probes {
                if grid.time_index(t).is_none() || grid.node_index(x).is_none() {
                    return Err(CliError::validation(
                        "output.probes",
                        format!("({t}, {x}) is not a grid node"),
                    ));
                }
            }
            return Ok(self.output.probes.clone());
        }
        let xs: &[f64] = match self.model {
            ModelSpec::Equity(_) => &[10.0, 20.0],
            ModelSpec::Factor { .. } => &[0.02, 0.10],
        };
        let probes: Vec<(f64, f64)> = xs
            .iter()
            .filter(|&&x| grid.node_index(x).is_some())
            .map(|&x| (0.0, x))
            .collect();
        if probes.is_empty() {
            return Err(CliError::validation(
                "output.probes",
                "no default probe lies on the grid; list probes explicitly",
            ));
        }
        Ok(probes)
    }

    pub fn settings(&self, probes: Vec<(f64, f64)>) -> FixedPointSettings {
        FixedPointSettings {
            tolerance: self.solver.tolerance,
            max_iter: self.solver.max_iter,
            initial: self.solver.initial,
            probes,
        }
    }

    fn to_document(&self) -> Document {
        let mut d = Document::default();
        let num = |v: f64| format!("{v}");
        match self.model {
            ModelSpec::Equity(m) => {
                d.set("model", "type", "equity".into());
                d.set("model", "r", num(m.r));
                d.set("model", "sigma", num(m.sigma));
                match m.ref_intensity {
                    IntensitySpec::Constant(l) => d.set("model", "lambda0", num(l)),
                    IntensitySpec::CappedPower { c, p, cap } => {
                        d.set("model", "intensity", "capped_power".into());
                        d.set("model", "intensity_c", num(c));
                        d.set("model", "intensity_p", num(p));
                        d.set("model", "intensity_cap", num(cap));
                    }
                }
            }
            ModelSpec::Factor { model, r } => {
                let kind = match model.kind {
                    FactorKind::Ou => "ou",
                    FactorKind::Cir => "cir",
                };
                d.set("model", "type", kind.into());
                d.set("model", "r", num(r));
                d.set("model", "kappa", num(model.kappa));
                d.set("model", "theta", num(model.theta));
                d.set("model", "sigma", num(model.sigma));
                d.set("model", "psi0", num(model.psi0));
                d.set("model", "w0", num(model.w0));
                d.set("model", "x_cap", num(model.x_cap));
            }
        }
        d.set("claim", "maturity", num(self.maturity));
        let kind = match &self.claim {
            ClaimSpec::CallSpread(p) => {
                d.set("claim", "strike", num(p.strike));
                d.set("claim", "eps_lo", num(p.eps_lo));
                d.set("claim", "eps_hi", num(p.eps_hi));
                d.set("claim", "m_lo", num(p.m_lo));
                d.set("claim", "m_hi", num(p.m_hi));
                "call_spread"
            }
            ClaimSpec::Forward { f0, spot } => {
                d.set("claim", "f0", num(*f0));
                if let Some(s) = spot {
                    d.set("claim", "spot", num(*s));
                }
                "forward"
            }
            ClaimSpec::EquityTrs { s0, premium } => {
                d.set("claim", "s0", num(*s0));
                d.set("claim", "premium", num(*premium));
                "equity_trs"
            }
            ClaimSpec::Call { strike } => {
                d.set("claim", "strike", num(*strike));
                "call"
            }
            ClaimSpec::ZeroCoupon => "zero_coupon",
            ClaimSpec::Cds { premium } => {
                d.set("claim", "premium", num(*premium));
                "cds"
            }
            ClaimSpec::BondTrs {
                bond_maturity,
                premium,
                strike,
                x0,
            } => {
                d.set("claim", "bond_maturity", num(*bond_maturity));
                d.set("claim", "premium", num(*premium));
                if let Some(k) = strike {
                    d.set("claim", "strike", num(*k));
                }
                if let Some(x) = x0 {
                    d.set("claim", "x0", num(*x));
                }
                "bond_trs"
            }
        };
        d.set("claim", "type", kind.into());
        for (i, p) in [(1, &self.buyer), (2, &self.seller)] {
            d.set("parties", &format!("lambda{i}"), num(p.intensity));
            d.set("parties", &format!("loss{i}"), num(p.loss_rate));
            d.set("parties", &format!("delta{i}"), num(p.collateral_ratio));
            d.set("parties", &format!("c{i}"), num(p.collateral_rate));
        }
        d.set("grid", "x_min", num(self.grid.x_min));
        d.set("grid", "x_max", num(self.grid.x_max));
        d.set("grid", "dx", num(self.grid.dx));
        d.set("grid", "dt", num(self.grid.dt));
        d.set("solver", "tolerance", num(self.solver.tolerance));
        d.set("solver", "max_iter", self.solver.max_iter.to_string());
        let sides: Vec<&str> = self.solver.sides.iter().map(|s| s.name()).collect();
        d.set("solver", "sides", sides.join(", "));
        let initial = match self.solver.initial {
            InitialGuess::Zero => "zero",
            InitialGuess::FlatTerminal => "flat",
        };
        d.set("solver", "initial", initial.into());
        d.set("output", "name", self.output.name.clone());
        if !self.output.probes.is_empty() {
            let probes: Vec<String> = self
                .output
                .probes
                .iter()
                .map(|(t, x)| format!("{t}:{x}"))
                .collect();
            d.set("output", "probes", probes.join(", "));
        }
        if let Some(sw) = &self.sweep {
            d.set("sweep", "parameter", sw.parameter.clone());
            let values: Vec<String> = sw.values.iter().map(|v| num(*v)).collect();
            d.set("sweep", "values", values.join(", "));
        }
        d
    }

    /// Config text that parses back to an equal spec.
    pub fn to_config_string(&self) -> String {
        let doc = self.to_document();
        let mut out = String::new();
        for name in SECTIONS {
            let Some(entries) = doc.sections.get(name) else {
                continue;
            };
            let _ = writeln!(out, "[{name}]");
            for (k, e) in entries {
                let _ = writeln!(out, "{k} = {}", e.value);
            }
            out.push('\n');
        }
        out
    }

    /// Copy of this spec with `section.key` set to `value`; the sweep itself is dropped.
    pub fn with_override(&self, parameter: &str, value: f64) -> Result<RunSpec> {
        let (section, key) = parameter
            .split_once('.')
            .ok_or_else(|| CliError::validation("sweep.parameter", "expected section.key"))?;
        let mut doc = self.to_document();
        doc.sections.remove("sweep");
        for (single, pair) in [("eps", ["eps_lo", "eps_hi"]), ("m", ["m_lo", "m_hi"])] {
            if section == "claim" && key == single {
                for k in pair {
                    doc.remove("claim", k);
                }
            }
        }
        doc.set(section, key, format!("{value}"));
        RunSpec::from_document(&doc).map_err(|e| match e {
            CliError::Validation { key, reason } => CliError::validation(
                key,
                format!("{reason} (sweep value {value} for {parameter})"),
            ),
            other => other,
        })
    }
}
