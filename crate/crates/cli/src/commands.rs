use std::process::ExitCode;

use serde::Serialize;

use qcp::analytics::{
    avg_error_min, avg_error_min_d2, avg_error_min_equal, avg_error_min_equal_d2, error_given_overlap, ErrorReport,
    FormulaPath, OverlapQ,
};
use qcp::asymptotics::{
    comparison_average, comparison_average_exact, discrimination_average, limit_m_infinite, limit_m_infinite_exact,
    limit_n1_infinite, rate as rate_at, Figure, RateResult,
};
use qcp::combinatorics::ProblemSize;
use qcp::dense::{difference_spectrum, mc_average_error, McEstimate};
use qcp::verify::{run_suite, Settings, Suite};

use crate::output::{csv_text, emit, num, CliError, CliResult, Format, RunRecord};
use crate::{AvgForm, Global, SizeArgs, SuiteArg, SweepVariable};

const DENSE_PATH: &str = "oracle/helstrom";
const MC_PATH: &str = "oracle/monte-carlo";

fn size_of(a: SizeArgs) -> CliResult<ProblemSize> {
    Ok(ProblemSize::new(a.m, a.n1, a.n2, a.d)?)
}

fn overlap(q: f64) -> CliResult<OverlapQ> {
    Ok(OverlapQ::new(q)?)
}

fn finish<I: Serialize, O: Serialize>(
    g: &Global,
    default: Format,
    seed: Option<u64>,
    record: RunRecord<I, O>,
    csv: impl FnOnce() -> CliResult<String>,
) -> CliResult<ExitCode> {
    let text = match g.format.unwrap_or(default) {
        Format::Json => record.with_run_info(seed, g.timestamp).to_json()?,
        Format::Csv => csv()?,
    };
    emit(g.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Tagged<T: Serialize> {
    value: T,
    formula_path: &'static str,
}

#[derive(Serialize)]
struct AvgOutputs {
    report: ErrorReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_helstrom: Option<Tagged<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<Tagged<McEstimate>>,
}

pub fn avg_error(g: &Global, args: SizeArgs, form: AvgForm, dense: bool) -> CliResult<ExitCode> {
    let size = size_of(args)?;
    let report = match form {
        AvgForm::General => avg_error_min(&size),
        AvgForm::Qubit => avg_error_min_d2(&size)?,
        AvgForm::Equal => avg_error_min_equal(&size)?,
        AvgForm::EqualQubit => avg_error_min_equal_d2(&size)?,
    };
    let dense_helstrom = if dense {
        Some(Tagged { value: difference_spectrum(&size)?.helstrom_error(), formula_path: DENSE_PATH })
    } else {
        None
    };
    let monte_carlo = match (g.samples, g.seed) {
        (Some(n), Some(seed)) => Some(Tagged { value: mc_average_error(&size, None, n, seed)?, formula_path: MC_PATH }),
        (Some(_), None) => return Err(CliError::Usage("--samples requires an explicit --seed".into())),
        _ => None,
    };
    let path = report.formula_path.as_str();
    let outputs = AvgOutputs { report, dense_helstrom, monte_carlo };
    let seed = outputs.monte_carlo.as_ref().map(|m| m.value.seed);
    let record = RunRecord::new("avg-error", Some(path), args_json(args), &outputs);
    finish(g, Format::Json, seed, record, || {
        let mut header = vec!["M", "N1", "N2", "d", "relabeled", "formula_path", "value", "k", "dim", "cos_phi", "term"];
        let mut extra = Vec::new();
        if let Some(h) = &outputs.dense_helstrom {
            header.push("dense_helstrom");
            extra.push(num(h.value));
        }
        if let Some(m) = &outputs.monte_carlo {
            header.extend(["mc_mean", "mc_standard_error", "mc_samples", "seed"]);
            extra.extend([num(m.value.mean), num(m.value.standard_error), m.value.samples.to_string(), m.value.seed.to_string()]);
        }
        let r = &outputs.report;
        let rows: Vec<Vec<String>> = r
            .per_k
            .iter()
            .map(|t| {
                let mut row = size_cells(&r.size);
                row.extend([r.relabeled.to_string(), path.into(), num(r.value), t.k.to_string(), t.dim.to_string()]);
                row.extend([num(t.cos_phi), num(t.term)]);
                row.extend(extra.iter().cloned());
                row
            })
            .collect();
        csv_text(&header, &rows)
    })
}

fn args_json(a: SizeArgs) -> serde_json::Value {
    serde_json::json!({ "M": a.m, "N1": a.n1, "N2": a.n2, "d": a.d })
}

fn size_cells(s: &ProblemSize) -> Vec<String> {
    vec![s.m().to_string(), s.n1().to_string(), s.n2().to_string(), s.d().to_string()]
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn error(g: &Global, args: SizeArgs, q: f64) -> CliResult<ExitCode> {
    let size = size_of(args)?;
    let report = error_given_overlap(&size, overlap(q)?);
    let path = report.formula_path.as_str();
    let mut inputs = args_json(args);
    inputs["q"] = q.into();
    let record = RunRecord::new("error", Some(path), inputs, &report);
    finish(g, Format::Json, None, record, || {
        let header =
            ["M", "N1", "N2", "d", "q", "relabeled", "formula_path", "value", "k", "dim", "cos_phi", "p_k", "q_k", "term"];
        let rows: Vec<Vec<String>> = report
            .per_k
            .iter()
            .map(|t| {
                let mut row = size_cells(&report.size);
                row.extend([num(q), report.relabeled.to_string(), path.into(), num(report.value), t.k.to_string()]);
                row.extend([t.dim.to_string(), num(t.cos_phi), opt(t.p_k), opt(t.q_k), num(t.term)]);
                row
            })
            .collect();
        csv_text(&header, &rows)
    })
}

#[derive(Serialize)]
struct RateOutputs {
    beta1: f64,
    gamma1: f64,
    h_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chernoff: Option<f64>,
}

pub fn rate(g: &Global, alpha: f64, q: f64, with_approx: bool) -> CliResult<ExitCode> {
    let r = rate_at(alpha, overlap(q)?)?;
    let outputs = RateOutputs {
        beta1: r.beta1,
        gamma1: r.gamma1,
        h_min: r.h_min,
        approx: with_approx.then_some(r.approx),
        chernoff: with_approx.then_some(r.chernoff),
    };
    let path = FormulaPath::Rate.as_str();
    let record = RunRecord::new("rate", Some(path), serde_json::json!({ "alpha": alpha, "q": q }), &outputs);
    finish(g, Format::Json, None, record, || {
        let mut header = vec!["alpha", "q", "formula_path", "beta1", "gamma1", "h_min"];
        let mut row = vec![num(alpha), num(q), path.into(), num(r.beta1), num(r.gamma1), num(r.h_min)];
        if with_approx {
            header.extend(["approx", "chernoff"]);
            row.extend([num(r.approx), num(r.chernoff)]);
        }
        csv_text(&header, &[row])
    })
}

pub fn fig(g: &Global, id: u32) -> CliResult<ExitCode> {
    let figure = Figure::from_number(id)?;
    let rows = figure.rows()?;
    let x = |r: &RateResult| if figure == Figure::RateVsOverlap { r.q } else { r.alpha };
    let record = RunRecord::new("fig", Some(FormulaPath::Rate.as_str()), serde_json::json!({ "id": id, "figure": figure }), &rows);
    finish(g, Format::Csv, None, record, || {
        let cells: Vec<Vec<String>> =
            rows.iter().map(|r| vec![num(x(r)), num(r.h_min), num(r.approx), num(r.chernoff)]).collect();
        csv_text(&[figure.x_label(), "h_min", "approx", "chernoff"], &cells)
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub m: Option<u64>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub d: u64,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Serialize)]
struct SweepRow {
    x: f64,
    value: f64,
    formula_path: &'static str,
}

impl SweepSpec {
    fn name(&self) -> &'static str {
        match self.variable {
            SweepVariable::Q => "q",
            SweepVariable::M => "M",
            SweepVariable::N1 => "N1",
            SweepVariable::N2 => "N2",
            SweepVariable::Alpha => "alpha",
        }
    }

    fn points(&self) -> CliResult<Vec<f64>> {
        if self.steps < 2 {
            return Err(CliError::Usage(format!("--steps must be at least 2, got {}", self.steps)));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from <= self.to) {
            return Err(CliError::Usage(format!("need --from <= --to, got {} and {}", self.from, self.to)));
        }
        let last = (self.steps - 1) as f64;
        let pts: Vec<f64> = (0..self.steps)
            .map(|i| if i == self.steps - 1 { self.to } else { self.from + (self.to - self.from) * i as f64 / last })
            .collect();
        let integer = matches!(self.variable, SweepVariable::M | SweepVariable::N1 | SweepVariable::N2);
        if integer && (self.from < 0.0 || pts.iter().any(|p| p.fract() != 0.0)) {
            return Err(CliError::Usage(format!(
                "{} is an integer; {}..{} in {} steps leaves the integer lattice",
                self.name(),
                self.from,
                self.to,
                self.steps
            )));
        }
        Ok(pts)
    }

    fn need(&self, v: Option<u64>, flag: &str) -> CliResult<u64> {
        v.ok_or_else(|| CliError::Usage(format!("sweeping {} requires --{flag}", self.name())))
    }

    fn evaluate(&self, x: f64) -> CliResult<(f64, &'static str)> {
        let size = |m: u64, n1: u64, n2: u64| -> CliResult<ProblemSize> { Ok(ProblemSize::new(m, n1, n2, self.d)?) };
        let averaged_or_pair = |s: ProblemSize| -> CliResult<(f64, &'static str)> {
            let r = match self.q {
                Some(q) => error_given_overlap(&s, overlap(q)?),
                None => avg_error_min(&s),
            };
            Ok((r.value, r.formula_path.as_str()))
        };
        match self.variable {
            SweepVariable::Q => {
                let q = overlap(x)?;
                if let Some(alpha) = self.alpha {
                    return Ok((rate_at(alpha, q)?.h_min, FormulaPath::Rate.as_str()));
                }
                let s = size(self.m.unwrap_or(0), self.need(self.n1, "N1")?, self.need(self.n2, "N2")?)?;
                let r = error_given_overlap(&s, q);
                Ok((r.value, r.formula_path.as_str()))
            }
            SweepVariable::M => averaged_or_pair(size(x as u64, self.need(self.n1, "N1")?, self.need(self.n2, "N2")?)?),
            SweepVariable::N1 => averaged_or_pair(size(self.m.unwrap_or(0), x as u64, self.need(self.n2, "N2")?)?),
            SweepVariable::N2 => averaged_or_pair(size(self.m.unwrap_or(0), self.need(self.n1, "N1")?, x as u64)?),
            SweepVariable::Alpha => {
                let q = self.q.ok_or_else(|| CliError::Usage("sweeping alpha requires --q".into()))?;
                Ok((rate_at(x, overlap(q)?)?.h_min, FormulaPath::Rate.as_str()))
            }
        }
    }
}

pub fn sweep(g: &Global, spec: SweepSpec) -> CliResult<ExitCode> {
    let rows: Vec<SweepRow> = spec
        .points()?
        .into_iter()
        .map(|x| spec.evaluate(x).map(|(value, formula_path)| SweepRow { x, value, formula_path }))
        .collect::<CliResult<_>>()?;
    let inputs = serde_json::json!({
        "variable": spec.name(), "from": spec.from, "to": spec.to, "steps": spec.steps,
        "M": spec.m, "N1": spec.n1, "N2": spec.n2, "d": spec.d, "q": spec.q, "alpha": spec.alpha,
    });
    let record = RunRecord::new("sweep", None, inputs, &rows);
    finish(g, Format::Json, None, record, || {
        let cells: Vec<Vec<String>> = rows.iter().map(|r| vec![num(r.x), num(r.value), r.formula_path.into()]).collect();
        csv_text(&[spec.name(), "value", "formula_path"], &cells)
    })
}

#[derive(Serialize)]
struct LimitRow {
    quantity: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    formula_path: &'static str,
}

pub fn limits(g: &Global, m: Option<u64>, n2: Option<u64>, d: u64) -> CliResult<ExitCode> {
    if m.is_none() && n2.is_none() {
        return Err(CliError::Usage("limits needs --M, --N2 or both".into()));
    }
    let mut rows = Vec::new();
    if let Some(m) = m {
        rows.push(LimitRow {
            quantity: "averaged error as N1 = N2 -> infinity",
            value: limit_n1_infinite(m, d)?,
            exact: None,
            formula_path: FormulaPath::LimitN1Infinite.as_str(),
        });
        rows.push(LimitRow {
            quantity: "Haar-averaged discrimination of M copies",
            value: discrimination_average(m, d)?,
            exact: None,
            formula_path: FormulaPath::DiscriminationAverage.as_str(),
        });
    }
    if let Some(n2) = n2 {
        rows.push(LimitRow {
            quantity: "averaged error as M -> infinity",
            value: limit_m_infinite(n2, d)?,
            exact: Some(limit_m_infinite_exact(n2, d)?.to_string()),
            formula_path: FormulaPath::LimitMInfinite.as_str(),
        });
        rows.push(LimitRow {
            quantity: "Haar-averaged state comparison",
            value: comparison_average(n2, d)?,
            exact: Some(comparison_average_exact(n2, d)?.to_string()),
            formula_path: FormulaPath::ComparisonAverage.as_str(),
        });
    }
    let record = RunRecord::new("limits", None, serde_json::json!({ "M": m, "N2": n2, "d": d }), &rows);
    finish(g, Format::Json, None, record, || {
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.quantity.into(), num(r.value), r.exact.clone().unwrap_or_default(), r.formula_path.into()])
            .collect();
        csv_text(&["quantity", "value", "exact", "formula_path"], &cells)
    })
}

pub fn verify(g: &Global, suite: SuiteArg) -> CliResult<ExitCode> {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Analytic => Suite::Analytic,
        SuiteArg::Oracle => Suite::Oracle,
        SuiteArg::Recoupling => Suite::Recoupling,
    };
    let stochastic = suite.criteria().iter().any(|c| matches!(c, 2 | 3));
    let seed = match (stochastic, g.seed) {
        (true, None) => return Err(CliError::Usage("this suite samples random states; pass --seed".into())),
        (_, s) => s.unwrap_or_default(),
    };
    let defaults = Settings::default();
    let settings = Settings { seed, samples: g.samples.unwrap_or(defaults.samples), ..defaults };
    let outcomes = run_suite(suite, &settings)?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let text = match g.format {
        Some(Format::Json) => {
            let inputs = serde_json::json!({ "suite": format!("{suite:?}").to_lowercase(), "samples": settings.samples });
            RunRecord::new("verify", None, inputs, &outcomes)
                .with_run_info(stochastic.then_some(seed), g.timestamp)
                .to_json()?
        }
        Some(Format::Csv) => {
            let cells: Vec<Vec<String>> = outcomes
                .iter()
                .map(|o| vec![o.id.to_string(), o.name.into(), if o.passed { "PASS" } else { "FAIL" }.into(), o.detail.clone()])
                .collect();
            csv_text(&["criterion", "name", "status", "detail"], &cells)?
        }
        None => {
            let mut s: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
            s.push_str(&format!("{} of {} criteria passed\n", outcomes.len() - failed, outcomes.len()));
            s
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(variable: SweepVariable, from: f64, to: f64, steps: usize) -> SweepSpec {
        SweepSpec { variable, from, to, steps, m: Some(1), n1: Some(1), n2: Some(2), d: 2, q: None, alpha: None }
    }

    #[test]
    fn sweep_points_hit_both_ends() {
        let p = spec(SweepVariable::Q, 0.0, 1.0, 11).points().unwrap();
        assert_eq!((p[0], p[10], p.len()), (0.0, 1.0, 11));
        assert_eq!(spec(SweepVariable::N2, 2.0, 8.0, 4).points().unwrap(), [2.0, 4.0, 6.0, 8.0]);
        assert!(spec(SweepVariable::N2, 2.0, 8.0, 5).points().is_err());
        assert!(spec(SweepVariable::M, -1.0, 1.0, 3).points().is_err());
    }

    #[test]
    fn sweep_evaluations_follow_inputs() {
        let (v, path) = spec(SweepVariable::M, 0.0, 1.0, 2).evaluate(0.0).unwrap();
        assert_eq!((v, path), (0.5, "averaged/general"));
        let mut s = spec(SweepVariable::Alpha, 1.0, 2.0, 2);
        assert!(s.evaluate(1.0).is_err());
        s.q = Some(0.5);
        assert_eq!(s.evaluate(1.0).unwrap().1, "rate/closed-form");
    }
}
