//! Subcommand bodies. Each returns CSV text plus the list of checks that
//! missed their tolerance.

use threshold_ep::dynamics::{
    survival_bessel_sum, survival_lattice_oracle, survival_law_trace, uniform_times, SurvivalMethod, SurvivalTrace,
};
use threshold_ep::ep::{complex_parameter_sheet, ep_parameter, verify_ep_by_discriminant, EpsGrid};
use threshold_ep::generic::{self_energy_scan, GenericSelfEnergyModel};
use threshold_ep::jordan::{jordan_chain_check_with, verify_jordan_form, ChainOperator, ExactVector};
use threshold_ep::lattice::LatticeConfig;
use threshold_ep::spectrum::{discrete_states, normalization_residual, spectrum_scan};
use threshold_ep::{ModelParams, Real};

use crate::config::{Precision, RunConfig, Subcommand};
use crate::csv::{num, Table};
use crate::error::Result;
use crate::figures;

/// Result of one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Text for the output file or stdout; empty for `figures`.
    pub output: String,
    /// Human-readable notes for stderr (files written and the like).
    pub notes: Vec<String>,
    /// Checks that missed their tolerance.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.precision {
        Precision::F32 => run_typed::<f32>(cfg),
        Precision::F64 => run_typed::<f64>(cfg),
    }
}

fn run_typed<T: Real>(cfg: &RunConfig) -> Result<Outcome> {
    let r = |k: &str| T::lit(cfg.real(k).expect("key has a default"));
    match cfg.subcommand {
        Subcommand::Spectrum => {
            let g = r("g");
            match (cfg.real("eps_min"), cfg.real("eps_max")) {
                (Some(lo), Some(hi)) => spectrum_scan_table(g, T::lit(lo), T::lit(hi), r("step")),
                _ => spectrum_point(g, r("eps_d")),
            }
        }
        Subcommand::Ep => {
            let g = r("g");
            if cfg.flag("sheet") {
                let grid = EpsGrid {
                    re_min: r("eps_re_min"),
                    re_max: r("eps_re_max"),
                    n_re: cfg.int("n_re").expect("default") as usize,
                    im_min: r("eps_im_min"),
                    im_max: r("eps_im_max"),
                    n_im: cfg.int("n_im").expect("default") as usize,
                };
                ep_sheet(g, &grid)
            } else {
                let branches = match cfg.int("n") {
                    Some(n) => vec![n as i32],
                    None => vec![-1, 0, 1],
                };
                ep_points(g, &branches)
            }
        }
        Subcommand::Jordan => Ok(jordan()),
        Subcommand::Dynamics => {
            let half_length = cfg.int("n").map(|n| n as usize);
            dynamics(r("g"), r("eps_d"), r("t_max"), r("step"), cfg.text("method").expect("default"), half_length)
        }
        Subcommand::Generic => {
            let model = GenericSelfEnergyModel::by_name(cfg.text("model").expect("default"), r("g"))?;
            let e_min = cfg.real("e_min").map(T::lit).unwrap_or(model.e_th - T::lit(4.0));
            let e_max = cfg.real("e_max").map(T::lit).unwrap_or(model.e_th - T::lit(0.01));
            generic(&model, e_min, e_max, cfg.int("points").expect("default") as usize)
        }
        Subcommand::Figures => {
            let dir = cfg.text("out_dir").expect("default");
            figures::emit_figure_preset::<T>(cfg.text("name").expect("default"), dir.as_ref())
        }
    }
}

fn c_parts<T: Real>(z: threshold_ep::Cplx<T>) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub const SPECTRUM_HEADER: &[&str] = &[
    "eps_d", "class", "re_lambda", "im_lambda", "re_E", "im_E", "re_psi0_sq", "im_psi0_sq", "re_psid_sq", "im_psid_sq",
];

/// All four discrete states at one `epsilon_d`.
pub fn spectrum_point<T: Real>(g: T, eps_d: T) -> Result<Outcome> {
    let params = ModelParams::new(eps_d, g)?;
    let states = discrete_states(&params)?;
    let mut out = Outcome::default();
    let mut table = Table::new(SPECTRUM_HEADER);
    let tol = T::tol(1e-9, 4096.0);
    for s in &states {
        let res = normalization_residual(s).norm();
        if !(res < tol) {
            out.failures.push(format!("{} state: normalization residual {res:e}", s.class.as_str()));
        }
        let mut row = vec![num(eps_d), s.class.as_str().to_string()];
        for z in [s.lambda, s.energy, s.psi0_sq, s.psid_sq] {
            row.extend(c_parts(z));
        }
        table.row(row);
    }
    out.output = table.into_string();
    Ok(out)
}

pub fn spectrum_scan_table<T: Real>(g: T, lo: T, hi: T, step: T) -> Result<Outcome> {
    let rows = spectrum_scan(g, lo, hi, step)?;
    let mut out = Outcome::default();
    let mut table = Table::new(SPECTRUM_HEADER);
    let tol = T::tol(1e-9, 4096.0);
    for row in &rows {
        let s = row.state;
        let res = normalization_residual(&s).norm();
        if !(res < tol) {
            out.failures.push(format!("eps_d = {}: normalization residual {res:e}", row.epsilon_d));
        }
        let mut fields = vec![num(row.epsilon_d), s.class.as_str().to_string()];
        for z in [s.lambda, s.energy, s.psi0_sq, s.psid_sq] {
            fields.extend(c_parts(z));
        }
        table.row(fields);
    }
    out.output = table.into_string();
    Ok(out)
}

pub fn ep_points<T: Real>(g: T, branches: &[i32]) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut table =
        Table::new(&["n", "g", "re_E_bar", "im_E_bar", "re_eps_bar", "im_eps_bar", "min_gap", "lambda_gap", "certified"]);
    for &n in branches {
        let ep = ep_parameter(g, n)?;
        let cert = verify_ep_by_discriminant(g, ep.eps_bar)?;
        if !cert.certified {
            out.failures.push(format!("n = {n}: root gap {:e} at the exceptional point", cert.min_gap));
        }
        let mut row = vec![n.to_string(), num(g)];
        row.extend(c_parts(ep.e_bar));
        row.extend(c_parts(ep.eps_bar));
        row.extend([num(cert.min_gap), num(cert.lambda_gap), cert.certified.to_string()]);
        table.row(row);
    }
    out.output = table.into_string();
    Ok(out)
}

pub fn ep_sheet<T: Real>(g: T, grid: &EpsGrid<T>) -> Result<Outcome> {
    let points = complex_parameter_sheet(g, grid)?;
    let mut table = Table::new(&["re_eps", "im_eps", "branch", "re_E", "im_E", "re_lambda", "im_lambda"]);
    for p in &points {
        let mut row = c_parts(p.eps).to_vec();
        row.push(p.branch_id.to_string());
        row.extend(c_parts(p.energy));
        row.extend(c_parts(p.lambda));
        table.row(row);
    }
    Ok(Outcome { output: table.into_string(), ..Default::default() })
}

fn show_vec(v: &ExactVector) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

fn operator_name(op: ChainOperator) -> &'static str {
    match op {
        ChainOperator::AInvB => "A^-1B",
        ChainOperator::BInvA => "B^-1A",
    }
}

/// Exact checks. The chain relations are reported for both operators; the
/// exit status follows the Jordan form and the relations under `B^-1 A`,
/// where they hold exactly.
pub fn jordan() -> Outcome {
    let mut out = Outcome::default();
    let mut table = Table::new(&["check", "operator", "holds", "detail"]);
    let report = verify_jordan_form();
    let rows: Vec<String> = report.transformed.iter().map(show_vec).collect();
    table.row(vec!["jordan_form".into(), "B^-1A".into(), report.matches.to_string(), rows.join(" ")]);
    table.row(vec!["rank_at_one".into(), "B^-1A".into(), (report.rank_at_one == 2).to_string(), report.rank_at_one.to_string()]);
    if !report.matches {
        out.failures.push("transformed limit matrix differs from the expected Jordan form".into());
    }
    for op in [ChainOperator::AInvB, ChainOperator::BInvA] {
        let chain = jordan_chain_check_with(op);
        let names = ["eigen", "chain", "chain_prime", "link"];
        let residuals = [&chain.eigen, &chain.chain, &chain.chain_prime, &chain.link];
        for ((name, holds), res) in names.iter().zip(chain.holds()).zip(residuals) {
            table.row(vec![name.to_string(), operator_name(op).into(), holds.to_string(), show_vec(res)]);
        }
        if op == ChainOperator::BInvA && !chain.all_hold() {
            out.failures.push("chain relations fail under B^-1A".into());
        }
    }
    out.output = table.into_string();
    out
}

fn push_trace<T: Real>(table: &mut Table, trace: &SurvivalTrace<T>) {
    for ((t, a), p) in trace.times.iter().zip(&trace.amplitude).zip(&trace.probability) {
        table.row(vec![num(*t), num(a.re), num(a.im), num(*p), trace.method.as_str().to_string()]);
    }
}

fn check_trace<T: Real>(trace: &SurvivalTrace<T>, failures: &mut Vec<String>) {
    let bound = T::one() + T::tol(1e-9, 4096.0);
    if let Some(i) = trace.probability.iter().position(|p| !(p.is_finite() && *p >= T::zero())) {
        failures.push(format!("{}: non-finite or negative probability at t = {}", trace.method, trace.times[i]));
    }
    let exact = matches!(trace.method, SurvivalMethod::LatticeOracle | SurvivalMethod::BesselSum);
    if exact {
        if let Some(i) = trace.probability.iter().position(|p| *p > bound) {
            failures.push(format!("{}: probability exceeds 1 at t = {}", trace.method, trace.times[i]));
        }
    }
}

pub fn dynamics<T: Real>(
    g: T,
    eps_d: T,
    t_max: T,
    step: T,
    method: &str,
    half_length: Option<usize>,
) -> Result<Outcome> {
    let params = ModelParams::new(eps_d, g)?;
    let times = uniform_times(t_max, step)?;
    let methods: Vec<&str> = match method {
        "all" => vec!["oracle", "bessel", "intermediate", "longtime"],
        m => vec![m],
    };
    let mut out = Outcome::default();
    let mut table = Table::new(&["t", "re_A", "im_A", "P", "method"]);
    for m in methods {
        let trace = match m {
            "oracle" => {
                let config = match half_length {
                    Some(n) => LatticeConfig::new(n, t_max)?,
                    None => LatticeConfig::for_time(t_max)?,
                };
                survival_lattice_oracle(&params, &config, &times)?
            }
            "bessel" => survival_bessel_sum(&params, &times)?,
            "intermediate" => survival_law_trace(&params, &times, SurvivalMethod::IntermediateLaw)?,
            "longtime" => {
                // The law is singular at t = 0.
                let positive: Vec<T> = times.iter().copied().filter(|t| *t > T::zero()).collect();
                survival_law_trace(&params, &positive, SurvivalMethod::LongTimeLaw)?
            }
            other => unreachable!("validated method {other}"),
        };
        check_trace(&trace, &mut out.failures);
        push_trace(&mut table, &trace);
    }
    out.output = table.into_string();
    Ok(out)
}

pub fn generic<T: Real>(model: &GenericSelfEnergyModel<T>, e_min: T, e_max: T, points: usize) -> Result<Outcome> {
    let rows = self_energy_scan(model, e_min, e_max, points)?;
    let mut out = Outcome::default();
    let mut table = Table::new(&["E", "sigma_quadrature", "sigma_closed_form", "abs_err"]);
    for row in &rows {
        let (closed, err) = match (row.closed_form, row.abs_err()) {
            (Some(c), Some(e)) => (num(c), num(e)),
            _ => ("nan".to_string(), "nan".to_string()),
        };
        if let (Some(c), Some(e)) = (row.closed_form, row.abs_err()) {
            let tol = T::tol(1e-6, 1e5) * (T::one() + c.abs());
            if !(e <= tol) {
                out.failures.push(format!("E = {}: |quadrature - closed form| = {e:e}", row.energy));
            }
        }
        table.row(vec![num(row.energy), num(row.quadrature), closed, err]);
    }
    out.output = table.into_string();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_exit_status_follows_exact_relations() {
        let out = jordan();
        assert!(out.ok(), "{:?}", out.failures);
        assert!(out.output.contains("jordan_form,B^-1A,true"));
        assert!(out.output.contains("chain,A^-1B,false"));
    }

    #[test]
    fn spectrum_point_has_four_states() {
        let out = spectrum_point(0.5_f64, -2.0).unwrap();
        assert!(out.ok());
        assert_eq!(out.output.lines().count(), 5);
    }

    #[test]
    fn ep_points_certified() {
        let out = ep_points(0.1_f64, &[-1, 0, 1]).unwrap();
        assert!(out.ok(), "{:?}", out.failures);
        assert_eq!(out.output.lines().count(), 4);
    }

    #[test]
    fn dynamics_short_run_all_methods() {
        let out = dynamics(0.02_f64, -2.0, 5.0, 0.5, "all", None).unwrap();
        assert!(out.ok(), "{:?}", out.failures);
        // 11 times each for oracle, bessel, intermediate, 10 for longtime.
        assert_eq!(out.output.lines().count(), 1 + 11 * 3 + 10);
        let first: Vec<&str> = out.output.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(first[0], "0.0000000000000000e0");
        assert!((first[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(first[4], "lattice_oracle");
    }

    #[test]
    fn generic_main_text_matches() {
        let model = GenericSelfEnergyModel::by_name("main-text", 0.1_f64).unwrap();
        let out = generic(&model, -6.0, -2.01, 9).unwrap();
        assert!(out.ok(), "{:?}", out.failures);
    }
}
