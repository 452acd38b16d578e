//! Figure presets: CSV data and a gnuplot script per figure.

use std::fs;
use std::path::Path;

use threshold_ep::dynamics::{survival_lattice_oracle, survival_law_trace, uniform_times, SurvivalMethod, SurvivalTrace};
use threshold_ep::ep::{complex_parameter_sheet, ep_parameter, EpsGrid};
use threshold_ep::lattice::LatticeConfig;
use threshold_ep::spectrum::{discrete_states, spectrum_scan};
use threshold_ep::{Cplx, ModelParams, Real};

use crate::commands::Outcome;
use crate::csv::{num, Table};
use crate::error::{CliError, Result};

/// Writes the files for `name` (`fig1`, `fig3`, `fig4`, `fig5` or `all`)
/// into `dir`, creating it if needed.
pub fn emit_figure_preset<T: Real>(name: &str, dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let names: Vec<&str> = match name {
        "all" => vec!["fig1", "fig3", "fig4", "fig5"],
        n => vec![n],
    };
    let mut out = Outcome::default();
    for n in names {
        let files = match n {
            "fig1" => fig1::<T>()?,
            "fig3" => fig3::<T>()?,
            "fig4" => fig4::<T>()?,
            "fig5" => fig5::<T>()?,
            other => {
                return Err(CliError::Config(vec![format!("unknown figure preset `{other}`")]));
            }
        };
        for (file, text) in files {
            let path = dir.join(&file);
            fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
            out.notes.push(format!("wrote {}", path.display()));
        }
    }
    Ok(out)
}

type Files = Vec<(String, String)>;

fn c_parts<T: Real>(z: Cplx<T>) -> [String; 2] {
    [num(z.re), num(z.im)]
}

const GP_HEADER: &str = "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";

/// Eigenvalues in the `E` plane and wavenumbers `k = -i ln(lambda)`.
fn fig1<T: Real>() -> Result<Files> {
    let params = ModelParams::new(T::lit(-2.0), T::lit(0.5))?;
    let mut table = Table::new(&["class", "re_E", "im_E", "re_k", "im_k", "re_lambda", "im_lambda"]);
    for s in discrete_states(&params)? {
        let k = s.lambda.ln() * Cplx::new(T::zero(), -T::one());
        let mut row = vec![s.class.as_str().to_string()];
        row.extend(c_parts(s.energy));
        row.extend(c_parts(k));
        row.extend(c_parts(s.lambda));
        table.row(row);
    }
    let gp = format!(
        "{GP_HEADER}set terminal pngcairo size 1000,450\nset output 'fig1.png'\nset multiplot layout 1,2\n\
         set title 'E plane (g = 0.5, eps_d = -2)'\nset xlabel 'Re E'\nset ylabel 'Im E'\n\
         set arrow from -2,0 to 2,0 nohead lw 3 lc 'gray'\n\
         plot 'fig1.csv' using 2:3 with points pt 7 ps 1.5 notitle\n\
         unset arrow\nset title 'k plane'\nset xlabel 'Re k'\nset ylabel 'Im k'\n\
         plot 'fig1.csv' using 4:5 with points pt 7 ps 1.5 notitle\nunset multiplot\n"
    );
    Ok(vec![("fig1.csv".into(), table.into_string()), ("fig1.gp".into(), gp)])
}

/// Near-edge states at `g = 0.1` over `epsilon_d` in `[-2.15, -1.85]`.
fn fig3<T: Real>() -> Result<Files> {
    let rows = spectrum_scan(T::lit(0.1), T::lit(-2.15), T::lit(-1.85), T::lit(0.001))?;
    let mut table = Table::new(&["eps_d", "class", "re_E", "im_E"]);
    for r in rows {
        let mut row = vec![num(r.epsilon_d), r.state.class.as_str().to_string()];
        row.extend(c_parts(r.state.energy));
        table.row(row);
    }
    let gp = format!(
        "{GP_HEADER}set terminal pngcairo size 1000,450\nset output 'fig3.png'\nset multiplot layout 1,2\n\
         set xlabel 'eps_d'\nset ylabel 'Re E'\nplot 'fig3.csv' using 1:3 with points pt 7 ps 0.3 notitle\n\
         set ylabel 'Im E'\nplot 'fig3.csv' using 1:4 with points pt 7 ps 0.3 notitle\nunset multiplot\n"
    );
    Ok(vec![("fig3.csv".into(), table.into_string()), ("fig3.gp".into(), gp)])
}

/// Eigenvalue sheet over complex `epsilon_d` at `g = 0.1`, with the three
/// exceptional points.
fn fig4<T: Real>() -> Result<Files> {
    let g = T::lit(0.1);
    let grid = EpsGrid {
        re_min: T::lit(-2.15),
        re_max: T::lit(-1.85),
        n_re: 61,
        im_min: T::lit(-0.15),
        im_max: T::lit(0.15),
        n_im: 61,
    };
    let mut sheet = Table::new(&["re_eps", "im_eps", "branch", "re_E", "im_E"]);
    for p in complex_parameter_sheet(g, &grid)? {
        let mut row = c_parts(p.eps).to_vec();
        row.push(p.branch_id.to_string());
        row.extend(c_parts(p.energy));
        sheet.row(row);
    }
    let mut eps = Table::new(&["n", "re_eps_bar", "im_eps_bar", "re_E_bar", "im_E_bar"]);
    for n in [-1, 0, 1] {
        let ep = ep_parameter(g, n)?;
        let mut row = vec![n.to_string()];
        row.extend(c_parts(ep.eps_bar));
        row.extend(c_parts(ep.e_bar));
        eps.row(row);
    }
    let gp = format!(
        "{GP_HEADER}set terminal pngcairo size 1000,450\nset output 'fig4.png'\nset multiplot layout 1,2\n\
         set xlabel 'Re eps_d'\nset ylabel 'Im eps_d'\n\
         set zlabel 'Re E'\nsplot 'fig4.csv' using 1:2:4 with points pt 7 ps 0.2 notitle, \
         'fig4_ep.csv' using 2:3:4 with points pt 6 ps 2 notitle\n\
         set zlabel 'Im E'\nsplot 'fig4.csv' using 1:2:5 with points pt 7 ps 0.2 notitle, \
         'fig4_ep.csv' using 2:3:5 with points pt 6 ps 2 notitle\nunset multiplot\n"
    );
    Ok(vec![
        ("fig4.csv".into(), sheet.into_string()),
        ("fig4_ep.csv".into(), eps.into_string()),
        ("fig4.gp".into(), gp),
    ])
}

fn probability_column<T: Real>(trace: &SurvivalTrace<T>, t: T) -> Option<T> {
    trace.times.iter().position(|&s| s == t).map(|i| trace.probability[i])
}

/// Survival at `g = 0.02`: full decay, early close-up with the intermediate
/// law, and the late-time regime with the long-time law.
fn fig5<T: Real>() -> Result<Files> {
    let params = ModelParams::new(T::lit(-2.0), T::lit(0.02))?;
    let t_max = T::lit(2000.0);
    let config = LatticeConfig::for_time(t_max)?;

    let full = survival_lattice_oracle(&params, &config, &uniform_times(t_max, T::one())?)?;
    let mut a = Table::new(&["t", "P_oracle"]);
    for (t, p) in full.times.iter().zip(&full.probability) {
        a.row(vec![num(*t), num(*p)]);
    }

    let early_t = uniform_times(T::lit(100.0), T::lit(0.1))?;
    let early = survival_lattice_oracle(&params, &config, &early_t)?;
    let law = survival_law_trace(&params, &early_t, SurvivalMethod::IntermediateLaw)?;
    let mut b = Table::new(&["t", "P_oracle", "P_intermediate"]);
    for (i, t) in early_t.iter().enumerate() {
        b.row(vec![num(*t), num(early.probability[i]), num(law.probability[i])]);
    }

    let late_t: Vec<T> = full.times.iter().copied().filter(|&t| t >= T::lit(400.0)).collect();
    let late_law = survival_law_trace(&params, &late_t, SurvivalMethod::LongTimeLaw)?;
    let mut c = Table::new(&["t", "P_oracle", "P_longtime"]);
    for (i, t) in late_t.iter().enumerate() {
        let p = probability_column(&full, *t).expect("late grid is a subset");
        c.row(vec![num(*t), num(p), num(late_law.probability[i])]);
    }

    let gp = format!(
        "{GP_HEADER}set terminal pngcairo size 1400,450\nset output 'fig5.png'\nset multiplot layout 1,3\n\
         set xlabel 't'\nset ylabel 'P(t)'\nset title 'full decay'\n\
         plot 'fig5a.csv' using 1:2 with lines lw 1.5\n\
         set title 'intermediate times'\n\
         plot 'fig5b.csv' using 1:2 with lines lw 1.5, '' using 1:3 with lines dt 2 lw 1.5\n\
         set title 'late times'\n\
         plot 'fig5c.csv' using 1:2 with lines lw 1.5, '' using 1:3 with lines dt 2 lw 1.5\nunset multiplot\n"
    );
    Ok(vec![
        ("fig5a.csv".into(), a.into_string()),
        ("fig5b.csv".into(), b.into_string()),
        ("fig5c.csv".into(), c.into_string()),
        ("fig5.gp".into(), gp),
    ])
}
