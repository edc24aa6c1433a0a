//! Phase-diagram sweeps over `(r, Omega)` grids.
//!
//! Each cell carries both critical couplings, the phase label (from the
//! case-B line), the analytic gap on its side of the transition and,
//! optionally, converged exact-diagonalization observables.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analytic::{
    bogoliubov, critical_coupling, normal_phase_coeffs, superradiant_gap_extrapolated, Branch,
    QuadraticCoeffs,
};
use crate::ed::{converged_eigen, ground_state, linspace, ConvergenceOptions, ModelSpec};
use crate::error::{ConfigError, Error};
use crate::fock::{field_op, herm_eigen, number, FockSpace};
use crate::models::{auto_cutoff, build_mjc, ModelParams};

pub const CSV_HEADER: &str = "r,omega,omega_crit_caseA,omega_crit_caseB,phase,gap_analytic,gap_superradiant,gap_ed,mean_photons_ed,cutoff_used,converged";

/// Relative distance to the case-B line below which a cell is the boundary.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffChoice {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub omega_c: f64,
    pub omega_a: f64,
    pub r_grid: GridSpec,
    pub coupling_grid: GridSpec,
    pub cutoff: CutoffChoice,
    pub n_levels: usize,
    pub include_ed: bool,
    pub output_path: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Superradiant,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Superradiant => "superradiant",
        }
    }
}

/// One grid cell. Gaps that do not apply on this side of the transition,
/// or whose evaluation failed, hold `NaN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub omega: f64,
    pub omega_crit_case_a: f64,
    pub omega_crit_case_b: f64,
    pub phase: Phase,
    pub gap_analytic: f64,
    pub gap_superradiant: f64,
    pub gap_ed: Option<f64>,
    pub mean_photons_ed: Option<f64>,
    pub cutoff_used: Option<usize>,
    pub converged: Option<bool>,
    /// Superradiant gap at `r > 0` is an extrapolation of the `r = 0` form.
    pub approximate: bool,
    pub error: Option<String>,
}

const KNOWN_KEYS: [&str; 8] = [
    "omega_c",
    "omega_a",
    "r_grid",
    "coupling_grid",
    "cutoff",
    "n_levels",
    "include_ed",
    "output_path",
];

fn positive_number(obj: &Map<String, Value>, key: &str) -> Result<f64, ConfigError> {
    let v = obj
        .get(key)
        .ok_or_else(|| ConfigError::new(key, "missing required key"))?;
    let x = v
        .as_f64()
        .ok_or_else(|| ConfigError::new(key, format!("expected a number, got {v}")))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(ConfigError::new(key, format!("must be positive, got {x}")));
    }
    Ok(x)
}

fn grid(obj: &Map<String, Value>, key: &str) -> Result<GridSpec, ConfigError> {
    let v = obj
        .get(key)
        .ok_or_else(|| ConfigError::new(key, "missing required key"))?;
    let (min, max, steps) = match v {
        Value::Array(items) if items.len() == 3 => (
            (format!("{key}[0]"), &items[0]),
            (format!("{key}[1]"), &items[1]),
            (format!("{key}[2]"), &items[2]),
        ),
        Value::Object(map) => {
            for k in map.keys() {
                if !["min", "max", "steps"].contains(&k.as_str()) {
                    return Err(ConfigError::new(format!("{key}.{k}"), "unknown key"));
                }
            }
            let get = |k: &str| {
                map.get(k)
                    .map(|x| (format!("{key}.{k}"), x))
                    .ok_or_else(|| ConfigError::new(format!("{key}.{k}"), "missing required key"))
            };
            (get("min")?, get("max")?, get("steps")?)
        }
        _ => {
            return Err(ConfigError::new(
                key,
                "expected [min, max, steps] or {\"min\", \"max\", \"steps\"}",
            ))
        }
    };
    let number = |(path, x): (String, &Value)| {
        x.as_f64()
            .filter(|f| f.is_finite() && *f >= 0.0)
            .ok_or_else(|| {
                ConfigError::new(path, format!("expected a finite number >= 0, got {x}"))
            })
    };
    let min_v = number(min)?;
    let max_v = number(max)?;
    let steps_v = steps.1.as_u64().ok_or_else(|| {
        ConfigError::new(
            steps.0.clone(),
            format!("expected an integer, got {}", steps.1),
        )
    })?;
    if steps_v < 1 {
        return Err(ConfigError::new(key, "steps must be >= 1"));
    }
    if min_v > max_v {
        return Err(ConfigError::new(
            key,
            format!("min {min_v} exceeds max {max_v}"),
        ));
    }
    Ok(GridSpec {
        min: min_v,
        max: max_v,
        steps: steps_v as usize,
    })
}

/// Parses and validates a JSON sweep configuration.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("$", format!("invalid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| ConfigError::new("$", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::new(k.as_str(), "unknown key"));
    }

    let cutoff = match obj.get("cutoff") {
        None => CutoffChoice::Auto,
        Some(Value::String(s)) if s == "auto" => CutoffChoice::Auto,
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => CutoffChoice::Fixed(n as usize),
            _ => {
                return Err(ConfigError::new(
                    "cutoff",
                    format!("expected \"auto\" or an integer >= 1, got {v}"),
                ))
            }
        },
    };
    let n_levels = match obj.get("n_levels") {
        None => 4,
        Some(v) => match v.as_u64() {
            Some(n) if n >= 2 => n as usize,
            _ => {
                return Err(ConfigError::new(
                    "n_levels",
                    format!("expected an integer >= 2, got {v}"),
                ))
            }
        },
    };
    let include_ed = match obj.get("include_ed") {
        None => false,
        Some(v) => v.as_bool().ok_or_else(|| {
            ConfigError::new("include_ed", format!("expected a boolean, got {v}"))
        })?,
    };
    let output_path = match obj.get("output_path") {
        None => "sweep.csv".to_string(),
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(v) => {
            return Err(ConfigError::new(
                "output_path",
                format!("expected a path, got {v}"),
            ))
        }
    };

    Ok(SweepConfig {
        omega_c: positive_number(obj, "omega_c")?,
        omega_a: positive_number(obj, "omega_a")?,
        r_grid: grid(obj, "r_grid")?,
        coupling_grid: grid(obj, "coupling_grid")?,
        cutoff,
        n_levels,
        include_ed,
        output_path,
    })
}

fn normal_gap(params: &ModelParams) -> Result<f64, Error> {
    let n = normal_phase_coeffs(params);
    let q = QuadraticCoeffs {
        a: n.a,
        b: n.half_2b_minus_a + n.a / 2.0,
        c: (n.a_plus_4c - n.a) / 4.0,
        v: crate::analytic::v_standard(params),
    };
    Ok(bogoliubov(&q)?.gap)
}

struct EdCell {
    gap: f64,
    photons: f64,
    cutoff: usize,
    converged: bool,
}

fn ed_cell(config: &SweepConfig, params: &ModelParams, alpha: f64) -> Result<EdCell, Error> {
    match config.cutoff {
        CutoffChoice::Fixed(n) => {
            let space = FockSpace::new(n);
            let h = build_mjc(params, space)?;
            let eig = herm_eigen(&h)?;
            let state = ground_state(&h, &eig, space)?;
            let photons = field_op(&number(space))?.expectation(&state).re.max(0.0);
            Ok(EdCell {
                gap: (eig.values[1] - eig.values[0]).max(0.0),
                photons,
                cutoff: n,
                converged: false,
            })
        }
        CutoffChoice::Auto => {
            let n_start = auto_cutoff(params.squeeze, alpha);
            let opts = ConvergenceOptions {
                n_start,
                n_max: 512.max(2 * n_start),
                ..ConvergenceOptions::default()
            };
            let run = converged_eigen(&ModelSpec::Mjc(*params), config.n_levels, &opts)?;
            let state = ground_state(&run.hamiltonian, &run.eigen, run.space)?;
            let photons = field_op(&number(run.space))?
                .expectation(&state)
                .re
                .max(0.0);
            Ok(EdCell {
                gap: run.spectrum.gap,
                photons,
                cutoff: run.spectrum.cutoff_used,
                converged: run.spectrum.converged,
            })
        }
    }
}

/// Computes one cell; failures are recorded in the row, never propagated.
pub fn sweep_cell(config: &SweepConfig, r: f64, omega: f64) -> SweepRow {
    let mut row = SweepRow {
        r,
        omega,
        omega_crit_case_a: f64::NAN,
        omega_crit_case_b: f64::NAN,
        phase: Phase::Normal,
        gap_analytic: f64::NAN,
        gap_superradiant: f64::NAN,
        gap_ed: None,
        mean_photons_ed: None,
        cutoff_used: None,
        converged: None,
        approximate: false,
        error: None,
    };
    let params = match ModelParams::new(config.omega_c, config.omega_a, omega, r) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let mut errors = Vec::new();
    if let Ok(a) = critical_coupling(Branch::CaseA, params.omega_c, params.omega_a, r) {
        row.omega_crit_case_a = a.omega_crit;
    }
    let crit_b = match critical_coupling(Branch::CaseB, params.omega_c, params.omega_a, r) {
        Ok(b) => b.omega_crit,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.omega_crit_case_b = crit_b;

    let mut alpha = 0.0;
    if (omega - crit_b).abs() <= BOUNDARY_TOL * crit_b {
        row.gap_analytic = 0.0;
        row.gap_superradiant = 0.0;
    } else if omega < crit_b {
        match normal_gap(&params) {
            Ok(g) => row.gap_analytic = g,
            Err(e) => errors.push(e.to_string()),
        }
    } else {
        row.phase = Phase::Superradiant;
        row.approximate = r > 0.0;
        match superradiant_gap_extrapolated(&params) {
            Ok(s) => {
                row.gap_superradiant = s.gap;
                alpha = s.alpha;
            }
            Err(e) => errors.push(e.to_string()),
        }
    }

    if config.include_ed {
        match ed_cell(config, &params, alpha) {
            Ok(cell) => {
                row.gap_ed = Some(cell.gap);
                row.mean_photons_ed = Some(cell.photons);
                row.cutoff_used = Some(cell.cutoff);
                row.converged = Some(cell.converged);
            }
            Err(e) => {
                row.converged = Some(false);
                errors.push(e.to_string());
            }
        }
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

fn cells(config: &SweepConfig) -> Vec<(f64, f64)> {
    let omegas = config.coupling_grid.points();
    config
        .r_grid
        .points()
        .into_iter()
        .flat_map(|r| omegas.iter().map(move |&o| (r, o)))
        .collect()
}

/// Row-major (`r` outer, `Omega` inner) sweep on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Vec<SweepRow> {
    cells(config)
        .into_par_iter()
        .map(|(r, o)| sweep_cell(config, r, o))
        .collect()
}

/// Same as [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(
    config: &SweepConfig,
    threads: usize,
) -> Result<Vec<SweepRow>, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParams {
            name: "threads",
            reason: e.to_string(),
        })?;
    Ok(pool.install(|| run_sweep(config)))
}

pub fn run_sweep_serial(config: &SweepConfig) -> Vec<SweepRow> {
    cells(config)
        .into_iter()
        .map(|(r, o)| sweep_cell(config, r, o))
        .collect()
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_line(row: &SweepRow) -> String {
    let opt = |x: Option<f64>| x.map(format_sig12).unwrap_or_default();
    [
        format_sig12(row.r),
        format_sig12(row.omega),
        format_sig12(row.omega_crit_case_a),
        format_sig12(row.omega_crit_case_b),
        row.phase.as_str().to_string(),
        format_sig12(row.gap_analytic),
        format_sig12(row.gap_superradiant),
        opt(row.gap_ed),
        opt(row.mean_photons_ed),
        row.cutoff_used.map(|n| n.to_string()).unwrap_or_default(),
        row.converged.map(|b| b.to_string()).unwrap_or_default(),
    ]
    .join(",")
}

/// Writes the header and one line per row; returns the byte count.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut sink: W) -> std::io::Result<usize> {
    let mut written = 0;
    let mut put = |line: &str| -> std::io::Result<()> {
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
        written += line.len() + 1;
        Ok(())
    };
    put(CSV_HEADER)?;
    for row in rows {
        put(&csv_line(row))?;
    }
    sink.flush()?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MINIMAL: &str = r#"{"omega_c": 1, "omega_a": 1, "r_grid": [0, 1, 3], "coupling_grid": {"min": 0.5, "max": 2, "steps": 4}}"#;

    fn single(r: f64, omega: f64) -> SweepConfig {
        SweepConfig {
            omega_c: 1.0,
            omega_a: 1.0,
            r_grid: GridSpec {
                min: r,
                max: r,
                steps: 1,
            },
            coupling_grid: GridSpec {
                min: omega,
                max: omega,
                steps: 1,
            },
            cutoff: CutoffChoice::Auto,
            n_levels: 4,
            include_ed: false,
            output_path: "unused.csv".into(),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.cutoff, CutoffChoice::Auto);
        assert_eq!(c.n_levels, 4);
        assert!(!c.include_ed);
        assert_eq!(c.output_path, "sweep.csv");
        assert_eq!(
            c.r_grid,
            GridSpec {
                min: 0.0,
                max: 1.0,
                steps: 3
            }
        );
        assert_eq!(c.coupling_grid.steps, 4);
    }

    #[test]
    fn config_errors_name_the_key() {
        let bad = MINIMAL.replace("\"omega_c\": 1", "\"omega_c\": -1");
        assert_eq!(parse_config(&bad).unwrap_err().key, "omega_c");

        let bad = MINIMAL.replace("[0, 1, 3]", "[0, 1, 0]");
        assert_eq!(parse_config(&bad).unwrap_err().key, "r_grid");

        let bad = MINIMAL.replace("\"steps\": 4", "\"steps\": 0");
        assert_eq!(parse_config(&bad).unwrap_err().key, "coupling_grid");

        let bad = MINIMAL.replace("[0, 1, 3]", "[2, 1, 3]");
        assert_eq!(parse_config(&bad).unwrap_err().key, "r_grid");

        let bad = MINIMAL.replace("\"omega_a\": 1,", "");
        assert_eq!(parse_config(&bad).unwrap_err().key, "omega_a");

        let bad = MINIMAL.replace("}}", "}, \"n_levels\": 1}");
        assert_eq!(parse_config(&bad).unwrap_err().key, "n_levels");

        let bad = MINIMAL.replace("}}", "}, \"cutof\": 3}");
        assert_eq!(parse_config(&bad).unwrap_err().key, "cutof");

        assert_eq!(parse_config("[1, 2]").unwrap_err().key, "$");
        assert_eq!(parse_config("{").unwrap_err().key, "$");
    }

    #[test]
    fn explicit_options_parse() {
        let text = MINIMAL.replace(
            "}}",
            "}, \"cutoff\": 40, \"n_levels\": 3, \"include_ed\": true, \"output_path\": \"x.csv\"}",
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.cutoff, CutoffChoice::Fixed(40));
        assert_eq!(c.n_levels, 3);
        assert!(c.include_ed);
        assert_eq!(c.output_path, "x.csv");
        let auto = MINIMAL.replace("}}", "}, \"cutoff\": \"auto\"}");
        assert_eq!(parse_config(&auto).unwrap().cutoff, CutoffChoice::Auto);
    }

    #[test]
    fn normal_cell() {
        let rows = run_sweep(&single(0.0, 2.0));
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.phase, Phase::Normal);
        assert_abs_diff_eq!(row.gap_analytic, 1.118034, epsilon = 1e-6);
        assert_abs_diff_eq!(row.gap_analytic, 1.25f64.sqrt(), epsilon = 1e-12);
        assert!(row.gap_superradiant.is_nan());
        assert!(row.gap_ed.is_none());
    }

    #[test]
    fn superradiant_cell() {
        let row = &run_sweep(&single(0.0, 4.0))[0];
        assert_eq!(row.phase, Phase::Superradiant);
        assert!(row.gap_analytic.is_nan());
        assert_abs_diff_eq!(row.gap_superradiant, 0.75f64.sqrt(), epsilon = 1e-12);
        assert!(!row.approximate);

        let row = &run_sweep(&single(0.5, 4.0))[0];
        assert!(row.approximate);
    }

    #[test]
    fn boundary_cell() {
        let oc = 2.0 * 2f64.sqrt();
        let row = &run_sweep(&single(0.0, oc))[0];
        assert_eq!(row.phase, Phase::Normal);
        assert_eq!(row.gap_analytic, 0.0);
        assert_eq!(row.gap_superradiant, 0.0);
    }

    #[test]
    fn ed_columns_filled_on_request() {
        let mut c = single(0.3, 0.5);
        c.include_ed = true;
        let row = &run_sweep(&c)[0];
        assert!(row.gap_ed.unwrap() > 0.0);
        assert!(row.converged.unwrap());
        assert!(row.mean_photons_ed.unwrap() >= 0.0);

        c.cutoff = CutoffChoice::Fixed(20);
        let row = &run_sweep(&c)[0];
        assert_eq!(row.cutoff_used, Some(20));
        assert_eq!(row.converged, Some(false));
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        let n = write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            format!("{CSV_HEADER}\n")
        );
        assert_eq!(n, buf.len());

        let rows = run_sweep(&single(0.0, 2.0));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "0,2,2.82842712475,2.82842712475,normal,1.11803398875,NaN,,,,"
        );
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(-0.5), "-0.5");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(123456.789), "123456.789");
        assert_eq!(format_sig12(1.5e-7), "1.5e-7");
        assert_eq!(format_sig12(2.0e15), "2e15");
        assert_eq!(format_sig12(f64::NAN), "NaN");
    }
}
