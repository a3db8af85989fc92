//! Data tables behind the threshold-versus-dimension plots.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointer::PointerModel;
use crate::scenario::Scenario;
use crate::solver::{self, ScenarioConfig, SolverOptions};

pub const CSV_HEADER: &str = "d,scenario,pointer,quantity,value,feasible";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    /// First-observer critical precision, one- and two-sided.
    Fig2,
    /// Later one-sided critical precisions.
    Fig3,
    /// Two-sided averaged critical precisions.
    Fig4,
    /// Isotropic weights `p1`, `p2` for the averaged scenarios.
    Fig5,
    /// Equal-precision window.
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    /// Pointers plotted when none is requested explicitly.
    pub fn default_pointers(self) -> Vec<PointerModel> {
        match self {
            FigureId::Fig2 => vec![PointerModel::optimal()],
            FigureId::Fig3 | FigureId::Fig4 => vec![
                PointerModel::unsharp(),
                PointerModel::optimal(),
                PointerModel::square(),
            ],
            FigureId::Fig5 => vec![PointerModel::unsharp(), PointerModel::optimal()],
            FigureId::Fig6 => vec![PointerModel::optimal()],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown figure '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d: u64,
    pub scenario: String,
    pub pointer: String,
    pub quantity: &'static str,
    /// `None` when infeasible.
    pub value: Option<f64>,
}

impl SweepRow {
    fn new(d: u64, scenario: Scenario, pointer: &str, quantity: &'static str, value: Option<f64>) -> Self {
        SweepRow {
            d,
            scenario: scenario.as_str().to_string(),
            pointer: pointer.to_string(),
            quantity,
            value,
        }
    }

    pub fn feasible(&self) -> bool {
        self.value.is_some()
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.d,
            self.scenario,
            self.pointer,
            self.quantity,
            self.value.map(format_g12).unwrap_or_default(),
            self.feasible()
        )
    }
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG).contains(&exp) {
        let fixed = format!("{:.*}", (SIG - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Every integer in `[dmin, dmax]`, or `count` log-spaced integers.
pub fn dimension_grid(dmin: u64, dmax: u64, log_points: Option<usize>) -> Result<Vec<u64>> {
    if dmin < 2 {
        return Err(Error::InvalidDimension(dmin));
    }
    if dmax < dmin {
        return Err(Error::Domain(format!("empty range [{dmin}, {dmax}]")));
    }
    let Some(count) = log_points else {
        return Ok((dmin..=dmax).collect());
    };
    if count < 2 || dmin == dmax {
        return Ok(vec![dmin]);
    }
    let (a, b) = ((dmin as f64).ln(), (dmax as f64).ln());
    let mut ds: Vec<u64> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp().round() as u64)
        .map(|d| d.clamp(dmin, dmax))
        .collect();
    ds.dedup();
    Ok(ds)
}

#[derive(Clone, Debug)]
pub struct FigureRequest {
    pub id: FigureId,
    pub dims: Vec<u64>,
    pub pointers: Vec<PointerModel>,
    pub opts: SolverOptions,
    /// Worker threads; `0` uses rayon's default.
    pub jobs: usize,
}

fn rows_for(id: FigureId, d: u64, pointers: &[PointerModel], opts: &SolverOptions) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    match id {
        FigureId::Fig2 => {
            for s in [Scenario::Os1, Scenario::Ts1] {
                let r = solver::critical_g1(&ScenarioConfig::new(s, d, PointerModel::optimal()), opts)?;
                rows.push(SweepRow::new(d, s, "any", "G1c", r.g_crit));
            }
        }
        FigureId::Fig3 | FigureId::Fig4 => {
            let scenarios: &[Scenario] = if id == FigureId::Fig3 {
                &[Scenario::Os1, Scenario::Os2]
            } else {
                &[Scenario::Ts2]
            };
            for &s in scenarios {
                for pointer in pointers {
                    let chain = solver::observer_chain(&ScenarioConfig::new(s, d, pointer.clone()), 3, opts)?;
                    for (n, quantity) in [(2, "G2c"), (3, "G3c")] {
                        let value = chain.get(n - 1).and_then(|r| r.g_crit);
                        rows.push(SweepRow::new(d, s, pointer.name(), quantity, value));
                    }
                }
            }
        }
        FigureId::Fig5 => {
            for s in [Scenario::Os2, Scenario::Ts2] {
                for pointer in pointers {
                    let t = solver::isotropic_thresholds(&ScenarioConfig::new(s, d, pointer.clone()), opts)?;
                    rows.push(SweepRow::new(d, s, pointer.name(), "p1", Some(t.p1)));
                    rows.push(SweepRow::new(d, s, pointer.name(), "p2", t.p2));
                }
            }
        }
        FigureId::Fig6 => {
            for s in [Scenario::Os1, Scenario::Os2] {
                for pointer in pointers {
                    let b = solver::equal_precision_bounds(&ScenarioConfig::new(s, d, pointer.clone()), opts)?;
                    rows.push(SweepRow::new(d, s, pointer.name(), "GL", b.map(|b| b.g_lower)));
                    rows.push(SweepRow::new(d, s, pointer.name(), "GU", b.map(|b| b.g_upper)));
                }
            }
        }
    }
    Ok(rows)
}

/// Rows ordered by `d`, then by series, independent of scheduling.
pub fn figure_rows(request: &FigureRequest) -> Result<Vec<SweepRow>> {
    let compute = || {
        request
            .dims
            .par_iter()
            .map(|&d| rows_for(request.id, d, &request.pointers, &request.opts))
            .collect::<Result<Vec<_>>>()
    };
    let per_d = if request.jobs == 0 {
        compute()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(request.jobs)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(compute)?
    };
    Ok(per_d.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv_line());
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}
