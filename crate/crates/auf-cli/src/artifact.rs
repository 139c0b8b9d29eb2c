//! Fitted-estimator artifact: a line-oriented text serialization carrying the
//! training blocks, stage-1 coefficients, bandwidths, regularization and
//! smoothing scale. The stage-2 factorization is rebuilt deterministically on
//! load, so a round trip reproduces objective values exactly.

use std::fmt::Write as _;

use auf_core::estimator::{
    ColumnStats, EstimatorConfig, EstimatorKind, EtaChoice, FittedNestedEstimator, Standardizer,
};
use auf_core::kernels::Bandwidths;
use auf_core::linalg::Mat;

use crate::{CliError, CliResult};

const MAGIC: &str = "auf-estimator v1";

pub fn render_estimator(est: &FittedNestedEstimator) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(
        out,
        "kind {}",
        match est.kind() {
            EstimatorKind::Nested => "nested",
            EstimatorKind::Conditional => "conditional",
        }
    );
    let _ = writeln!(out, "n {}", est.n());
    let _ = writeln!(out, "d_x {}", est.context_dim());
    let _ = writeln!(out, "d_u {}", est.pre_dim());
    let _ = writeln!(out, "d_a {}", est.action_dim());
    let _ = writeln!(out, "lambda_h {}", est.lambda_h());
    let _ = writeln!(out, "lambda_x {}", est.lambda_x());
    let _ = writeln!(out, "eta {}", est.eta());
    let _ = writeln!(out, "sigma_x {}", est.bandwidths().sigma_x());
    if let Ok(su) = est.bandwidths().sigma_u() {
        let _ = writeln!(out, "sigma_u {su}");
    }
    let _ = writeln!(out, "sigma_a {}", est.bandwidths().sigma_a());
    if let Some(s) = est.standardizer() {
        for (tag, stats) in [("x", &s.x), ("u", &s.u), ("a", &s.a)] {
            let _ = writeln!(out, "scaler_{tag}_mean {}", join(&stats.mean));
            let _ = writeln!(out, "scaler_{tag}_std {}", join(&stats.std));
        }
    }
    let _ = writeln!(out, "alpha {}", join(est.alpha()));
    for i in 0..est.n() {
        let _ = writeln!(out, "x_row {}", join(est.contexts_raw().row(i)));
    }
    for i in 0..est.n() {
        let _ = writeln!(out, "u_row {}", join(est.pre_raw().row(i)));
    }
    for i in 0..est.n() {
        let _ = writeln!(out, "a_row {}", join(est.actions_raw().row(i)));
    }
    out
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn next_kv(&mut self) -> CliResult<Option<(&'a str, &'a str)>> {
        match self.lines.next() {
            None => Ok(None),
            Some(line) => {
                let line = line.trim_end();
                let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
                Ok(Some((key, rest)))
            }
        }
    }
}

pub fn parse_estimator(text: &str) -> CliResult<FittedNestedEstimator> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(CliError::Validation(format!(
            "not an estimator artifact (expected header {MAGIC:?})"
        )));
    }
    let mut reader = Reader {
        lines: lines.peekable(),
    };

    let mut kind = None;
    let mut n = None;
    let mut d_x = None;
    let mut d_u = None;
    let mut d_a = None;
    let mut lambda_h = None;
    let mut lambda_x = None;
    let mut eta = None;
    let mut sigma_x = None;
    let mut sigma_u = None;
    let mut sigma_a = None;
    let mut scalers: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    let mut alpha: Option<Vec<f64>> = None;
    let mut x_rows: Vec<Vec<f64>> = Vec::new();
    let mut u_rows: Vec<Vec<f64>> = Vec::new();
    let mut a_rows: Vec<Vec<f64>> = Vec::new();

    while let Some((key, rest)) = reader.next_kv()? {
        let floats = || -> CliResult<Vec<f64>> {
            rest.split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        CliError::Validation(format!("artifact field {key}: bad number {t:?}"))
                    })
                })
                .collect()
        };
        let single = || -> CliResult<f64> {
            rest.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("artifact field {key}: bad number")))
        };
        let count = || -> CliResult<usize> {
            rest.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("artifact field {key}: bad count")))
        };
        match key {
            "kind" => {
                kind = Some(match rest.trim() {
                    "nested" => EstimatorKind::Nested,
                    "conditional" => EstimatorKind::Conditional,
                    other => {
                        return Err(CliError::Validation(format!(
                            "artifact kind {other:?} unknown"
                        )))
                    }
                })
            }
            "n" => n = Some(count()?),
            "d_x" => d_x = Some(count()?),
            "d_u" => d_u = Some(count()?),
            "d_a" => d_a = Some(count()?),
            "lambda_h" => lambda_h = Some(single()?),
            "lambda_x" => lambda_x = Some(single()?),
            "eta" => eta = Some(single()?),
            "sigma_x" => sigma_x = Some(single()?),
            "sigma_u" => sigma_u = Some(single()?),
            "sigma_a" => sigma_a = Some(single()?),
            "scaler_x_mean" | "scaler_x_std" | "scaler_u_mean" | "scaler_u_std"
            | "scaler_a_mean" | "scaler_a_std" => {
                scalers.insert(key.to_string(), floats()?);
            }
            "alpha" => alpha = Some(floats()?),
            "x_row" => x_rows.push(floats()?),
            "u_row" => u_rows.push(floats()?),
            "a_row" => a_rows.push(floats()?),
            "" => {}
            other => {
                return Err(CliError::Validation(format!(
                    "artifact field {other:?} unknown"
                )))
            }
        }
    }

    let missing = |what: &str| CliError::Validation(format!("artifact lacks the {what} field"));
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let d_x = d_x.ok_or_else(|| missing("d_x"))?;
    let d_u = d_u.ok_or_else(|| missing("d_u"))?;
    let d_a = d_a.ok_or_else(|| missing("d_a"))?;
    let lambda_h = lambda_h.ok_or_else(|| missing("lambda_h"))?;
    let lambda_x = lambda_x.ok_or_else(|| missing("lambda_x"))?;
    let eta = eta.ok_or_else(|| missing("eta"))?;
    let sigma_x = sigma_x.ok_or_else(|| missing("sigma_x"))?;
    let sigma_a = sigma_a.ok_or_else(|| missing("sigma_a"))?;
    let alpha = alpha.ok_or_else(|| missing("alpha"))?;

    let shape = |rows: &[Vec<f64>], cols: usize, what: &str| -> CliResult<Mat> {
        if rows.len() != n || rows.iter().any(|r| r.len() != cols) {
            return Err(CliError::Validation(format!(
                "artifact {what} rows inconsistent with n={n}, d={cols}"
            )));
        }
        Ok(Mat::from_rows(rows))
    };
    let x_raw = shape(&x_rows, d_x, "x")?;
    let u_raw = shape(&u_rows, d_u, "u")?;
    let a_raw = shape(&a_rows, d_a, "a")?;

    let standardizer = if scalers.is_empty() {
        None
    } else {
        let take = |k: &str| -> CliResult<Vec<f64>> {
            scalers
                .get(k)
                .cloned()
                .ok_or_else(|| CliError::Validation(format!("artifact lacks {k}")))
        };
        Some(Standardizer {
            x: ColumnStats {
                mean: take("scaler_x_mean")?,
                std: take("scaler_x_std")?,
            },
            u: ColumnStats {
                mean: take("scaler_u_mean")?,
                std: take("scaler_u_std")?,
            },
            a: ColumnStats {
                mean: take("scaler_a_mean")?,
                std: take("scaler_a_std")?,
            },
        })
    };

    let bandwidths = Bandwidths::new(sigma_x, sigma_u, sigma_a)?;
    let config = EstimatorConfig {
        lambda_h: Some(lambda_h),
        lambda_x: Some(lambda_x),
        bandwidths: Some(bandwidths),
        eta: EtaChoice::Fixed(eta),
        standardize: standardizer.is_some(),
    };
    Ok(FittedNestedEstimator::from_parts(
        kind,
        x_raw,
        u_raw,
        a_raw,
        standardizer,
        bandwidths,
        lambda_h,
        lambda_x,
        eta,
        alpha,
        config,
    )?)
}
