//! Fitting the double-exponential (Gumbel) law `F(x) = exp(−e^{c − b·x})`.
//!
//! The normalized waiting-time statistic of the least-prime scan is expected
//! to follow this extreme-value shape. The fit linearizes the empirical CDF:
//! with plotting positions `F_i = i/(n+1)` over the sorted sample, the
//! transform `y = −ln(−ln F)` turns the model into the straight line
//! `y = b·x − c`, which is then solved by least squares — robust on heavily
//! discrete data, where maximum likelihood is twitchy.

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

/// Result of a CDF least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GumbelFit {
    /// Scale-like slope; positive for a genuine distribution.
    pub b: f64,
    /// Location-like offset: the fitted CDF is `exp(−e^{c − b·x})`.
    pub c: f64,
    /// Root-mean-square gap between empirical and fitted CDF values.
    pub rms_residual: f64,
    pub n: usize,
}

impl GumbelFit {
    /// The fitted CDF at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        (-(self.c - self.b * x).exp()).exp()
    }
}

/// Fit `exp(−e^{c − b·x})` to the sample by linearized least squares.
pub fn gumbel_fit(values: &[f64]) -> Result<GumbelFit> {
    let n = values.len();
    if n < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 values for a stable fit, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("all values must be finite".into()));
    }
    let mut xs = values.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let nf = n as f64;
    let ys: Vec<f64> = (1..=n)
        .map(|i| {
            let f = i as f64 / (nf + 1.0);
            -(-f.ln()).ln()
        })
        .collect();

    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(
            "sample has zero variance — the empirical CDF is a step".into(),
        ));
    }
    let b = sxy / sxx;
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::DegenerateFit(format!(
            "fitted slope must be positive, got {b}"
        )));
    }
    let c = -(y_mean - b * x_mean);

    let fit = GumbelFit {
        b,
        c,
        rms_residual: 0.0,
        n,
    };
    let mut sq = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let empirical = (i + 1) as f64 / (nf + 1.0);
        let d = empirical - fit.cdf(*x);
        sq += d * d;
    }
    Ok(GumbelFit {
        rms_residual: (sq / nf).sqrt(),
        ..fit
    })
}

/// One draw from `exp(−e^{c − b·x})` by CDF inversion.
pub fn gumbel_draw(gen: &mut impl RngCore, b: f64, c: f64) -> f64 {
    let u = rng::open01(gen);
    (c - (-u.ln()).ln()) / b
}
