//! Plug-in causal effect estimators.
//!
//! The adjustment formulas all share one first-moment shape: average
//! `sum_t' E[Y | adjust, t'] P(t')` over the treated rows minus the control
//! rows of a held-out set ([`ate_plugin`]). What varies is the adjustment
//! column set: the certified `Z` or `S = (B, Z_i)` in the subset-search
//! algorithm, the children set `B` for the naive front-door baseline
//! ([`ate_frontdoor_naive`]), or the sequential two-stage decomposition for
//! the five-node counterexample model ([`ate_twostage`]).
//!
//! The outcome model is a ridge regression with a 5-fold cross-validated
//! penalty from a fixed log grid; anything implementing [`OutcomeModel`] can
//! be plugged in instead (exact conditional tables are used this way in
//! tests).

use rand::Rng;
use thiserror::Error;

use nalgebra::{DMatrix, DVector};

use crate::data::DataTable;
use crate::rng::stream;

#[derive(Debug, Error)]
pub enum AdjustError {
    #[error("need at least {need} rows to fit {cols} columns, got {got}")]
    TooFewRows { got: usize, need: usize, cols: usize },
    #[error("no {0} rows in the evaluation split")]
    EmptyGroup(&'static str),
    #[error("treatment column must be binary 0/1")]
    NonBinaryTreatment,
    #[error("column index {0} out of range")]
    BadColumn(usize),
}

/// Predicts the outcome at given adjustment covariates and treatment value.
pub trait OutcomeModel {
    fn predict(&self, adjust: &[f64], t: f64) -> f64;
}

/// Ridge linear model of Y on (adjustment columns, T).
#[derive(Debug, Clone)]
pub struct RidgeModel {
    /// Weights for the adjustment columns, then the treatment column.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: f64,
    /// Set when a near-singular design forced the largest grid penalty.
    pub rank_fallback: bool,
}

impl OutcomeModel for RidgeModel {
    fn predict(&self, adjust: &[f64], t: f64) -> f64 {
        debug_assert_eq!(adjust.len() + 1, self.weights.len());
        let mut acc = self.intercept;
        for (w, x) in self.weights.iter().zip(adjust.iter().chain([&t])) {
            acc += w * x;
        }
        acc
    }
}

/// Penalty grid for cross-validation, log-spaced over 1e-3 .. 1e3.
pub const PENALTY_GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];
const CV_FOLDS: usize = 5;

/// Solves the centered ridge system for fixed penalty; `None` on breakdown.
fn ridge_solve(x: &DMatrix<f64>, y: &DVector<f64>, penalty: f64) -> Option<DVector<f64>> {
    let k = x.ncols();
    let mut a = x.transpose() * x;
    for i in 0..k {
        a[(i, i)] += penalty;
    }
    let b = x.transpose() * y;
    a.cholesky().map(|ch| ch.solve(&b))
}

fn centered_design(
    data: &DataTable,
    rows: &[usize],
    cols: &[usize],
    y_col: usize,
) -> (DMatrix<f64>, DVector<f64>, Vec<f64>, f64) {
    let n = rows.len();
    let k = cols.len();
    let mut means = vec![0.0f64; k];
    for (j, &c) in cols.iter().enumerate() {
        means[j] = rows.iter().map(|&r| data.column(c)[r]).sum::<f64>() / n as f64;
    }
    let y_mean = rows.iter().map(|&r| data.column(y_col)[r]).sum::<f64>() / n as f64;
    let x = DMatrix::from_fn(n, k, |r, j| data.column(cols[j])[rows[r]] - means[j]);
    let y = DVector::from_fn(n, |r, _| data.column(y_col)[rows[r]] - y_mean);
    (x, y, means, y_mean)
}

/// Fits the ridge outcome regression of `y_col` on (`adjust_cols`, `t_col`),
/// selecting the penalty by 5-fold cross-validation over [`PENALTY_GRID`].
pub fn fit_outcome_regression(
    data: &DataTable,
    y_col: usize,
    adjust_cols: &[usize],
    t_col: usize,
) -> Result<RidgeModel, AdjustError> {
    for &c in adjust_cols.iter().chain([&t_col, &y_col]) {
        if c >= data.n_cols() {
            return Err(AdjustError::BadColumn(c));
        }
    }
    let n = data.n_rows();
    let k = adjust_cols.len() + 1;
    let need = (adjust_cols.len() + 2) * 10;
    if n < need {
        return Err(AdjustError::TooFewRows {
            got: n,
            need,
            cols: k,
        });
    }
    let design: Vec<usize> = adjust_cols.iter().copied().chain([t_col]).collect();
    let all_rows: Vec<usize> = (0..n).collect();

    // Contiguous folds; the caller controls row order (splits are shuffled
    // upstream), so no reshuffle here keeps the fit deterministic.
    let mut fold_sse = [0.0f64; PENALTY_GRID.len()];
    let mut broke_down = false;
    for fold in 0..CV_FOLDS {
        let lo = fold * n / CV_FOLDS;
        let hi = (fold + 1) * n / CV_FOLDS;
        let train: Vec<usize> = (0..lo).chain(hi..n).collect();
        let test: Vec<usize> = (lo..hi).collect();
        let (x_tr, y_tr, means, y_mean) = centered_design(data, &train, &design, y_col);
        for (gi, &lam) in PENALTY_GRID.iter().enumerate() {
            match ridge_solve(&x_tr, &y_tr, lam) {
                Some(beta) => {
                    let mut sse = 0.0;
                    for &r in &test {
                        let mut pred = y_mean;
                        for (j, &c) in design.iter().enumerate() {
                            pred += beta[j] * (data.column(c)[r] - means[j]);
                        }
                        let err = data.column(y_col)[r] - pred;
                        sse += err * err;
                    }
                    fold_sse[gi] += sse;
                }
                None => {
                    broke_down = true;
                    fold_sse[gi] += f64::INFINITY;
                }
            }
        }
    }
    let best = fold_sse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let penalty = if fold_sse[best].is_finite() {
        PENALTY_GRID[best]
    } else {
        *PENALTY_GRID.last().unwrap()
    };

    let (x, y, means, y_mean) = centered_design(data, &all_rows, &design, y_col);
    let (beta, rank_fallback) = match ridge_solve(&x, &y, penalty) {
        Some(b) if fold_sse[best].is_finite() && !broke_down => (b, false),
        Some(b) => (b, broke_down),
        None => (
            ridge_solve(&x, &y, *PENALTY_GRID.last().unwrap())
                .expect("largest penalty regularizes the design"),
            true,
        ),
    };
    let intercept = y_mean
        - beta
            .iter()
            .zip(&means)
            .map(|(w, m)| w * m)
            .sum::<f64>();
    Ok(RidgeModel {
        weights: beta.iter().copied().collect(),
        intercept,
        penalty,
        rank_fallback,
    })
}

/// Empirical frequency of T = 1, for the `P(t')` factor.
pub fn treated_fraction(data: &DataTable, t_col: usize) -> Result<f64, AdjustError> {
    let col = data.column(t_col);
    if !col.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(AdjustError::NonBinaryTreatment);
    }
    Ok(col.iter().sum::<f64>() / col.len() as f64)
}

/// First-moment adjustment estimate on an evaluation table.
///
/// For each row j, `m_j = sum_t' predict(adjust_j, t') P(t')`; the estimate is
/// the mean of `m` over treated rows minus the mean over control rows.
pub fn ate_plugin(
    data_test: &DataTable,
    model: &impl OutcomeModel,
    adjust_cols: &[usize],
    t_col: usize,
    p_treated: f64,
) -> Result<f64, AdjustError> {
    for &c in adjust_cols.iter().chain([&t_col]) {
        if c >= data_test.n_cols() {
            return Err(AdjustError::BadColumn(c));
        }
    }
    let n = data_test.n_rows();
    let t = data_test.column(t_col);
    if !t.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(AdjustError::NonBinaryTreatment);
    }
    let (mut sum1, mut n1, mut sum0, mut n0) = (0.0f64, 0usize, 0.0f64, 0usize);
    let mut adjust = vec![0.0f64; adjust_cols.len()];
    for r in 0..n {
        for (j, &c) in adjust_cols.iter().enumerate() {
            adjust[j] = data_test.column(c)[r];
        }
        let m = p_treated * model.predict(&adjust, 1.0)
            + (1.0 - p_treated) * model.predict(&adjust, 0.0);
        if t[r] == 1.0 {
            sum1 += m;
            n1 += 1;
        } else {
            sum0 += m;
            n0 += 1;
        }
    }
    if n1 == 0 {
        return Err(AdjustError::EmptyGroup("treated"));
    }
    if n0 == 0 {
        return Err(AdjustError::EmptyGroup("control"));
    }
    Ok(sum1 / n1 as f64 - sum0 / n0 as f64)
}

/// Front-door baseline: the plug-in formula with the children set as the
/// adjustment. Fits and evaluates on the same table.
pub fn ate_frontdoor_naive(
    data: &DataTable,
    t_col: usize,
    b_cols: &[usize],
    y_col: usize,
) -> Result<f64, AdjustError> {
    let model = fit_outcome_regression(data, y_col, b_cols, t_col)?;
    let p = treated_fraction(data, t_col)?;
    ate_plugin(data, &model, b_cols, t_col, p)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Logistic regression of a binary column on one covariate, by Newton steps.
fn logistic_fit(t: &[f64], z: &[f64]) -> (f64, f64) {
    let n = t.len();
    let (mut b0, mut b1) = (0.0f64, 0.0f64);
    for _ in 0..30 {
        let (mut g0, mut g1) = (0.0f64, 0.0f64);
        let (mut h00, mut h01, mut h11) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            let p = sigmoid(b0 + b1 * z[i]);
            let w = (p * (1.0 - p)).max(1e-9);
            let r = t[i] - p;
            g0 += r;
            g1 += r * z[i];
            h00 += w;
            h01 += w * z[i];
            h11 += w * z[i] * z[i];
        }
        let det = h00 * h11 - h01 * h01;
        if det.abs() < 1e-12 {
            break;
        }
        let d0 = (h11 * g0 - h01 * g1) / det;
        let d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if d0.abs() + d1.abs() < 1e-10 {
            break;
        }
    }
    (b0, b1)
}

/// Linear-Gaussian conditional fitted by ridge with a tiny fixed penalty;
/// sampling adds a resampled residual to preserve the noise law.
struct LinearConditional {
    weights: Vec<f64>,
    intercept: f64,
    residuals: Vec<f64>,
}

impl LinearConditional {
    fn fit(data: &DataTable, target: usize, design_cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        let (x, y, means, y_mean) = centered_design(data, &rows, design_cols, target);
        let beta = ridge_solve(&x, &y, 1e-8 * rows.len() as f64)
            .expect("tiny ridge keeps the system solvable");
        let intercept = y_mean
            - beta
                .iter()
                .zip(&means)
                .map(|(w, m)| w * m)
                .sum::<f64>();
        let mut residuals = Vec::with_capacity(rows.len());
        for r in 0..data.n_rows() {
            let mut pred = intercept;
            for (j, &c) in design_cols.iter().enumerate() {
                pred += beta[j] * data.column(c)[r];
            }
            residuals.push(data.column(target)[r] - pred);
        }
        LinearConditional {
            weights: beta.iter().copied().collect(),
            intercept,
            residuals,
        }
    }

    fn sample(&self, design: &[f64], rng: &mut impl Rng) -> f64 {
        let mut pred = self.intercept;
        for (w, x) in self.weights.iter().zip(design) {
            pred += w * x;
        }
        pred + self.residuals[rng.gen_range(0..self.residuals.len())]
    }
}

/// Default Monte Carlo draws for [`ate_twostage`].
pub const TWOSTAGE_DRAWS: usize = 10_000;

/// Two-stage sequential adjustment for the chain structure
/// `z1 -> t -> b -> z2 -> y` with `z1 -> b` and confounded (t, y):
/// `E[Y|do(t)] = E_{z1} E_{b|t,z1} E_{z2|b} [ sum_t' E[Y|z1,z2,t'] P(t'|z1) ]`.
///
/// Conditionals are fitted models (ridge outcome regression, logistic
/// propensity on z1, linear-Gaussian stages for b and z2); the outer mixture
/// is integrated by Monte Carlo with resampled residuals.
pub fn ate_twostage(
    data: &DataTable,
    t_col: usize,
    z1_col: usize,
    b_cols: &[usize],
    z2_col: usize,
    y_col: usize,
    n_draws: usize,
    seed: u64,
) -> Result<f64, AdjustError> {
    for &c in [t_col, z1_col, z2_col, y_col].iter().chain(b_cols) {
        if c >= data.n_cols() {
            return Err(AdjustError::BadColumn(c));
        }
    }
    let t = data.column(t_col);
    if !t.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(AdjustError::NonBinaryTreatment);
    }
    let outcome = fit_outcome_regression(data, y_col, &[z1_col, z2_col], t_col)?;
    let (b0, b1) = logistic_fit(t, data.column(z1_col));
    let b_models: Vec<LinearConditional> = b_cols
        .iter()
        .map(|&b| LinearConditional::fit(data, b, &[t_col, z1_col]))
        .collect();
    let z2_model = LinearConditional::fit(data, z2_col, b_cols);
    let z1 = data.column(z1_col);
    let n = data.n_rows();

    let mut rng = stream(seed, 0x7473_7467);
    let mut by_regime = [0.0f64; 2];
    for (slot, t_do) in [(0usize, 0.0f64), (1, 1.0)] {
        let mut acc = 0.0;
        for _ in 0..n_draws.max(1) {
            let z1_s = z1[rng.gen_range(0..n)];
            let b_s: Vec<f64> = b_models
                .iter()
                .map(|m| m.sample(&[t_do, z1_s], &mut rng))
                .collect();
            let z2_s = z2_model.sample(&b_s, &mut rng);
            let p1 = sigmoid(b0 + b1 * z1_s);
            let m = p1 * outcome.predict(&[z1_s, z2_s], 1.0)
                + (1.0 - p1) * outcome.predict(&[z1_s, z2_s], 0.0);
            acc += m;
        }
        by_regime[slot] = acc / n_draws.max(1) as f64;
    }
    Ok(by_regime[1] - by_regime[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rng::{root, stream};
    use crate::sem::{draw_model, Regime};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn table(cols: Vec<(&str, Vec<f64>)>) -> DataTable {
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        let data = cols.into_iter().map(|(_, c)| c).collect();
        DataTable::from_columns(names, data).unwrap()
    }

    #[test]
    fn recovers_linear_weights() {
        let mut rng = root(1);
        let n = 5000;
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let t: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() < 0.5) as u8 as f64).collect();
        let y: Vec<f64> = z
            .iter()
            .zip(&t)
            .map(|(z, t)| 2.0 * z + 3.0 * t + 0.01 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = table(vec![("z", z.clone()), ("t", t.clone()), ("y", y.clone())]);
        let m = fit_outcome_regression(&d, 2, &[0], 1).unwrap();
        // Closed-form least squares on the same design for comparison.
        let rows: Vec<usize> = (0..n).collect();
        let (x, yv, _, _) = centered_design(&d, &rows, &[0, 1], 2);
        let beta = (x.transpose() * &x)
            .try_inverse()
            .unwrap()
            * (x.transpose() * yv);
        assert!((m.weights[0] - 2.0).abs() < 0.05, "{:?}", m.weights);
        assert!((m.weights[1] - 3.0).abs() < 0.05, "{:?}", m.weights);
        assert!((m.weights[0] - beta[0]).abs() < 0.01);
        assert!((m.weights[1] - beta[1]).abs() < 0.01);
    }

    #[test]
    fn constant_outcome_gives_zero_weights() {
        let mut rng = root(2);
        let n = 200;
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let t: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let d = table(vec![("z", z), ("t", t), ("y", vec![4.25; n])]);
        let m = fit_outcome_regression(&d, 2, &[0], 1).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-9));
        assert!((m.intercept - 4.25).abs() < 1e-9);
    }

    #[test]
    fn single_covariate_matches_closed_form_ridge() {
        let mut rng = root(3);
        let n = 400;
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 1.7 * v + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = table(vec![("x", x.clone()), ("y", y.clone())]);
        let rows: Vec<usize> = (0..n).collect();
        let (xm, yv, _, _) = centered_design(&d, &rows, &[0], 1);
        for lam in PENALTY_GRID {
            let beta = ridge_solve(&xm, &yv, lam).unwrap();
            let sxx: f64 = xm.column(0).iter().map(|v| v * v).sum();
            let sxy: f64 = xm
                .column(0)
                .iter()
                .zip(yv.iter())
                .map(|(a, b)| a * b)
                .sum();
            assert!((beta[0] - sxy / (sxx + lam)).abs() < 1e-10);
        }
    }

    #[test]
    fn plugin_collapses_when_model_ignores_treatment() {
        // With a zero treatment weight the t' mixture collapses and the
        // estimate is the group contrast of a fixed m(z).
        let model = RidgeModel {
            weights: vec![2.0, 0.0],
            intercept: 1.0,
            penalty: 1.0,
            rank_fallback: false,
        };
        let d = table(vec![
            ("z", vec![1.0, 2.0, 3.0, 4.0]),
            ("t", vec![1.0, 0.0, 1.0, 0.0]),
        ]);
        let ate = ate_plugin(&d, &model, &[0], 1, 0.25).unwrap();
        // m(z) = 1 + 2z; treated mean m = 1+2*2, control 1+2*3.
        assert!((ate - (5.0 - 7.0)).abs() < 1e-12);
    }

    #[test]
    fn plugin_requires_both_groups() {
        let model = RidgeModel {
            weights: vec![0.0, 1.0],
            intercept: 0.0,
            penalty: 1.0,
            rank_fallback: false,
        };
        let d = table(vec![("z", vec![1.0, 2.0]), ("t", vec![1.0, 1.0])]);
        assert!(matches!(
            ate_plugin(&d, &model, &[0], 1, 0.5),
            Err(AdjustError::EmptyGroup("control"))
        ));
    }

    #[test]
    fn plugin_is_row_permutation_invariant() {
        let g = fixtures::by_name("fig3right").unwrap();
        let model = draw_model(&g, &mut root(4)).unwrap();
        let batch = model.generate(400, Regime::Observational, &mut root(5));
        let fit = fit_outcome_regression(&batch.table, 3, &[1], 0).unwrap();
        let p = treated_fraction(&batch.table, 0).unwrap();
        let a = ate_plugin(&batch.table, &fit, &[1], 0, p).unwrap();
        let perm: Vec<usize> = (0..400).rev().collect();
        let b = ate_plugin(&batch.table.select_rows(&perm), &fit, &[1], 0, p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn naive_frontdoor_is_consistent_when_b_is_a_frontdoor() {
        // In the four-node chain model, B is a classical front-door set.
        let g = fixtures::by_name("fig3right").unwrap();
        let mut errs = Vec::new();
        for seed in 0..5 {
            let model = draw_model(&g, &mut root(40 + seed)).unwrap();
            let batch = model.generate(50_000, Regime::Observational, &mut stream(41, seed));
            let est = ate_frontdoor_naive(&batch.table, 0, &[1], 3).unwrap();
            errs.push((est - model.true_ate()).abs());
        }
        let mean_err = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!(mean_err < 0.05, "mean asymptotic error {mean_err}");
    }

    #[test]
    fn naive_estimate_is_zero_without_transmission() {
        // B independent of T and Y a function of B alone: nothing to transmit.
        let mut rng = root(6);
        let n = 4000;
        let t: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() < 0.4) as u8 as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = b
            .iter()
            .map(|v| 2.0 * v + 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = table(vec![("t", t), ("b", b), ("y", y)]);
        let est = ate_frontdoor_naive(&d, 0, &[1], 2).unwrap();
        assert!(est.abs() < 0.05, "estimate {est}");
    }

    #[test]
    fn twostage_beats_naive_on_the_counterexample() {
        // On the five-node model the naive front-door is biased while the
        // sequential decomposition stays near the truth. Larger noise makes
        // the bias visible at moderate n.
        let g = fixtures::by_name("fig3left").unwrap();
        let mut err_naive = Vec::new();
        let mut err_two = Vec::new();
        for seed in 0..4 {
            let model = draw_model(&g, &mut root(50 + seed))
                .unwrap()
                .with_noise_scale(0.3);
            let batch = model.generate(50_000, Regime::Observational, &mut stream(51, seed));
            let truth = model.true_ate();
            let naive = ate_frontdoor_naive(&batch.table, 1, &[2], 4).unwrap();
            let two = ate_twostage(&batch.table, 1, 0, &[2], 3, 4, TWOSTAGE_DRAWS, seed).unwrap();
            err_naive.push((naive - truth).abs());
            err_two.push((two - truth).abs());
        }
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        assert!(
            mean(&err_two) < 0.1,
            "two-stage error {}",
            mean(&err_two)
        );
        assert!(
            mean(&err_naive) > mean(&err_two),
            "naive {} vs two-stage {}",
            mean(&err_naive),
            mean(&err_two)
        );
    }
}
