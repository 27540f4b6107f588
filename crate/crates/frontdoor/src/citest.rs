//! Finite-sample conditional independence tests.
//!
//! Three interchangeable methods, all returning a statistic and a p-value:
//!
//! - `fisher_z`: partial correlation through regression residuals with the
//!   Fisher transform; exact for jointly Gaussian data. Sets are handled by a
//!   max statistic over pairs with Bonferroni correction.
//! - `rcot`: a kernel test on random Fourier features. Feature embeddings of
//!   x and y are residualized on the conditioning embedding, the statistic is
//!   `n` times the squared Frobenius norm of their cross-covariance, and the
//!   null is a weighted chi-square approximated by a gamma matched to its
//!   first two moments.
//! - `permutation`: the partial-correlation statistic recalibrated by locally
//!   permuting x within conditioning strata.
//!
//! Columns are standardized before testing so results are invariant to
//! positive affine rescaling of the inputs.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};
use thiserror::Error;

use crate::data::DataTable;
use crate::rng::stream;

#[derive(Debug, Error)]
pub enum CiError {
    #[error("need at least {need} rows, got {got}")]
    InsufficientRows { got: usize, need: usize },
    #[error("column sets must be disjoint")]
    OverlappingColumns,
    #[error("column index {0} out of range")]
    BadColumn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethodKind {
    FisherZ,
    Rcot,
    Permutation,
}

impl std::fmt::Display for CiMethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CiMethodKind::FisherZ => write!(f, "fisher_z"),
            CiMethodKind::Rcot => write!(f, "rcot"),
            CiMethodKind::Permutation => write!(f, "permutation"),
        }
    }
}

impl std::str::FromStr for CiMethodKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fisher_z" => Ok(CiMethodKind::FisherZ),
            "rcot" => Ok(CiMethodKind::Rcot),
            "permutation" => Ok(CiMethodKind::Permutation),
            other => Err(format!("unknown CI method `{other}`")),
        }
    }
}

/// Random-Fourier-feature configuration for the kernel test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcotConfig {
    /// Features for each of the x and y embeddings.
    pub n_features_xy: usize,
    /// Features for the conditioning embedding.
    pub n_features_cond: usize,
}

impl Default for RcotConfig {
    fn default() -> Self {
        RcotConfig {
            n_features_xy: 5,
            n_features_cond: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CiMethod {
    pub kind: CiMethodKind,
    pub rcot: RcotConfig,
    /// Permutation count for the permutation method.
    pub n_permutations: usize,
    pub seed: u64,
}

impl CiMethod {
    pub fn new(kind: CiMethodKind, seed: u64) -> Self {
        CiMethod {
            kind,
            rcot: RcotConfig::default(),
            n_permutations: 199,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiFlag {
    /// Empty x or y: vacuously independent.
    Vacuous,
    /// A tested column was constant; independence is degenerate.
    ConstantColumn,
    /// The conditioning design was near-singular; a ridge floor was applied.
    RidgeFloor,
}

/// Outcome of one conditional independence test.
#[derive(Debug, Clone, Copy)]
pub struct CiResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: CiMethodKind,
    pub n_used: usize,
    pub flag: Option<CiFlag>,
}

const MIN_ROWS: usize = 30;
/// Rows used for the median-heuristic bandwidth.
const BANDWIDTH_CAP: usize = 500;
/// Regularization floor for the conditioning feature covariance.
const RIDGE_FLOOR: f64 = 1e-8;

/// Tests x _|_ y | cond on the given columns of `data`.
pub fn test_ci(
    data: &DataTable,
    x: &[usize],
    y: &[usize],
    cond: &[usize],
    method: &CiMethod,
) -> Result<CiResult, CiError> {
    for &c in x.iter().chain(y).chain(cond) {
        if c >= data.n_cols() {
            return Err(CiError::BadColumn(c));
        }
    }
    let disjoint = |a: &[usize], b: &[usize]| a.iter().all(|v| !b.contains(v));
    if !(disjoint(x, y) && disjoint(x, cond) && disjoint(y, cond)) {
        return Err(CiError::OverlappingColumns);
    }
    if x.is_empty() || y.is_empty() {
        return Ok(CiResult {
            statistic: 0.0,
            p_value: 1.0,
            method: method.kind,
            n_used: data.n_rows(),
            flag: Some(CiFlag::Vacuous),
        });
    }
    let n = data.n_rows();
    if n < MIN_ROWS {
        return Err(CiError::InsufficientRows { got: n, need: MIN_ROWS });
    }

    // Standardize; a constant tested column short-circuits to p = 1.
    let mut constant_xy = false;
    let standardize_set = |cols: &[usize], constant: &mut bool| -> Vec<Vec<f64>> {
        cols.iter()
            .map(|&c| match standardize(data.column(c)) {
                Some(v) => v,
                None => {
                    *constant = true;
                    vec![0.0; n]
                }
            })
            .collect()
    };
    let xs = standardize_set(x, &mut constant_xy);
    let ys = standardize_set(y, &mut constant_xy);
    if constant_xy {
        return Ok(CiResult {
            statistic: 0.0,
            p_value: 1.0,
            method: method.kind,
            n_used: n,
            flag: Some(CiFlag::ConstantColumn),
        });
    }
    // Constant conditioning columns carry no information; drop them silently.
    let cs: Vec<Vec<f64>> = cond
        .iter()
        .filter_map(|&c| standardize(data.column(c)))
        .collect();

    match method.kind {
        CiMethodKind::FisherZ => fisher_z(&xs, &ys, &cs, n),
        CiMethodKind::Rcot => rcot(&xs, &ys, &cs, n, method),
        CiMethodKind::Permutation => permutation(&xs, &ys, &cs, n, method),
    }
}

/// [`test_ci`] with an empty conditioning set.
pub fn test_ci_unconditional(
    data: &DataTable,
    x: &[usize],
    y: &[usize],
    method: &CiMethod,
) -> Result<CiResult, CiError> {
    test_ci(data, x, y, &[], method)
}

fn standardize(col: &[f64]) -> Option<Vec<f64>> {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var <= 1e-24 {
        return None;
    }
    let sd = var.sqrt();
    Some(col.iter().map(|v| (v - mean) / sd).collect())
}

// ---------------------------------------------------------------------------
// fisher_z
// ---------------------------------------------------------------------------

/// Residuals of `v` after least-squares projection on `design` (inputs are
/// centered, so no intercept is needed). Applies a tiny ridge for stability.
fn residualize(v: &[f64], design: &[Vec<f64>]) -> (Vec<f64>, bool) {
    if design.is_empty() {
        return (v.to_vec(), false);
    }
    let n = v.len();
    let k = design.len();
    let x = DMatrix::from_fn(n, k, |r, c| design[c][r]);
    let xtx = x.transpose() * &x;
    let xtv = x.transpose() * DVector::from_column_slice(v);
    let mut ridge = 1e-9 * n as f64;
    let mut floored = false;
    let beta = loop {
        let mut a = xtx.clone();
        for i in 0..k {
            a[(i, i)] += ridge;
        }
        match a.cholesky() {
            Some(ch) => break ch.solve(&xtv),
            None => {
                ridge *= 100.0;
                floored = true;
            }
        }
    };
    let fitted = x * beta;
    let res = v.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    (res, floored)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    (dot / (na * nb).sqrt()).clamp(-1.0, 1.0)
}

fn fisher_z(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    cs: &[Vec<f64>],
    n: usize,
) -> Result<CiResult, CiError> {
    let dof = n as f64 - cs.len() as f64 - 3.0;
    if dof < 1.0 {
        return Err(CiError::InsufficientRows {
            got: n,
            need: cs.len() + 4,
        });
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut max_stat: f64 = 0.0;
    let mut min_p: f64 = 1.0;
    let mut floored = false;
    for xv in xs {
        let (rx, fx) = residualize(xv, cs);
        for yv in ys {
            let (ry, fy) = residualize(yv, cs);
            floored |= fx || fy;
            let r = correlation(&rx, &ry);
            let z = 0.5 * ((1.0 + r) / (1.0 - r + 1e-300)).ln();
            let stat = dof.sqrt() * z.abs();
            let p = 2.0 * (1.0 - normal.cdf(stat));
            max_stat = max_stat.max(stat);
            min_p = min_p.min(p);
        }
    }
    // Bonferroni over the pair family.
    let pairs = (xs.len() * ys.len()) as f64;
    Ok(CiResult {
        statistic: max_stat,
        p_value: (min_p * pairs).min(1.0),
        method: CiMethodKind::FisherZ,
        n_used: n,
        flag: floored.then_some(CiFlag::RidgeFloor),
    })
}

// ---------------------------------------------------------------------------
// rcot
// ---------------------------------------------------------------------------

/// Median pairwise distance over at most [`BANDWIDTH_CAP`] rows.
fn median_bandwidth(cols: &[Vec<f64>], n: usize, rng: &mut impl Rng) -> f64 {
    let rows: Vec<usize> = if n <= BANDWIDTH_CAP {
        (0..n).collect()
    } else {
        rand::seq::index::sample(rng, n, BANDWIDTH_CAP).into_vec()
    };
    let mut dists = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for (a, &i) in rows.iter().enumerate() {
        for &j in rows.iter().skip(a + 1) {
            let d2: f64 = cols.iter().map(|c| (c[i] - c[j]).powi(2)).sum();
            dists.push(d2.sqrt());
        }
    }
    dists.sort_by(|a, b| a.total_cmp(b));
    let m = dists[dists.len() / 2];
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Random Fourier features `sqrt(2/D) cos(X W / sigma + b)`, column-centered.
fn fourier_features(
    cols: &[Vec<f64>],
    n: usize,
    n_features: usize,
    sigma: f64,
    rng: &mut impl Rng,
) -> DMatrix<f64> {
    let k = cols.len();
    let w = DMatrix::from_fn(k, n_features, |_, _| {
        rng.sample::<f64, _>(StandardNormal) / sigma
    });
    let offsets: Vec<f64> = (0..n_features)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect();
    let x = DMatrix::from_fn(n, k, |r, c| cols[c][r]);
    let mut phi = x * w;
    let scale = (2.0 / n_features as f64).sqrt();
    for j in 0..n_features {
        let mut mean = 0.0;
        for i in 0..n {
            phi[(i, j)] = scale * (phi[(i, j)] + offsets[j]).cos();
            mean += phi[(i, j)];
        }
        mean /= n as f64;
        for i in 0..n {
            phi[(i, j)] -= mean;
        }
    }
    phi
}

fn rcot(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    cs: &[Vec<f64>],
    n: usize,
    method: &CiMethod,
) -> Result<CiResult, CiError> {
    let nf = n as f64;
    let d1 = method.rcot.n_features_xy.max(1);
    let d2 = d1;
    let mut flag = None;

    let mut rng_x = stream(method.seed, 0x5246_0001);
    let mut rng_y = stream(method.seed, 0x5246_0002);
    let mut rng_z = stream(method.seed, 0x5246_0003);

    let bw_x = median_bandwidth(xs, n, &mut rng_x);
    let bw_y = median_bandwidth(ys, n, &mut rng_y);
    let fx = fourier_features(xs, n, d1, bw_x, &mut rng_x);
    let fy = fourier_features(ys, n, d2, bw_y, &mut rng_y);

    let (ex, ey) = if cs.is_empty() {
        (fx, fy)
    } else {
        let dz = method.rcot.n_features_cond.max(1);
        let bw_z = median_bandwidth(cs, n, &mut rng_z);
        let fz = fourier_features(cs, n, dz, bw_z, &mut rng_z);
        let mut czz = fz.transpose() * &fz / nf;
        for i in 0..dz {
            czz[(i, i)] += RIDGE_FLOOR;
        }
        let chol = match czz.clone().cholesky() {
            Some(c) => c,
            None => {
                flag = Some(CiFlag::RidgeFloor);
                for i in 0..dz {
                    czz[(i, i)] += 1e-4;
                }
                czz.cholesky().expect("regularized covariance is PD")
            }
        };
        let a_x = chol.solve(&(fz.transpose() * &fx / nf));
        let a_y = chol.solve(&(fz.transpose() * &fy / nf));
        (&fx - &fz * a_x, &fy - &fz * a_y)
    };

    // Statistic: n * ||cross-covariance of residual features||_F^2.
    let cxy = ex.transpose() * &ey / nf;
    let stat = nf * cxy.iter().map(|v| v * v).sum::<f64>();

    // Null: weighted chi-square with weights from the second moment of the
    // per-sample feature products, gamma-approximated by moment matching.
    // Residualizing on dz conditioning features deflates the product moments
    // by roughly (n - dz)/n per side; the dof factor undoes that.
    let dz_used = if cs.is_empty() {
        0
    } else {
        method.rcot.n_features_cond.max(1)
    };
    let dof_factor = nf / (nf - dz_used as f64).max(1.0);
    let mut second_moment = DMatrix::zeros(d1 * d2, d1 * d2);
    let mut prod = DVector::zeros(d1 * d2);
    for i in 0..n {
        for a in 0..d1 {
            for b in 0..d2 {
                prod[a * d2 + b] = ex[(i, a)] * ey[(i, b)];
            }
        }
        second_moment.syger(dof_factor / nf, &prod, &prod, 1.0);
    }
    let eigvals = second_moment.symmetric_eigenvalues();
    let sum: f64 = eigvals.iter().filter(|v| **v > 0.0).sum();
    let sum_sq: f64 = eigvals.iter().filter(|v| **v > 0.0).map(|v| v * v).sum();
    let p_value = if sum <= 0.0 || sum_sq <= 0.0 {
        1.0
    } else {
        let shape = sum * sum / (2.0 * sum_sq);
        let rate = sum / (2.0 * sum_sq); // 1 / scale
        let gamma = Gamma::new(shape, rate).expect("positive gamma parameters");
        (1.0 - gamma.cdf(stat)).clamp(0.0, 1.0)
    };
    Ok(CiResult {
        statistic: stat,
        p_value,
        method: CiMethodKind::Rcot,
        n_used: n,
        flag,
    })
}

// ---------------------------------------------------------------------------
// permutation
// ---------------------------------------------------------------------------

/// Max absolute residual correlation over (x, y) pairs.
fn pairwise_stat(xs: &[Vec<f64>], ys: &[Vec<f64>], cs: &[Vec<f64>]) -> f64 {
    let mut max_r: f64 = 0.0;
    for xv in xs {
        let (rx, _) = residualize(xv, cs);
        for yv in ys {
            let (ry, _) = residualize(yv, cs);
            max_r = max_r.max(correlation(&rx, &ry).abs());
        }
    }
    max_r
}

/// Nearest-neighbor-style strata: recursive median splits on the largest-
/// variance conditioning column until groups have at most 10 rows.
fn strata(cs: &[Vec<f64>], n: usize) -> Vec<Vec<usize>> {
    fn split(rows: Vec<usize>, cs: &[Vec<f64>], out: &mut Vec<Vec<usize>>) {
        if rows.len() <= 10 || cs.is_empty() {
            out.push(rows);
            return;
        }
        let best = (0..cs.len())
            .max_by(|&a, &b| {
                let var = |c: usize| {
                    let m: f64 = rows.iter().map(|&r| cs[c][r]).sum::<f64>() / rows.len() as f64;
                    rows.iter().map(|&r| (cs[c][r] - m).powi(2)).sum::<f64>()
                };
                var(a).total_cmp(&var(b))
            })
            .unwrap();
        let mut sorted = rows;
        sorted.sort_by(|&a, &b| cs[best][a].total_cmp(&cs[best][b]));
        let mid = sorted.len() / 2;
        let right = sorted.split_off(mid);
        split(sorted, cs, out);
        split(right, cs, out);
    }
    let mut out = Vec::new();
    split((0..n).collect(), cs, &mut out);
    out
}

fn permutation(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    cs: &[Vec<f64>],
    n: usize,
    method: &CiMethod,
) -> Result<CiResult, CiError> {
    let observed = pairwise_stat(xs, ys, cs);
    let groups = strata(cs, n);
    let k = method.n_permutations.max(1);
    let mut rng = stream(method.seed, 0x7065_726d);
    let mut exceed = 0usize;
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        for g in &groups {
            // Permute x rows within each stratum.
            let mut shuffled = g.clone();
            shuffled.shuffle(&mut rng);
            for (a, b) in g.iter().zip(&shuffled) {
                perm[*a] = *b;
            }
        }
        let xperm: Vec<Vec<f64>> = xs
            .iter()
            .map(|col| (0..n).map(|i| col[perm[i]]).collect())
            .collect();
        if pairwise_stat(&xperm, ys, cs) >= observed {
            exceed += 1;
        }
    }
    Ok(CiResult {
        statistic: observed,
        p_value: (1.0 + exceed as f64) / (1.0 + k as f64),
        method: CiMethodKind::Permutation,
        n_used: n,
        flag: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::root;

    fn table(cols: Vec<(&str, Vec<f64>)>) -> DataTable {
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        let data = cols.into_iter().map(|(_, c)| c).collect();
        DataTable::from_columns(names, data).unwrap()
    }

    fn gaussian(n: usize, rng: &mut impl Rng) -> Vec<f64> {
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn strong_dependence_is_detected_by_all_methods() {
        let mut rng = root(1);
        let n = 1000;
        let x = gaussian(n, &mut rng);
        let y: Vec<f64> = x.iter().map(|v| v + 0.01 * rng.gen::<f64>()).collect();
        let t = table(vec![("x", x), ("y", y)]);
        for kind in [
            CiMethodKind::FisherZ,
            CiMethodKind::Rcot,
            CiMethodKind::Permutation,
        ] {
            let m = CiMethod::new(kind, 7);
            let r = test_ci(&t, &[0], &[1], &[], &m).unwrap();
            assert!(
                r.p_value < 1e-2,
                "{kind}: p={} should reject x ~ y",
                r.p_value
            );
            if kind != CiMethodKind::Permutation {
                assert!(r.p_value < 1e-6, "{kind}: p={}", r.p_value);
            }
        }
    }

    #[test]
    fn vacuous_and_degenerate_inputs() {
        let mut rng = root(2);
        let t = table(vec![
            ("x", gaussian(50, &mut rng)),
            ("c", vec![1.0; 50]),
            ("y", gaussian(50, &mut rng)),
        ]);
        let m = CiMethod::new(CiMethodKind::Rcot, 3);
        let r = test_ci_unconditional(&t, &[], &[2], &m).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.flag, Some(CiFlag::Vacuous));
        let r = test_ci(&t, &[1], &[2], &[], &m).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.flag, Some(CiFlag::ConstantColumn));
        // x == y overlap is rejected.
        assert!(test_ci(&t, &[0], &[0], &[], &m).is_err());
        // Too few rows.
        let small = table(vec![("x", vec![1.0, 2.0]), ("y", vec![2.0, 1.0])]);
        assert!(matches!(
            test_ci(&small, &[0], &[1], &[], &m),
            Err(CiError::InsufficientRows { .. })
        ));
    }

    #[test]
    fn chain_conditioning_removes_dependence() {
        // x -> c -> y: x and y are dependent, independent given c.
        let mut rng = root(3);
        let n = 3000;
        let x = gaussian(n, &mut rng);
        let c: Vec<f64> = x
            .iter()
            .map(|v| 1.5 * v + 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let y: Vec<f64> = c
            .iter()
            .map(|v| 1.5 * v + 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let t = table(vec![("x", x), ("c", c), ("y", y)]);
        for kind in [CiMethodKind::FisherZ, CiMethodKind::Rcot] {
            let m = CiMethod::new(kind, 11);
            let marginal = test_ci(&t, &[0], &[2], &[], &m).unwrap();
            assert!(
                marginal.p_value < 1e-6,
                "{kind} marginal p={}",
                marginal.p_value
            );
            let conditional = test_ci(&t, &[0], &[2], &[1], &m).unwrap();
            assert!(
                conditional.p_value > 0.01,
                "{kind} conditional p={}",
                conditional.p_value
            );
        }
    }

    #[test]
    fn deterministic_given_seed_and_scale_invariant() {
        let mut rng = root(4);
        let n = 400;
        let x = gaussian(n, &mut rng);
        let y = gaussian(n, &mut rng);
        let c = gaussian(n, &mut rng);
        let t1 = table(vec![("x", x.clone()), ("y", y.clone()), ("c", c.clone())]);
        // Positive affine rescaling of all columns.
        let t2 = table(vec![
            ("x", x.iter().map(|v| 3.0 * v + 7.0).collect()),
            ("y", y.iter().map(|v| 0.2 * v - 1.0).collect()),
            ("c", c.iter().map(|v| 10.0 * v).collect()),
        ]);
        let m = CiMethod::new(CiMethodKind::Rcot, 42);
        let r1 = test_ci(&t1, &[0], &[1], &[2], &m).unwrap();
        let r1b = test_ci(&t1, &[0], &[1], &[2], &m).unwrap();
        let r2 = test_ci(&t2, &[0], &[1], &[2], &m).unwrap();
        assert_eq!(r1.p_value, r1b.p_value);
        assert!((r1.p_value - r2.p_value).abs() < 1e-12);
        assert!((r1.statistic - r2.statistic).abs() < 1e-9);
    }

    #[test]
    fn fisher_and_permutation_agree_on_gaussian_decisions() {
        let mut rng = root(5);
        let n = 2000;
        let mut agree = 0;
        let total = 200;
        for i in 0..total {
            let c = gaussian(n, &mut rng);
            // Half null instances (x _|_ y | c), half with direct leakage.
            let leak = if i % 2 == 0 { 0.0 } else { 0.08 };
            let x: Vec<f64> = c
                .iter()
                .map(|v| v + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let y: Vec<f64> = c
                .iter()
                .zip(&x)
                .map(|(cv, xv)| cv + leak * xv + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let t = table(vec![("x", x), ("y", y), ("c", c)]);
            let mf = CiMethod::new(CiMethodKind::FisherZ, 100 + i as u64);
            let mut mp = CiMethod::new(CiMethodKind::Permutation, 100 + i as u64);
            mp.n_permutations = 99;
            let pf = test_ci(&t, &[0], &[1], &[2], &mf).unwrap().p_value;
            let pp = test_ci(&t, &[0], &[1], &[2], &mp).unwrap().p_value;
            if (pf > 0.05) == (pp > 0.05) {
                agree += 1;
            }
        }
        assert!(agree * 100 >= total * 95, "agreement {agree}/{total}");
    }
}
