//! Random-intercept linear mixed model fitted by maximum likelihood.
//!
//! Model: `y = Xβ + Zu + ε`, `u ~ N(0, σu² I)` per participle, `ε ~ N(0, σe² I)`.
//! Writing `λ = σu²/σe²`, each group's covariance is `σe² (I + λ 11ᵀ)` with
//! inverse `(I − w 11ᵀ)/σe²`, `w = λ/(1 + nλ)`. For fixed λ, β is the GLS
//! solution and σe² = r'H⁻¹r / N in closed form, leaving a one-dimensional
//! profiled log-likelihood in log λ that is maximized by golden-section search.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::extract::ConstructionKind;
use crate::stats::special::{chi2_sf, normal_two_sided_p};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmmError {
    #[error("need at least 2 groups, found {0}")]
    TooFewGroups(usize),
    #[error("singular design: {0}")]
    Design(String),
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("full model log-likelihood {full} is below reduced {reduced}")]
    FitQuality { full: f64, reduced: f64 },
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRow {
    pub participle: String,
    pub construction: ConstructionKind,
    pub entropy_bits: f64,
}

impl LongRow {
    pub fn new(participle: &str, construction: ConstructionKind, entropy_bits: f64) -> Self {
        LongRow {
            participle: participle.to_string(),
            construction,
            entropy_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmmFit {
    /// Coefficient names: "intercept", then one per non-baseline level.
    pub terms: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub sigma_u2: f64,
    pub sigma_e2: f64,
    pub loglik: f64,
    pub n_obs: usize,
    pub n_groups: usize,
}

impl LmmFit {
    pub fn coef(&self, term: &str) -> Option<f64> {
        self.terms.iter().position(|t| t == term).map(|i| self.beta[i])
    }

    pub fn t_of(&self, term: &str) -> Option<f64> {
        self.terms.iter().position(|t| t == term).map(|i| self.t[i])
    }

    /// Normal-approximation two-sided p-values for each t.
    pub fn p_values(&self) -> Vec<f64> {
        self.t.iter().map(|&t| normal_two_sided_p(t)).collect()
    }
}

/// Search interval for ln λ and the golden-section tolerance.
pub const LOG_LAMBDA_RANGE: (f64, f64) = (-18.0, 18.0);
pub const GOLDEN_TOL: f64 = 1e-10;

/// Fits with the four construction levels, hyphenated as baseline.
pub fn fit_lmm(rows: &[LongRow], include_construction: bool) -> Result<LmmFit, LmmError> {
    fit_lmm_levels(rows, &ConstructionKind::ALL, include_construction)
}

/// Fits with treatment coding over `levels`; `levels[0]` is the baseline.
/// Every row must belong to one of `levels` and every level must have a row.
pub fn fit_lmm_levels(
    rows: &[LongRow],
    levels: &[ConstructionKind],
    include_construction: bool,
) -> Result<LmmFit, LmmError> {
    if levels.is_empty() {
        return Err(LmmError::Design("no construction levels".into()));
    }
    for r in rows {
        if !levels.contains(&r.construction) {
            return Err(LmmError::Design(format!(
                "row for {} outside the model levels",
                r.construction
            )));
        }
        if !r.entropy_bits.is_finite() {
            return Err(LmmError::Input(format!("non-finite response for {}", r.participle)));
        }
    }
    if include_construction {
        for l in levels {
            if !rows.iter().any(|r| r.construction == *l) {
                return Err(LmmError::Design(format!("level {l} absent from all rows")));
            }
        }
    }
    let mut group_index: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows {
        let next = group_index.len();
        group_index.entry(r.participle.as_str()).or_insert(next);
    }
    if group_index.len() < 2 {
        return Err(LmmError::TooFewGroups(group_index.len()));
    }

    let mut terms = vec!["intercept".to_string()];
    if include_construction {
        terms.extend(levels[1..].iter().map(|l| l.as_str().to_string()));
    }
    let p = terms.len();
    let mut groups: Vec<Group> = (0..group_index.len()).map(|_| Group::default()).collect();
    for r in rows {
        let mut x = vec![0.0; p];
        x[0] = 1.0;
        if include_construction {
            if let Some(k) = levels[1..].iter().position(|l| *l == r.construction) {
                x[k + 1] = 1.0;
            }
        }
        let g = &mut groups[group_index[r.participle.as_str()]];
        g.x.push(x);
        g.y.push(r.entropy_bits);
    }
    let profile = Profile { groups, p };
    profile.fit(terms)
}

#[derive(Debug, Default)]
struct Group {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

struct Profile {
    groups: Vec<Group>,
    p: usize,
}

struct Evaluation {
    loglik: f64,
    /// d loglik / dλ
    score: f64,
    beta: DVector<f64>,
    sigma_e2: f64,
    /// X'H⁻¹X
    info: DMatrix<f64>,
}

impl Profile {
    fn n_obs(&self) -> usize {
        self.groups.iter().map(|g| g.y.len()).sum()
    }

    /// Uses within-group centering: for a group of size n with means x̄, ȳ,
    /// `Σ xxᵀ − w (Σx)(Σx)ᵀ = Σ (x − x̄)(x − x̄)ᵀ + n x̄x̄ᵀ / (1 + nλ)`, which stays
    /// accurate as λ grows.
    fn evaluate(&self, lambda: f64) -> Result<Evaluation, LmmError> {
        let p = self.p;
        let mut a = DMatrix::<f64>::zeros(p, p);
        let mut b = DVector::<f64>::zeros(p);
        for g in &self.groups {
            let n = g.y.len() as f64;
            let shrink = n / (1.0 + n * lambda);
            let xbar = DVector::from_fn(p, |i, _| g.x.iter().map(|x| x[i]).sum::<f64>() / n);
            let ybar = g.y.iter().sum::<f64>() / n;
            for (x, &y) in g.x.iter().zip(&g.y) {
                let dx = DVector::from_fn(p, |i, _| x[i] - xbar[i]);
                a += &dx * dx.transpose();
                b += &dx * (y - ybar);
            }
            a += shrink * &xbar * xbar.transpose();
            b += shrink * ybar * &xbar;
        }
        let chol = a
            .clone()
            .cholesky()
            .ok_or_else(|| LmmError::Design("fixed-effect design is rank deficient".into()))?;
        let beta = chol.solve(&b);
        let mut rss = 0.0;
        let mut log_det = 0.0;
        let mut shrunk_sq = 0.0;
        let mut trace = 0.0;
        for g in &self.groups {
            let n = g.y.len() as f64;
            let r: Vec<f64> =
                g.x.iter()
                    .zip(&g.y)
                    .map(|(x, &y)| y - x.iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>())
                    .collect();
            let rbar = r.iter().sum::<f64>() / n;
            rss += r.iter().map(|v| (v - rbar).powi(2)).sum::<f64>();
            rss += n * rbar * rbar / (1.0 + n * lambda);
            log_det += (n * lambda).ln_1p();
            shrunk_sq += (n * rbar / (1.0 + n * lambda)).powi(2);
            trace += n / (1.0 + n * lambda);
        }
        let n = self.n_obs() as f64;
        let sigma_e2 = rss / n;
        if !sigma_e2.is_finite() || sigma_e2 <= 0.0 {
            return Err(LmmError::Degenerate("zero residual variance".into()));
        }
        let loglik = -0.5 * (n * (2.0 * std::f64::consts::PI).ln() + n * sigma_e2.ln() + n + log_det);
        // envelope theorem: d(r'H⁻¹r)/dλ = −Σ_g (1'H_g⁻¹r_g)² at the GLS β
        let score = 0.5 * n * shrunk_sq / rss - 0.5 * trace;
        Ok(Evaluation {
            loglik,
            score,
            beta,
            sigma_e2,
            info: a,
        })
    }

    fn loglik_at_log_lambda(&self, theta: f64) -> f64 {
        self.evaluate(theta.exp())
            .map(|e| e.loglik)
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Coarse grid to bracket the maximum, then golden-section refinement.
    fn maximize(&self) -> f64 {
        let (lo, hi) = LOG_LAMBDA_RANGE;
        let steps = 144;
        let h = (hi - lo) / steps as f64;
        let grid: Vec<f64> = (0..=steps)
            .map(|i| self.loglik_at_log_lambda(lo + h * i as f64))
            .collect();
        let best = grid
            .iter()
            .enumerate()
            .fold(0, |bi, (i, &v)| if v > grid[bi] { i } else { bi });
        let a = lo + h * best.saturating_sub(1) as f64;
        let b = (lo + h * (best + 1) as f64).min(hi);
        let theta = golden_section_max(|t| self.loglik_at_log_lambda(t), a, b, GOLDEN_TOL);
        self.polish(theta)
    }

    /// Golden-section only resolves ln λ to about √ε because the likelihood is
    /// flat at the top; bisection on the analytic score resolves it fully.
    fn polish(&self, theta: f64) -> f64 {
        let score = |t: f64| self.evaluate(t.exp()).map(|e| e.score).ok();
        let (mut lo, mut hi) = (theta - 1e-3, theta + 1e-3);
        match (score(lo), score(hi)) {
            (Some(a), Some(b)) if a > 0.0 && b < 0.0 => {}
            _ => return theta,
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match score(mid) {
                Some(s) if s > 0.0 => lo = mid,
                Some(_) => hi = mid,
                None => return theta,
            }
        }
        let polished = 0.5 * (lo + hi);
        if self.loglik_at_log_lambda(polished) >= self.loglik_at_log_lambda(theta) - 1e-9 {
            polished
        } else {
            theta
        }
    }

    fn fit(&self, terms: Vec<String>) -> Result<LmmFit, LmmError> {
        let theta = self.maximize();
        let interior = self.evaluate(theta.exp())?;
        let boundary = self.evaluate(0.0)?;
        let (lambda, eval) = if boundary.loglik + 1e-12 >= interior.loglik {
            (0.0, boundary)
        } else {
            (theta.exp(), interior)
        };
        let cov = eval
            .info
            .clone()
            .try_inverse()
            .ok_or_else(|| LmmError::Design("singular information matrix".into()))?
            * eval.sigma_e2;
        let beta: Vec<f64> = eval.beta.iter().copied().collect();
        let se: Vec<f64> = (0..self.p).map(|i| cov[(i, i)].sqrt()).collect();
        let t = beta.iter().zip(&se).map(|(b, s)| b / s).collect();
        Ok(LmmFit {
            terms,
            beta,
            se,
            t,
            sigma_u2: lambda * eval.sigma_e2,
            sigma_e2: eval.sigma_e2,
            loglik: eval.loglik,
            n_obs: self.n_obs(),
            n_groups: self.groups.len(),
        })
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // endpoints of the original bracket are never evaluated by the loop
    [(mid, f(mid)), (c, fc), (d, fd)]
        .into_iter()
        .fold(
            (mid, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
        .0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtResult {
    pub chi2: f64,
    pub df: u32,
    pub p: f64,
}

/// Log-likelihood slack tolerated before a nested comparison is an error.
pub const LRT_TOLERANCE: f64 = 1e-6;

pub fn lrt(full: &LmmFit, reduced: &LmmFit, df: u32) -> Result<LrtResult, LmmError> {
    if df == 0 {
        return Err(LmmError::Input("LRT needs df >= 1".into()));
    }
    let diff = full.loglik - reduced.loglik;
    if diff < -LRT_TOLERANCE {
        return Err(LmmError::FitQuality {
            full: full.loglik,
            reduced: reduced.loglik,
        });
    }
    let chi2 = (2.0 * diff).max(0.0);
    Ok(LrtResult {
        chi2,
        df,
        p: chi2_sf(chi2, df),
    })
}
