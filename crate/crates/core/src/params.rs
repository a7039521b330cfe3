//! Parameter engine tying source length, min-entropy rate, bias and output
//! length together.
//!
//! A strict [`ParamSet`] satisfies
//!
//! ```text
//! α < λ/3,   β < (λ − 3α)/4,   δ = (λ − 3α − 4β)/4,
//! m ≤ N^α,   ε ≥ N^−β,         ℓ = ⌈(3/δ)·log₂(2m/ε)⌉,   d = 2ℓñ
//! ```
//!
//! These inequalities cannot be met at sizes small enough to enumerate, so a
//! non-strict override mode exists for toy instances. All logarithms are
//! base 2.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported block width. Entries are stored as `u32`.
pub const MAX_N_TILDE: u32 = 32;

/// Relative slack used when comparing derived reals. Parameters such as
/// `λ = 0.9, α = 0.2, β = 0.05` are exact in decimal but not in binary, and
/// `(3/δ)·log₂(64)` evaluates to `720.0000000000006` rather than `720`.
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    /// Block width ñ of the source function's domain.
    pub n_tilde: u32,
    /// Domain size N = 2^ñ.
    pub n: u64,
    /// Source length in bits, N̄ = ñ·N.
    pub n_bar: u64,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: f64,
    /// Output length in bits.
    pub m: u64,
    /// Direct-product arity.
    pub ell: u64,
    /// Seed length in bits, 2ℓñ.
    pub d: u64,
    /// True when the inequalities above were enforced.
    pub strict: bool,
}

impl ParamSet {
    /// Bits in the `x̄` half (and in the `r` half) of the seed.
    pub fn half_seed_bits(&self) -> u64 {
        self.ell * self.n_tilde as u64
    }

    /// Mask selecting the low ñ bits of a block.
    pub fn block_mask(&self) -> u64 {
        self.n - 1
    }

    /// Renders the set as `key=value` lines, one per field.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        let opt = |v: Option<f64>| v.map_or_else(|| "unset".to_string(), fmt_real);
        push("n_tilde", self.n_tilde.to_string());
        push("N", self.n.to_string());
        push("N_bar", self.n_bar.to_string());
        push("lambda", opt(self.lambda));
        push("alpha", opt(self.alpha));
        push("beta", opt(self.beta));
        push("delta", opt(self.delta));
        push("epsilon", fmt_real(self.epsilon));
        push("m", self.m.to_string());
        push("ell", self.ell.to_string());
        push("d", self.d.to_string());
        push("strict", self.strict.to_string());
        out
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_kv())
    }
}

/// Formats a real rounded to 12 decimal places with trailing zeros removed,
/// so `0.02499999999999998` prints as `0.025`.
pub fn fmt_real(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

fn check_n_tilde(n_tilde: u32) -> Result<()> {
    if n_tilde == 0 || n_tilde > MAX_N_TILDE {
        return Err(Error::Invalid(format!(
            "n_tilde must be in 1..={MAX_N_TILDE}, got {n_tilde}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Invalid(format!(
            "epsilon must be in (0,1), got {epsilon}"
        )));
    }
    Ok(())
}

/// `⌈x⌉`, treating values within a relative `REL_TOL` above an integer as
/// that integer.
fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= REL_TOL * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// `δ = (λ − 3α − 4β)/4`.
pub fn amplification_delta(lambda: f64, alpha: f64, beta: f64) -> f64 {
    (lambda - 3.0 * alpha - 4.0 * beta) / 4.0
}

/// `ℓ = ⌈(3/δ)·log₂(2m/ε)⌉`.
pub fn direct_product_arity(delta: f64, m: u64, epsilon: f64) -> u64 {
    ceil_tol((3.0 / delta) * (2.0 * m as f64 / epsilon).log2()) as u64
}

/// Derives a strict parameter set. Fails with the first violated inequality.
pub fn derive_params(
    n_tilde: u32,
    lambda: f64,
    alpha: f64,
    beta: f64,
    m: u64,
    epsilon: f64,
) -> Result<ParamSet> {
    check_n_tilde(n_tilde)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Invalid(format!(
            "lambda must be in (0,1), got {lambda}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::Invalid(format!("alpha must be > 0, got {alpha}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Invalid(format!("beta must be > 0, got {beta}")));
    }
    check_epsilon(epsilon)?;
    if m == 0 {
        return Err(Error::Invalid("m must be >= 1".into()));
    }

    // Strict inequalities: a value within tolerance of the bound counts as
    // reaching it.
    let alpha_bound = lambda / 3.0;
    if alpha >= alpha_bound - REL_TOL * alpha_bound {
        return Err(Error::Constraint("alpha >= lambda/3".into()));
    }
    let beta_bound = (lambda - 3.0 * alpha) / 4.0;
    if beta >= beta_bound - REL_TOL * beta_bound {
        return Err(Error::Constraint("beta >= (lambda - 3*alpha)/4".into()));
    }
    let log_n = n_tilde as f64;
    let m_bound = (log_n * alpha).exp2();
    if m as f64 > m_bound * (1.0 + REL_TOL) {
        return Err(Error::Constraint("m > N^alpha".into()));
    }
    let eps_bound = (-log_n * beta).exp2();
    if epsilon < eps_bound * (1.0 - REL_TOL) {
        return Err(Error::Constraint("epsilon < N^-beta".into()));
    }

    let delta = amplification_delta(lambda, alpha, beta);
    let ell = direct_product_arity(delta, m, epsilon);
    let n = 1u64 << n_tilde;
    Ok(ParamSet {
        n_tilde,
        n,
        n_bar: n_tilde as u64 * n,
        lambda: Some(lambda),
        alpha: Some(alpha),
        beta: Some(beta),
        delta: Some(delta),
        epsilon,
        m,
        ell,
        d: 2 * ell * n_tilde as u64,
        strict: true,
    })
}

/// Builds a non-strict parameter set for test-scale instances. Only
/// positivity and range checks are applied.
pub fn override_params(n_tilde: u32, ell: u64, m: u64, epsilon: f64) -> Result<ParamSet> {
    check_n_tilde(n_tilde)?;
    if ell == 0 {
        return Err(Error::Invalid("ell must be >= 1".into()));
    }
    if m == 0 {
        return Err(Error::Invalid("m must be >= 1".into()));
    }
    check_epsilon(epsilon)?;
    let n = 1u64 << n_tilde;
    Ok(ParamSet {
        n_tilde,
        n,
        n_bar: n_tilde as u64 * n,
        lambda: None,
        alpha: None,
        beta: None,
        delta: None,
        epsilon,
        m,
        ell,
        d: 2 * ell * n_tilde as u64,
        strict: false,
    })
}
