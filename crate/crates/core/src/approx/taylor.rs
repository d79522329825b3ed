use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HolantError, Result};
use crate::multiset::binomial;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Guarantee requested from the approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `e^{−ε} ≤ |value/p| ≤ e^{ε}` and angle at most `ε`.
    Multiplicative,
    /// `ln|p|` within `ε·|V|`.
    Additive,
}

impl std::str::FromStr for Mode {
    type Err = HolantError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mult" | "multiplicative" => Ok(Mode::Multiplicative),
            "add" | "additive" => Ok(Mode::Additive),
            other => Err(HolantError::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

/// `f^{(0)}(0), …, f^{(n)}(0)` for `f = ln p` on the principal branch at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivatives(pub Vec<Complex64>);

impl LogDerivatives {
    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// `T_n(f)(t) = Σ_{j ≤ n} f^{(j)}(0) t^j / j!`.
    pub fn taylor(&self, t: Complex64) -> Complex64 {
        let mut sum = ZERO;
        let mut term = Complex64::new(1.0, 0.0);
        for (j, d) in self.0.iter().enumerate() {
            if j > 0 {
                term *= t / j as f64;
            }
            sum += d * term;
        }
        sum
    }
}

/// Solves `p^{(m)} = Σ_{j<m} C(m−1, j) p^{(j)} f^{(m−j)}` for
/// `f^{(1)}, …, f^{(n)}` given `p^{(0)}, …, p^{(n)}`.
pub fn log_derivatives_from_p(p: &[Complex64], n: usize) -> Result<LogDerivatives> {
    if p.len() <= n {
        return Err(HolantError::Precondition(format!(
            "{} derivatives given, order {n} requested",
            p.len()
        )));
    }
    if p[0] == ZERO {
        return Err(HolantError::ZeroPartition(
            "p(0) = 0, the logarithm is undefined at the origin".into(),
        ));
    }
    let mut f = vec![ZERO; n + 1];
    f[0] = p[0].ln();
    for m in 1..=n {
        let mut acc = p[m];
        for j in 1..m {
            acc -= p[j] * f[m - j] * binomial(m - 1, j);
        }
        f[m] = acc / p[0];
    }
    Ok(LogDerivatives(f))
}

/// Inverse of [`log_derivatives_from_p`]: `p^{(0)} = e^{f(0)}` and the
/// same triangular recurrence.
pub fn p_from_log_derivatives(f: &LogDerivatives) -> Vec<Complex64> {
    let n = f.order();
    let mut p = vec![ZERO; n + 1];
    if f.0.is_empty() {
        return p;
    }
    p[0] = f.0[0].exp();
    for m in 1..=n {
        p[m] = (0..m).map(|j| p[j] * f.0[m - j] * binomial(m - 1, j)).sum();
    }
    p
}

/// `d·q0^{n+1}/((n+1)(1−q0))`, the bound on `|T_n(f)(t) − f(t)|` for a
/// degree-`d` polynomial without roots in `|z| ≤ |t|/q0`.
pub fn taylor_bound(d: usize, q0: f64, n: usize) -> f64 {
    if q0 == 0.0 {
        return 0.0;
    }
    d as f64 * q0.powi(n as i32 + 1) / ((n as f64 + 1.0) * (1.0 - q0))
}

/// Smallest `n` whose bound is at most `eps` (multiplicative) or `d·eps`
/// (additive).
pub fn taylor_order(d: usize, q0: f64, eps: f64, mode: Mode) -> Result<usize> {
    if !(0.0..1.0).contains(&q0) || !(eps > 0.0) {
        return Err(HolantError::Precondition(format!(
            "need 0 <= q0 < 1 and eps > 0, got q0 = {q0}, eps = {eps}"
        )));
    }
    let target = match mode {
        Mode::Multiplicative => eps,
        Mode::Additive => d as f64 * eps,
    };
    let mut n = 0;
    while taylor_bound(d, q0, n) > target {
        n += 1;
    }
    Ok(n)
}
