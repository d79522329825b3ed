//! Dense complex polynomials and a simultaneous root finder.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HolantError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `c_0 + c_1 z + … + c_d z^d` with `c_d ≠ 0`, or the zero polynomial
/// (empty coefficient list).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Drops exactly-zero trailing coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    /// `Π (z − r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        ComplexPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `[z^i]`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `p(z)` and `p'(z)` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> ComplexPoly {
        ComplexPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// `z^d p(1/z)` for the given `d ≥ deg p`.
    pub fn reversed(&self, d: usize) -> ComplexPoly {
        let mut coeffs = vec![ZERO; d + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c;
        }
        ComplexPoly::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Whether `|p(ζ)| ≤ 1e−9·max|c_i|·max(1,|ζ|)^d`.
    pub fn is_root_within_tolerance(&self, zeta: Complex64) -> bool {
        let d = self.degree().unwrap_or(0) as i32;
        self.eval(zeta).norm() <= 1e-9 * self.max_coeff_norm() * zeta.norm().max(1.0).powi(d)
    }
}

const MAX_ITERATIONS: usize = 1000;

/// All roots of `p` with multiplicity, sorted by modulus and then by
/// argument in `(−π, π]`.
///
/// Exactly-zero low-order coefficients are factored out as roots at `0`;
/// the remaining roots come from Aberth–Ehrlich iteration followed by
/// Newton polishing.
pub fn poly_roots(p: &ComplexPoly) -> Result<Vec<Complex64>> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(HolantError::Precondition(
                "root finding needs degree at least 1".into(),
            ))
        }
    };
    let zeros = p.coeffs().iter().take_while(|&&c| c == ZERO).count();
    let mut roots = vec![ZERO; zeros];
    let reduced = ComplexPoly::new(p.coeffs()[zeros..].to_vec());
    if d > zeros {
        roots.extend(aberth(&reduced)?);
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Moduli are compared after rounding to ten significant digits and
/// arguments are taken in `(−π, π]` after rounding to 1e−9, so roots that
/// agree up to rounding noise are ordered consistently.
fn sort_roots(roots: &mut [Complex64]) {
    fn key(z: &Complex64) -> (f64, f64) {
        let r = z.norm();
        let modulus = if r == 0.0 {
            0.0
        } else {
            let scale = 10f64.powi(9 - r.log10().floor() as i32);
            (r * scale).round() / scale
        };
        let mut arg = (z.arg() * 1e9).round() / 1e9;
        if arg <= -PI + 1e-9 {
            arg = PI;
        }
        (modulus, arg)
    }
    roots.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
}

fn aberth(p: &ComplexPoly) -> Result<Vec<Complex64>> {
    let c = p.coeffs();
    let d = c.len() - 1;
    let lead = c[d];
    if d == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    // geometric mean of the root moduli as starting radius
    let radius = (c[0] / lead).norm().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / d as f64 + 0.4))
        .collect();
    let abs_coeffs: Vec<f64> = c.iter().map(|x| x.norm()).collect();
    let mut done = vec![false; d];
    for _ in 0..MAX_ITERATIONS {
        for j in 0..d {
            if done[j] {
                continue;
            }
            let (pz, dpz) = p.eval_with_derivative(z[j]);
            let r = z[j].norm();
            let rounding = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * r + a);
            if pz.norm() <= 4.0 * f64::EPSILON * rounding {
                done[j] = true;
                continue;
            }
            let newton = pz / dpz;
            let repulsion: Complex64 = (0..d)
                .filter(|&l| l != j)
                .map(|l| ONE / (z[j] - z[l]))
                .sum();
            let step = newton / (ONE - newton * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[j] -= step;
            if step.norm() <= 1e-16 * z[j].norm() {
                done[j] = true;
            }
        }
        if done.iter().all(|&x| x) {
            break;
        }
    }
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (pz, dpz) = p.eval_with_derivative(*root);
            let candidate = *root - pz / dpz;
            if candidate.is_finite() && p.eval(candidate).norm() < pz.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }
    if z.iter().all(|&r| p.is_root_within_tolerance(r)) {
        Ok(z)
    } else {
        sort_roots(&mut z);
        Err(HolantError::NonConvergence {
            iterations: MAX_ITERATIONS,
            partial: z,
        })
    }
}
