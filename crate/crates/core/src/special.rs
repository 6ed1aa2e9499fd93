//! Digamma, log-gamma, Jacobi polynomials and Gauss–Legendre quadrature.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k} / (2k)` for k = 1..7.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// `B_{2k} / (2k (2k − 1))` for k = 1..7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

const ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma function `Ψ(z) = Γ'(z)/Γ(z)` for `z > 0`.
///
/// Shifts the argument up to `z ≥ 10` with `Ψ(z) = Ψ(z+1) − 1/z`, then
/// sums the asymptotic series through the `B₁₄` term.
pub fn digamma(z: f64) -> Result<f64> {
    ensure!(z > 0.0 && z.is_finite(), InvalidArgument, "digamma needs a finite z > 0, got {z}");
    let mut x = z;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += 1.0 / x;
        x += 1.0;
    }
    Ok(digamma_asymptotic(x) - shift)
}

fn digamma_asymptotic(x: f64) -> f64 {
    x.ln() + digamma_asymptotic_excess(x)
}

// Ψ(x) − ln x for large x.
fn digamma_asymptotic_excess(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut series = 0.0;
    for c in DIGAMMA_ASYMP {
        series += c * pow;
        pow *= inv2;
    }
    -0.5 / x - series
}

/// `Ψ(2ⁿ + 1) − n log 2`, valid for every `n` up to 1024 without forming `2ⁿ`
/// once it leaves the exactly representable range.
pub fn digamma_pow2_plus_one_excess(n: u32) -> f64 {
    if n <= 50 {
        let z = 2f64.powi(n as i32);
        // Ψ(z+1) = Ψ(z) + 1/z.
        let excess = if z >= ASYMPTOTIC_FROM {
            digamma_asymptotic_excess(z)
        } else {
            digamma(z).expect("z >= 1") - z.ln()
        };
        return excess + 1.0 / z;
    }
    // Ψ(z+1) − ln z = 1/(2z) − Σ B_{2k}/(2k z^{2k}) with z = 2ⁿ ≥ 2⁵⁰; the
    // first correction 1/(12 z²) is already below 1e-31.
    (-(n as f64) - 1.0).exp2()
}

/// Natural logarithm of the gamma function for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    ensure!(z > 0.0 && z.is_finite(), InvalidArgument, "log_gamma needs a finite z > 0, got {z}");
    let mut x = z;
    let mut log_prod = 0.0;
    let mut prod = 1.0;
    while x < ASYMPTOTIC_FROM {
        prod *= x;
        if prod > 1e280 {
            log_prod += prod.ln();
            prod = 1.0;
        }
        x += 1.0;
    }
    log_prod += prod.ln();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = 0.0;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series - log_prod)
}

/// `log(n!)`.
pub fn log_factorial(n: u64) -> f64 {
    // n + 1 >= 1, so the argument is always valid.
    log_gamma(n as f64 + 1.0).expect("positive argument")
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
pub fn jacobi_poly(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut last = 1.0;
    JacobiRecurrence::new(a, b, x).take(n + 1).for_each(|p| last = p);
    last
}

/// All of `P_0^{(a,b)}(x), …, P_n^{(a,b)}(x)`.
pub fn jacobi_sequence(n: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    JacobiRecurrence::new(a, b, x).take(n + 1).collect()
}

/// Iterator over `P_0, P_1, …` at a fixed point.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    a: f64,
    b: f64,
    x: f64,
    n: usize,
    prev: f64,
    curr: f64,
}

impl JacobiRecurrence {
    pub fn new(a: f64, b: f64, x: f64) -> Self {
        Self { a, b, x, n: 0, prev: 0.0, curr: 1.0 }
    }
}

impl Iterator for JacobiRecurrence {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let (a, b, x) = (self.a, self.b, self.x);
        let value = match self.n {
            0 => 1.0,
            1 => 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x,
            n => {
                let n = n as f64;
                let s = 2.0 * n + a + b;
                let lead = 2.0 * n * (n + a + b) * (s - 2.0);
                let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
                let c2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
                (c1 * self.curr - c2 * self.prev) / lead
            }
        };
        if self.n > 0 {
            self.prev = self.curr;
        }
        self.curr = value;
        self.n += 1;
        Some(value)
    }
}

/// Nodes and positive weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image of a rule on `[−1, 1]` onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> QuadratureRule {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        QuadratureRule {
            nodes: self.nodes.iter().map(|t| mid + half * t).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }
}

/// `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    ensure!(n >= 1, InvalidArgument, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp.is_finite() {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Number of dyadic panels accumulating towards `x = 1`.
const GRADED_LEVELS: u32 = 40;
const MAX_DOUBLINGS: u32 = 6;

/// Composite Gauss–Legendre rule on `[0, 1]` with panels
/// `[0, ½], [½, ¾], …` graded geometrically towards `x = 1`, each carrying
/// `per_panel` nodes. Integrands with logarithmic endpoint behaviour at 1
/// converge geometrically in `per_panel` on this mesh.
pub fn graded_unit_rule(per_panel: usize) -> Result<QuadratureRule> {
    let base = gauss_legendre(per_panel)?;
    let mut nodes = Vec::with_capacity(per_panel * (GRADED_LEVELS as usize + 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    let mut lo = 0.0;
    for level in 1..=GRADED_LEVELS {
        let hi = 1.0 - (-(level as f64)).exp2();
        let panel = base.mapped(lo, hi);
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
        lo = hi;
    }
    let last = base.mapped(lo, 1.0);
    // Keep nodes strictly inside the interval after rounding.
    nodes.extend(last.nodes.into_iter().map(|x| x.min(1.0 - f64::EPSILON / 2.0)));
    weights.extend(last.weights);
    Ok(QuadratureRule { nodes, weights })
}

/// `∫₀¹ f` on the graded mesh, doubling the per-panel order from
/// `initial_nodes` until two successive values differ by less than
/// `tol · max(1, |I|)`.
pub fn integrate_unit_interval<F: FnMut(f64) -> f64>(mut f: F, initial_nodes: usize, tol: f64) -> Result<f64> {
    let mut n = initial_nodes.max(2);
    let mut prev = graded_unit_rule(n)?.integrate(&mut f);
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = graded_unit_rule(n)?.integrate(&mut f);
        if (next - prev).abs() < tol * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Accuracy(format!(
        "unit-interval quadrature did not converge to {tol:e} after {MAX_DOUBLINGS} doublings"
    )))
}
