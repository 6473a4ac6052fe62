//! Gauss–Hermite quadrature over the complex plane.
//!
//! All integrals here use the measure `d²z/π` with `d²z = dx dy`. Whenever
//! the integrand is a polynomial times a Gaussian the rule order is chosen
//! from the polynomial degree so the quadrature is exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::SqueezeParam;
use crate::hermite::{hermite_eval_conj, laguerre_eval, legendre_eval};
use crate::scalar::ComplexPoint;

/// Nodes and weights for `∫ e^{-x²} f(x) dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl HermiteRule {
    /// Rule with `order` nodes, exact for polynomials of degree `2 order - 1`.
    ///
    /// Roots of the orthonormal Hermite recurrence are found by Newton
    /// iteration from the usual asymptotic starting points.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let n = order;
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            for _ in 0..100 {
                let (p, dp) = orthonormal_hermite(n, z, pim4);
                let dz = p / dp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let pp = orthonormal_hermite(n, z, pim4).1;
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^{-x²} f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&vals)
    }

    /// `∫ d²z/π e^{-|z|²} f(z)` by the tensor rule over `(Re z, Im z)`.
    pub fn integrate_plane(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        let mut vals = Vec::with_capacity(self.order() * self.order());
        for (&x, &wx) in self.nodes.iter().zip(&self.weights) {
            for (&y, &wy) in self.nodes.iter().zip(&self.weights) {
                vals.push(f(Complex64::new(x, y)) * (wx * wy / PI));
            }
        }
        pairwise_sum(&vals)
    }
}

/// Value and derivative of the orthonormal Hermite function of degree `n`
/// (without the Gaussian factor).
fn orthonormal_hermite(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum<T>(vals: &[T]) -> T
where
    T: Copy + Zero + std::ops::Add<Output = T>,
{
    match vals.len() {
        0 => T::zero(),
        1 => vals[0],
        n if n <= 8 => vals.iter().fold(T::zero(), |acc, &v| acc + v),
        n => {
            let (lo, hi) = vals.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Parameters of `∫ d²z/π exp(η|z|² + f z + g z*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianIntegralSpec {
    pub eta: ComplexPoint,
    pub f: ComplexPoint,
    pub g: ComplexPoint,
}

impl GaussianIntegralSpec {
    fn validate(&self) -> Result<()> {
        if !(self.eta.re < 0.0) {
            return Err(Error::Domain(format!("Re(eta) = {} must be < 0", self.eta.re)));
        }
        Ok(())
    }
}

/// `-(1/η) exp(-f g / η)`.
pub fn gaussian_integral_analytic(spec: &GaussianIntegralSpec) -> Result<ComplexPoint> {
    spec.validate()?;
    let GaussianIntegralSpec { eta, f, g } = *spec;
    Ok(-(-f * g / eta).exp() / eta)
}

/// Smallest order accepted by [`gaussian_integral_numeric`].
pub const GAUSSIAN_MIN_ORDER: usize = 8;

/// Tensor Gauss–Hermite evaluation over `z = x + iy`.
///
/// The exponent is `η(x² + y²) + (f+g)x + i(f-g)y`. Each real axis is
/// rotated and scaled by the principal `c = √(-η)` (`x = u/c`), which moves
/// the whole quadratic part into the Gauss–Hermite weight; the rotation is
/// admissible because the integrand is entire and decays throughout the
/// swept sector when `Re η < 0`. For real `η` this is the plain rescaling
/// by `√(-η)`. What remains, `exp(((f+g)u + i(f-g)v)/c)`, is entire, so the
/// rule converges superalgebraically.
pub fn gaussian_integral_numeric(spec: &GaussianIntegralSpec, order: usize) -> Result<ComplexPoint> {
    spec.validate()?;
    check_order(order, GAUSSIAN_MIN_ORDER)?;
    let GaussianIntegralSpec { eta, f, g } = *spec;
    let c = (-eta).sqrt();
    let bx = (f + g) / c;
    let by = Complex64::i() * (f - g) / c;
    let rule = HermiteRule::new(order);
    let val = rule.integrate_plane(|w| (bx * w.re + by * w.im).exp());
    Ok(val / (c * c))
}

fn min_order(degree: u32) -> usize {
    degree.div_ceil(2) as usize + 1
}

fn check_order(order: usize, needed: usize) -> Result<()> {
    if order < needed {
        return Err(Error::Domain(format!("quadrature order {order} is below the exactness threshold {needed}")));
    }
    Ok(())
}

/// `∫ d²ξ/π H_{m,n}(ξ, ξ*) e^{-|ξ - α|²}`; equals `α^m α*^n`.
pub fn integral_tvhp_forward(m: u32, n: u32, alpha: ComplexPoint, order: usize) -> Result<ComplexPoint> {
    check_order(order, min_order(m + n))?;
    Ok(HermiteRule::new(order).integrate_plane(|w| hermite_eval_conj(m, n, alpha + w)))
}

/// `∫ d²ξ/π ξ^m ξ*^n e^{-|ξ - α|²}`; equals `i^{m+n} H_{m,n}(-iα, -iα*)`.
pub fn integral_tvhp_reciprocal(m: u32, n: u32, alpha: ComplexPoint, order: usize) -> Result<ComplexPoint> {
    check_order(order, min_order(m + n))?;
    Ok(HermiteRule::new(order).integrate_plane(|w| {
        let xi = alpha + w;
        xi.powu(m) * xi.conj().powu(n)
    }))
}

/// Real symmetric form `xᵀ A x` over `x = (α₁, α₂, β₁, β₂)` for the exponent
/// `-|α|² - |β|² + (αβ + α*β*) τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticForm4 {
    tau: f64,
    matrix: [[f64; 4]; 4],
}

impl QuadraticForm4 {
    pub fn from_tau(tau: f64) -> Self {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = -1.0;
        }
        // αβ + α*β* = 2(α₁β₁ - α₂β₂)
        a[0][2] = tau;
        a[2][0] = tau;
        a[1][3] = -tau;
        a[3][1] = -tau;
        Self { tau, matrix: a }
    }

    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.matrix
    }

    /// Eigenvalues with unit eigenvectors (columns of the rotation
    /// `u± = (α₁ ± β₁)/√2`, `w± = (α₂ ∓ β₂)/√2`).
    pub fn eigen(&self) -> [(f64, [f64; 4]); 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = self.tau;
        [
            (-(1.0 - t), [h, 0.0, h, 0.0]),
            (-(1.0 + t), [h, 0.0, -h, 0.0]),
            (-(1.0 - t), [0.0, h, 0.0, -h]),
            (-(1.0 + t), [0.0, h, 0.0, h]),
        ]
    }

    pub fn is_negative_definite(&self) -> bool {
        self.eigen().iter().all(|(l, _)| *l < 0.0)
    }

    pub fn value(&self, x: &[f64; 4]) -> f64 {
        (0..4).map(|i| (0..4).map(|j| x[i] * self.matrix[i][j] * x[j]).sum::<f64>()).sum()
    }
}

/// Result of the 4D Laguerre-product integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaguerreProduct {
    /// Direct quadrature value.
    pub numeric: f64,
    /// `cosh^{2m}λ P_m(cosh 2λ)`, the published closed form.
    pub paper_value: f64,
    /// `cosh²λ · paper_value`.
    pub corrected_value: f64,
}

/// `∫ d²α d²β/π² L_m(-αβτ) L_m(-α*β*τ) e^{-|α|²-|β|²+(αβ+α*β*)τ}`.
///
/// The exponent is diagonalized by the fixed rotation of [`QuadraticForm4`],
/// each axis is rescaled to a unit Gaussian, and the remaining polynomial of
/// degree `4m` is integrated exactly with a tensor rule.
pub fn integral_laguerre_product(m: u32, sq: &SqueezeParam, order: usize) -> Result<LaguerreProduct> {
    let tau = sq.tau();
    if tau.abs() >= 1.0 {
        return Err(Error::Domain(format!("|tau| = {} must be < 1", tau.abs())));
    }
    check_order(order, 2 * m as usize + 4)?;
    let form = QuadraticForm4::from_tau(tau);
    let eig = form.eigen();
    let scales: Vec<f64> = eig.iter().map(|(l, _)| 1.0 / (-l).sqrt()).collect();
    let jacobian: f64 = scales.iter().product();
    let rule = HermiteRule::new(order);
    let (nodes, weights) = (rule.nodes(), rule.weights());

    let mut vals = Vec::with_capacity(order.pow(4));
    for (i0, &y0) in nodes.iter().enumerate() {
        for (i1, &y1) in nodes.iter().enumerate() {
            for (i2, &y2) in nodes.iter().enumerate() {
                for (i3, &y3) in nodes.iter().enumerate() {
                    let y = [y0 * scales[0], y1 * scales[1], y2 * scales[2], y3 * scales[3]];
                    let mut x = [0.0; 4];
                    for (k, (_, v)) in eig.iter().enumerate() {
                        for c in 0..4 {
                            x[c] += v[c] * y[k];
                        }
                    }
                    let alpha = Complex64::new(x[0], x[1]);
                    let beta = Complex64::new(x[2], x[3]);
                    let f = laguerre_eval(m, -alpha * beta * tau) * laguerre_eval(m, -alpha.conj() * beta.conj() * tau);
                    vals.push(f.re * weights[i0] * weights[i1] * weights[i2] * weights[i3]);
                }
            }
        }
    }
    let numeric = pairwise_sum(&vals) * jacobian / (PI * PI);
    let lambda = sq.lambda();
    let paper_value = lambda.cosh().powi(2 * m as i32) * legendre_eval(m, Complex64::new((2.0 * lambda).cosh(), 0.0)).re;
    Ok(LaguerreProduct {
        numeric,
        paper_value,
        corrected_value: lambda.cosh().powi(2) * paper_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Golub–Welsch: eigenvalues of the Jacobi matrix are the nodes.
    fn golub_welsch(n: usize) -> Vec<f64> {
        let mut j = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            j[(i, i - 1)] = b;
            j[(i - 1, i)] = b;
        }
        let mut e: Vec<f64> = j.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for q in [1, 2, 5, 8, 24, 40, 64] {
            let r = HermiteRule::new(q);
            assert_relative_eq!(r.weights().iter().sum::<f64>(), PI.sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn nodes_match_jacobi_eigenvalues() {
        for q in [3, 10, 24] {
            let r = HermiteRule::new(q);
            for (a, b) in r.nodes().iter().zip(golub_welsch(q)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn monomials_integrated_exactly() {
        // ∫ x^{2j} e^{-x²} = Γ(j + 1/2) = (2j-1)!! √π / 2^j
        for q in [4usize, 10, 24] {
            let r = HermiteRule::new(q);
            for k in 0..(2 * q) as i32 {
                let got = r.integrate(|x| x.powi(k));
                if k % 2 == 1 {
                    let scale = r.integrate(|x| x.abs().powi(k));
                    assert_abs_diff_eq!(got, 0.0, epsilon = 1e-14 * scale);
                } else {
                    let j = k / 2;
                    let want = (1..=j).fold(PI.sqrt(), |acc, i| acc * (2 * i - 1) as f64 / 2.0);
                    assert_relative_eq!(got, want, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn gaussian_integral_examples() {
        let spec = |eta, f, g| GaussianIntegralSpec { eta, f, g };
        let z = c(0.0, 0.0);
        assert_abs_diff_eq!(gaussian_integral_analytic(&spec(c(-1.0, 0.0), z, z)).unwrap().re, 1.0);
        assert_abs_diff_eq!(gaussian_integral_analytic(&spec(c(-2.0, 0.0), z, z)).unwrap().re, 0.5);
        let e = gaussian_integral_analytic(&spec(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_abs_diff_eq!(e.re, std::f64::consts::E, epsilon = 1e-15);
        assert!(gaussian_integral_analytic(&spec(c(0.0, 1.0), z, z)).is_err());
        assert!(gaussian_integral_numeric(&spec(c(0.5, 0.0), z, z), 8).is_err());

        let n = gaussian_integral_numeric(&spec(c(-1.0, 0.0), z, z), 8).unwrap();
        assert_abs_diff_eq!(n.re, 1.0, epsilon = 1e-14);
        let n = gaussian_integral_numeric(&spec(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)), 24).unwrap();
        assert!((n - e).norm() < 1e-10);
        let s = spec(c(-1.0, 0.0), c(0.0, 0.3), c(0.0, -0.3));
        let d = gaussian_integral_numeric(&s, 24).unwrap() - gaussian_integral_analytic(&s).unwrap();
        assert!(d.norm() < 1e-10);
        assert!(gaussian_integral_numeric(&spec(c(-1.0, 0.0), z, z), 7).is_err());
    }

    #[test]
    fn gaussian_integral_complex_eta_converges() {
        let z = c(0.0, 0.0);
        for eta in [c(-1.5, 0.4), c(-0.5, 0.3), c(-2.0, -1.0), c(-0.2, 3.0)] {
            for (f, g) in [(z, z), (c(1.5, 0.0), c(-0.9, 1.2)), (c(0.0, -1.5), c(1.5, 0.0))] {
                let s = GaussianIntegralSpec { eta, f, g };
                let exact = gaussian_integral_analytic(&s).unwrap();
                let q24 = gaussian_integral_numeric(&s, 24).unwrap();
                let q32 = gaussian_integral_numeric(&s, 32).unwrap();
                let scale = exact.norm().max(1.0);
                assert!((q24 - exact).norm() < 1e-10 * scale, "eta={eta} f={f} g={g}");
                assert!((q32 - q24).norm() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn forward_and_reciprocal_examples() {
        let z = c(0.0, 0.0);
        assert_abs_diff_eq!(integral_tvhp_forward(0, 0, c(1.3, -0.4), 2).unwrap().re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(integral_tvhp_forward(1, 1, z, 3).unwrap().norm(), 0.0, epsilon = 1e-14);
        let v = integral_tvhp_forward(1, 0, c(2.0, 0.0), 3).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-14);
        assert!(integral_tvhp_forward(4, 4, z, 2).is_err());

        assert_abs_diff_eq!(integral_tvhp_reciprocal(0, 0, c(0.2, 0.1), 2).unwrap().re, 1.0, epsilon = 1e-14);
        let a = c(0.6, -1.1);
        let v = integral_tvhp_reciprocal(1, 1, a, 3).unwrap();
        assert_abs_diff_eq!(v.re, a.norm_sqr() + 1.0, epsilon = 1e-14);
        let v = integral_tvhp_reciprocal(1, 0, c(1.0, 1.0), 3).unwrap();
        assert!((v - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn quadratic_form_eigenpairs() {
        for tau in [0.0, 0.3, 0.5, -0.7] {
            let q = QuadraticForm4::from_tau(tau);
            assert!(q.is_negative_definite());
            let a = nalgebra::Matrix4::from_fn(|i, j| q.matrix()[i][j]);
            for (l, v) in q.eigen() {
                let v = nalgebra::Vector4::from_column_slice(&v);
                assert_abs_diff_eq!((a * v - v * l).norm(), 0.0, epsilon = 1e-15);
            }
            let mut numeric: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
            numeric.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut analytic: Vec<f64> = q.eigen().iter().map(|(l, _)| *l).collect();
            analytic.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in numeric.iter().zip(&analytic) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-14);
            }
        }
        assert!(!QuadraticForm4::from_tau(1.2).is_negative_definite());
    }

    #[test]
    fn laguerre_product_m0() {
        let sq = SqueezeParam::from_tau(0.5).unwrap();
        let r = integral_laguerre_product(0, &sq, 6).unwrap();
        assert_relative_eq!(r.numeric, 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.paper_value, 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.corrected_value, 4.0 / 3.0, max_relative = 1e-14);
        let r = integral_laguerre_product(0, &SqueezeParam::from_tau(1e-9).unwrap(), 4).unwrap();
        assert_relative_eq!(r.numeric, 1.0, max_relative = 1e-12);
        assert!(integral_laguerre_product(2, &sq, 7).is_err());
    }

    #[test]
    fn laguerre_product_stable_in_order() {
        let sq = SqueezeParam::from_tau(0.3).unwrap();
        for m in 1..=3u32 {
            let lo = integral_laguerre_product(m, &sq, 2 * m as usize + 4).unwrap().numeric;
            let hi = integral_laguerre_product(m, &sq, 2 * m as usize + 10).unwrap().numeric;
            assert_relative_eq!(lo, hi, max_relative = 1e-10);
        }
    }

    #[test]
    fn pairwise_sum_is_fixed_order() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
        assert_abs_diff_eq!(pairwise_sum(&v), v.iter().sum::<f64>(), epsilon = 1e-12);
    }
}
