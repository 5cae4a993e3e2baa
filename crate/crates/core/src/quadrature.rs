//! Gauss–Legendre quadrature.

use crate::{lit, Real};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are refined by Newton iteration from the Chebyshev-like
/// initial guess `cos(π(i + 3/4)/(n + 1/2))`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf: T = lit(n as f64);
    let half = lit::<T>(0.5);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::pi() * (lit::<T>(i as f64) + lit(0.75)) / (nf + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= lit::<T>(1e-15) * (T::one() + x.abs()) {
                let (_, d) = legendre(n, x);
                dp = d;
                break;
            }
        }
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf: T = lit(k as f64);
        let p2 = ((lit::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf: T = lit(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// `∫_a^b g` with the `n`-point rule.
pub fn integrate<T: Real, E>(
    n: usize,
    a: T,
    b: T,
    mut g: impl FnMut(T) -> Result<T, E>,
) -> Result<T, E> {
    let (nodes, weights) = gauss_legendre::<T>(n);
    let half = lit::<T>(0.5) * (b - a);
    let mid = lit::<T>(0.5) * (b + a);
    let mut acc = T::zero();
    for (x, w) in nodes.into_iter().zip(weights) {
        acc += w * g(mid + half * x)?;
    }
    Ok(acc * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 16, 32, 64] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..=12usize {
            for deg in 0..2 * n {
                let got = integrate::<f64, ()>(n, 0.0, 1.0, |x| Ok(x.powi(deg as i32))).unwrap();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((got - exact).abs() < 1e-13, "n = {n}, deg = {deg}");
            }
        }
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre::<f64>(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand() {
        let got = integrate::<f64, ()>(20, 0.0, std::f64::consts::PI, |x| Ok(x.sin())).unwrap();
        assert!((got - 2.0).abs() < 1e-14);
    }
}
