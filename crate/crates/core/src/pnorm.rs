//! Vector p-norms for real and complex data.

use num_complex::Complex64;

use crate::exponent::Exponent;

/// `(sum |x_i|^p)^(1/p)`, or `max |x_i|` for the infinite exponent.
/// The empty vector has norm 0 for every exponent.
pub fn pnorm(x: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Exponent::Finite(p) => {
            let m = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            // Rescaling by the max keeps |x_i/m|^p inside the exponent range
            // even for large p.
            let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
            m * s.powf(1.0 / p)
        }
    }
}

/// Same as [`pnorm`] with complex moduli.
pub fn pnorm_complex(x: &[Complex64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => x.iter().fold(0.0_f64, |acc, v| acc.max(v.norm())),
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.norm()).sum(),
        Exponent::Finite(p) if p == 2.0 => x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        Exponent::Finite(p) => {
            let m = x.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            let s: f64 = x.iter().map(|v| (v.norm() / m).powf(p)).sum();
            m * s.powf(1.0 / p)
        }
    }
}

/// Gradient (or a subgradient at kinks) of `x -> pnorm(x, p)` at `x`,
/// assuming `pnorm(x, p) > 0`.
pub(crate) fn pnorm_gradient(x: &[f64], p: Exponent) -> Vec<f64> {
    match p {
        Exponent::Infinity => {
            let mut best = 0usize;
            let mut m = 0.0_f64;
            for (i, v) in x.iter().enumerate() {
                if v.abs() > m {
                    m = v.abs();
                    best = i;
                }
            }
            let mut g = vec![0.0; x.len()];
            if m > 0.0 {
                g[best] = x[best].signum();
            }
            g
        }
        Exponent::Finite(p) if p == 1.0 => {
            x.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect()
        }
        Exponent::Finite(p) => {
            let n = pnorm(x, Exponent::Finite(p));
            if n == 0.0 {
                return vec![0.0; x.len()];
            }
            x.iter()
                .map(|v| {
                    if *v == 0.0 {
                        0.0
                    } else {
                        v.signum() * (v.abs() / n).powf(p - 1.0)
                    }
                })
                .collect()
        }
    }
}

/// A unit vector `w` (in the `p`-norm) maximizing `<a, w>`; the maximum equals
/// the dual norm of `a`. Returns `None` when `a == 0`.
pub(crate) fn holder_witness(a: &[f64], p: Exponent) -> Option<Vec<f64>> {
    let n = a.len();
    if a.iter().all(|v| *v == 0.0) {
        return None;
    }
    let w = match p {
        // On the l1 sphere the maximizer is a signed coordinate vector.
        Exponent::Finite(q) if q == 1.0 => {
            let mut best = 0usize;
            let mut m = 0.0_f64;
            for (i, v) in a.iter().enumerate() {
                if v.abs() > m {
                    m = v.abs();
                    best = i;
                }
            }
            let mut w = vec![0.0; n];
            w[best] = a[best].signum();
            w
        }
        Exponent::Infinity => a
            .iter()
            .map(|v| if *v == 0.0 { 1.0 } else { v.signum() })
            .collect(),
        Exponent::Finite(q) => {
            // |w_i| proportional to |a_i|^(q'-1) with q' = q/(q-1).
            let qd = Exponent::Finite(q).dual().value();
            let raw: Vec<f64> = a
                .iter()
                .map(|v| {
                    if *v == 0.0 {
                        0.0
                    } else {
                        v.signum() * v.abs().powf(qd - 1.0)
                    }
                })
                .collect();
            let nn = pnorm(&raw, Exponent::Finite(q));
            raw.iter().map(|v| v / nn).collect()
        }
    };
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        assert_eq!(pnorm(&[3.0, 4.0], e(2.0)), 5.0);
    }

    #[test]
    fn l1_of_ones() {
        assert_eq!(pnorm(&[1.0, 1.0, 1.0, 1.0], e(1.0)), 4.0);
    }

    #[test]
    fn sup_norm_takes_the_max_modulus() {
        assert_eq!(pnorm(&[1.0, -2.0, 3.0], Exponent::Infinity), 3.0);
    }

    #[test]
    fn empty_vector_has_zero_norm() {
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(pnorm(&[], Exponent::new(p).unwrap()), 0.0);
        }
    }

    #[test]
    fn complex_moduli() {
        use num_complex::Complex64;
        let x = [Complex64::new(3.0, 4.0), Complex64::new(0.0, -5.0)];
        assert!((pnorm_complex(&x, e(1.0)) - 10.0).abs() < 1e-12);
        assert!((pnorm_complex(&x, Exponent::Infinity) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn holder_witness_attains_the_dual_norm() {
        let a = [1.0, -2.0, 0.5];
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let p = Exponent::new(p).unwrap();
            let w = holder_witness(&a, p).unwrap();
            assert!((pnorm(&w, p) - 1.0).abs() < 1e-12, "witness not unit for {p}");
            let dot: f64 = a.iter().zip(&w).map(|(x, y)| x * y).sum();
            let dual = pnorm(&a, p.dual());
            assert!(
                (dot - dual).abs() < 1e-10,
                "pairing {dot} vs dual norm {dual} at p={p}"
            );
        }
    }
}
