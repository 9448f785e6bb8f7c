//! Gromov products, the four-point hyperbolicity constant and the `PT_κ`
//! family of defects.
//!
//! All scans run over the finite points of a space; the point at infinity,
//! if any, is skipped.

use serde::{Deserialize, Serialize};

use crate::metric::ExtendedMetricSpace;
use crate::scan::{normalized_excess, scan_max, Certificate, Pairing};
use crate::{Error, Result};

fn finite_arg(space: &ExtendedMetricSpace, i: usize) -> Result<()> {
    space.check_index(i)?;
    if space.omega() == Some(i) {
        return Err(Error::OmegaArgument(i));
    }
    Ok(())
}

/// `(x|y)_z = ½(|zx| + |zy| − |xy|)`.
pub fn gromov_product(space: &ExtendedMetricSpace, x: usize, y: usize, z: usize) -> Result<f64> {
    for i in [x, y, z] {
        finite_arg(space, i)?;
    }
    Ok(0.5 * (space.d(z, x) + space.d(z, y) - space.d(x, y)))
}

/// `(x|y)_o − (ω|x)_o − (ω|y)_o`, with a finite point standing in for `ω`.
pub fn relative_gromov_product(
    space: &ExtendedMetricSpace,
    o: usize,
    omega_proxy: usize,
    x: usize,
    y: usize,
) -> Result<f64> {
    Ok(gromov_product(space, x, y, o)?
        - gromov_product(space, omega_proxy, x, o)?
        - gromov_product(space, omega_proxy, y, o)?)
}

#[inline]
fn pair_sum(space: &ExtendedMetricSpace, q: [usize; 4], p: Pairing) -> f64 {
    let [(a, b), (c, d)] = p.pairs(q);
    space.d(a, b) + space.d(c, d)
}

#[inline]
fn quad_max(space: &ExtendedMetricSpace, q: [usize; 4]) -> f64 {
    let [a, b, c, d] = q;
    [space.d(a, b), space.d(a, c), space.d(a, d), space.d(b, c), space.d(b, d), space.d(c, d)]
        .into_iter()
        .fold(0.0, f64::max)
}

/// The pairing's sum minus the larger of the other two.
pub fn gromov_residual(space: &ExtendedMetricSpace, quad: [usize; 4], pairing: Pairing) -> f64 {
    let [o1, o2] = pairing.others();
    pair_sum(space, quad, pairing) - pair_sum(space, quad, o1).max(pair_sum(space, quad, o2))
}

/// Minimal `δ` of the four-point condition: over all 4-subsets, the largest
/// pairing sum minus the second largest. Zero for fewer than four points.
pub fn gromov_delta(space: &ExtendedMetricSpace) -> Certificate {
    let points = space.finite_indices();
    let scan = scan_max(&points, |q| Pairing::ALL.map(|p| gromov_residual(space, q, p)));
    let mut cert = Certificate::from_best(scan.best, scan.scanned, scan.elapsed, 0.0);
    cert.defect = cert.defect.max(0.0);
    cert
}

/// `sn_κ(x)`: `sin(√κ x)/√κ`, `x`, or `sinh(√−κ x)/√−κ`.
pub fn sn_kappa(kappa: f64, x: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * x).sin() / s
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        (s * x).sinh() / s
    } else {
        x
    }
}

/// `sinh(x) · e^{-shift}` without forming `sinh(x)`.
#[inline]
fn sinh_shifted(x: f64, shift: f64) -> f64 {
    0.5 * ((x - shift).exp() - (-x - shift).exp())
}

/// The three `sn_κ(·/2)` products of a quadruple, in [`Pairing::ALL`]
/// order, all multiplied by a common positive factor.
fn sn_products(space: &ExtendedMetricSpace, q: [usize; 4], kappa: f64) -> [f64; 3] {
    let rho = quad_max(space, q);
    Pairing::ALL.map(|p| {
        let [(a, b), (c, d)] = p.pairs(q);
        let (u, v) = (space.d(a, b), space.d(c, d));
        if kappa < 0.0 {
            let s = (-kappa).sqrt() / 2.0;
            let shift = s * rho / 2.0;
            sinh_shifted(s * u, shift) * sinh_shifted(s * v, shift)
        } else {
            sn_kappa(kappa, u / 2.0) * sn_kappa(kappa, v / 2.0)
        }
    })
}

/// Normalized `PT_κ` residual: `(LHS − RHS) / LHS` with the pairing's
/// `sn_κ(·/2)` product on the left.
pub fn pt_kappa_residual(space: &ExtendedMetricSpace, quad: [usize; 4], pairing: Pairing, kappa: f64) -> f64 {
    let prods = sn_products(space, quad, kappa);
    let [o1, o2] = pairing.others();
    normalized_excess(prods[pairing.index()], prods[o1.index()], prods[o2.index()])
}

/// Largest normalized `PT_κ` residual. For `κ > 0` the diameter must stay
/// below `π/√κ`.
pub fn pt_kappa_defect(space: &ExtendedMetricSpace, kappa: f64) -> Result<Certificate> {
    if !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be finite, got {kappa}")));
    }
    if kappa > 0.0 {
        let bound = std::f64::consts::PI / kappa.sqrt();
        let diameter = space.diameter();
        if diameter >= bound {
            return Err(Error::DiameterBound { diameter, bound });
        }
    }
    let points = space.finite_indices();
    if points.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, have: points.len() });
    }
    let scan = scan_max(&points, |q| {
        let prods = sn_products(space, q, kappa);
        Pairing::ALL.map(|p| {
            let [o1, o2] = p.others();
            normalized_excess(prods[p.index()], prods[o1.index()], prods[o2.index()])
        })
    });
    Ok(Certificate::from_best(scan.best, scan.scanned, scan.elapsed, 0.0))
}

/// Both forms of the asymptotic `PT_κ` defect.
///
/// `exp_defect` is the least `δ` with
/// `e^{c S_L} ≤ e^{c S_1} + e^{c S_2} + δ e^{c ρ}` on every labelled
/// quadruple, `c = √−κ / 2`, where the `S` are pairing sums and `ρ` the
/// largest of the six distances. `sn_defect` is the least `δ` of the same
/// inequality written with `sn_κ(·/2)` products. No identity between the
/// two is assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AptCertificate {
    pub kappa: f64,
    pub exp_defect: f64,
    pub exp_witness: Option<[usize; 4]>,
    pub exp_pairing: Option<Pairing>,
    pub sn_defect: f64,
    pub sn_witness: Option<[usize; 4]>,
    pub sn_pairing: Option<Pairing>,
    pub scanned: u64,
    pub elapsed_s: f64,
}

fn check_negative(kappa: f64) -> Result<()> {
    if !(kappa < 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("asymptotic defects need kappa < 0, got {kappa}")));
    }
    Ok(())
}

fn apt_exp_all(space: &ExtendedMetricSpace, q: [usize; 4], kappa: f64) -> [f64; 3] {
    let c = (-kappa).sqrt() / 2.0;
    let rho = quad_max(space, q);
    let terms = Pairing::ALL.map(|p| (c * (pair_sum(space, q, p) - rho)).exp());
    Pairing::ALL.map(|p| {
        let [o1, o2] = p.others();
        terms[p.index()] - terms[o1.index()] - terms[o2.index()]
    })
}

fn apt_sn_all(space: &ExtendedMetricSpace, q: [usize; 4], kappa: f64) -> [f64; 3] {
    // sn_products shifts each product by e^{-cρ}; the 1/(−κ) prefactor of sn² is restored here.
    let prods = sn_products(space, q, kappa).map(|v| v / -kappa);
    Pairing::ALL.map(|p| {
        let [o1, o2] = p.others();
        prods[p.index()] - prods[o1.index()] - prods[o2.index()]
    })
}

/// Exp-form residual `(e^{c S_L} − e^{c S_1} − e^{c S_2}) e^{−cρ}`.
pub fn apt_exp_residual(space: &ExtendedMetricSpace, quad: [usize; 4], pairing: Pairing, kappa: f64) -> f64 {
    apt_exp_all(space, quad, kappa)[pairing.index()]
}

/// Sn-form residual `(sn sn − sn sn − sn sn) e^{−cρ}`.
pub fn apt_sn_residual(space: &ExtendedMetricSpace, quad: [usize; 4], pairing: Pairing, kappa: f64) -> f64 {
    apt_sn_all(space, quad, kappa)[pairing.index()]
}

pub fn apt_defect(space: &ExtendedMetricSpace, kappa: f64) -> Result<AptCertificate> {
    check_negative(kappa)?;
    let points = space.finite_indices();
    if points.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, have: points.len() });
    }
    let exp = scan_max(&points, |q| apt_exp_all(space, q, kappa));
    let sn = scan_max(&points, |q| apt_sn_all(space, q, kappa));
    let (e, s) = (exp.best.unwrap(), sn.best.unwrap());
    Ok(AptCertificate {
        kappa,
        exp_defect: e.value,
        exp_witness: Some(e.quad),
        exp_pairing: Some(Pairing::ALL[e.choice]),
        sn_defect: s.value,
        sn_witness: Some(s.quad),
        sn_pairing: Some(Pairing::ALL[s.choice]),
        scanned: exp.scanned,
        elapsed_s: (exp.elapsed + sn.elapsed).as_secs_f64(),
    })
}

/// Upper bound on the four-point `δ` implied by an asymptotic `PT_{−1}`
/// constant: `2 ln(2(1 + δ_apt))`. Negative inputs are treated as 0.
pub fn hyperbolicity_bound_from_apt(delta_apt: f64) -> f64 {
    2.0 * (2.0 * (1.0 + delta_apt.max(0.0))).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Generator;
    use crate::moebius::ptolemy_defect;

    fn unit_square() -> ExtendedMetricSpace {
        ExtendedMetricSpace::from_euclidean(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])
    }

    #[test]
    fn gromov_products_on_the_line() {
        let line = ExtendedMetricSpace::from_line_points(&[0.0, 1.0, 2.0, 3.0, 5.0, 100.0]);
        assert_eq!(gromov_product(&line, 3, 4, 0).unwrap(), 3.0);
        assert_eq!(gromov_product(&line, 3, 3, 0).unwrap(), line.d(0, 3));
        assert_eq!(gromov_product(&line, 0, 2, 1).unwrap(), 0.0);
        assert_eq!(relative_gromov_product(&line, 0, 5, 3, 4).unwrap(), -5.0);
        // x = y collapses to |ox| − 2(ω|x)_o.
        let r = relative_gromov_product(&line, 0, 5, 2, 2).unwrap();
        assert_eq!(r, line.d(0, 2) - 2.0 * gromov_product(&line, 5, 2, 0).unwrap());
    }

    #[test]
    fn gromov_product_rejects_omega() {
        let inv = crate::moebius::involute(&Generator::line(4).build().unwrap(), 0).unwrap().space;
        assert!(matches!(gromov_product(&inv, 0, 1, 2), Err(Error::OmegaArgument(0))));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(gromov_delta(&Generator::line(4).build().unwrap()).defect, 0.0);
        let sq = gromov_delta(&unit_square());
        assert!((sq.defect - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-15);
        assert_eq!(sq.pairing, Some(Pairing::Diagonals));
        let tiny = gromov_delta(&Generator::line(3).build().unwrap());
        assert_eq!((tiny.defect, tiny.witness, tiny.scanned), (0.0, None, 0));
    }

    #[test]
    fn delta_matches_brute_force() {
        let x = Generator::random_metric(7, 21).build().unwrap();
        let mut oracle = 0.0f64;
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    for d in c + 1..7 {
                        let mut s = [
                            x.d(a, b) + x.d(c, d),
                            x.d(a, c) + x.d(b, d),
                            x.d(a, d) + x.d(b, c),
                        ];
                        s.sort_by(f64::total_cmp);
                        oracle = oracle.max(s[2] - s[1]);
                    }
                }
            }
        }
        assert_eq!(gromov_delta(&x).defect, oracle);
    }

    #[test]
    fn sn_values() {
        assert_eq!(sn_kappa(0.0, 1.7), 1.7);
        assert!((sn_kappa(-1.0, 1.0) - 1.175_201_193_643_801_4).abs() < 1e-15);
        assert!((sn_kappa(1.0, std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
        assert!((sn_kappa(-4.0, 0.5) - 1f64.sinh() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn pt_kappa_examples() {
        let sq = pt_kappa_defect(&unit_square(), 0.0).unwrap();
        assert!(sq.defect.abs() < 1e-15);
        for seed in 0..20 {
            let x = Generator::random_metric(7, seed).build().unwrap();
            let a = pt_kappa_defect(&x, 0.0).unwrap().defect;
            let b = ptolemy_defect(&x).unwrap().defect;
            assert!((a - b).abs() <= 1e-12, "seed {seed}: {a} vs {b}");
        }
        let big = Generator::line(5).build().unwrap();
        assert!(matches!(pt_kappa_defect(&big, 1.0), Err(Error::DiameterBound { .. })));
        assert!(pt_kappa_defect(&big.scale(0.5).unwrap(), 1.0).is_ok());
    }

    #[test]
    fn pt_kappa_witness_reproduces() {
        let x = Generator::random_metric(8, 2).build().unwrap();
        for kappa in [-2.0, -0.5, 0.0, 0.01] {
            let c = pt_kappa_defect(&x, kappa).unwrap();
            let again = pt_kappa_residual(&x, c.witness.unwrap(), c.pairing.unwrap(), kappa);
            assert!((again - c.defect).abs() <= 1e-12);
        }
    }

    #[test]
    fn apt_equilateral() {
        let eq = ExtendedMetricSpace::from_fn(4, |_, _| 2.0);
        let c = apt_defect(&eq, -1.0).unwrap();
        assert!((c.exp_defect + std::f64::consts::E).abs() < 1e-14);
        assert!(matches!(apt_defect(&eq, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            apt_defect(&Generator::line(3).build().unwrap(), -1.0),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn apt_flat_strip() {
        // Frozen from an mpmath evaluation of (e^{√101} − e^{10} − e) / e^{√101/2}.
        let c = apt_defect(&Generator::strip(1.0, 10.0).build().unwrap(), -1.0).unwrap();
        assert!((c.exp_defect - 7.385_101_212_467_071).abs() < 1e-9);
        assert_eq!(c.exp_witness, Some([0, 1, 2, 3]));
        assert_eq!(c.exp_pairing, Some(Pairing::Diagonals));
    }

    #[test]
    fn apt_sn_form_matches_direct_formula() {
        let x = Generator::random_metric(6, 5).build().unwrap();
        let kappa: f64 = -0.7;
        let s = (-kappa).sqrt();
        let sn = |u: f64| sn_kappa(kappa, u / 2.0);
        let c = apt_defect(&x, kappa).unwrap();
        let q = c.sn_witness.unwrap();
        let [a, b, cc, d] = q;
        let rho = quad_max(&x, q);
        let direct = (sn(x.d(a, cc)) * sn(x.d(b, d)) - sn(x.d(a, b)) * sn(x.d(cc, d)) - sn(x.d(a, d)) * sn(x.d(b, cc)))
            * (-(s / 2.0) * rho).exp();
        if c.sn_pairing == Some(Pairing::Diagonals) {
            assert!((direct - c.sn_defect).abs() < 1e-9 * (1.0 + direct.abs()));
        }
        let again = apt_sn_residual(&x, q, c.sn_pairing.unwrap(), kappa);
        assert!((again - c.sn_defect).abs() <= 1e-12 * (1.0 + again.abs()));
        let again = apt_exp_residual(&x, c.exp_witness.unwrap(), c.exp_pairing.unwrap(), kappa);
        assert!((again - c.exp_defect).abs() <= 1e-12 * (1.0 + again.abs()));
    }

    #[test]
    fn apt_survives_huge_distances() {
        let x = Generator::strip(1.0, 1000.0).build().unwrap();
        let c = apt_defect(&x, -1.0).unwrap();
        assert!(c.exp_defect.is_finite() && c.exp_defect > 0.0);
        assert!(c.sn_defect.is_finite());
    }

    #[test]
    fn hyperbolicity_bound_values() {
        assert!((hyperbolicity_bound_from_apt(0.0) - 1.386_294_361_119_890_6).abs() < 1e-15);
        assert!((hyperbolicity_bound_from_apt(4.0) - 4.605_170_185_988_091).abs() < 1e-14);
    }
}
