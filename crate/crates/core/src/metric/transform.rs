use super::{Dist, ExtendedMetricSpace};
use crate::{Error, Result};

impl ExtendedMetricSpace {
    /// Drop the point at infinity, leaving the ordinary metric space `Z_ω`.
    pub fn restrict_omega(&self) -> Result<ExtendedMetricSpace> {
        self.omega().ok_or(Error::NoOmega)?;
        self.subspace(&self.finite_indices())
    }

    /// The subspace on `indices` (in the given order). `ω` is kept if selected.
    pub fn subspace(&self, indices: &[usize]) -> Result<ExtendedMetricSpace> {
        for &i in indices {
            self.check_index(i)?;
        }
        let rows = indices
            .iter()
            .map(|&i| indices.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        let labels = indices.iter().map(|&i| self.labels()[i].clone()).collect();
        let omega = self.omega().and_then(|w| indices.iter().position(|&i| i == w));
        ExtendedMetricSpace::new(labels, rows, omega)
    }

    /// Multiply every finite distance by `lambda > 0`.
    pub fn scale(&self, lambda: f64) -> Result<ExtendedMetricSpace> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {lambda}")));
        }
        Ok(self.map_finite(|d| d * lambda))
    }

    /// The snowflake `d^ε`, `0 < ε ≤ 1`, applied to finite entries.
    pub fn snowflake(&self, eps: f64) -> Result<ExtendedMetricSpace> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("snowflake exponent must lie in (0,1], got {eps}")));
        }
        if eps == 1.0 {
            return Ok(self.clone());
        }
        Ok(self.map_finite(|d| d.powf(eps)))
    }

    fn map_finite(&self, f: impl Fn(f64) -> f64) -> ExtendedMetricSpace {
        let mut out = self.clone();
        for d in out.dist.iter_mut() {
            *d = match *d {
                Dist::Finite(v) if v == 0.0 => Dist::ZERO,
                other => other.map_finite(&f),
            };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate, Generator};
    use crate::moebius::ptolemy_defect;

    fn line_with_omega() -> ExtendedMetricSpace {
        let f = Dist::Finite;
        let inf = Dist::Infinite;
        ExtendedMetricSpace::new(
            vec!["0".into(), "1".into(), "2".into(), "w".into()],
            vec![
                vec![f(0.0), f(1.0), f(2.0), inf],
                vec![f(1.0), f(0.0), f(1.0), inf],
                vec![f(2.0), f(1.0), f(0.0), inf],
                vec![inf, inf, inf, f(0.0)],
            ],
            Some(3),
        )
        .unwrap()
    }

    #[test]
    fn restrict_drops_omega() {
        let r = line_with_omega().restrict_omega().unwrap();
        assert_eq!(r.n(), 3);
        assert_eq!(r.omega(), None);
        assert_eq!(r.labels(), ["0", "1", "2"]);
        assert_eq!(r.d(0, 2), 2.0);
        assert!(validate(&r).ok);
    }

    #[test]
    fn restrict_with_leading_omega_shifts_labels() {
        let s = line_with_omega().permute(&[3, 0, 1, 2]).unwrap();
        assert_eq!(s.omega(), Some(0));
        let r = s.restrict_omega().unwrap();
        assert_eq!(r, line_with_omega().restrict_omega().unwrap());
    }

    #[test]
    fn restrict_without_omega_fails() {
        let s = ExtendedMetricSpace::from_line_points(&[0.0, 1.0]);
        assert!(matches!(s.restrict_omega(), Err(Error::NoOmega)));
    }

    #[test]
    fn scale_line() {
        let s = ExtendedMetricSpace::from_line_points(&[0.0, 1.0, 3.0]).scale(2.0).unwrap();
        assert_eq!((s.d(0, 1), s.d(1, 2), s.d(0, 2)), (2.0, 4.0, 6.0));
        let w = line_with_omega().scale(3.0).unwrap();
        assert_eq!(w.get(0, 3), Dist::Infinite);
        assert!(s.scale(0.0).is_err());
        assert!(s.scale(-1.0).is_err());
    }

    #[test]
    fn scale_identity() {
        let s = Generator::euclidean(2, 6, 1.0, 3).build().unwrap();
        assert_eq!(s.scale(1.0).unwrap(), s);
    }

    #[test]
    fn snowflake_line4() {
        let s = Generator::line(4).build().unwrap().snowflake(0.5).unwrap();
        assert_eq!(s.d(0, 3), 3f64.sqrt());
        let x = Generator::random_metric(7, 11).build().unwrap();
        assert_eq!(x.snowflake(1.0).unwrap(), x);
        assert!(x.snowflake(0.0).is_err());
        assert!(x.snowflake(1.5).is_err());
    }

    #[test]
    fn snowflake_of_random_metric_is_ptolemaic() {
        for seed in 0..5 {
            let x = Generator::random_metric(8, seed).build().unwrap();
            let cert = ptolemy_defect(&x.snowflake(0.5).unwrap()).unwrap();
            assert!(cert.defect <= 1e-12, "seed {seed}: {}", cert.defect);
        }
    }
}
