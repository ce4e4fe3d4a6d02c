//! Piecewise-constant material data and the scaled Lamé coefficients.
//!
//! Coefficients are scaled by `1 + nu`, so `mu = E/2` and
//! `1/lambda = (1 - 2 nu) / (E nu)`. Only the inverse of lambda is stored,
//! which keeps the incompressible limit `nu = 0.5` exact.

use std::collections::BTreeMap;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scaled shear modulus and inverse first Lamé parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lame {
    pub mu: f64,
    pub inv_lambda: f64,
}

pub fn lame_from(young: f64, nu: f64) -> Result<Lame> {
    check_nu(nu)?;
    if !(young > 0.0 && young.is_finite()) {
        return Err(Error::Material(format!(
            "Young modulus must be positive and finite, got {young}"
        )));
    }
    Ok(Lame {
        mu: young / 2.0,
        inv_lambda: (1.0 - 2.0 * nu) / (young * nu),
    })
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 0.5 {
        Ok(())
    } else {
        Err(Error::Material(format!("Poisson ratio must lie in (0, 0.5], got {nu}")))
    }
}

/// Unscaled eigenvalue and the matching natural frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unscaled {
    pub kappa_hat: c64,
    pub frequency: c64,
}

/// `kappa_hat = kappa / (1 + nu)`, `frequency = sqrt(kappa_hat)` (principal root).
pub fn unscale_eigenvalue(kappa: c64, nu: f64) -> Unscaled {
    let kappa_hat = kappa / (1.0 + nu);
    Unscaled {
        kappa_hat,
        frequency: kappa_hat.sqrt(),
    }
}

/// Inverse of [`unscale_eigenvalue`] on the eigenvalue part.
pub fn scale_eigenvalue(kappa_hat: f64, nu: f64) -> f64 {
    kappa_hat * (1.0 + nu)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub young: f64,
    pub density: f64,
}

/// Material parameters keyed by id, with one global Poisson ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialTable {
    nu: f64,
    entries: BTreeMap<u32, Material>,
}

impl MaterialTable {
    pub fn new(nu: f64, entries: impl IntoIterator<Item = (u32, Material)>) -> Result<Self> {
        check_nu(nu)?;
        let entries: BTreeMap<u32, Material> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::Material("material table is empty".into()));
        }
        for (id, m) in &entries {
            lame_from(m.young, nu).map_err(|e| Error::Material(format!("material {id}: {e}")))?;
            if !(m.density > 0.0 && m.density.is_finite()) {
                return Err(Error::Material(format!(
                    "material {id}: density must be positive and finite, got {}",
                    m.density
                )));
            }
        }
        Ok(Self { nu, entries })
    }

    /// One material with id 0.
    pub fn homogeneous(nu: f64, young: f64, density: f64) -> Result<Self> {
        Self::new(nu, [(0, Material { young, density })])
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn entries(&self) -> &BTreeMap<u32, Material> {
        &self.entries
    }

    pub fn get(&self, id: u32) -> Result<&Material> {
        self.entries
            .get(&id)
            .ok_or_else(|| Error::Material(format!("unknown material id {id}")))
    }

    pub fn lame(&self, id: u32) -> Result<Lame> {
        lame_from(self.get(id)?.young, self.nu)
    }

    pub fn mu(&self, id: u32) -> Result<f64> {
        Ok(self.lame(id)?.mu)
    }

    pub fn inv_lambda(&self, id: u32) -> Result<f64> {
        Ok(self.lame(id)?.inv_lambda)
    }

    pub fn density(&self, id: u32) -> Result<f64> {
        Ok(self.get(id)?.density)
    }

    /// Checks that every id used by the mesh is present.
    pub fn check_ids(&self, ids: &[u32]) -> Result<()> {
        for &id in ids {
            self.get(id)?;
        }
        Ok(())
    }

    /// Same table with every Young modulus multiplied by `factor`.
    pub fn scale_young(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.nu,
            self.entries.iter().map(|(&id, m)| {
                (
                    id,
                    Material {
                        young: m.young * factor,
                        density: m.density,
                    },
                )
            }),
        )
    }

    pub fn young_range(&self) -> (f64, f64) {
        self.entries
            .values()
            .fold((f64::INFINITY, 0.0), |(lo, hi), m| (lo.min(m.young), hi.max(m.young)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lame_examples() {
        let l = lame_from(1.0, 0.35).unwrap();
        assert_eq!(l.mu, 0.5);
        assert!((l.inv_lambda - 0.3 / 0.35).abs() < 1e-15);
        assert_eq!(lame_from(1.0, 0.5).unwrap().inv_lambda, 0.0);
        assert_eq!(lame_from(7.72e10, 0.35).unwrap().mu, 3.86e10);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(lame_from(1.0, 0.0).is_err());
        assert!(lame_from(1.0, 0.6).is_err());
        assert!(lame_from(0.0, 0.3).is_err());
        assert!(MaterialTable::homogeneous(0.3, 1.0, -1.0).is_err());
        let err = MaterialTable::homogeneous(0.6, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("(0, 0.5]"));
    }

    #[test]
    fn unscale_examples() {
        let u = unscale_eigenvalue(c64::new(1.35, 0.0), 0.35);
        assert!((u.kappa_hat.re - 1.0).abs() < 1e-15);
        assert!((u.frequency.re - 1.0).abs() < 1e-15);
        assert_eq!(unscale_eigenvalue(c64::new(0.0, 0.0), 0.2).kappa_hat.re, 0.0);

        // frequency 0.6808 at nu = 0.35, inverted by hand
        let kappa_hat = 0.6808f64 * 0.6808;
        let kappa = scale_eigenvalue(kappa_hat, 0.35);
        assert!((kappa_hat - 0.46349).abs() < 1e-5);
        assert!((kappa - 0.62571).abs() < 1e-5);
        let back = unscale_eigenvalue(c64::new(kappa, 0.0), 0.35);
        assert!((back.frequency.re - 0.6808).abs() < 1e-14);
    }

    #[test]
    fn complex_frequency_is_principal_root() {
        let u = unscale_eigenvalue(c64::new(-1.35, 0.0), 0.35);
        assert!(u.frequency.re.abs() < 1e-15 && u.frequency.im > 0.0);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let t = MaterialTable::homogeneous(0.3, 1.0, 1.0).unwrap();
        assert!(t.check_ids(&[0, 0]).is_ok());
        assert!(t.check_ids(&[1]).is_err());
    }

    proptest! {
        #[test]
        fn scaling_young_is_linear(e in 1e-3f64..1e6, c in 1e-3f64..1e3, nu in 0.01f64..0.5) {
            let a = lame_from(e, nu).unwrap();
            let b = lame_from(c * e, nu).unwrap();
            prop_assert!((b.mu - c * a.mu).abs() <= 1e-14 * b.mu);
            prop_assert!((b.inv_lambda - a.inv_lambda / c).abs() <= 1e-14 * a.inv_lambda / c + 1e-300);
            prop_assert!(b.inv_lambda >= 0.0);
        }

        #[test]
        fn unscale_inverts_scale(kh in -1e4f64..1e4, nu in 0.01f64..0.5) {
            let k = scale_eigenvalue(kh, nu);
            let u = unscale_eigenvalue(c64::new(k, 0.0), nu);
            prop_assert!((u.kappa_hat.re - kh).abs() <= 1e-14 * kh.abs().max(1.0));
        }
    }
}
