//! Surfaces, their curvature and the geometric kinetic energy.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, positive, Result};

/// Surface family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    /// Circle of radius `R` in the plane `z = 0`, the `k_z = 0` slice of a cylinder.
    Ring,
    /// Cylinder of radius `R` on `-L < z < L`.
    Cylinder,
    /// Sphere of radius `R`.
    Sphere,
}

/// A validated surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub radius: f64,
    /// Half length `L`; only meaningful for cylinders.
    pub half_length: Option<f64>,
}

impl SurfaceSpec {
    pub fn ring(radius: f64) -> Result<Self> {
        Ok(Self {
            kind: SurfaceKind::Ring,
            radius: positive("R", radius)?,
            half_length: None,
        })
    }

    pub fn cylinder(radius: f64, half_length: f64) -> Result<Self> {
        Ok(Self {
            kind: SurfaceKind::Cylinder,
            radius: positive("R", radius)?,
            half_length: Some(positive("L", half_length)?),
        })
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        Ok(Self {
            kind: SurfaceKind::Sphere,
            radius: positive("R", radius)?,
            half_length: None,
        })
    }

    /// Re-checks the invariants, for values built by hand or deserialized.
    pub fn validate(&self) -> Result<()> {
        positive("R", self.radius)?;
        match (self.kind, self.half_length) {
            (SurfaceKind::Cylinder, Some(l)) => positive("L", l).map(|_| ()),
            (SurfaceKind::Cylinder, None) => Err(invalid("L", "required for a cylinder")),
            (_, None) => Ok(()),
            (_, Some(_)) => Err(invalid("L", "only a cylinder has a length")),
        }
    }

    /// Total area (length for a ring).
    pub fn area(&self) -> f64 {
        let r = self.radius;
        match self.kind {
            SurfaceKind::Ring => 2.0 * std::f64::consts::PI * r,
            SurfaceKind::Cylinder => {
                4.0 * std::f64::consts::PI * r * self.half_length.unwrap_or(0.0)
            }
            SurfaceKind::Sphere => 4.0 * std::f64::consts::PI * r * r,
        }
    }
}

/// `hbar`, particle mass and charge. Defaults to natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64, charge: f64) -> Result<Self> {
        let c = Self { hbar, mass, charge };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("m", self.mass)?;
        if !self.charge.is_finite() {
            return Err(invalid("e", "must be finite"));
        }
        Ok(())
    }

    /// `hbar^2 / 2m`.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// `e / hbar`, the factor turning a line integral of `A` into a phase.
    pub fn phase_per_potential(&self) -> f64 {
        self.charge / self.hbar
    }

    /// Flux quantum `2 pi hbar / e`.
    pub fn flux_quantum(&self) -> Result<f64> {
        if self.charge == 0.0 {
            return Err(invalid("e", "flux quantum needs a nonzero charge"));
        }
        Ok(2.0 * std::f64::consts::PI * self.hbar / self.charge)
    }
}

/// Principal, mean and Gaussian curvature. Sign convention: outward normal,
/// so a convex surface has negative principal curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub k1: f64,
    pub k2: f64,
    pub mean: f64,
    pub gaussian: f64,
}

pub fn principal_curvatures(surface: &SurfaceSpec) -> Result<CurvatureData> {
    surface.validate()?;
    let k = -1.0 / surface.radius;
    let (k1, k2) = match surface.kind {
        SurfaceKind::Ring | SurfaceKind::Cylinder => (k, 0.0),
        SurfaceKind::Sphere => (k, k),
    };
    Ok(CurvatureData {
        k1,
        k2,
        mean: 0.5 * (k1 + k2),
        gaussian: k1 * k2,
    })
}

/// `-(hbar^2 / 2m) (M^2 - K)`.
pub fn geometric_kinetic_energy(surface: &SurfaceSpec, constants: &PhysicalConstants) -> Result<f64> {
    constants.validate()?;
    let c = principal_curvatures(surface)?;
    Ok(constants.kinetic_scale() * (c.gaussian - c.mean * c.mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_curvature_and_energy() {
        let s = SurfaceSpec::cylinder(2.0, 1.0).unwrap();
        let c = principal_curvatures(&s).unwrap();
        assert_eq!((c.k1, c.k2, c.mean, c.gaussian), (-0.5, 0.0, -0.25, 0.0));
        let e = geometric_kinetic_energy(&s, &PhysicalConstants::default()).unwrap();
        assert_eq!(e, -1.0 / 32.0);
    }

    #[test]
    fn sphere_energy_vanishes() {
        for r in [0.1, 1.0, 7.5, 1e6] {
            let s = SurfaceSpec::sphere(r).unwrap();
            assert_eq!(geometric_kinetic_energy(&s, &PhysicalConstants::default()).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_radius() {
        for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(SurfaceSpec::sphere(r).is_err());
            assert!(SurfaceSpec::cylinder(r, 1.0).is_err());
        }
        assert!(SurfaceSpec::cylinder(1.0, 0.0).is_err());
        let bad = SurfaceSpec { kind: SurfaceKind::Sphere, radius: 1.0, half_length: Some(1.0) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn constants_scale_energy() {
        let s = SurfaceSpec::ring(1.0).unwrap();
        let c = PhysicalConstants::new(2.0, 0.5, 1.0).unwrap();
        assert_eq!(geometric_kinetic_energy(&s, &c).unwrap(), -4.0 / (8.0 * 0.5));
        assert!(PhysicalConstants::new(1.0, 0.0, 1.0).is_err());
        assert!(PhysicalConstants::default().flux_quantum().unwrap() == 2.0 * std::f64::consts::PI);
    }
}
