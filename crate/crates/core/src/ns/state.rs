use crate::error::{Error, Result};
use crate::norms::{gradient_energy, lq_norm_slice, LogNorm};
use crate::spectral::{inverse_transform_many, Grid, PhysicalField, SpectralField};

/// Three spectral velocity components, the simulation clock and viscosity.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityState {
    components: [SpectralField; 3],
    time: f64,
    nu: f64,
}

impl VelocityState {
    pub fn new(components: [SpectralField; 3], time: f64, nu: f64) -> Result<Self> {
        let grid = components[0].grid();
        for c in &components[1..] {
            grid.ensure_same(&c.grid())?;
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: format!("viscosity must be positive and finite, got {nu}"),
            });
        }
        if !time.is_finite() {
            return Err(Error::InvalidParameter {
                name: "time",
                reason: format!("{time}"),
            });
        }
        Ok(Self { components, time, nu })
    }

    pub fn zero(grid: Grid, nu: f64) -> Result<Self> {
        Self::new(
            [SpectralField::zeros(grid), SpectralField::zeros(grid), SpectralField::zeros(grid)],
            0.0,
            nu,
        )
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    #[inline]
    pub fn components(&self) -> &[SpectralField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [SpectralField; 3] {
        self.components
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub(crate) fn with_components(&self, components: [SpectralField; 3], time: f64) -> Self {
        Self {
            components,
            time,
            nu: self.nu,
        }
    }

    /// `||u||_2^2`.
    pub fn energy(&self) -> f64 {
        self.components.iter().map(SpectralField::energy).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `||grad u||_2^2`.
    pub fn gradient_energy(&self) -> f64 {
        self.components.iter().map(gradient_energy).sum()
    }

    /// Largest `|xi . u(xi)| / |xi|`, relative to the largest coefficient
    /// magnitude so round-off level modes do not dominate.
    pub fn divergence_residual(&self) -> f64 {
        let grid = self.grid();
        let [a, b, c] = &self.components;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..grid.len() {
            let xi = grid.wavevector(i);
            let v = [a.coeffs()[i], b.coeffs()[i], c.coeffs()[i]];
            scale = scale.max((v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt());
            if xi == [0, 0, 0] {
                continue;
            }
            let r = grid.radius(i);
            let div = v[0] * xi[0] as f64 + v[1] * xi[1] as f64 + v[2] * xi[2] as f64;
            worst = worst.max(div.norm() / r);
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Magnitude of the mean (zero) mode.
    pub fn mean_mode(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.get([0, 0, 0]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_residue(&self) -> f64 {
        self.components
            .iter()
            .map(SpectralField::hermitian_residue)
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn to_physical(&self) -> [PhysicalField; 3] {
        let refs: Vec<&SpectralField> = self.components.iter().collect();
        let mut v = inverse_transform_many(&refs).into_iter();
        [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()]
    }

    /// Pointwise Euclidean magnitude `|u(x)|`.
    pub fn speed(&self) -> PhysicalField {
        let [a, b, c] = self.to_physical();
        let values = a
            .values()
            .iter()
            .zip(b.values())
            .zip(c.values())
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect();
        PhysicalField::from_values_unchecked(self.grid(), values)
    }

    /// `|| |u| ||_q`.
    pub fn lq_norm(&self, q: f64) -> Result<LogNorm> {
        let s = self.speed();
        crate::norms::lq_norm(&s, q)
    }

    pub(crate) fn speed_norm(speed: &PhysicalField, q: f64) -> LogNorm {
        lq_norm_slice(speed.values(), speed.grid().cell_volume(), q)
    }

    /// Largest coefficientwise distance between two states on the same grid.
    pub fn max_diff(&self, other: &VelocityState) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    /// `||u - v||_2` via Parseval.
    pub fn l2_distance(&self, other: &VelocityState) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).energy())
            .sum::<f64>()
            .sqrt()
    }
}
