use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array2, Array3, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{mode_index, signed_mode, Grid};
use super::transform::with_transform;
use crate::error::{Error, Result};

/// Declared symmetry of a field in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity after one `∂_z`.
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    fn combine(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::None
        }
    }
}

/// A real scalar field on the periodic box stored as Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array3<Complex64>,
    parity: Parity,
}

impl SpectralField {
    pub fn zeros(grid: Grid, parity: Parity) -> Self {
        SpectralField {
            grid,
            coeffs: Array3::zeros(grid.shape()),
            parity,
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Array3<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "coefficient array {:?} vs grid {:?}",
                coeffs.dim(),
                grid.shape()
            )));
        }
        let coeffs = if coeffs.is_standard_layout() {
            coeffs
        } else {
            coeffs.as_standard_layout().into_owned()
        };
        Ok(SpectralField {
            grid,
            coeffs,
            parity,
        })
    }

    /// Forward transform of physical samples at the grid points.
    pub fn from_physical(grid: Grid, values: &Array3<f64>, parity: Parity) -> Self {
        let coeffs = with_transform(grid, |t| t.to_spectral(values));
        SpectralField {
            grid,
            coeffs,
            parity,
        }
    }

    /// Sample `f(x, y, z)` on the grid and transform.
    pub fn from_fn(grid: Grid, parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let values =
            Array3::from_shape_fn(grid.shape(), |(i, j, l)| f(grid.x(i), grid.y(j), grid.z(l)));
        Self::from_physical(grid, &values, parity)
    }

    pub fn to_physical(&self) -> Array3<f64> {
        with_transform(self.grid, |t| t.to_physical(&self.coeffs))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.coeffs
    }
    pub fn into_coeffs(self) -> Array3<Complex64> {
        self.coeffs
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn coeff(&self, kx: i64, ky: i64, m: i64) -> Complex64 {
        let (nx, ny, nz) = self.grid.shape();
        self.coeffs[[mode_index(kx, nx), mode_index(ky, ny), mode_index(m, nz)]]
    }

    pub fn set_coeff(&mut self, kx: i64, ky: i64, m: i64, value: Complex64) {
        let (nx, ny, nz) = self.grid.shape();
        self.coeffs[[mode_index(kx, nx), mode_index(ky, ny), mode_index(m, nz)]] = value;
    }

    /// Domain average.
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0, 0]].re
    }

    /// `‖f‖₂²` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `‖f‖₂²` by midpoint quadrature of the physical samples.
    pub fn physical_l2_norm_sq(&self) -> f64 {
        let vals = self.to_physical();
        let w = self.grid.volume() / self.grid.len() as f64;
        w * vals.iter().map(|v| v * v).sum::<f64>()
    }

    /// `∫ f g` by Parseval.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        self.assert_same_grid(other);
        let s: f64 = Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0, |acc, a, b| acc + (a * b.conj()).re);
        self.grid.volume() * s
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Pointwise evaluation of the trigonometric interpolant.
    pub fn eval_at(&self, x: f64, y: f64, z: f64) -> f64 {
        let g = self.grid;
        let mut s = Complex64::default();
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let phase =
                g.mode_x(i) as f64 * x + g.mode_y(j) as f64 * y + PI * g.mode_z(l) as f64 * z;
            s += c * Complex64::from_polar(1.0, phase);
        }
        s.re
    }

    /// `‖f − P f‖₂` for the declared parity (zero when parity is `None`).
    pub fn parity_residual(&self) -> f64 {
        match self.parity {
            Parity::None => 0.0,
            p => {
                let projected = super::ops::enforce_parity(self, p);
                (self - &projected).l2_norm()
            }
        }
    }

    /// The `m = 0` slab: the vertical average as a horizontal field.
    pub fn vertical_mean(&self) -> HorizontalField {
        HorizontalField {
            grid: self.grid,
            coeffs: self.coeffs.index_axis(ndarray::Axis(2), 0).to_owned(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.mapv_inplace(|c| c * s);
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        self.assert_same_grid(other);
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|s, &o| *s += o * a);
        self.parity = self.parity.combine(other.parity);
    }

    /// Copy of the field on a grid with more modes (zero-padded spectrum).
    ///
    /// Modes above the target's Nyquist are dropped; the input is expected to
    /// be dealiased so nothing is lost.
    pub fn resampled(&self, target: Grid) -> SpectralField {
        let src = self.grid;
        let mut out = SpectralField::zeros(target, self.parity);
        let (tx, ty, tz) = target.shape();
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            let (kx, ky, m) = (src.mode_x(i), src.mode_y(j), src.mode_z(l));
            // strictly below the target Nyquist
            let fits = |k: i64, n: usize| 2 * (k.unsigned_abs() as usize) < n;
            if fits(kx, tx) && fits(ky, ty) && fits(m, tz) {
                out.coeffs[[mode_index(kx, tx), mode_index(ky, ty), mode_index(m, tz)]] = *c;
            }
        }
        out
    }

    pub(crate) fn assert_same_grid(&self, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.assert_same_grid(rhs);
        SpectralField {
            grid: self.grid,
            coeffs: &self.coeffs + &rhs.coeffs,
            parity: self.parity.combine(rhs.parity),
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.assert_same_grid(rhs);
        SpectralField {
            grid: self.grid,
            coeffs: &self.coeffs - &rhs.coeffs,
            parity: self.parity.combine(rhs.parity),
        }
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.mapv(|c| -c),
            parity: self.parity,
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.mapv(|c| c * s),
            parity: self.parity,
        }
    }
}

/// A real field on the horizontal torus `M` (no `z` dependence).
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalField {
    grid: Grid,
    coeffs: Array2<Complex64>,
}

impl HorizontalField {
    pub fn zeros(grid: Grid) -> Self {
        HorizontalField {
            grid,
            coeffs: Array2::zeros((grid.nx(), grid.ny())),
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::GridMismatch(format!(
                "horizontal array {:?} vs grid {}x{}",
                coeffs.dim(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(HorizontalField { grid, coeffs })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        SpectralField::from_fn(grid, Parity::Even, |x, y, _| f(x, y)).vertical_mean()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn coeff(&self, kx: i64, ky: i64) -> Complex64 {
        self.coeffs[[
            mode_index(kx, self.grid.nx()),
            mode_index(ky, self.grid.ny()),
        ]]
    }

    /// Average over `M`.
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]].re
    }

    /// `‖f‖²_{2,M}`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.area() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Extend to a `z`-independent 3D field.
    pub fn to_field(&self) -> SpectralField {
        let mut f = SpectralField::zeros(self.grid, Parity::Even);
        f.coeffs
            .index_axis_mut(ndarray::Axis(2), 0)
            .assign(&self.coeffs);
        f
    }

    pub fn eval_at(&self, x: f64, y: f64) -> f64 {
        let mut s = Complex64::default();
        for ((i, j), c) in self.coeffs.indexed_iter() {
            let phase = signed_mode(i, self.grid.nx()) as f64 * x
                + signed_mode(j, self.grid.ny()) as f64 * y;
            s += c * Complex64::from_polar(1.0, phase);
        }
        s.re
    }
}

impl Sub for &HorizontalField {
    type Output = HorizontalField;
    fn sub(self, rhs: &HorizontalField) -> HorizontalField {
        assert_eq!(self.grid, rhs.grid);
        HorizontalField {
            grid: self.grid,
            coeffs: &self.coeffs - &rhs.coeffs,
        }
    }
}
