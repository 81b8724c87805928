use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[0,2π)² × [−1,1)`.
///
/// Horizontal modes are integers `k_x, k_y`; vertical mode `m` carries the
/// physical wavenumber `πm` because the vertical period is 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
}

/// Signed mode number of FFT index `i` on an `n`-point axis.
#[inline]
pub fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of signed mode `k` on an `n`-point axis.
#[inline]
pub fn mode_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        let ok = |n: usize| n >= 4 && n % 2 == 0;
        if !(ok(nx) && ok(ny) && ok(nz)) {
            return Err(Error::InvalidGrid { nx, ny, nz });
        }
        Ok(Grid { nx, ny, nz })
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure of the fixed domain, `(2π)²·2`.
    pub fn volume(&self) -> f64 {
        8.0 * PI * PI
    }

    /// Measure of the horizontal torus `M`.
    pub fn area(&self) -> f64 {
        4.0 * PI * PI
    }

    pub fn x(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.nx as f64
    }
    pub fn y(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.ny as f64
    }
    pub fn z(&self, l: usize) -> f64 {
        -1.0 + 2.0 * l as f64 / self.nz as f64
    }

    pub fn mode_x(&self, i: usize) -> i64 {
        signed_mode(i, self.nx)
    }
    pub fn mode_y(&self, j: usize) -> i64 {
        signed_mode(j, self.ny)
    }
    pub fn mode_z(&self, l: usize) -> i64 {
        signed_mode(l, self.nz)
    }

    /// Derivative multipliers `i·k` per axis with the Nyquist entry zeroed.
    pub fn deriv_x(&self) -> Vec<f64> {
        deriv_symbols(self.nx, 1.0)
    }
    pub fn deriv_y(&self) -> Vec<f64> {
        deriv_symbols(self.ny, 1.0)
    }
    pub fn deriv_z(&self) -> Vec<f64> {
        deriv_symbols(self.nz, PI)
    }

    /// Squared wavenumbers (`k²` including the Nyquist entry).
    pub fn k2_x(&self) -> Vec<f64> {
        sq_symbols(self.nx, 1.0)
    }
    pub fn k2_y(&self) -> Vec<f64> {
        sq_symbols(self.ny, 1.0)
    }
    pub fn k2_z(&self) -> Vec<f64> {
        sq_symbols(self.nz, PI)
    }

    /// Largest retained wavenumber per axis under the 2/3 rule.
    pub fn max_retained_wavenumber(&self) -> f64 {
        let kx = (self.nx / 3) as f64;
        let ky = (self.ny / 3) as f64;
        let kz = PI * (self.nz / 3) as f64;
        kx.max(ky).max(kz)
    }

    /// 2/3-rule retention mask for one axis: keep `3|k| <= n`.
    pub fn retained(k: i64, n: usize) -> bool {
        3 * k.unsigned_abs() as usize <= n
    }
}

fn deriv_symbols(n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n / 2 {
                0.0
            } else {
                scale * signed_mode(i, n) as f64
            }
        })
        .collect()
}

fn sq_symbols(n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let k = scale * signed_mode(i, n) as f64;
            k * k
        })
        .collect()
}
