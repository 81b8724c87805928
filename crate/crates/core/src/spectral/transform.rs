//! 3D complex FFT on the periodic box.
//!
//! Coefficients are normalized so that `f(x,y,z) = Σ ĉ(kx,ky,m) e^{i(kx x + ky y + πm z)}`.
//! The vertical grid starts at `z = −1`, which contributes the phase `(−1)^m`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        AxisPlan {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn get(&self, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.inverse
        } else {
            &self.forward
        }
    }
}

/// Transform plans plus scratch for one grid. Not shared between threads.
pub struct Transform {
    grid: Grid,
    x: AxisPlan,
    y: AxisPlan,
    z: AxisPlan,
    lane: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let x = AxisPlan::new(&mut planner, grid.nx());
        let y = AxisPlan::new(&mut planner, grid.ny());
        let z = AxisPlan::new(&mut planner, grid.nz());
        let scratch_len = [&x, &y, &z]
            .iter()
            .flat_map(|p| {
                [
                    p.forward.get_inplace_scratch_len(),
                    p.inverse.get_inplace_scratch_len(),
                ]
            })
            .max()
            .unwrap_or(0);
        let lane_len = grid.nx().max(grid.ny());
        Transform {
            grid,
            x,
            y,
            z,
            lane: vec![Complex64::default(); lane_len],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Physical samples → normalized coefficients, in place.
    pub fn forward(&mut self, data: &mut Array3<Complex64>) {
        self.run(data, false);
        let norm = 1.0 / self.grid.len() as f64;
        for ((_, _, l), c) in data.indexed_iter_mut() {
            let s = if l % 2 == 0 { norm } else { -norm };
            *c *= s;
        }
    }

    /// Coefficients → physical samples, in place.
    pub fn inverse(&mut self, data: &mut Array3<Complex64>) {
        for ((_, _, l), c) in data.indexed_iter_mut() {
            if l % 2 == 1 {
                *c = -*c;
            }
        }
        self.run(data, true);
    }

    pub fn to_physical(&mut self, coeffs: &Array3<Complex64>) -> Array3<f64> {
        let mut work = coeffs.clone();
        self.inverse(&mut work);
        work.mapv(|c| c.re)
    }

    pub fn to_spectral(&mut self, values: &Array3<f64>) -> Array3<Complex64> {
        let mut work = values.mapv(|v| Complex64::new(v, 0.0));
        self.forward(&mut work);
        work
    }

    fn run(&mut self, data: &mut Array3<Complex64>, inverse: bool) {
        let (nx, ny, nz) = self.grid.shape();
        assert_eq!(data.dim(), (nx, ny, nz), "array shape does not match grid");
        assert!(data.is_standard_layout());

        // z lanes are contiguous
        let zfft = self.z.get(inverse);
        let buf = data.as_slice_mut().expect("standard layout");
        zfft.process_with_scratch(buf, &mut self.scratch);

        let yfft = self.y.get(inverse);
        for i in 0..nx {
            for l in 0..nz {
                for j in 0..ny {
                    self.lane[j] = data[[i, j, l]];
                }
                yfft.process_with_scratch(&mut self.lane[..ny], &mut self.scratch);
                for j in 0..ny {
                    data[[i, j, l]] = self.lane[j];
                }
            }
        }

        let xfft = self.x.get(inverse);
        for j in 0..ny {
            for l in 0..nz {
                for i in 0..nx {
                    self.lane[i] = data[[i, j, l]];
                }
                xfft.process_with_scratch(&mut self.lane[..nx], &mut self.scratch);
                for i in 0..nx {
                    data[[i, j, l]] = self.lane[i];
                }
            }
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<Grid, Transform>> = RefCell::new(HashMap::new());
}

/// Run `f` with this thread's cached transform for `grid`.
pub fn with_transform<R>(grid: Grid, f: impl FnOnce(&mut Transform) -> R) -> R {
    PLANS.with(|cell| {
        let mut plans = cell.borrow_mut();
        let t = plans.entry(grid).or_insert_with(|| Transform::new(grid));
        f(t)
    })
}

/// Pointwise product of physical arrays, `out = a * b`.
pub(crate) fn mul_into(out: &mut Array3<f64>, a: &Array3<f64>, b: &Array3<f64>) {
    Zip::from(out)
        .and(a)
        .and(b)
        .for_each(|o, &x, &y| *o = x * y);
}
