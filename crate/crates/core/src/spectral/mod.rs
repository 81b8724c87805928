//! Fourier machinery on the periodic box `[0,2π)² × [−1,1)`.

mod field;
mod grid;
mod ops;
mod transform;

pub use field::{HorizontalField, Parity, SpectralField};
pub use grid::{mode_index, signed_mode, Grid};
pub use ops::{
    dealias, dealias_in_place, dealiased_product, derivative, dz_norm_sq, enforce_parity,
    grad_norm_sq, horizontal_derivative, horizontal_divergence, horizontal_laplacian, laplacian,
    laplacian_norm_sq, poisson_aniso, poisson_horizontal, vertical_antiderivative, Axis,
    VerticalOrigin,
};
pub use transform::{with_transform, Transform};

#[cfg(test)]
pub(crate) mod tests;
