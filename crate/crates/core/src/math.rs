//! Float helpers routed through `libm` so numeric results are identical with
//! and without `std`.

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Relative closeness with an absolute floor near zero.
#[inline]
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    let scale = abs(a).max(abs(b)).max(1e-300);
    abs(a - b) <= rel * scale
}

/// Maximum absolute entry of a slice (0 for an empty slice).
#[inline]
pub fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |acc, &x| acc.max(abs(x)))
}
