//! Float math routed through `std` or `libm` depending on the build.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $libm:ident, 1) => {
        #[cfg(feature = "std")]
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            x.$name()
        }
        #[cfg(not(feature = "std"))]
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$libm(x)
        }
    };
}

shim!(sqrt, sqrt, 1);
shim!(ln, log, 1);
shim!(log2, log2, 1);
shim!(sin, sin, 1);
shim!(cos, cos, 1);

#[cfg(feature = "std")]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    y.atan2(x)
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

/// 2^k for small non-negative k, exact in f64.
#[inline]
pub(crate) fn pow2(k: u32) -> f64 {
    (1u64 << k) as f64
}
