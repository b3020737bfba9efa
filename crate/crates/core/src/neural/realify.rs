use crate::scalar::{Cplx, Real};

/// `[Re z; Im z]`
pub fn realify<T: Real>(z: &[Cplx<T>]) -> Vec<T> {
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

/// Inverse of [`realify`]; `x` must have even length.
pub fn derealify<T: Real>(x: &[T]) -> Vec<Cplx<T>> {
    assert!(x.len() % 2 == 0, "realified vector must have even length");
    let m = x.len() / 2;
    (0..m).map(|k| Cplx::new(x[k], x[m + k])).collect()
}
