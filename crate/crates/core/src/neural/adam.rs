use crate::scalar::Real;

/// Adam moments for a flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam<T> {
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Real> Adam<T> {
    pub fn new(len: usize) -> Self {
        Self {
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            t: 0,
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }

    pub fn first_moment(&self) -> &[T] {
        &self.m
    }

    /// One bias-corrected update of `params` in place.
    pub fn step(&mut self, params: &mut [T], grad: &[T], lr: T) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.t += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (one - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (one - self.beta2) * grad[k] * grad[k];
            let mhat = self.m[k] / c1;
            let vhat = self.v[k] / c2;
            params[k] -= lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}
