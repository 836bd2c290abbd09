//! Fixed-capacity cyclic storage for the characteristic set.
//!
//! Characteristics are indexed newest-first: logical index 0 is the one most
//! recently created at the input boundary, logical index `len() - 1` is the
//! oldest. Creation prepends and removal drops the back, both in O(1) and
//! without moving stored data.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PoolError {
    #[error("characteristic pool is full (capacity {capacity})")]
    CapacityExceeded { capacity: usize },
    #[error("characteristic pool cannot drop below two elements")]
    Underflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPool {
    xi: Vec<f64>,
    omega: Vec<f64>,
    head: usize,
    count: usize,
    t_lc: f64,
}

impl CharacteristicPool {
    /// Empty pool with storage preallocated for `capacity` characteristics.
    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity >= 2, "pool capacity must be at least 2");
        Self {
            xi: vec![0.0; capacity],
            omega: vec![0.0; capacity],
            head: 0,
            count: 0,
            t_lc: 0.0,
        }
    }

    /// Builds a pool from nodes given in ascending-position order (newest
    /// first), i.e. the order they appear along the spatial axis.
    pub fn from_nodes(capacity: usize, nodes: &[(f64, f64)]) -> Result<Self, PoolError> {
        let mut pool = Self::with_capacity(capacity);
        if nodes.len() > capacity {
            return Err(PoolError::CapacityExceeded { capacity });
        }
        for &(xi, omega) in nodes.iter().rev() {
            pool.push_front(xi, omega)?;
        }
        Ok(pool)
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.xi.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.count == self.capacity()
    }

    /// Storage index of the newest characteristic.
    #[inline]
    pub fn head(&self) -> usize {
        self.head
    }

    /// Storage index of the oldest characteristic.
    #[inline]
    pub fn tail(&self) -> usize {
        (self.head + self.count.saturating_sub(1)) % self.capacity()
    }

    /// Time of the last creation at the input boundary.
    #[inline]
    pub fn t_lc(&self) -> f64 {
        self.t_lc
    }

    pub fn set_t_lc(&mut self, t: f64) {
        self.t_lc = t;
    }

    #[inline]
    fn slot(&self, i: usize) -> usize {
        debug_assert!(i < self.count);
        (self.head + i) % self.capacity()
    }

    /// `(xi, omega)` of logical element `i` (0 = newest).
    pub fn get(&self, i: usize) -> Option<(f64, f64)> {
        (i < self.count).then(|| {
            let s = self.slot(i);
            (self.xi[s], self.omega[s])
        })
    }

    pub fn set(&mut self, i: usize, xi: f64, omega: f64) {
        assert!(i < self.count, "logical index {i} out of range");
        let s = self.slot(i);
        self.xi[s] = xi;
        self.omega[s] = omega;
    }

    pub fn push_front(&mut self, xi: f64, omega: f64) -> Result<(), PoolError> {
        let cap = self.capacity();
        if self.count == cap {
            return Err(PoolError::CapacityExceeded { capacity: cap });
        }
        self.head = (self.head + cap - 1) % cap;
        self.xi[self.head] = xi;
        self.omega[self.head] = omega;
        self.count += 1;
        Ok(())
    }

    /// Drops the oldest characteristic. The pool never shrinks below two.
    pub fn pop_back(&mut self) -> Result<(f64, f64), PoolError> {
        if self.count <= 2 {
            return Err(PoolError::Underflow);
        }
        let s = self.tail();
        self.count -= 1;
        Ok((self.xi[s], self.omega[s]))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        (0..self.count).map(move |i| {
            let s = self.slot(i);
            (self.xi[s], self.omega[s])
        })
    }

    /// Writes the logical contents as `[xi_0.., omega_0..]` into `out`,
    /// which must have length `2 * len()`.
    pub fn flatten_into(&self, out: &mut [f64]) {
        let n = self.count;
        assert_eq!(out.len(), 2 * n);
        let (xs, ws) = out.split_at_mut(n);
        for (i, (x, w)) in self.iter().enumerate() {
            xs[i] = x;
            ws[i] = w;
        }
    }

    /// Inverse of [`flatten_into`](Self::flatten_into).
    pub fn load_flat(&mut self, flat: &[f64]) {
        let n = self.count;
        assert_eq!(flat.len(), 2 * n);
        for i in 0..n {
            self.set(i, flat[i], flat[n + i]);
        }
    }

    pub fn to_nodes(&self) -> Vec<(f64, f64)> {
        self.iter().collect()
    }
}
