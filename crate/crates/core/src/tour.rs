//! Permutation-encoded closed tours.

use std::fmt;

use crate::error::{Error, Result};

/// A closed tour: a permutation of the city indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour(Vec<usize>);

impl Tour {
    /// Validates that `order` is a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order)?;
        Ok(Tour(order))
    }

    /// The identity tour `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Tour((0..n).collect())
    }

    /// Wraps `order` without validation. Callers guarantee the permutation invariant.
    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(check_permutation(&order).is_ok(), "not a permutation: {order:?}");
        Tour(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Exchanges the cities at positions `i` and `j`.
    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    /// Rotates so that the tour starts at `city`.
    pub fn rotated_to(&self, city: usize) -> Tour {
        let mut order = self.0.clone();
        if let Some(pos) = order.iter().position(|&c| c == city) {
            order.rotate_left(pos);
        }
        Tour(order)
    }

    /// Canonical form for comparing closed tours: starts at city 0 and
    /// travels toward the smaller of its two neighbours.
    pub fn canonical(&self) -> Tour {
        let mut t = self.rotated_to(0);
        let n = t.0.len();
        if n > 2 && t.0[n - 1] < t.0[1] {
            t.0[1..].reverse();
        }
        t
    }
}

impl fmt::Display for Tour {
    /// Writes 1-based city ids separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", c + 1)?;
        }
        Ok(())
    }
}

impl AsRef<[usize]> for Tour {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

/// Checks that `order` contains each of `0..order.len()` exactly once.
pub fn check_permutation(order: &[usize]) -> Result<()> {
    let n = order.len();
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n {
            return Err(Error::InvalidTour(format!("city {c} out of range 0..{n}")));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidTour(format!("city {c} repeated")));
        }
    }
    Ok(())
}

pub fn is_permutation(order: &[usize]) -> bool {
    check_permutation(order).is_ok()
}
