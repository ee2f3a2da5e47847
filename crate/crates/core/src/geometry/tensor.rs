//! Pointwise tensors and their jet-valued counterparts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::ScalarJet;

/// Variance of a tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    Up,
    Down,
}

/// Iterate over all multi-indices of `rank` slots in dimension `n`, last
/// slot fastest.
pub fn multi_indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for s in (0..rank).rev() {
            idx[s] = flat % n;
            flat /= n;
        }
        idx
    })
}

fn flat_offset(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| {
        debug_assert!(i < n);
        acc * n + i
    })
}

/// A tensor at a point, stored densely with the last slot fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorValue {
    variance: Vec<Slot>,
    n: usize,
    entries: Vec<f64>,
    base_point: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(variance: Vec<Slot>, n: usize, base_point: &[f64]) -> TensorValue {
        let len = n.pow(variance.len() as u32);
        TensorValue {
            variance,
            n,
            entries: vec![0.0; len],
            base_point: base_point.to_vec(),
        }
    }

    pub fn from_fn(
        variance: Vec<Slot>,
        n: usize,
        base_point: &[f64],
        f: impl Fn(&[usize]) -> f64,
    ) -> TensorValue {
        let rank = variance.len();
        let entries = multi_indices(n, rank).map(|idx| f(&idx)).collect();
        TensorValue {
            variance,
            n,
            entries,
            base_point: base_point.to_vec(),
        }
    }

    pub fn from_entries(
        variance: Vec<Slot>,
        n: usize,
        entries: Vec<f64>,
        base_point: &[f64],
    ) -> Result<TensorValue> {
        let expected = n.pow(variance.len() as u32);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: entries.len(),
            });
        }
        Ok(TensorValue {
            variance,
            n,
            entries,
            base_point: base_point.to_vec(),
        })
    }

    pub fn variance(&self) -> &[Slot] {
        &self.variance
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        self.entries[flat_offset(self.n, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = flat_offset(self.n, idx);
        self.entries[off] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Evaluate on one vector (or covector) per slot.
    pub fn apply(&self, args: &[&[f64]]) -> f64 {
        assert_eq!(args.len(), self.rank());
        let n = self.n;
        let contract_last = |t: &[f64], a: &[f64]| -> Vec<f64> {
            t.chunks_exact(n).map(|c| c.iter().zip(a).map(|(x, y)| x * y).sum()).collect()
        };
        match args.split_last() {
            None => self.entries[0],
            Some((last, rest)) => {
                let mut cur = contract_last(&self.entries, last);
                for a in rest.iter().rev() {
                    cur = contract_last(&cur, a);
                }
                cur[0]
            }
        }
    }

    /// Contract an upper slot with a lower slot.
    pub fn contract(&self, up: usize, down: usize) -> Result<TensorValue> {
        if self.variance.get(up) != Some(&Slot::Up) || self.variance.get(down) != Some(&Slot::Down) {
            return Err(Error::Domain(format!(
                "contraction needs an up and a down slot, got {up} and {down}"
            )));
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|s| *s != up && *s != down).collect();
        let variance = keep.iter().map(|&s| self.variance[s]).collect();
        let n = self.n;
        Ok(TensorValue::from_fn(variance, n, &self.base_point, |idx| {
            let mut full = vec![0; self.rank()];
            for (k, &s) in keep.iter().enumerate() {
                full[s] = idx[k];
            }
            (0..n)
                .map(|m| {
                    full[up] = m;
                    full[down] = m;
                    self.get(&full)
                })
                .sum()
        }))
    }

    /// Largest entrywise difference; tensors must share shape.
    pub fn max_abs_diff(&self, other: &TensorValue) -> f64 {
        assert_eq!(self.entries.len(), other.entries.len());
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// A tensor field near a point, one jet per component.
#[derive(Debug, Clone)]
pub struct JetTensor {
    variance: Vec<Slot>,
    n: usize,
    comps: Vec<ScalarJet>,
}

impl JetTensor {
    pub fn new(variance: Vec<Slot>, n: usize, comps: Vec<ScalarJet>) -> JetTensor {
        assert_eq!(comps.len(), n.pow(variance.len() as u32), "component count mismatch");
        JetTensor { variance, n, comps }
    }

    pub fn from_fn(variance: Vec<Slot>, n: usize, f: impl Fn(&[usize]) -> ScalarJet) -> JetTensor {
        let rank = variance.len();
        let comps = multi_indices(n, rank).map(|idx| f(&idx)).collect();
        JetTensor { variance, n, comps }
    }

    pub fn variance(&self) -> &[Slot] {
        &self.variance
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(crate::jet::MAX_ORDER)
    }

    pub fn comps(&self) -> &[ScalarJet] {
        &self.comps
    }

    pub fn get(&self, idx: &[usize]) -> &ScalarJet {
        &self.comps[flat_offset(self.n, idx)]
    }

    pub fn value(&self, base_point: &[f64]) -> TensorValue {
        TensorValue {
            variance: self.variance.clone(),
            n: self.n,
            entries: self.comps.iter().map(|c| c.value()).collect(),
            base_point: base_point.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_row_major() {
        let all: Vec<Vec<usize>> = multi_indices(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn trace_of_identity_endomorphism() {
        let t = TensorValue::from_fn(vec![Slot::Up, Slot::Down], 3, &[0.0; 3], |i| {
            if i[0] == i[1] {
                1.0
            } else {
                0.0
            }
        });
        let tr = t.contract(0, 1).unwrap();
        assert_eq!(tr.rank(), 0);
        assert_eq!(tr.entries(), &[3.0]);
        assert!(t.contract(1, 0).is_err());
    }

    #[test]
    fn apply_on_vectors() {
        let t = TensorValue::from_fn(vec![Slot::Down, Slot::Down], 2, &[0.0; 2], |i| (i[0] * 2 + i[1]) as f64);
        // t(e0 + e1, e1) = t01 + t11 = 1 + 3
        assert_eq!(t.apply(&[&[1.0, 1.0], &[0.0, 1.0]]), 4.0);
    }
}
