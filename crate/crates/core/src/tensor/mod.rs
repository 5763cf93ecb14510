//! Dense symmetric tensors and the contraction kernels used by every solver.
//!
//! A [`SymTensor`] of order `m` and dimension `n` stores one value per
//! canonical (sorted) multi-index class. All contractions are carried out in
//! this packed form: contracting a vector into one slot of a symmetric tensor
//! leaves a symmetric tensor of one order less, so a full multilinear
//! evaluation is a chain of packed contractions and never expands the
//! `n^m` array.
//!
//! Indices are 0-based in this API and 1-based in files and error values.

mod io;
mod layout;
mod operator;

use std::sync::Arc;

use crate::error::{Error, Result};
use layout::Layout;

pub use io::{parse_tensor, read_tensor, write_tensor};
pub use operator::{axpy, BOperator, ShiftedOperator};

pub(crate) use layout::factorial;
pub(crate) use operator::matchings;

/// A form that is linear in each of its `order` vector arguments.
///
/// [`SymTensor`] is fully symmetric, so its partial contraction ignores
/// `free_slot`; the structured operators in [`BOperator`] are not, and use
/// the slot to find the partner block.
pub trait MultilinearForm {
    fn order(&self) -> usize;
    fn dim(&self) -> usize;

    /// `<A, b_1 o b_2 o ... o b_m>`.
    fn multilinear_apply(&self, blocks: &[&[f64]]) -> Result<f64>;

    /// The vector `g` with `<g, w> = multilinear_apply(blocks with w at free_slot)`.
    /// `blocks` holds the other `m - 1` arguments in slot order.
    fn multilinear_partial(&self, blocks: &[&[f64]], free_slot: usize) -> Result<Vec<f64>>;

    /// `A x^m`.
    fn apply_full(&self, x: &[f64]) -> Result<f64> {
        let blocks = vec![x; self.order()];
        self.multilinear_apply(&blocks)
    }

    /// `A x^(m-1)`, so that the gradient of `A x^m` is `m A x^(m-1)`.
    fn apply_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let blocks = vec![x; self.order() - 1];
        self.multilinear_partial(&blocks, 0)
    }

    /// Frobenius norm of the symmetric tensor representing the form's diagonal.
    fn frobenius_norm(&self) -> f64;
}

pub(crate) fn check_blocks(blocks: &[&[f64]], count: usize, dim: usize) -> Result<()> {
    if blocks.len() != count {
        return Err(Error::Arity {
            expected: count,
            got: blocks.len(),
        });
    }
    for b in blocks {
        check_dim(b, dim)?;
    }
    Ok(())
}

pub(crate) fn check_dim(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::Dim {
            expected: dim,
            got: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_slot(free_slot: usize, order: usize) -> Result<()> {
    if free_slot >= order {
        return Err(Error::Index {
            index: vec![free_slot + 1],
            dim: order,
        });
    }
    Ok(())
}

/// Dense real symmetric tensor of order `m` and dimension `n`.
#[derive(Debug, Clone)]
pub struct SymTensor {
    layout: Arc<Layout>,
    data: Vec<f64>,
}

impl PartialEq for SymTensor {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order() && self.dim() == other.dim() && self.data == other.data
    }
}

impl SymTensor {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(Error::Domain(format!(
                "tensor order and dimension must be positive (got order {order}, dim {dim})"
            )));
        }
        let layout = Arc::new(Layout::new(order, dim));
        let data = vec![0.0; layout.count(order)];
        Ok(SymTensor { layout, data })
    }

    /// Builds a tensor from `(multi-index, value)` pairs with 1-based indices.
    /// Each index may be listed in any permutation; each class at most once.
    pub fn from_entries<I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut t = Self::zeros(order, dim)?;
        let mut seen = vec![false; t.data.len()];
        for (index, value) in entries {
            if index.len() != order {
                return Err(Error::Arity {
                    expected: order,
                    got: index.len(),
                });
            }
            if index.iter().any(|&i| i == 0 || i > dim) {
                return Err(Error::Index { index, dim });
            }
            let mut sorted: Vec<usize> = index.iter().map(|&i| i - 1).collect();
            sorted.sort_unstable();
            let r = layout::rank(&sorted);
            if seen[r] {
                return Err(Error::DuplicateEntry {
                    index: sorted.iter().map(|&i| i + 1).collect(),
                });
            }
            seen[r] = true;
            t.data[r] = value;
        }
        Ok(t)
    }

    /// Builds a tensor by evaluating `f` on every sorted 0-based class.
    pub fn from_class_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for r in 0..t.data.len() {
            t.data[r] = f(t.layout.class(order, r));
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn num_classes(&self) -> usize {
        self.data.len()
    }

    /// Entry at a 0-based multi-index given in any order.
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.rank_of(index)?])
    }

    /// Sets the canonical entry of the class containing `index` (0-based).
    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let r = self.rank_of(index)?;
        self.data[r] = value;
        Ok(())
    }

    fn rank_of(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.order() {
            return Err(Error::Arity {
                expected: self.order(),
                got: index.len(),
            });
        }
        if index.iter().any(|&i| i >= self.dim()) {
            return Err(Error::Index {
                index: index.iter().map(|&i| i + 1).collect(),
                dim: self.dim(),
            });
        }
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        Ok(layout::rank(&sorted))
    }

    /// Nonzero canonical entries as `(sorted 0-based index, value)`, in rank order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        let m = self.order();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(move |(r, &v)| (self.layout.class(m, r), v))
    }

    /// Every canonical class with its value and permutation multiplicity.
    pub(crate) fn classes(&self) -> impl Iterator<Item = (&[usize], f64, f64)> + '_ {
        let m = self.order();
        self.data
            .iter()
            .enumerate()
            .map(move |(r, &v)| (self.layout.class(m, r), v, self.layout.multiplicities[r]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> SymTensor {
        SymTensor {
            layout: Arc::clone(&self.layout),
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `self - theta * other`.
    pub fn sub_scaled(&self, other: &SymTensor, theta: f64) -> Result<SymTensor> {
        self.check_same_shape(other)?;
        Ok(SymTensor {
            layout: Arc::clone(&self.layout),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - theta * b)
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &SymTensor) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Dim {
                expected: self.order(),
                got: other.order(),
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::Dim {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Contract `blocks` into the leading slots, returning the packed
    /// remainder of order `m - blocks.len()`.
    fn contract_all(&self, blocks: &[&[f64]]) -> Vec<f64> {
        let mut k = self.order();
        let mut first = true;
        let mut cur = Vec::new();
        for b in blocks {
            cur = if first {
                self.layout.contract(&self.data, k, b)
            } else {
                self.layout.contract(&cur, k, b)
            };
            first = false;
            k -= 1;
        }
        if first {
            self.data.clone()
        } else {
            cur
        }
    }
}

impl MultilinearForm for SymTensor {
    fn order(&self) -> usize {
        self.layout.order
    }

    fn dim(&self) -> usize {
        self.layout.dim
    }

    fn multilinear_apply(&self, blocks: &[&[f64]]) -> Result<f64> {
        check_blocks(blocks, self.order(), self.dim())?;
        Ok(self.contract_all(blocks)[0])
    }

    fn multilinear_partial(&self, blocks: &[&[f64]], free_slot: usize) -> Result<Vec<f64>> {
        check_slot(free_slot, self.order())?;
        check_blocks(blocks, self.order() - 1, self.dim())?;
        Ok(self.contract_all(blocks))
    }

    fn apply_full(&self, x: &[f64]) -> Result<f64> {
        check_dim(x, self.dim())?;
        Ok(self
            .classes()
            .map(|(idx, v, mult)| v * mult * idx.iter().map(|&i| x[i]).product::<f64>())
            .sum())
    }

    fn frobenius_norm(&self) -> f64 {
        self.classes()
            .map(|(_, v, mult)| mult * v * v)
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> SymTensor {
        SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], -2.0)]).unwrap()
    }

    #[test]
    fn from_entries_builds_diagonal_matrix() {
        let t = a1();
        assert_eq!(t.get(&[0, 0]).unwrap(), 1.0);
        assert_eq!(t.get(&[1, 1]).unwrap(), -2.0);
        assert_eq!(t.get(&[0, 1]).unwrap(), 0.0);
        assert_eq!(t.apply_full(&[0.0, 1.0]).unwrap(), -2.0);
    }

    #[test]
    fn empty_entries_give_zero_tensor() {
        let t = SymTensor::from_entries(4, 3, Vec::new()).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.apply_full(&[0.3, -1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(t.apply_gradient(&[0.3, -1.0, 2.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn duplicate_class_is_rejected() {
        let err = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![1, 1], 2.0)]);
        assert!(matches!(err, Err(Error::DuplicateEntry { .. })));
        let err = SymTensor::from_entries(2, 2, vec![(vec![1, 2], 1.0), (vec![2, 1], 2.0)]);
        assert!(matches!(err, Err(Error::DuplicateEntry { .. })));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let err = SymTensor::from_entries(2, 2, vec![(vec![1, 3], 1.0)]);
        assert!(matches!(err, Err(Error::Index { .. })));
        let err = SymTensor::from_entries(2, 2, vec![(vec![0, 1], 1.0)]);
        assert!(matches!(err, Err(Error::Index { .. })));
    }

    #[test]
    fn dimension_and_arity_errors() {
        let t = a1();
        assert!(matches!(t.apply_full(&[1.0]), Err(Error::Dim { .. })));
        assert!(matches!(t.apply_gradient(&[1.0, 2.0, 3.0]), Err(Error::Dim { .. })));
        let x = [1.0, 0.0];
        assert!(matches!(
            t.multilinear_apply(&[&x]),
            Err(Error::Arity { expected: 2, got: 1 })
        ));
        assert!(matches!(
            t.multilinear_partial(&[&x, &x], 0),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn multilinear_counterexample_value() {
        let a2 = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 2.0), (vec![2, 2], 4.0)]).unwrap();
        let v = a2.multilinear_apply(&[&[0.0, 1.0], &[0.0, -1.0]]).unwrap();
        assert_eq!(v, -4.0);
    }

    #[test]
    fn partial_is_matrix_vector_product() {
        let g = a1().multilinear_partial(&[&[0.0, 1.0]], 1).unwrap();
        assert_eq!(g, vec![0.0, -2.0]);
    }

    #[test]
    fn frobenius_weights_offdiagonal_classes() {
        assert!((a1().frobenius_norm() - 5f64.sqrt()).abs() < 1e-15);
        let id = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], 1.0)]).unwrap();
        assert!((id.frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        let off = SymTensor::from_entries(2, 2, vec![(vec![1, 2], 1.0)]).unwrap();
        assert!((off.frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(SymTensor::zeros(3, 3).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn full_application_matches_chain_of_contractions() {
        let t = SymTensor::from_class_fn(4, 3, |c| (c.iter().sum::<usize>() as f64 + 1.0).sin()).unwrap();
        let x = [0.3, -0.7, 1.1];
        let direct = t.apply_full(&x).unwrap();
        let chained = t.multilinear_apply(&[&x, &x, &x, &x]).unwrap();
        assert!((direct - chained).abs() < 1e-12);
        let g = t.apply_gradient(&x).unwrap();
        let euler: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((euler - direct).abs() < 1e-12);
    }
}
