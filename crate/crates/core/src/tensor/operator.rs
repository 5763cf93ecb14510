use crate::error::{Error, Result};

use super::{check_blocks, check_dim, check_slot, factorial, MultilinearForm, SymTensor};

/// Right-hand operator of a generalized eigenproblem `A x^(m-1) = lambda B x^(m-1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BOperator {
    Dense(SymTensor),
    /// The identity tensor: `E x^m = ||x||^m`, `E x^(m-1) = ||x||^(m-2) x`.
    ZIdentity { order: usize, dim: usize },
    /// The diagonal tensor: `B x^m = sum_i x_i^m`, `B x^(m-1) = x^[m-1]`.
    HDiagonal { order: usize, dim: usize },
}

impl BOperator {
    pub fn z_identity(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(BOperator::ZIdentity { order, dim })
    }

    pub fn h_diagonal(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(BOperator::HDiagonal { order, dim })
    }

    /// The dense symmetric tensor with the same diagonal form.
    pub fn to_dense(&self) -> SymTensor {
        match self {
            BOperator::Dense(t) => t.clone(),
            BOperator::ZIdentity { order, dim } => {
                let m = *order;
                SymTensor::from_class_fn(m, *dim, |class| identity_entry(class, m))
                    .expect("shape validated at construction")
            }
            BOperator::HDiagonal { order, dim } => {
                SymTensor::from_class_fn(*order, *dim, |class| {
                    if class.iter().all(|&i| i == class[0]) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .expect("shape validated at construction")
            }
        }
    }

    pub fn is_structured(&self) -> bool {
        !matches!(self, BOperator::Dense(_))
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order == 0 || dim == 0 {
        return Err(Error::Domain(format!(
            "operator order and dimension must be positive (got order {order}, dim {dim})"
        )));
    }
    Ok(())
}

/// Canonical entry of the symmetric tensor whose form is `(x^T x)^(m/2)`.
fn identity_entry(class: &[usize], m: usize) -> f64 {
    if m % 2 == 1 {
        return 0.0;
    }
    let mut counts = Vec::new();
    let mut run = 1;
    for w in class.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            counts.push(run);
            run = 1;
        }
    }
    counts.push(run);
    if counts.iter().any(|c| c % 2 == 1) {
        return 0.0;
    }
    // monomial coefficient (m/2)! / prod (c/2)!, spread over m! / prod c! permutations
    let coeff = factorial(m / 2) / counts.iter().map(|&c| factorial(c / 2)).product::<f64>();
    let perms = factorial(m) / counts.iter().map(|&c| factorial(c)).product::<f64>();
    coeff / perms
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All perfect matchings of `0..m`, `m` even; `(m - 1)!!` of them.
pub(crate) fn matchings(m: usize) -> Vec<Vec<(usize, usize)>> {
    fn extend(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, rest)) = free.split_first() else {
            out.push(acc.clone());
            return;
        };
        for (i, &other) in rest.iter().enumerate() {
            acc.push((first, other));
            let remaining: Vec<usize> = rest.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, &v)| v).collect();
            extend(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    extend(&(0..m).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

/// Block at full-tuple position `pos` when slot `free` has been removed.
fn slot_block<'a>(blocks: &[&'a [f64]], free: usize, pos: usize) -> &'a [f64] {
    if pos < free {
        blocks[pos]
    } else {
        blocks[pos - 1]
    }
}

impl MultilinearForm for BOperator {
    fn order(&self) -> usize {
        match self {
            BOperator::Dense(t) => t.order(),
            BOperator::ZIdentity { order, .. } | BOperator::HDiagonal { order, .. } => *order,
        }
    }

    fn dim(&self) -> usize {
        match self {
            BOperator::Dense(t) => t.dim(),
            BOperator::ZIdentity { dim, .. } | BOperator::HDiagonal { dim, .. } => *dim,
        }
    }

    /// For `ZIdentity` this is the average over all perfect matchings of the
    /// blocks of the product of paired inner products, i.e. the multilinear
    /// form of the dense identity tensor. For `HDiagonal` it is `sum_i prod_j b_j[i]`.
    fn multilinear_apply(&self, blocks: &[&[f64]]) -> Result<f64> {
        match self {
            BOperator::Dense(t) => t.multilinear_apply(blocks),
            BOperator::ZIdentity { order, dim } => {
                check_blocks(blocks, *order, *dim)?;
                even_pairing(*order)?;
                let all = matchings(*order);
                let total: f64 = all
                    .iter()
                    .map(|mm| mm.iter().map(|&(a, b)| dot(blocks[a], blocks[b])).product::<f64>())
                    .sum();
                Ok(total / all.len() as f64)
            }
            BOperator::HDiagonal { order, dim } => {
                check_blocks(blocks, *order, *dim)?;
                Ok((0..*dim)
                    .map(|i| blocks.iter().map(|b| b[i]).product::<f64>())
                    .sum())
            }
        }
    }

    fn multilinear_partial(&self, blocks: &[&[f64]], free_slot: usize) -> Result<Vec<f64>> {
        match self {
            BOperator::Dense(t) => t.multilinear_partial(blocks, free_slot),
            BOperator::ZIdentity { order, dim } => {
                let m = *order;
                check_slot(free_slot, m)?;
                check_blocks(blocks, m - 1, *dim)?;
                even_pairing(m)?;
                let all = matchings(m);
                let mut g = vec![0.0; *dim];
                for mm in &all {
                    let mut partner = 0;
                    let mut rest = 1.0;
                    for &(a, b) in mm {
                        if a == free_slot {
                            partner = b;
                        } else if b == free_slot {
                            partner = a;
                        } else {
                            rest *= dot(slot_block(blocks, free_slot, a), slot_block(blocks, free_slot, b));
                        }
                    }
                    for (gi, v) in g.iter_mut().zip(slot_block(blocks, free_slot, partner)) {
                        *gi += rest * v;
                    }
                }
                let k = all.len() as f64;
                Ok(g.into_iter().map(|v| v / k).collect())
            }
            BOperator::HDiagonal { order, dim } => {
                check_slot(free_slot, *order)?;
                check_blocks(blocks, *order - 1, *dim)?;
                Ok((0..*dim)
                    .map(|i| blocks.iter().map(|b| b[i]).product())
                    .collect())
            }
        }
    }

    fn apply_full(&self, x: &[f64]) -> Result<f64> {
        match self {
            BOperator::Dense(t) => t.apply_full(x),
            BOperator::ZIdentity { order, dim } => {
                check_dim(x, *dim)?;
                Ok(dot(x, x).sqrt().powi(*order as i32))
            }
            BOperator::HDiagonal { order, dim } => {
                check_dim(x, *dim)?;
                Ok(x.iter().map(|v| v.powi(*order as i32)).sum())
            }
        }
    }

    fn apply_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            BOperator::Dense(t) => t.apply_gradient(x),
            BOperator::ZIdentity { order, dim } => {
                check_dim(x, *dim)?;
                let scale = dot(x, x).sqrt().powi(*order as i32 - 2);
                Ok(x.iter().map(|v| v * scale).collect())
            }
            BOperator::HDiagonal { order, dim } => {
                check_dim(x, *dim)?;
                Ok(x.iter().map(|v| v.powi(*order as i32 - 1)).collect())
            }
        }
    }

    fn frobenius_norm(&self) -> f64 {
        match self {
            BOperator::Dense(t) => t.frobenius_norm(),
            BOperator::HDiagonal { dim, .. } => (*dim as f64).sqrt(),
            BOperator::ZIdentity { .. } => self.to_dense().frobenius_norm(),
        }
    }
}

fn even_pairing(order: usize) -> Result<()> {
    if order % 2 == 1 {
        return Err(Error::Domain(format!(
            "identity pairing needs an even order, got {order}"
        )));
    }
    Ok(())
}

/// The shifted operator `A(theta) = A - theta B`.
///
/// A dense `B` is folded into one tensor; structured `B` is kept aside and
/// applied through its own multilinear form.
#[derive(Debug, Clone)]
pub struct ShiftedOperator {
    tensor: SymTensor,
    structured: Option<BOperator>,
    theta: f64,
    frobenius: f64,
}

/// Forms `A - theta B`.
pub fn axpy(a: &SymTensor, b: &BOperator, theta: f64) -> Result<ShiftedOperator> {
    if b.order() != a.order() {
        return Err(Error::Dim {
            expected: a.order(),
            got: b.order(),
        });
    }
    if b.dim() != a.dim() {
        return Err(Error::Dim {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (tensor, structured, frobenius) = match b {
        BOperator::Dense(bt) => {
            let t = a.sub_scaled(bt, theta)?;
            let f = t.frobenius_norm();
            (t, None, f)
        }
        other => {
            let f = if theta == 0.0 {
                a.frobenius_norm()
            } else {
                a.sub_scaled(&other.to_dense(), theta)?.frobenius_norm()
            };
            (a.clone(), Some(other.clone()), f)
        }
    };
    Ok(ShiftedOperator {
        tensor,
        structured,
        theta,
        frobenius,
    })
}

impl ShiftedOperator {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Shift of zero around a plain tensor.
    pub fn unshifted(a: &SymTensor) -> Self {
        ShiftedOperator {
            tensor: a.clone(),
            structured: None,
            theta: 0.0,
            frobenius: a.frobenius_norm(),
        }
    }
}

impl MultilinearForm for ShiftedOperator {
    fn order(&self) -> usize {
        self.tensor.order()
    }

    fn dim(&self) -> usize {
        self.tensor.dim()
    }

    fn multilinear_apply(&self, blocks: &[&[f64]]) -> Result<f64> {
        let base = self.tensor.multilinear_apply(blocks)?;
        match &self.structured {
            Some(b) if self.theta != 0.0 => Ok(base - self.theta * b.multilinear_apply(blocks)?),
            _ => Ok(base),
        }
    }

    fn multilinear_partial(&self, blocks: &[&[f64]], free_slot: usize) -> Result<Vec<f64>> {
        let mut g = self.tensor.multilinear_partial(blocks, free_slot)?;
        if let Some(b) = &self.structured {
            if self.theta != 0.0 {
                let gb = b.multilinear_partial(blocks, free_slot)?;
                for (gi, bi) in g.iter_mut().zip(gb) {
                    *gi -= self.theta * bi;
                }
            }
        }
        Ok(g)
    }

    fn apply_full(&self, x: &[f64]) -> Result<f64> {
        let base = self.tensor.apply_full(x)?;
        match &self.structured {
            Some(b) if self.theta != 0.0 => Ok(base - self.theta * b.apply_full(x)?),
            _ => Ok(base),
        }
    }

    fn apply_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.tensor.apply_gradient(x)?;
        if let Some(b) = &self.structured {
            if self.theta != 0.0 {
                let gb = b.apply_gradient(x)?;
                for (gi, bi) in g.iter_mut().zip(gb) {
                    *gi -= self.theta * bi;
                }
            }
        }
        Ok(g)
    }

    fn frobenius_norm(&self) -> f64 {
        self.frobenius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_full_and_gradient_on_unit_vector() {
        let e = BOperator::z_identity(4, 3).unwrap();
        let x = [0.6, 0.0, -0.8];
        assert!((e.apply_full(&x).unwrap() - 1.0).abs() < 1e-15);
        let g = e.apply_gradient(&x).unwrap();
        for (a, b) in g.iter().zip(&x) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn h_diagonal_odd_power_gradient() {
        let b = BOperator::h_diagonal(6, 4).unwrap();
        let x = [1.0, -1.0, 0.0, 0.0];
        assert_eq!(b.apply_full(&x).unwrap(), 2.0);
        assert_eq!(b.apply_gradient(&x).unwrap(), vec![1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn dense_identity_agrees_with_structured_diagonal() {
        for (m, n) in [(2, 3), (4, 3), (6, 2)] {
            let e = BOperator::z_identity(m, n).unwrap();
            let d = e.to_dense();
            let x = [0.3, -1.2, 0.7];
            let x = &x[..n];
            assert!((d.apply_full(x).unwrap() - e.apply_full(x).unwrap()).abs() < 1e-12);
            let gd = d.apply_gradient(x).unwrap();
            let ge = e.apply_gradient(x).unwrap();
            for (a, b) in gd.iter().zip(&ge) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let d = BOperator::z_identity(4, 2).unwrap().to_dense();
        assert!((d.get(&[0, 0, 1, 1]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identity_multilinear_form_matches_dense_tensor() {
        let x = [1.0, 0.0];
        let y = [0.0, 1.0];
        let u = [1.0, 1.0];
        let e = BOperator::z_identity(4, 2).unwrap();
        // <x,u><u,y> + <x,u><u,y> + <x,y><u,u>, averaged
        let v = e.multilinear_apply(&[&x, &u, &u, &y]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        for m in [2, 4, 6] {
            let e = BOperator::z_identity(m, 3).unwrap();
            let d = e.to_dense();
            let blocks: Vec<Vec<f64>> = (0..m)
                .map(|j| (0..3).map(|i| ((i * 7 + j * 3) as f64 * 0.9).cos()).collect())
                .collect();
            let r: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
            let got = e.multilinear_apply(&r).unwrap();
            let want = d.multilinear_apply(&r).unwrap();
            assert!((got - want).abs() < 1e-12, "m = {m}: {got} vs {want}");
            for slot in 0..m {
                let others: Vec<&[f64]> = r.iter().enumerate().filter(|(k, _)| *k != slot).map(|(_, b)| *b).collect();
                let gs = e.multilinear_partial(&others, slot).unwrap();
                let gd = d.multilinear_partial(&others, slot).unwrap();
                for (a, b) in gs.iter().zip(&gd) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
        assert_eq!(matchings(6).len(), 15);
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let a = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], -2.0)]).unwrap();
        let s = axpy(&a, &BOperator::z_identity(2, 2).unwrap(), 0.0).unwrap();
        let x = [0.3, 0.4];
        assert_eq!(s.apply_full(&x).unwrap(), a.apply_full(&x).unwrap());
        assert_eq!(s.frobenius_norm(), a.frobenius_norm());
    }

    #[test]
    fn shifted_identity_removes_unit_norm() {
        let a = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], -2.0)]).unwrap();
        let s = axpy(&a, &BOperator::z_identity(2, 2).unwrap(), 1.0).unwrap();
        assert_eq!(s.apply_full(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = SymTensor::zeros(4, 3).unwrap();
        assert!(matches!(
            axpy(&a, &BOperator::z_identity(4, 2).unwrap(), 1.0),
            Err(Error::Dim { .. })
        ));
        assert!(matches!(
            axpy(&a, &BOperator::h_diagonal(6, 3).unwrap(), 1.0),
            Err(Error::Dim { .. })
        ));
    }
}
