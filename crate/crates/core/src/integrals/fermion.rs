use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

const PRUNE: f64 = 1e-12;

/// A single creation (`dagger`) or annihilation operator on one spin orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }

    fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }

    /// Spin projection of the mode under interleaved ordering.
    fn spin(self) -> f64 {
        if self.mode.is_multiple_of(2) {
            0.5
        } else {
            -0.5
        }
    }
}

/// Linear combination of normal-ordered ladder-operator products.
///
/// Stored products have all creations first (ascending mode) followed by all
/// annihilations (descending mode).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

fn sort_with_sign(ops: &mut [Ladder], ascending: bool) -> Option<i32> {
    let mut sign = 1;
    for i in 1..ops.len() {
        let mut j = i;
        while j > 0 {
            let out_of_order = if ascending {
                ops[j - 1].mode > ops[j].mode
            } else {
                ops[j - 1].mode < ops[j].mode
            };
            if !out_of_order {
                break;
            }
            ops.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if ops.windows(2).any(|w| w[0].mode == w[1].mode) {
        None
    } else {
        Some(sign)
    }
}

fn normal_order(ops: &[Ladder], coeff: Complex64) -> Vec<(Vec<Ladder>, Complex64)> {
    let mut out = Vec::new();
    let mut stack = vec![(ops.to_vec(), coeff)];
    while let Some((ops, c)) = stack.pop() {
        let swap_at = ops.windows(2).position(|w| !w[0].dagger && w[1].dagger);
        if let Some(i) = swap_at {
            if ops[i].mode == ops[i + 1].mode {
                let mut contracted = ops.clone();
                contracted.drain(i..i + 2);
                stack.push((contracted, c));
            }
            let mut swapped = ops;
            swapped.swap(i, i + 1);
            stack.push((swapped, -c));
            continue;
        }
        let split = ops.iter().position(|l| !l.dagger).unwrap_or(ops.len());
        let mut ops = ops;
        let (creations, annihilations) = ops.split_at_mut(split);
        let (Some(s1), Some(s2)) = (
            sort_with_sign(creations, true),
            sort_with_sign(annihilations, false),
        ) else {
            continue;
        };
        out.push((ops, c * f64::from(s1 * s2)));
    }
    out
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_product(&[], coeff);
        op
    }

    /// Adds `coeff * ops[0] ops[1] ...`, normal-ordering the product.
    pub fn add_product(&mut self, ops: &[Ladder], coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        for (key, c) in normal_order(ops, coeff) {
            *self.terms.entry(key).or_default() += c;
        }
    }

    pub fn add(&mut self, other: &FermionOperator) {
        for (k, c) in &other.terms {
            *self.terms.entry(k.clone()).or_default() += c;
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
    }

    pub fn mul(&self, other: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut ops = ka.clone();
                ops.extend_from_slice(kb);
                out.add_product(&ops, ca * cb);
            }
        }
        out.simplify();
        out
    }

    pub fn adjoint(&self) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (k, c) in &self.terms {
            let ops: Vec<Ladder> = k.iter().rev().map(|l| l.adjoint()).collect();
            out.add_product(&ops, c.conj());
        }
        out
    }

    pub fn commutator(&self, other: &FermionOperator) -> FermionOperator {
        let mut out = self.mul(other);
        let mut back = other.mul(self);
        back.scale(Complex64::new(-1.0, 0.0));
        out.add(&back);
        out.simplify();
        out
    }

    /// Drops coefficients below 1e-12 in modulus.
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Ladder], Complex64)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// One past the largest mode index referenced.
    pub fn max_mode(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|l| l.mode + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn approx_eq(&self, other: &FermionOperator, tol: f64) -> bool {
        let mut diff = self.clone();
        let mut neg = other.clone();
        neg.scale(Complex64::new(-1.0, 0.0));
        diff.add(&neg);
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    /// Norm-like measure of `[op, N]`: sum over terms of |c| times the net
    /// change in particle number.
    pub fn number_violation(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let net: i64 = k.iter().map(|l| if l.dagger { 1 } else { -1 }).sum();
                c.norm() * net.unsigned_abs() as f64
            })
            .sum()
    }

    /// Same as [`number_violation`](Self::number_violation) for `S_z`.
    pub fn sz_violation(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let net: f64 = k
                    .iter()
                    .map(|l| if l.dagger { l.spin() } else { -l.spin() })
                    .sum();
                c.norm() * net.abs()
            })
            .sum()
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in &self.terms {
            write!(f, "({:+}{:+}i)", c.re, c.im)?;
            for l in k {
                write!(f, " {}{}", l.mode, if l.dagger { "^" } else { "" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn anticommutator_reduces_to_delta() {
        for i in 0..3 {
            for j in 0..3 {
                let mut op = FermionOperator::zero();
                op.add_product(&[Ladder::annihilate(i), Ladder::create(j)], c(1.0));
                op.add_product(&[Ladder::create(j), Ladder::annihilate(i)], c(1.0));
                op.simplify();
                let expected = if i == j {
                    FermionOperator::identity(c(1.0))
                } else {
                    FermionOperator::zero()
                };
                assert_eq!(op, expected, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn repeated_creation_vanishes() {
        let mut op = FermionOperator::zero();
        op.add_product(&[Ladder::create(2), Ladder::create(2)], c(1.0));
        assert!(op.is_empty());
    }

    #[test]
    fn canonical_order_carries_sign() {
        let mut a = FermionOperator::zero();
        a.add_product(&[Ladder::create(1), Ladder::create(0)], c(1.0));
        let mut b = FermionOperator::zero();
        b.add_product(&[Ladder::create(0), Ladder::create(1)], c(-1.0));
        assert_eq!(a, b);
    }

    #[test]
    fn adjoint_of_hopping() {
        let mut op = FermionOperator::zero();
        op.add_product(
            &[Ladder::create(0), Ladder::annihilate(1)],
            Complex64::new(0.0, 2.0),
        );
        let adj = op.adjoint();
        let mut expected = FermionOperator::zero();
        expected.add_product(
            &[Ladder::create(1), Ladder::annihilate(0)],
            Complex64::new(0.0, -2.0),
        );
        assert_eq!(adj, expected);
        assert!(!op.is_hermitian(1e-12));
    }

    #[test]
    fn violations_detect_non_conserving_terms() {
        let mut op = FermionOperator::zero();
        op.add_product(&[Ladder::create(0), Ladder::annihilate(1)], c(0.5));
        assert_eq!(op.number_violation(), 0.0);
        assert!((op.sz_violation() - 0.5).abs() < 1e-15);
        op.add_product(&[Ladder::create(2)], c(1.0));
        assert!((op.number_violation() - 1.0).abs() < 1e-15);
    }
}
