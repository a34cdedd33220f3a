use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const PRUNE: f64 = 1e-12;
pub const MAX_QUBITS: usize = 32;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn i_pow(k: u32) -> Complex64 {
    I_POW[(k % 4) as usize]
}

/// Letter pattern of a Pauli string as x/z bitmasks: bit `j` describes qubit
/// `j` with `(x, z)` = `(1,0)` X, `(1,1)` Y, `(0,1)` Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

impl PauliKey {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn letter(&self, qubit: usize) -> char {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    fn code(&self, qubit: usize) -> u8 {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    pub fn with_letter(mut self, qubit: usize, letter: char) -> Result<Self> {
        let (x, z) = match letter {
            'I' => (0, 0),
            'X' => (1, 0),
            'Y' => (1, 1),
            'Z' => (0, 1),
            other => return Err(Error::arg(format!("invalid Pauli letter '{other}'"))),
        };
        self.x = (self.x & !(1 << qubit)) | (x << qubit);
        self.z = (self.z & !(1 << qubit)) | (z << qubit);
        Ok(self)
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Phase `i^(|x&z|) (-1)^(|b&z|)` such that `P|b> = phase |b ^ x>`.
    #[inline]
    pub fn phase_on(&self, basis: u64) -> Complex64 {
        let k = (self.x & self.z).count_ones() + 2 * (basis & self.z).count_ones();
        i_pow(k)
    }

    /// Group product `self * other = phase * result`.
    pub fn product(&self, other: &PauliKey) -> (Complex64, PauliKey) {
        let result = PauliKey {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let k = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones();
        let back = (result.x & result.z).count_ones();
        (i_pow(k + 4 * 64 - back), result)
    }

    pub fn commutes_with(&self, other: &PauliKey) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn letters(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|q| self.letter(q)).collect()
    }
}

impl Ord for PauliKey {
    /// Lexicographic over letters from qubit 0 with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return Ordering::Equal;
        }
        let q = diff.trailing_zeros() as usize;
        self.code(q).cmp(&other.code(q))
    }
}

impl PartialOrd for PauliKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A weighted Pauli string on a register of `n_qubits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub n_qubits: usize,
    pub key: PauliKey,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn new(letters: &str, coeff: Complex64) -> Result<Self> {
        let n_qubits = letters.chars().count();
        if n_qubits > MAX_QUBITS {
            return Err(Error::arg(format!("at most {MAX_QUBITS} qubits supported")));
        }
        let mut key = PauliKey::identity();
        for (q, c) in letters.chars().enumerate() {
            key = key.with_letter(q, c)?;
        }
        Ok(Self {
            n_qubits,
            key,
            coeff,
        })
    }

    pub fn letters(&self) -> String {
        self.key.letters(self.n_qubits)
    }
}

/// Letterwise product of two weighted strings with the phase folded in.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::arg(format!(
            "Pauli strings act on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    let (phase, key) = a.key.product(&b.key);
    Ok(PauliString {
        n_qubits: a.n_qubits,
        key,
        coeff: a.coeff * b.coeff * phase,
    })
}

/// Sum of Pauli strings with distinct letter patterns, kept in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliKey, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(
            n_qubits <= MAX_QUBITS,
            "at most {MAX_QUBITS} qubits supported"
        );
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliKey::identity(), coeff);
        s
    }

    pub fn from_strings(n_qubits: usize, strings: &[PauliString]) -> Result<Self> {
        let mut s = Self::zero(n_qubits);
        for p in strings {
            if p.n_qubits != n_qubits {
                return Err(Error::arg("Pauli string length differs from register"));
            }
            s.add_term(p.key, p.coeff);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add_term(&mut self, key: PauliKey, coeff: Complex64) {
        *self.terms.entry(key).or_default() += coeff;
    }

    pub fn add(&mut self, other: &PauliSum) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        for (k, c) in &other.terms {
            self.add_term(*k, *c);
        }
    }

    pub fn add_scaled(&mut self, other: &PauliSum, factor: Complex64) {
        for (k, c) in &other.terms {
            self.add_term(*k, c * factor);
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        let mut s = self.clone();
        s.scale(factor);
        s
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (phase, key) = ka.product(kb);
                out.add_term(key, ca * cb * phase);
            }
        }
        out
    }

    /// Removes terms with |c| < 1e-12. Idempotent.
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
    }

    pub fn simplified(mut self) -> Self {
        self.simplify();
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliKey, Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn strings(&self) -> Vec<PauliString> {
        self.terms()
            .map(|(key, coeff)| PauliString {
                n_qubits: self.n_qubits,
                key,
                coeff,
            })
            .collect()
    }

    pub fn coefficient(&self, key: &PauliKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliKey::identity())
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn one_norm_without_identity(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| !k.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Largest imaginary part among coefficients; zero iff Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.conj();
        }
        s
    }

    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        let mut diff = self.clone();
        diff.add_scaled(other, Complex64::new(-1.0, 0.0));
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    /// `out = self |psi>` for a full amplitude vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }

    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for o in out.iter_mut() {
            *o = Complex64::default();
        }
        for (key, c) in &self.terms {
            let base = c * i_pow((key.x & key.z).count_ones());
            for (b, amp) in psi.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let b = b as u64;
                let v = base * amp;
                let idx = (b ^ key.x) as usize;
                if (b & key.z).count_ones().is_multiple_of(2) {
                    out[idx] += v;
                } else {
                    out[idx] -= v;
                }
            }
        }
    }

    /// Dense row-major matrix `M[row * dim + col]`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![Complex64::default(); dim * dim];
        for (key, c) in &self.terms {
            for col in 0..dim {
                let row = col ^ key.x as usize;
                m[row * dim + col] += c * key.phase_on(col as u64);
            }
        }
        m
    }

    /// Removes the qubits in `positions`, replacing a `Z` there by the given
    /// eigenvalue sign. Fails on X or Y at a removed position.
    pub fn taper(&self, positions: &[(usize, f64)]) -> Result<PauliSum> {
        let removed: Vec<usize> = positions.iter().map(|p| p.0).collect();
        let kept: Vec<usize> = (0..self.n_qubits)
            .filter(|q| !removed.contains(q))
            .collect();
        let mut out = PauliSum::zero(kept.len());
        for (key, c) in &self.terms {
            let mut coeff = *c;
            for &(q, sign) in positions {
                match key.letter(q) {
                    'I' => {}
                    'Z' => coeff *= sign,
                    other => {
                        return Err(Error::Symmetry(format!(
                            "term {} has {other} on tapered qubit {q}",
                            key.letters(self.n_qubits)
                        )))
                    }
                }
            }
            let mut new_key = PauliKey::identity();
            for (new_q, &old_q) in kept.iter().enumerate() {
                new_key.x |= ((key.x >> old_q) & 1) << new_q;
                new_key.z |= ((key.z >> old_q) & 1) << new_q;
            }
            out.add_term(new_key, coeff);
        }
        Ok(out.simplified())
    }
}

fn format_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:+}", c.re)
    } else {
        format!("{:+}{:+}i", c.re, c.im)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_coeff(self.coeff), self.letters())
    }
}

impl fmt::Display for PauliSum {
    /// One `+0.5 XXYI` line per term, canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, c) in &self.terms {
            writeln!(f, "{} {}", format_coeff(*c), key.letters(self.n_qubits))?;
        }
        Ok(())
    }
}

fn parse_coeff(text: &str) -> Option<Complex64> {
    if let Some(body) = text.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, ch)| (ch == '+' || ch == '-') && !matches!(&body[i - 1..i], "e" | "E"))
            .map(|(i, _)| i)
            .last()?;
        let re = body[..split].parse().ok()?;
        let im = body[split..].parse().ok()?;
        Some(Complex64::new(re, im))
    } else {
        text.parse().ok().map(|re| Complex64::new(re, 0.0))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let (Some(coeff), Some(letters), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::arg(format!("malformed Pauli term '{s}'")));
        };
        let coeff = parse_coeff(coeff)
            .ok_or_else(|| Error::arg(format!("malformed coefficient '{coeff}'")))?;
        PauliString::new(letters, coeff)
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let strings = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<PauliString>>>()?;
        let n = strings
            .first()
            .map(|p| p.n_qubits)
            .ok_or_else(|| Error::arg("empty Pauli sum"))?;
        PauliSum::from_strings(n, &strings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(letters: &str, re: f64) -> PauliString {
        PauliString::new(letters, Complex64::new(re, 0.0)).unwrap()
    }

    #[test]
    fn x_times_y_is_i_z() {
        let p = pauli_product(&ps("X", 1.0), &ps("Y", 1.0)).unwrap();
        assert_eq!(p.letters(), "Z");
        assert_eq!(p.coeff, Complex64::new(0.0, 1.0));
        let p = pauli_product(&ps("Y", 1.0), &ps("X", 1.0)).unwrap();
        assert_eq!(p.coeff, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn involution() {
        for l in ["XYZI", "YYZX", "ZZZZ"] {
            let p = pauli_product(&ps(l, 2.0), &ps(l, -1.5)).unwrap();
            assert!(p.key.is_identity());
            assert_eq!(p.coeff, Complex64::new(-3.0, 0.0));
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(pauli_product(&ps("XX", 1.0), &ps("X", 1.0)).is_err());
    }

    #[test]
    fn canonical_order() {
        let s = PauliSum::from_strings(
            2,
            &[
                ps("ZI", 1.0),
                ps("IZ", 1.0),
                ps("XY", 1.0),
                ps("II", 1.0),
                ps("YX", 1.0),
            ],
        )
        .unwrap();
        let order: Vec<String> = s.strings().iter().map(|p| p.letters()).collect();
        assert_eq!(order, ["II", "IZ", "XY", "YX", "ZI"]);
    }

    #[test]
    fn text_round_trip() {
        let s: PauliSum = "+0.5 XXYI\n-0.25 ZIII\n+0.125-2.5e-3i IIYZ\n"
            .parse()
            .unwrap();
        assert_eq!(s.len(), 3);
        let again: PauliSum = s.to_string().parse().unwrap();
        assert_eq!(s, again);
        assert!(s.to_string().contains("+0.5 XXYI"));
    }

    #[test]
    fn taper_rejects_flip() {
        let s = PauliSum::from_strings(2, &[ps("XZ", 1.0)]).unwrap();
        assert!(s.taper(&[(0, 1.0)]).is_err());
        let t = s.taper(&[(1, -1.0)]).unwrap();
        assert_eq!(t.to_string(), "-1 X\n");
    }
}
