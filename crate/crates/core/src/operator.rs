//! Dense complex operators on small qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational-basis index. Every module in the crate shares this
//! convention; the CLI exposes 1-based site labels and converts at the edge.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::OperatorError;

pub type C64 = Complex64;

/// Registers larger than this are rejected by [`Operator::kron`].
pub const DEFAULT_MAX_QUBITS: usize = 10;

/// Tolerance used when constructing Hermitian generators.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for unitarity and expectation-value checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for products of several evolutions.
pub const COMPOSED_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// A square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self, OperatorError> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(OperatorError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self, OperatorError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(OperatorError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            mat: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), |r, c| if r == c { entries[r] } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            mat: &self.mat * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `Tr(self† · other)` without forming the product.
    pub fn inner(&self, other: &Operator) -> C64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        let eig = SymmetricEigen::new(gram);
        eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
    }

    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        Operator { mat: prod }.max_abs_diff(&Operator::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.mat[(r, c)].norm() <= tol))
    }

    /// Tensor product with the default register limit.
    pub fn kron(&self, other: &Operator) -> Result<Operator, OperatorError> {
        self.kron_with_limit(other, DEFAULT_MAX_QUBITS)
    }

    /// Tensor product, rejecting results wider than `max_qubits`.
    pub fn kron_with_limit(&self, other: &Operator, max_qubits: usize) -> Result<Operator, OperatorError> {
        let dim = self
            .dim()
            .checked_mul(other.dim())
            .ok_or(OperatorError::RegisterTooLarge {
                dim: usize::MAX,
                max_qubits,
            })?;
        if dim > 1usize << max_qubits {
            return Err(OperatorError::RegisterTooLarge { dim, max_qubits });
        }
        Ok(Operator {
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Conjugation `u† · self · u`.
    pub fn conjugate_by(&self, u: &Operator) -> Operator {
        Operator {
            mat: u.mat.adjoint() * &self.mat * &u.mat,
        }
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut exp: u32) -> Operator {
        let mut base = self.clone();
        let mut acc = Operator::identity(self.dim());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `e^{-i·self·t}` for a Hermitian `self`.
    pub fn expm_hermitian(&self, t: f64) -> Result<Operator, OperatorError> {
        Ok(HermitianEigen::new(self)?.evolution(t))
    }

    /// Partial trace keeping the listed qubits (0-based, any order; the
    /// result orders them ascending).
    pub fn partial_trace(&self, keep: &[usize], n_qubits: usize) -> Result<Operator, OperatorError> {
        if self.dim() != 1usize << n_qubits {
            return Err(OperatorError::DimensionMismatch {
                expected: 1usize << n_qubits,
                found: self.dim(),
            });
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if let Some(&bad) = kept.iter().find(|&&q| q >= n_qubits) {
            return Err(OperatorError::QubitOutOfRange { index: bad, n_qubits });
        }
        let traced: Vec<usize> = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
        // bit position (from the LSB) of each qubit
        let pos = |q: usize| n_qubits - 1 - q;
        let scatter = |bits: usize, qubits: &[usize]| -> usize {
            let k = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| bits >> (k - 1 - j) & 1 == 1)
                .fold(0usize, |acc, (_, &q)| acc | 1 << pos(q))
        };
        let kdim = 1usize << kept.len();
        let tdim = 1usize << traced.len();
        let kept_idx: Vec<usize> = (0..kdim).map(|b| scatter(b, &kept)).collect();
        let traced_idx: Vec<usize> = (0..tdim).map(|b| scatter(b, &traced)).collect();
        let mat = DMatrix::from_fn(kdim, kdim, |r, c| {
            traced_idx
                .iter()
                .fold(ZERO, |acc, &t| acc + self.mat[(kept_idx[r] | t, kept_idx[c] | t)])
        });
        Ok(Operator { mat })
    }

    /// `self · |ψ⟩`.
    pub fn apply(&self, state: &PureState) -> Result<PureState, OperatorError> {
        if state.dim() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(PureState {
            amps: &self.mat * &state.amps,
        })
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Phase-insensitive overlap `|Tr(a† b)| / dim`.
pub fn process_fidelity(a: &Operator, b: &Operator) -> f64 {
    a.inner(b).norm() / a.dim() as f64
}

/// Eigendecomposition of a Hermitian operator, reusable for evolutions at
/// many times.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &Operator) -> Result<Self, OperatorError> {
        let defect = h.hermiticity_defect();
        if defect > UNITARY_TOL {
            return Err(OperatorError::NotHermitian { defect });
        }
        // symmetrize so rounding noise cannot leak into the decomposition
        let sym = (&h.mat + h.mat.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: f64) -> Operator {
        let phases = self.values.map(|e| (-I * e * t).exp());
        let mut scaled = self.vectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *p;
        }
        Operator {
            mat: scaled * self.vectors.adjoint(),
        }
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Operator {
        let e = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        Operator {
            mat: DMatrix::from_row_slice(2, 2, &e),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = OperatorError;
    fn try_from(c: char) -> Result<Self, Self::Error> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(OperatorError::InvalidPauli(other)),
        }
    }
}

impl FromStr for Pauli {
    type Err = OperatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pauli::try_from(c),
            _ => Err(OperatorError::InvalidPauli(s.chars().next().unwrap_or(' '))),
        }
    }
}

/// A tensor product of Pauli letters, leftmost letter on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self, OperatorError> {
        if letters.is_empty() {
            return Err(OperatorError::EmptyPauliString);
        }
        Ok(Self { letters })
    }

    /// Identity everywhere except `letter` on `site`.
    pub fn single(n_qubits: usize, site: usize, letter: Pauli) -> Result<Self, OperatorError> {
        Self::from_sites(n_qubits, &[(site, letter)])
    }

    pub fn from_sites(n_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self, OperatorError> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(site, letter) in sites {
            if site >= n_qubits {
                return Err(OperatorError::QubitOutOfRange { index: site, n_qubits });
            }
            letters[site] = letter;
        }
        Self::new(letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Dense matrix of the string. Built as a signed permutation: row `r`
    /// has its single non-zero in column `r ^ flip_mask`.
    pub fn embed(&self) -> Operator {
        let n = self.letters.len();
        let dim = 1usize << n;
        let mut mat = DMatrix::from_element(dim, dim, ZERO);
        let flip: usize = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |acc, (q, _)| acc | 1 << (n - 1 - q));
        for row in 0..dim {
            let col = row ^ flip;
            let mut amp = ONE;
            for (q, p) in self.letters.iter().enumerate() {
                let bit_row = row >> (n - 1 - q) & 1;
                amp *= match p {
                    Pauli::I | Pauli::X => ONE,
                    // <r|Y|c>: -i for r=0, +i for r=1
                    Pauli::Y => {
                        if bit_row == 0 {
                            -I
                        } else {
                            I
                        }
                    }
                    Pauli::Z => {
                        if bit_row == 0 {
                            ONE
                        } else {
                            -ONE
                        }
                    }
                };
            }
            mat[(row, col)] = amp;
        }
        Operator { mat }
    }
}

impl FromStr for PauliString {
    type Err = OperatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s.trim().chars().map(Pauli::try_from).collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(amps: Vec<C64>) -> Result<Self, OperatorError> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || (norm_sq - 1.0).abs() > UNITARY_TOL {
            return Err(OperatorError::NotNormalized { norm_sq });
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} outside dimension {dim}");
        Self {
            amps: DVector::from_fn(dim, |r, _| if r == index { ONE } else { ZERO }),
        }
    }

    /// Computational basis state from a bit label such as `"0000"`.
    pub fn from_bits(bits: &str) -> Result<Self, OperatorError> {
        let n = bits.len();
        if n == 0 || n > DEFAULT_MAX_QUBITS {
            return Err(OperatorError::InvalidBasisLabel(bits.to_string()));
        }
        let index = usize::from_str_radix(bits, 2).map_err(|_| OperatorError::InvalidBasisLabel(bits.to_string()))?;
        Ok(Self::basis(1 << n, index))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `⟨self|obs|self⟩`; the imaginary residue must stay below
    /// [`UNITARY_TOL`].
    pub fn expectation(&self, obs: &Operator) -> Result<f64, OperatorError> {
        if obs.dim() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim(),
                found: obs.dim(),
            });
        }
        let value = self.amps.dotc(&(obs.matrix() * &self.amps));
        if value.im.abs() > UNITARY_TOL {
            return Err(OperatorError::ImaginaryResidue(value.im));
        }
        Ok(value.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::from_fn(dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        let a = random_matrix(dim, rng);
        (&a + &a.adjoint()).scale_real(0.5)
    }

    fn pauli(s: &str) -> Operator {
        s.parse::<PauliString>().unwrap().embed()
    }

    #[test]
    fn embeds_single_and_product_paulis() {
        assert_eq!(pauli("Z"), Operator::diagonal(&[ONE, -ONE]));
        assert_eq!(pauli("ZI"), Operator::diagonal(&[ONE, ONE, -ONE, -ONE]));
        assert_eq!(pauli("ZZ"), Operator::diagonal(&[ONE, -ONE, -ONE, ONE]));
        for letter in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            let p = PauliString::new(vec![letter]).unwrap();
            assert_eq!(p.embed(), letter.matrix());
        }
    }

    #[test]
    fn pauli_embedding_matches_kron_fold() {
        for s in ["XYZ", "YIYX", "ZXIY", "IIII", "YYYY"] {
            let p: PauliString = s.parse().unwrap();
            let folded = p.letters()[1..]
                .iter()
                .fold(p.letters()[0].matrix(), |acc, l| acc.kron(&l.matrix()).unwrap());
            assert_eq!(p.embed(), folded, "{s}");
            let m = p.embed();
            assert!(m.is_unitary(CONSTRUCTION_TOL));
            assert!(m.is_hermitian(CONSTRUCTION_TOL));
            assert!(m.pow(2).max_abs_diff(&Operator::identity(m.dim())) < CONSTRUCTION_TOL);
            if p.weight() > 0 {
                assert!(m.trace().norm() < CONSTRUCTION_TOL);
            }
        }
    }

    #[test]
    fn disjoint_supports_multiply() {
        assert_eq!(&pauli("ZI") * &pauli("IZ"), pauli("ZZ"));
        assert_eq!(&pauli("XII") * &pauli("IIY"), pauli("XIY"));
    }

    #[test]
    fn rejects_bad_pauli_letters() {
        assert!(matches!(
            "ZQ".parse::<PauliString>(),
            Err(OperatorError::InvalidPauli('Q'))
        ));
        assert!("".parse::<PauliString>().is_err());
        assert!(PauliString::single(3, 3, Pauli::Z).is_err());
    }

    #[test]
    fn kron_of_identities_and_z() {
        let i2 = Operator::identity(2);
        assert_eq!(i2.kron(&i2).unwrap(), Operator::identity(4));
        let z = Pauli::Z.matrix();
        assert_eq!(z.kron(&z).unwrap(), Operator::diagonal(&[ONE, -ONE, -ONE, ONE]));
    }

    #[test]
    fn kron_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(2, &mut rng);
        let b = random_matrix(2, &mut rng);
        let k = a.kron(&b).unwrap();
        let (p, q) = (b.dim(), b.dim());
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..p {
                    for s in 0..q {
                        assert_eq!(k.get(i * p + r, j * q + s), a.get(i, j) * b.get(r, s));
                    }
                }
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b, cc, d) = (
            random_matrix(2, &mut rng),
            random_matrix(4, &mut rng),
            random_matrix(2, &mut rng),
            random_matrix(4, &mut rng),
        );
        let lhs = &a.kron(&b).unwrap() * &cc.kron(&d).unwrap();
        let rhs = (&a * &cc).kron(&(&b * &d)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn kron_refuses_oversized_registers() {
        let big = Operator::identity(1 << 6);
        let err = big.kron(&big).unwrap_err();
        assert!(matches!(
            err,
            OperatorError::RegisterTooLarge {
                dim: 4096,
                max_qubits: 10
            }
        ));
        assert!(big.kron_with_limit(&big, 12).is_ok());
    }

    #[test]
    fn pauli_x_quarter_turn() {
        let u = Pauli::X.matrix().expm_hermitian(std::f64::consts::FRAC_PI_2).unwrap();
        let expected = Operator::from_row_slice(2, &[ZERO, -I, -I, ZERO]).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_time_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        assert!(h.expm_hermitian(0.0).unwrap().max_abs_diff(&Operator::identity(8)) < 1e-12);
    }

    #[test]
    fn diagonal_exponential() {
        let (a, b, t) = (0.7, -2.3, 1.9);
        let h = Operator::diagonal(&[c(a, 0.0), c(b, 0.0)]);
        let u = h.expm_hermitian(t).unwrap();
        let expected = Operator::diagonal(&[(-I * a * t).exp(), (-I * b * t).exp()]);
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn exponential_rejects_non_hermitian() {
        let a = Operator::from_row_slice(2, &[ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(a.expm_hermitian(1.0), Err(OperatorError::NotHermitian { .. })));
    }

    #[test]
    fn exponential_matches_taylor_series() {
        // independent route: truncated power series of a small-norm generator
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_hermitian(4, &mut rng).scale_real(0.1);
        let t = 0.8;
        let gen = h.scale(-I * t);
        let mut term = Operator::identity(4);
        let mut sum = Operator::identity(4);
        for k in 1..30 {
            term = (&term * &gen).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        assert!(h.expm_hermitian(t).unwrap().max_abs_diff(&sum) < 1e-13);
    }

    #[test]
    fn partial_trace_examples() {
        let zi = pauli("ZI");
        assert_eq!(zi.partial_trace(&[0], 2).unwrap(), pauli("Z").scale_real(2.0));
        assert!(zi.partial_trace(&[1], 2).unwrap().max_abs() < 1e-15);
        assert!(matches!(
            zi.partial_trace(&[2], 2),
            Err(OperatorError::QubitOutOfRange { index: 2, n_qubits: 2 })
        ));
        assert!(zi.partial_trace(&[0], 3).is_err());
    }

    /// Double-loop reference: ρ_A[a,a'] = Σ_b ρ[(a,b),(a',b)] for two qubits.
    fn partial_trace_two_qubit_oracle(x: &Operator, keep_first: bool) -> Operator {
        Operator::from_fn(2, |a, ap| {
            let mut acc = ZERO;
            for b in 0..2 {
                let (r, col) = if keep_first {
                    (2 * a + b, 2 * ap + b)
                } else {
                    (2 * b + a, 2 * b + ap)
                };
                acc += x.get(r, col);
            }
            acc
        })
    }

    #[test]
    fn partial_trace_matches_index_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_hermitian(4, &mut rng);
        let first = rho.partial_trace(&[0], 2).unwrap();
        let second = rho.partial_trace(&[1], 2).unwrap();
        assert!(first.max_abs_diff(&partial_trace_two_qubit_oracle(&rho, true)) < 1e-14);
        assert!(second.max_abs_diff(&partial_trace_two_qubit_oracle(&rho, false)) < 1e-14);
    }

    #[test]
    fn partial_trace_kron_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(4, &mut rng);
        let b = random_matrix(2, &mut rng);
        let ab = a.kron(&b).unwrap();
        let reduced = ab.partial_trace(&[0, 1], 3).unwrap();
        assert!(reduced.max_abs_diff(&a.scale(b.trace())) < 1e-10);
        let scalar = ab.partial_trace(&[], 3).unwrap();
        assert_eq!(scalar.dim(), 1);
        assert!((scalar.get(0, 0) - ab.trace()).norm() < 1e-10);
        let all = ab.partial_trace(&[2, 0, 1], 3).unwrap();
        assert!(all.max_abs_diff(&ab) < 1e-15);
    }

    #[test]
    fn expectation_values() {
        let zero = PureState::basis(2, 0);
        assert_abs_diff_eq!(zero.expectation(&pauli("Z")).unwrap(), 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        assert_abs_diff_eq!(plus.expectation(&pauli("Z")).unwrap(), 0.0, epsilon = 1e-15);
        let all_zero = PureState::from_bits("0000").unwrap();
        assert_abs_diff_eq!(all_zero.expectation(&pauli("IIIZ")).unwrap(), 1.0);
    }

    #[test]
    fn expectation_errors() {
        let zero = PureState::basis(2, 0);
        assert!(matches!(
            zero.expectation(&pauli("ZZ")),
            Err(OperatorError::DimensionMismatch { .. })
        ));
        let plus_i = PureState::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let non_hermitian = Operator::from_row_slice(2, &[ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(
            plus_i.expectation(&non_hermitian),
            Err(OperatorError::ImaginaryResidue(_))
        ));
        assert!(PureState::new(vec![ONE, ONE]).is_err());
    }

    #[test]
    fn operator_norm_of_pauli_and_scaled_identity() {
        assert_abs_diff_eq!(pauli("XZ").operator_norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            Operator::identity(4).scale_real(3.0).operator_norm(),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn integer_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(4, &mut rng);
        let u = h.expm_hermitian(0.3).unwrap();
        let direct = h.expm_hermitian(0.3 * 7.0).unwrap();
        assert!(u.pow(7).max_abs_diff(&direct) < COMPOSED_TOL);
        assert_eq!(u.pow(0), Operator::identity(4));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn evolutions_compose(seed in any::<u64>(), s in -10.0f64..10.0, t in -10.0f64..10.0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hermitian(8, &mut rng);
                let eig = HermitianEigen::new(&h).unwrap();
                let us = eig.evolution(s);
                let ut = eig.evolution(t);
                prop_assert!(us.is_unitary(UNITARY_TOL));
                prop_assert!((&us * &ut).max_abs_diff(&eig.evolution(s + t)) < COMPOSED_TOL);
            }

            #[test]
            fn partial_trace_preserves_trace(seed in any::<u64>(), mask in 0usize..8) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = random_matrix(8, &mut rng);
                let keep: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 1).collect();
                let reduced = x.partial_trace(&keep, 3).unwrap();
                prop_assert_eq!(reduced.dim(), 1 << keep.len());
                prop_assert!((reduced.trace() - x.trace()).norm() < 1e-12);
            }
        }
    }
}
