//! Phase-exact Pauli strings in symplectic form.
//!
//! A [`PauliString`] is `i^k · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` where each letter is
//! stored as an `(x, z)` bit pair: `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`,
//! `Y = (1,1)`. Letters are the usual Hermitian Paulis, so the phase exponent
//! alone decides Hermiticity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

/// Default qubit cap for [`dense_matrix`].
pub const DENSE_CAP: usize = 14;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    /// `(x, z)` bits of the letter.
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    pub const fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Errors raised by Pauli-string operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PauliError {
    /// Operands act on different numbers of qubits.
    SizeMismatch { left: usize, right: usize },
    /// A dense matrix was requested above the configured cap.
    CapExceeded { n_qubits: usize, cap: usize },
    /// Qubit index out of range.
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    /// Malformed text form.
    Parse(String),
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PauliError::SizeMismatch { left, right } => {
                write!(f, "qubit count mismatch: {left} vs {right}")
            }
            PauliError::CapExceeded { n_qubits, cap } => {
                write!(f, "dense matrix on {n_qubits} qubits exceeds cap of {cap}")
            }
            PauliError::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits} qubits")
            }
            PauliError::Parse(msg) => write!(f, "invalid Pauli string: {msg}"),
        }
    }
}

impl core::error::Error for PauliError {}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

fn count_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Phase-tracked n-qubit Pauli operator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    /// Identity on `n_qubits` qubits.
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliString { n_qubits, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// A single letter on qubit `q`.
    pub fn single(n_qubits: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n_qubits);
        p.set_letter(q, letter);
        p
    }

    /// Builds a string from `(qubit, letter)` pairs. Repeated qubits are
    /// multiplied in order, so the phase stays exact.
    pub fn from_letters(n_qubits: usize, letters: &[(usize, Letter)]) -> Self {
        let mut p = Self::identity(n_qubits);
        for &(q, l) in letters {
            p = p.mul_ref(&Self::single(n_qubits, q, l));
        }
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Exponent `k` of the global phase `i^k`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k & 3;
        self
    }

    /// Multiplies the phase by `i^k`.
    pub fn times_i(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) & 3;
        self
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Overwrites the letter on `q` without touching the phase.
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        assert!(q < self.n_qubits, "qubit {q} out of range for {} qubits", self.n_qubits);
        let (xb, zb) = letter.bits();
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// True when every letter is `I`, whatever the phase.
    pub fn has_trivial_masks(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True for the identity operator with phase `+1`.
    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.has_trivial_masks()
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// True iff the string is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Product `self · other`; panics on size mismatch.
    pub fn mul_ref(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        // Write each operand as i^(k + #Y) X^x Z^z, multiply, and convert back.
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for i in 0..self.x.len() {
            x.push(self.x[i] ^ other.x[i]);
            z.push(self.z[i] ^ other.z[i]);
        }
        let ya = count_and(&self.x, &self.z);
        let yb = count_and(&other.x, &other.z);
        let swap = count_and(&self.z, &other.x);
        let yc = count_and(&x, &z);
        let phase = (self.phase as u32 + other.phase as u32 + ya + yb + 2 * swap + 4 - yc % 4) % 4;
        PauliString { n_qubits: self.n_qubits, x, z, phase: phase as u8 }
    }

    /// Symplectic commutation test; panics on size mismatch.
    pub fn commutes_ref(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        (count_and(&self.x, &other.z) + count_and(&self.z, &other.x)) % 2 == 0
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (4 - p.phase) & 3;
        p
    }

    /// Relabels qubits: qubit `q` moves to `map[q]` in an `n_new`-qubit string.
    pub fn remap(&self, n_new: usize, map: &[usize]) -> Result<PauliString, PauliError> {
        if map.len() != self.n_qubits {
            return Err(PauliError::SizeMismatch { left: map.len(), right: self.n_qubits });
        }
        let mut p = PauliString::identity(n_new);
        for (q, &to) in map.iter().enumerate() {
            let l = self.letter(q);
            if l != Letter::I {
                if to >= n_new {
                    return Err(PauliError::QubitOutOfRange { qubit: to, n_qubits: n_new });
                }
                p.set_letter(to, l);
            }
        }
        p.phase = self.phase;
        Ok(p)
    }

    /// Action on a computational basis state: returns `(image, amplitude)`
    /// with `P|c⟩ = amplitude · |image⟩`.
    pub fn apply_to_basis(&self, c: u64) -> (u64, Complex64) {
        debug_assert!(self.n_qubits <= 64);
        let xm = self.x.first().copied().unwrap_or(0);
        let zm = self.z.first().copied().unwrap_or(0);
        let ny = (xm & zm).count_ones();
        let minus = (zm & c).count_ones();
        let k = (self.phase as u32 + ny + 2 * minus) % 4;
        (c ^ xm, I_POW[k as usize])
    }
}

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `i^k` as a complex number.
pub fn i_pow(k: u8) -> Complex64 {
    I_POW[(k & 3) as usize]
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        f.write_str(prefix)?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let letters: Vec<Letter> = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| PauliError::Parse(alloc::format!("unexpected character {c:?}"))))
            .collect::<Result<_, _>>()?;
        let mut p = PauliString::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            p.set_letter(q, l);
        }
        p.phase = phase;
        Ok(p)
    }
}

/// Product `a · b` with exact phase.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString, PauliError> {
    if a.n_qubits != b.n_qubits {
        return Err(PauliError::SizeMismatch { left: a.n_qubits, right: b.n_qubits });
    }
    Ok(a.mul_ref(b))
}

/// True iff `a·b == b·a`.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool, PauliError> {
    if a.n_qubits != b.n_qubits {
        return Err(PauliError::SizeMismatch { left: a.n_qubits, right: b.n_qubits });
    }
    Ok(a.commutes_ref(b))
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        DenseMatrix { dim: self.dim, data }
    }

    pub fn scale(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|a| a.norm() <= tol)
    }
}

/// Dense `2^n × 2^n` matrix of `p` under the default cap.
pub fn dense_matrix(p: &PauliString) -> Result<DenseMatrix, PauliError> {
    dense_matrix_capped(p, DENSE_CAP)
}

/// Dense matrix with an explicit qubit cap. Qubit `q` is bit `q` of the
/// basis index (little-endian).
pub fn dense_matrix_capped(p: &PauliString, cap: usize) -> Result<DenseMatrix, PauliError> {
    if p.n_qubits > cap {
        return Err(PauliError::CapExceeded { n_qubits: p.n_qubits, cap });
    }
    let dim = 1usize << p.n_qubits;
    let mut m = DenseMatrix::zeros(dim);
    for c in 0..dim as u64 {
        let (r, amp) = p.apply_to_basis(c);
        m.set(r as usize, c as usize, amp);
    }
    Ok(m)
}

impl core::ops::Neg for PauliString {
    type Output = PauliString;

    fn neg(self) -> PauliString {
        self.times_i(2)
    }
}
