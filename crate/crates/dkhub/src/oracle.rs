//! Brute-force fermionic reference in the occupation-number basis.
//!
//! Basis state bit `j` is the occupation of spinless mode `j`, with modes in
//! lattice order. Fermionic signs come from the Jordan-Wigner ordering over
//! those modes and never touch the encoded circuits.

use std::fmt;

use dkhub_core::model::SpinlessLattice;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default mode cap.
pub const DEFAULT_MODE_CAP: usize = 16;
/// Largest dimension handed to the dense eigensolver.
pub const DENSE_DIM_CAP: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooManyModes { modes: usize, cap: usize },
    DimensionTooLarge { dim: usize, cap: usize },
    StateSize { expected: usize, got: usize },
    ModeOutOfRange(usize),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyModes { modes, cap } => write!(f, "{modes} modes exceed the oracle cap of {cap}"),
            OracleError::DimensionTooLarge { dim, cap } => {
                write!(f, "dimension {dim} exceeds the dense cap of {cap}")
            }
            OracleError::StateSize { expected, got } => write!(f, "state has {got} amplitudes, expected {expected}"),
            OracleError::ModeOutOfRange(m) => write!(f, "mode {m} out of range"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Occupation basis over `n_modes` spinless modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    pub n_modes: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize, cap: usize) -> Result<Self, OracleError> {
        if n_modes > cap {
            return Err(OracleError::TooManyModes { modes: n_modes, cap });
        }
        Ok(FockSpace { n_modes })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    /// `c_m |s⟩ = sign |s'⟩`, or `None` if mode `m` is empty.
    pub fn annihilate(&self, s: usize, m: usize) -> Option<(usize, f64)> {
        if s >> m & 1 == 0 {
            return None;
        }
        Some((s ^ (1 << m), jw_sign(s, m)))
    }

    /// `c†_m |s⟩ = sign |s'⟩`, or `None` if mode `m` is full.
    pub fn create(&self, s: usize, m: usize) -> Option<(usize, f64)> {
        if s >> m & 1 == 1 {
            return None;
        }
        Some((s | (1 << m), jw_sign(s, m)))
    }

    /// Basis index of an occupation pattern.
    pub fn index_of(&self, occupied: &[bool]) -> usize {
        occupied.iter().enumerate().filter(|(_, &o)| o).fold(0, |s, (m, _)| s | 1 << m)
    }

    /// Normalised basis vector for `occupied`.
    pub fn product_state(&self, occupied: &[bool]) -> Result<Vec<Complex64>, OracleError> {
        if occupied.len() != self.n_modes {
            return Err(OracleError::StateSize { expected: self.n_modes, got: occupied.len() });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[self.index_of(occupied)] = Complex64::new(1.0, 0.0);
        Ok(v)
    }
}

/// `(−1)^(number of occupied modes below m)`.
fn jw_sign(s: usize, m: usize) -> f64 {
    if (s & ((1 << m) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Real Hamiltonian in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    pub space: FockSpace,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.rows[r].iter().filter(|&&(k, _)| k == c).map(|&(_, v)| v).sum()
    }

    pub fn n_nonzero(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Largest `|H_rc − H_cr|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                worst = worst.max((v - self.entry(c, r)).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, h)| v[c] * h).sum()).collect()
    }

    /// `‖H‖_∞` bound used to size Taylor steps.
    fn row_bound(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Dense copy restricted to basis states with `n` particles, if given.
    pub fn dense(&self, particles: Option<u32>) -> Result<(Vec<usize>, DMatrix<f64>), OracleError> {
        let basis: Vec<usize> = (0..self.dim()).filter(|s| particles.is_none_or(|n| s.count_ones() == n)).collect();
        if basis.len() > DENSE_DIM_CAP {
            return Err(OracleError::DimensionTooLarge { dim: basis.len(), cap: DENSE_DIM_CAP });
        }
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &s) in basis.iter().enumerate() {
            pos[s] = k;
        }
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for (k, &s) in basis.iter().enumerate() {
            for &(c, v) in &self.rows[s] {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] += v;
                }
            }
        }
        Ok((basis, m))
    }

    /// Ascending eigenvalues, optionally within a particle-number sector.
    pub fn eigenvalues(&self, particles: Option<u32>) -> Result<Vec<f64>, OracleError> {
        let (_, m) = self.dense(particles)?;
        let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        Ok(e)
    }
}

/// Hoppings `t (c†_a c_b + h.c.)` and interactions `U n_a n_b` of the lattice.
pub fn build_hamiltonian(l: &SpinlessLattice, cap: usize) -> Result<SparseHamiltonian, OracleError> {
    let space = FockSpace::new(l.n_sites(), cap)?;
    let mut rows = Vec::with_capacity(space.dim());
    for s in 0..space.dim() {
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut diag = 0.0;
        for h in &l.hoppings {
            let (a, b) = h.ends();
            for (x, y) in [(a, b), (b, a)] {
                // ⟨s'| c†_x c_y |s⟩
                if let Some((mid, s1)) = space.annihilate(s, y) {
                    if let Some((out, s2)) = space.create(mid, x) {
                        row.push((out, h.amplitude * s1 * s2));
                    }
                }
            }
        }
        for t in &l.interactions {
            if s >> t.a & 1 == 1 && s >> t.b & 1 == 1 {
                diag += t.amplitude;
            }
        }
        if diag != 0.0 {
            row.push((s, diag));
        }
        rows.push((s, row));
    }
    // Rows are built as columns of H applied to |s⟩; transpose into rows.
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); space.dim()];
    for (s, col) in rows {
        for (out, v) in col {
            by_row[out].push((s, v));
        }
    }
    for r in &mut by_row {
        r.sort_by_key(|&(c, _)| c);
    }
    Ok(SparseHamiltonian { space, rows: by_row })
}

/// Total number operator applied to a state.
pub fn number_operator(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().enumerate().map(|(s, a)| a * s.count_ones() as f64).collect()
}

fn check_state(h: &SparseHamiltonian, v: &[Complex64]) -> Result<(), OracleError> {
    if v.len() != h.dim() {
        return Err(OracleError::StateSize { expected: h.dim(), got: v.len() });
    }
    Ok(())
}

/// `exp(−iHt) |ψ⟩` by a chunked Taylor series on the sparse matrix.
pub fn exact_evolve(h: &SparseHamiltonian, state: &[Complex64], t: f64) -> Result<Vec<Complex64>, OracleError> {
    check_state(h, state)?;
    let bound = h.row_bound();
    let mut psi = state.to_vec();
    if bound == 0.0 || t == 0.0 {
        return Ok(psi);
    }
    let chunks = (t.abs() * bound / 2.0).ceil().max(1.0) as usize;
    let dt = t / chunks as f64;
    for _ in 0..chunks {
        let mut acc = psi.clone();
        let mut v = psi;
        for k in 1..60 {
            let f = Complex64::new(0.0, -dt / k as f64);
            v = h.apply(&v).into_iter().map(|a| a * f).collect();
            acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
            if v.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-34 {
                break;
            }
        }
        psi = acc;
    }
    Ok(psi)
}

/// `⟨ψ| n_m |ψ⟩` for every mode.
pub fn densities(space: FockSpace, v: &[Complex64]) -> Vec<f64> {
    (0..space.n_modes)
        .map(|m| v.iter().enumerate().filter(|(s, _)| s >> m & 1 == 1).map(|(_, a)| a.norm_sqr()).sum())
        .collect()
}

/// `⟨ψ| n_a n_b |ψ⟩`.
pub fn density_density(v: &[Complex64], a: usize, b: usize) -> f64 {
    v.iter().enumerate().filter(|(s, _)| s >> a & 1 == 1 && s >> b & 1 == 1).map(|(_, x)| x.norm_sqr()).sum()
}

fn apply_annihilate(space: FockSpace, v: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (s, a) in v.iter().enumerate() {
        if let Some((t, sign)) = space.annihilate(s, m) {
            out[t] += a * sign;
        }
    }
    out
}

/// `G_jk(t) = i ⟨ψ| e^{iHt} c†_j e^{−iHt} c_k |ψ⟩`.
pub fn exact_greens(
    h: &SparseHamiltonian,
    initial: &[Complex64],
    j: usize,
    k: usize,
    times: &[f64],
) -> Result<Vec<Complex64>, OracleError> {
    check_state(h, initial)?;
    let space = h.space;
    for m in [j, k] {
        if m >= space.n_modes {
            return Err(OracleError::ModeOutOfRange(m));
        }
    }
    let phi0 = apply_annihilate(space, initial, k);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let psi_t = exact_evolve(h, initial, t)?;
        let phi_t = exact_evolve(h, &phi0, t)?;
        // ⟨ψ(t)| c†_j |φ(t)⟩ = ⟨c_j ψ(t) | φ(t)⟩
        let cj = apply_annihilate(space, &psi_t, j);
        let overlap: Complex64 = cj.iter().zip(&phi_t).map(|(a, b)| a.conj() * b).sum();
        out.push(Complex64::new(0.0, 1.0) * overlap);
    }
    Ok(out)
}
